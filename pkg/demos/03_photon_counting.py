"""Photon-number-resolving detection for the three probes.

For coherent and Fock inputs counting already extracts all the quantum
information; for the twin beam it does so only when T_L = T_R.
"""

from cdsense import bounds, pnrd
from cdsense.model import PhotonBudget, Scenario

s = Scenario.balanced(0.5, 0.45, 0.8)
b = PhotonBudget(1, 1)

coh = pnrd.coherent_pnrd(s, b)
print(f"coherent: {len(coh)} outcomes, mean counts {coh.mean_counts()}")
print(f"  CR {pnrd.cr_bound_gamma(coh):.8f}  QCR {bounds.var_coherent(s, b):.8f}")

fock = pnrd.fock_pnrd(s, 1, 1)
for outcome, p in zip(fock.support, fock.prob):
    print(f"  Fock |1,1> -> {outcome}: {p:.4f}")
print(f"  CR {pnrd.cr_bound_gamma(fock):.8f}  UQL {bounds.var_uql(s, b):.8f}")

# %% twin beam: counting versus the quantum bound across a cut of the plane
print("\n T_R    CR (counting)   QCR (twin beam)   UQL")
for t_r in (0.3, 0.4, 0.5, 0.6, 0.7):
    cut = Scenario.balanced(0.5, t_r, 0.8)
    d = pnrd.tmsv_direct_pnrd(cut, 1.0)
    print(
        f" {t_r:.1f}   {pnrd.cr_bound_gamma(d):.8f}      {bounds.var_tmsv_direct(cut, 1.0):.8f}"
        f"        {bounds.uql_optimal(cut, 2.0):.8f}"
    )
