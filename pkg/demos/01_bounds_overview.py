"""Precision limits for measuring T_L - T_R with a fixed photon budget.

Walks through the classical benchmark, the ultimate quantum limit and the
twin-beam bound for one scenario, then shows how the optimal split of photons
between the two arms moves with the arm transmittances.
"""

from cdsense import bounds
from cdsense.model import PhotonBudget, Scenario

n_tot = 2.0
s = Scenario.balanced(0.5, 0.45, 0.8)
print(f"scenario: {s}")

# %% classical benchmark: coherent light at the best input ratio
cb = bounds.classical_benchmark(s, n_tot)
print(f"classical benchmark     {cb:.6f}  (ratio {bounds.optimal_ratio_classical(s):.4f})")

# %% ultimate quantum limit: the best any input state can do with this loss
uql = bounds.uql_optimal(s, n_tot)
print(f"ultimate quantum limit  {uql:.6f}  (ratio {bounds.optimal_ratio_uql(s):.4f})")

# %% twin beam sent directly through both arms (n_tot / 2 photons per mode)
tmsv = bounds.var_tmsv_direct(s, n_tot / 2)
print(f"twin beam, direct       {tmsv:.6f}")
print(f"twin beam, n -> inf     {bounds.var_tmsv_large_n(s):.6f}")

# %% enhancement over the classical benchmark
print(f"CB / UQL = {cb / uql:.4f},  CB / twin beam = {cb / tmsv:.4f}")

# %% the enhancement is capped by 1 / (1 - eta T) for symmetric arms
for eta in (0.5, 0.8, 0.95):
    sym = Scenario.balanced(0.9, 0.9, eta)
    print(f"eta={eta:4}: enhancement {bounds.enhancement_factor(sym, n_tot):.3f}")

# %% fixed 50/50 split versus the optimum when the arms differ strongly
skew = Scenario.balanced(0.9, 0.1, 0.8)
half = PhotonBudget.from_ratio(n_tot, 0.5)
print(f"50/50 coherent {bounds.var_coherent(skew, half):.4f} vs optimal {bounds.classical_benchmark(skew, n_tot):.4f}")
