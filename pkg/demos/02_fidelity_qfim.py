"""Quantum Fisher information of a lossy twin beam from state fidelities.

The closed-form matrix is checked against second derivatives of the Bures
distance between covariance matrices at neighbouring transmittances.
"""

import numpy as np

from cdsense import bounds, gaussian
from cdsense.model import Scenario

s = Scenario(0.5, 0.6, 0.8, 0.8)
n = 1.0

state = gaussian.lossy_tmsv(s, n)
print("output covariance matrix (vacuum variance 1/2):")
print(np.array2string(state.cov, precision=4))
print(f"purity {state.purity():.4f}, physical: {state.is_physical()}")

# %% fidelity between the state and a slightly shifted one
shifted = gaussian.lossy_tmsv(s.with_t(0.51, 0.6), n)
print(f"F(T_L = 0.50 vs 0.51) = {gaussian.fidelity_two_mode(state, shifted):.12f}")

# %% finite-difference QFIM against the closed form
numeric = gaussian.qfim_from_fidelity(s, n)
analytic = bounds.qfim_tmsv_direct(s, n)
print("numeric QFIM:\n", np.array2string(numeric.matrix, precision=9))
print("closed form:\n", np.array2string(analytic.matrix, precision=9))
print(f"max relative difference {np.max(np.abs(numeric.matrix / analytic.matrix - 1)):.2e}")

# %% keeping the idler mode lossless recovers the ultimate quantum limit
for t in (0.3, 0.7):
    got = gaussian.qfim_tmsv_ancilla(t, 0.8, n)
    print(f"ancilla scheme T={t}: {got:.8f}  vs  {0.8 * n / (t * (1 - 0.8 * t)):.8f}")
