"""Gaussian states in covariance form, lossy channels and two-mode fidelity.

Convention: quadratures ordered ``(x1, p1, x2, p2, ...)`` with vacuum variance
1/2, so ``[Q_j, Q_k] = i Omega_jk``. The prefactors in
:func:`fidelity_two_mode` (16, I/4, iOmega/2) only hold in this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import NonPhysicalStateError, NonzeroDisplacementError, StepTooLargeError
from .model import Fisher2, Scenario

PHYSICALITY_TOL = 1e-10
DEFAULT_STEP = 1e-3
STEP_RESIDUAL_TOL = 1e-4
FIDELITY_DPS = 40


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal ``Omega`` with ``[[0, 1], [-1, 0]]`` blocks."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    cov: np.ndarray
    disp: np.ndarray | None = None

    def __post_init__(self):
        cov = _frozen(self.cov)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be 2n x 2n, got shape {cov.shape}")
        if np.abs(cov - cov.T).max() > 1e-12:
            raise ValueError("covariance matrix not symmetric")
        disp = np.zeros(cov.shape[0]) if self.disp is None else self.disp
        disp = _frozen(disp)
        if disp.shape != (cov.shape[0],):
            raise ValueError("displacement length does not match covariance")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "disp", disp)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def uncertainty_eigenvalue(self) -> float:
        """Smallest eigenvalue of ``cov + i Omega / 2`` (>= 0 iff physical)."""
        herm = self.cov + 0.5j * symplectic_form(self.n_modes)
        return float(np.linalg.eigvalsh(herm).min())

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        return self.uncertainty_eigenvalue() >= -tol

    def purity(self) -> float:
        return 1.0 / math.sqrt(np.linalg.det(2 * self.cov))


def vacuum(n_modes: int) -> GaussianState:
    return GaussianState(0.5 * np.eye(2 * n_modes))


def tmsv_state(n: float) -> GaussianState:
    """Two-mode squeezed vacuum with ``n`` mean photons per mode (real squeezing)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    v = 0.5 + n
    c = math.sqrt(n * (n + 1))  # (1/2) sinh 2r with sinh^2 r = n
    return GaussianState(
        [
            [v, 0, -c, 0],
            [0, v, 0, c],
            [-c, 0, v, 0],
            [0, c, 0, v],
        ]
    )


def apply_loss(g: GaussianState, mode: int, tau: float) -> GaussianState:
    """Send ``mode`` through a pure-loss channel of transmittance ``tau``."""
    if not 0 <= mode < g.n_modes:
        raise IndexError(f"mode {mode} out of range for {g.n_modes}-mode state")
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau!r}")
    scale = np.ones(2 * g.n_modes)
    scale[2 * mode : 2 * mode + 2] = math.sqrt(tau)
    cov = scale[:, None] * g.cov * scale[None, :]
    block = slice(2 * mode, 2 * mode + 2)
    cov[block, block] += 0.5 * (1 - tau) * np.eye(2)
    return GaussianState(cov, scale * g.disp)


def lossy_tmsv(s: Scenario, n: float) -> GaussianState:
    """Output of a twin beam whose modes pass the L and R arms."""
    g = apply_loss(tmsv_state(n), 0, s.tau_l)
    return apply_loss(g, 1, s.tau_r)


def _check_input(g: GaussianState) -> None:
    if g.n_modes != 2:
        raise ValueError("fidelity_two_mode needs two-mode states")
    if np.abs(g.disp).max() > 1e-12:
        raise NonzeroDisplacementError("fidelity_two_mode assumes zero displacement")
    eig = g.uncertainty_eigenvalue()
    if eig < -PHYSICALITY_TOL:
        raise NonPhysicalStateError(f"uncertainty relation violated (eigenvalue {eig:.3e})")


def fidelity_two_mode(a: GaussianState, b: GaussianState, dps: int = FIDELITY_DPS) -> float:
    """Uhlmann fidelity of two zero-mean two-mode Gaussian states.

    The determinants are evaluated with ``dps`` decimal digits: near pure
    states both ``lambda`` and ``s^2 - delta`` vanish and their square roots
    would otherwise amplify double-precision rounding to ~1e-8.
    """
    _check_input(a)
    _check_input(b)
    with mp.workdps(dps):
        omega = mp.matrix(symplectic_form(2).tolist())
        va, vb = mp.matrix(a.cov.tolist()), mp.matrix(b.cov.tolist())
        delta = mp.det(va + vb)
        gamma = 16 * mp.det(omega * va * omega * vb - mp.eye(4) / 4)
        lam = 16 * mp.det(va + 0.5j * omega) * mp.det(vb + 0.5j * omega)
        if abs(mp.im(lam)) > 1e-10 * max(1, abs(mp.re(lam))):
            raise NonPhysicalStateError(f"complex residue {float(mp.im(lam)):.3e} in fidelity")
        s = mp.sqrt(max(gamma, 0)) + mp.sqrt(max(mp.re(lam), 0))
        # (s - sqrt(s^2 - delta))^-1 rewritten to avoid the subtraction
        f = float((s + mp.sqrt(max(s * s - delta, 0))) / delta)
    if f > 1 + 1e-9 or f < -1e-9:
        raise ArithmeticError(f"fidelity {f} outside [0, 1]")
    return min(max(f, 0.0), 1.0)


def _bures_quadratic(f: float) -> float:
    # 4 D_B^2 = 8 (1 - sqrt F), quadratic in the parameter shift
    return 8.0 * (1.0 - math.sqrt(f))


def _hessian_2d(g, h: float) -> np.ndarray:
    """Second-order coefficients of ``g(dl, dr) ~ dT^T H dT`` by central stencils."""
    out = np.empty((2, 2))
    out[0, 0] = (g(h, 0) + g(-h, 0)) / (2 * h * h)
    out[1, 1] = (g(0, h) + g(0, -h)) / (2 * h * h)
    out[0, 1] = out[1, 0] = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (8 * h * h)
    return out


def _richardson(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    scale = np.abs(fine).max()
    if scale > 0 and np.abs(coarse - fine).max() > STEP_RESIDUAL_TOL * scale:
        raise StepTooLargeError(
            f"finite-difference estimate not converged: {coarse} vs {fine}"
        )
    return (4 * fine - coarse) / 3


def _check_interior(t: float, step: float) -> None:
    if not (step > 0 and t - step > 0 and t + step < 1):
        raise ValueError(f"T={t} +- step={step} leaves the open interval (0, 1)")


def qfim_from_fidelity(s: Scenario, n: float, step: float = DEFAULT_STEP) -> Fisher2:
    """Numerical QFIM of the lossy twin-beam output from fidelity expansions.

    Uses the four-point stencils at steps ``h`` and ``h/2`` followed by one
    Richardson extrapolation.
    """
    _check_interior(s.t_l, step)
    _check_interior(s.t_r, step)
    ref = lossy_tmsv(s, n)

    def g(dl, dr):
        shifted = lossy_tmsv(s.with_t(s.t_l + dl, s.t_r + dr), n)
        return _bures_quadratic(fidelity_two_mode(ref, shifted))

    h = _richardson(_hessian_2d(g, step), _hessian_2d(g, step / 2))
    return Fisher2.from_matrix(0.5 * (h + h.T))


def ancilla_tmsv(t: float, eta: float, n: float) -> GaussianState:
    """Twin beam with loss ``eta * t`` on the signal mode; ancilla kept lossless."""
    return apply_loss(tmsv_state(n), 0, eta * t)


def qfim_tmsv_ancilla(
    t: float, eta: float, n: float, step: float = DEFAULT_STEP
) -> float:
    """Single-parameter QFIM for ``t`` in the ancilla-assisted twin-beam scheme."""
    _check_interior(t, step)
    ref = ancilla_tmsv(t, eta, n)

    def second(h):
        up = _bures_quadratic(fidelity_two_mode(ref, ancilla_tmsv(t + h, eta, n)))
        down = _bures_quadratic(fidelity_two_mode(ref, ancilla_tmsv(t - h, eta, n)))
        return np.array([[(up + down) / (2 * h * h)]])

    return float(_richardson(second(step), second(step / 2))[0, 0])


def random_symplectic(rng: np.random.Generator, n_modes: int, max_squeeze: float = 1.0):
    """Random symplectic matrix ``O1 Z O2`` (passive, squeezing, passive)."""
    from scipy.stats import unitary_group

    perm = np.array([[2 * i, 2 * i + 1] for i in range(n_modes)]).T.ravel()
    back = np.argsort(perm)

    def passive():
        u = unitary_group.rvs(n_modes, random_state=rng) if n_modes > 1 else np.exp(
            2j * np.pi * rng.random()
        ) * np.eye(1)
        x, y = u.real, u.imag
        block = np.block([[x, -y], [y, x]])  # (x..., p...) ordering
        return block[np.ix_(back, back)]

    r = rng.uniform(-max_squeeze, max_squeeze, n_modes)
    z = np.diag(np.ravel(np.column_stack([np.exp(-r), np.exp(r)])))
    return passive() @ z @ passive()


def random_state(
    rng: np.random.Generator, n_modes: int = 2, pure: bool = False, max_thermal: float = 2.0
) -> GaussianState:
    """Random zero-mean physical Gaussian state."""
    s = random_symplectic(rng, n_modes)
    nu = np.full(n_modes, 0.5) if pure else 0.5 + rng.uniform(0, max_thermal, n_modes)
    cov = s @ np.diag(np.repeat(nu, 2)) @ s.T
    return GaussianState(0.5 * (cov + cov.T))
