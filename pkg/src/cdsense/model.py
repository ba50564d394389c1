"""Shared domain types and the projected Cramér-Rao variance.

All bounds in the package are per-shot: the repetition count is factored out
and only reintroduced by :mod:`cdsense.estimation`.

Divergent quantities (zero transmittance, ``eta * T == 1``) are carried as
``math.inf``, never NaN. ``UNESTIMABLE`` is the infinite variance returned when
the combination of interest is not covered by the Fisher information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNESTIMABLE = math.inf

DEFAULT_SUPPORT_TOL = 1e-12


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class Scenario:
    """Transmittances of the two polarization arms.

    ``t_l``/``t_r`` are the analyte transmittances, ``eta_l``/``eta_r`` the
    excess-loss transmittances (channel, detector). Arm ``j`` transmits a
    photon with probability ``eta_j * t_j``.
    """

    t_l: float
    t_r: float
    eta_l: float = 1.0
    eta_r: float = 1.0

    def __post_init__(self):
        for name in ("t_l", "t_r", "eta_l", "eta_r"):
            value = float(getattr(self, name))
            _check_unit(name, value)
            object.__setattr__(self, name, value)

    @property
    def tau_l(self) -> float:
        return self.eta_l * self.t_l

    @property
    def tau_r(self) -> float:
        return self.eta_r * self.t_r

    @property
    def gamma_minus(self) -> float:
        """Transmission circular dichroism ``t_l - t_r``."""
        return self.t_l - self.t_r

    @classmethod
    def balanced(cls, t_l: float, t_r: float, eta: float) -> "Scenario":
        return cls(t_l, t_r, eta, eta)

    def swapped(self) -> "Scenario":
        return Scenario(self.t_r, self.t_l, self.eta_r, self.eta_l)

    def with_t(self, t_l: float, t_r: float) -> "Scenario":
        return Scenario(t_l, t_r, self.eta_l, self.eta_r)


@dataclass(frozen=True)
class PhotonBudget:
    """Mean photon numbers sent into the two signal modes."""

    n_l: float
    n_r: float

    def __post_init__(self):
        for name in ("n_l", "n_r"):
            value = float(getattr(self, name))
            if not value >= 0.0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def n_tot(self) -> float:
        return self.n_l + self.n_r

    @property
    def ratio(self) -> float:
        if self.n_tot <= 0:
            raise ValueError("ratio undefined for an empty budget")
        return self.n_l / self.n_tot

    @classmethod
    def from_ratio(cls, n_tot: float, ratio: float) -> "PhotonBudget":
        _check_unit("ratio", ratio)
        return cls(ratio * n_tot, (1.0 - ratio) * n_tot)


@dataclass(frozen=True)
class Fisher2:
    """Symmetric PSD 2x2 Fisher information over ``(t_l, t_r)``.

    Diagonal entries may be ``inf`` (the parameter is known exactly); the
    off-diagonal must stay finite.
    """

    h_ll: float
    h_lr: float
    h_rl: float
    h_rr: float

    def __post_init__(self):
        vals = [float(v) for v in (self.h_ll, self.h_lr, self.h_rl, self.h_rr)]
        if any(math.isnan(v) for v in vals):
            raise ValueError("Fisher matrix entries must not be NaN")
        h_ll, h_lr, h_rl, h_rr = vals
        if math.isinf(h_lr) or math.isinf(h_rl):
            raise ValueError("off-diagonal Fisher entries must be finite")
        if abs(h_lr - h_rl) > 1e-12:
            raise ValueError(f"Fisher matrix not symmetric: {h_lr} != {h_rl}")
        if h_ll < -1e-12 or h_rr < -1e-12:
            raise ValueError("Fisher matrix not positive semidefinite")
        if math.isfinite(h_ll) and math.isfinite(h_rr):
            if np.linalg.eigvalsh(np.array([[h_ll, h_lr], [h_lr, h_rr]])).min() < -1e-12:
                raise ValueError("Fisher matrix not positive semidefinite")
        for name, v in zip(("h_ll", "h_lr", "h_rl", "h_rr"), vals):
            object.__setattr__(self, name, v)

    @classmethod
    def from_matrix(cls, m) -> "Fisher2":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        off = 0.5 * (m[0, 1] + m[1, 0])
        if abs(m[0, 1] - m[1, 0]) > 1e-12:
            raise ValueError("Fisher matrix not symmetric")
        return cls(m[0, 0], off, off, m[1, 1])

    @classmethod
    def diag(cls, h_ll: float, h_rr: float) -> "Fisher2":
        return cls(h_ll, 0.0, 0.0, h_rr)

    @classmethod
    def zeros(cls) -> "Fisher2":
        return cls(0.0, 0.0, 0.0, 0.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.h_ll, self.h_lr], [self.h_rl, self.h_rr]])

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.h_ll) and math.isfinite(self.h_rr)


@dataclass(frozen=True)
class CombinationVector:
    """Weights ``n`` of the estimated combination ``n . (t_l, t_r)``."""

    n_l: float = 1.0
    n_r: float = -1.0

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.n_l, self.n_r], dtype=float)


TCD = CombinationVector()


def invert_on_support(f: Fisher2, tol: float = DEFAULT_SUPPORT_TOL) -> Fisher2:
    """Moore-Penrose inverse keeping eigenvalues above ``tol * max eigenvalue``.

    An infinite diagonal entry is the limit of full information on that
    parameter, so its row and column of the inverse vanish.
    """
    inf_l, inf_r = math.isinf(f.h_ll), math.isinf(f.h_rr)
    if inf_l and inf_r:
        return Fisher2.zeros()
    if inf_l:
        return Fisher2.diag(0.0, 1.0 / f.h_rr if f.h_rr > 0 else 0.0)
    if inf_r:
        return Fisher2.diag(1.0 / f.h_ll if f.h_ll > 0 else 0.0, 0.0)

    w, v = np.linalg.eigh(f.matrix)
    top = w.max()
    if top <= 0:
        return Fisher2.zeros()
    keep = w > tol * top
    inv = (v[:, keep] / w[keep]) @ v[:, keep].T
    return Fisher2.from_matrix(0.5 * (inv + inv.T))


def var_gamma(
    f: Fisher2, n: CombinationVector = TCD, tol: float = DEFAULT_SUPPORT_TOL
) -> float:
    """Single-shot bound ``n^T F^+ n`` on the variance of ``n . T``.

    Returns :data:`UNESTIMABLE` when ``n`` has a component outside the
    support of ``f``.
    """
    vec = n.vector
    inf_l, inf_r = math.isinf(f.h_ll), math.isinf(f.h_rr)
    if inf_l or inf_r:
        # remaining finite direction carries the whole bound
        if inf_l and inf_r:
            return 0.0
        h, weight = (f.h_rr, vec[1]) if inf_l else (f.h_ll, vec[0])
        if weight == 0:
            return 0.0
        return weight**2 / h if h > 0 else UNESTIMABLE

    w, v = np.linalg.eigh(f.matrix)
    top = w.max()
    proj = v.T @ vec
    if top <= 0:
        return UNESTIMABLE if np.any(vec != 0) else 0.0
    keep = w > tol * top
    scale = max(np.linalg.norm(vec), 1.0)
    if np.any(np.abs(proj[~keep]) > 1e-9 * scale):
        return UNESTIMABLE
    return float(np.sum(proj[keep] ** 2 / w[keep]))
