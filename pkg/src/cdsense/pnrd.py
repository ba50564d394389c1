"""Photon-number-resolving detection statistics and their Fisher information.

Each probe yields a :class:`PnrdDistribution` over joint counts
``(m_L, m_R)`` together with analytic derivatives in ``T_L`` and ``T_R``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import CutoffTooSmallError
from .model import TCD, Fisher2, PhotonBudget, Scenario, var_gamma

TAIL_TOL = 1e-12
# the Fisher sum weights the Poisson tail by m^2, so truncate further out
POISSON_TAIL_TOL = 1e-16
PROB_FLOOR = 1e-300


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PnrdDistribution:
    """Joint count distribution, flattened in row-major ``(m_L, m_R)`` order.

    ``tail_mass`` is the probability dropped by truncating the support.
    """

    outcomes: np.ndarray
    prob: np.ndarray
    dprob_dtl: np.ndarray
    dprob_dtr: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        outcomes = _frozen(self.outcomes, dtype=np.int64)
        if outcomes.ndim != 2 or outcomes.shape[1] != 2:
            raise ValueError("outcomes must be an (n, 2) array of counts")
        object.__setattr__(self, "outcomes", outcomes)
        for name in ("prob", "dprob_dtl", "dprob_dtr"):
            arr = _frozen(getattr(self, name))
            if arr.shape != (len(outcomes),):
                raise ValueError(f"{name} does not match the outcome list")
            object.__setattr__(self, name, arr)
        if np.any(self.prob < 0):
            raise ValueError("negative outcome probability")
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @classmethod
    def from_grid(cls, prob, d_l, d_r, tail_mass: float = 0.0) -> "PnrdDistribution":
        prob = np.asarray(prob, dtype=float)
        ml, mr = np.indices(prob.shape)
        outcomes = np.column_stack([ml.ravel(), mr.ravel()])
        # rounding in the binomial sums can leave -1e-18 entries
        p = np.clip(prob.ravel(), 0.0, None)
        return cls(outcomes, p, np.ravel(d_l), np.ravel(d_r), tail_mass)

    def __len__(self) -> int:
        return len(self.prob)

    @property
    def support(self) -> list[tuple[int, int]]:
        return [tuple(int(v) for v in row) for row in self.outcomes]

    @property
    def total(self) -> float:
        return float(self.prob.sum())

    def mean_counts(self) -> tuple[float, float]:
        return tuple(float(self.prob @ self.outcomes[:, j]) for j in (0, 1))


def _poisson_cutoff(means, tol: float) -> int:
    c = 0
    while True:
        tails = [stats.poisson.sf(c, mu) for mu in means]
        if 1 - np.prod([1 - t for t in tails]) < tol:
            return c
        c += 1


def _poisson_table(mu: float, rate: float, cutoff: int):
    m = np.arange(cutoff + 1)
    pmf = stats.poisson.pmf(m, mu)
    # d/dmu pmf(m) = pmf(m-1) - pmf(m), then chain rule dmu/dT = rate
    d = rate * (stats.poisson.pmf(m - 1, mu) - pmf)
    return pmf, d


def coherent_pnrd(
    s: Scenario, b: PhotonBudget, cutoff: int | None = None
) -> PnrdDistribution:
    """Product-Poisson counts with means ``eta_j T_j N_j``."""
    rates = (s.eta_l * b.n_l, s.eta_r * b.n_r)
    means = (rates[0] * s.t_l, rates[1] * s.t_r)
    if cutoff is None:
        cutoff = _poisson_cutoff(means, POISSON_TAIL_TOL)
    pl, dl = _poisson_table(means[0], rates[0], cutoff)
    pr, dr = _poisson_table(means[1], rates[1], cutoff)
    tails = [stats.poisson.sf(cutoff, mu) for mu in means]
    tail = tails[0] + tails[1] - tails[0] * tails[1]
    return PnrdDistribution.from_grid(
        np.outer(pl, pr), np.outer(dl, pr), np.outer(pl, dr), tail
    )


@functools.lru_cache(maxsize=32)
def _log_binom_coefficients(size: int) -> np.ndarray:
    k = np.arange(size)[:, None]
    m = np.arange(size)[None, :]
    with np.errstate(invalid="ignore"):
        out = special.gammaln(k + 1) - special.gammaln(m + 1) - special.gammaln(k - m + 1)
    out = np.where(m <= k, out, -np.inf)
    out.setflags(write=False)
    return out


def binomial_table(tau: float, eta: float, size: int):
    """``pmf[k, m]`` of Binomial(k, tau) for ``k, m < size`` and its ``T``-derivative.

    ``T = tau / eta``, so the derivative carries a factor ``eta``.
    """
    k = np.arange(size)[:, None]
    m = np.arange(size)[None, :]
    log_c = _log_binom_coefficients(size)
    with np.errstate(invalid="ignore"):
        expo = log_c + special.xlogy(m, tau) + special.xlog1py(k - m, -tau)
    pmf = np.where(m <= k, np.exp(expo), 0.0)
    # d/dtau b(k, m) = k [b(k-1, m-1) - b(k-1, m)]
    prev = np.zeros_like(pmf)
    prev[1:] = pmf[:-1]
    shifted = np.zeros_like(pmf)
    shifted[:, 1:] = prev[:, :-1]
    return pmf, eta * k * (shifted - prev)


def fock_pnrd(s: Scenario, n_l: int, n_r: int) -> PnrdDistribution:
    """Product-binomial counts from the Fock input ``|n_l, n_r>``."""
    if int(n_l) != n_l or int(n_r) != n_r or n_l < 0 or n_r < 0:
        raise ValueError("Fock photon numbers must be non-negative integers")
    n_l, n_r = int(n_l), int(n_r)
    pl, dl = (a[n_l] for a in binomial_table(s.tau_l, s.eta_l, n_l + 1))
    pr, dr = (a[n_r] for a in binomial_table(s.tau_r, s.eta_r, n_r + 1))
    return PnrdDistribution.from_grid(np.outer(pl, pr), np.outer(dl, pr), np.outer(pl, dr))


def thermal_cutoff(n: float, tol: float = TAIL_TOL) -> int:
    """Smallest ``K >= 1`` with thermal tail ``(n / (n + 1))^(K + 1) < tol``."""
    if n <= 0:
        return 1
    q = n / (n + 1)
    k = math.ceil(math.log(tol) / math.log(q)) - 1
    while q ** (k + 1) >= tol:
        k += 1
    while k > 1 and q**k < tol:
        k -= 1
    return max(k, 1)


def tmsv_grid(s: Scenario, n: float, cutoff: int):
    """Probability and derivative tables indexed by ``[m_L, m_R]``, plus tail mass."""
    k = np.arange(cutoff + 1)
    q = n / (n + 1)
    weights = q**k / (n + 1)
    bl, dbl = binomial_table(s.tau_l, s.eta_l, cutoff + 1)
    br, dbr = binomial_table(s.tau_r, s.eta_r, cutoff + 1)
    wbr = weights[:, None] * br
    prob = bl.T @ wbr
    d_l = dbl.T @ wbr
    d_r = bl.T @ (weights[:, None] * dbr)
    return prob, d_l, d_r, q ** (cutoff + 1)


def tmsv_direct_pnrd(
    s: Scenario, n: float, cutoff: int | None = None, tol: float = TAIL_TOL
) -> PnrdDistribution:
    """Joint counts of a lossy twin beam, truncated at ``cutoff`` total photons."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if cutoff is None:
        cutoff = thermal_cutoff(n, tol)
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    prob, d_l, d_r, tail = tmsv_grid(s, n, cutoff)
    if tail > tol:
        raise CutoffTooSmallError(f"tail mass {tail:.3e} exceeds {tol:.1e} at cutoff {cutoff}")
    return PnrdDistribution.from_grid(prob, d_l, d_r, tail)


# an impossible outcome whose probability moves at this rate makes the
# Fisher entry diverge (T_j = 0 or eta_j T_j = 1)
SINGULAR_SLOPE = 1e-100


def fim_from_distribution(d: PnrdDistribution) -> Fisher2:
    """Classical Fisher information of the count distribution over ``(T_L, T_R)``.

    A diagonal entry is ``inf`` when an outcome of zero probability has a
    non-vanishing derivative in that parameter.
    """
    keep = d.prob > PROB_FLOOR
    p = d.prob[keep]
    grads = np.stack([d.dprob_dtl[keep], d.dprob_dtr[keep]])
    f = (grads / p) @ grads.T
    f = 0.5 * (f + f.T)
    dropped = ~keep
    h_ll, h_rr = f[0, 0], f[1, 1]
    if np.any(np.abs(d.dprob_dtl[dropped]) > SINGULAR_SLOPE):
        h_ll = math.inf
    if np.any(np.abs(d.dprob_dtr[dropped]) > SINGULAR_SLOPE):
        h_rr = math.inf
    return Fisher2(h_ll, f[0, 1], f[0, 1], h_rr)


def cr_bound_gamma(d: PnrdDistribution) -> float:
    """Per-shot Cramér-Rao bound on ``T_L - T_R`` for photon counting."""
    return var_gamma(fim_from_distribution(d), TCD)
