"""Monte-Carlo photon counting and maximum-likelihood estimation of ``T_L - T_R``.

Draws use numpy's counter-based Philox generator so that a ``(seed, nu)``
pair reproduces the same counts on any platform.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import DegenerateLikelihoodError, TailTooLargeError
from .model import PhotonBudget, Scenario
from .pnrd import (
    PnrdDistribution,
    coherent_pnrd,
    cr_bound_gamma,
    fock_pnrd,
    thermal_cutoff,
    tmsv_direct_pnrd,
    tmsv_grid,
)

RNG_ALGORITHM = "numpy.random.Philox(4x64, 10 rounds)"
MAX_TAIL = 1e-9
GOLDEN = (math.sqrt(5) - 1) / 2


class Probe(enum.Enum):
    COHERENT = "coherent"
    FOCK = "fock"
    TMSV = "tmsv"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    outcomes: np.ndarray
    nu: int
    seed: int

    def __post_init__(self):
        if len(self.outcomes) != self.nu:
            raise ValueError("batch length does not match nu")

    def mean_counts(self) -> np.ndarray:
        return self.outcomes.mean(axis=0)


def sample(
    d: PnrdDistribution, nu: int, seed: int, max_tail: float = MAX_TAIL
) -> SampleBatch:
    """Draw ``nu`` i.i.d. outcomes by inverse CDF over the enumerated support.

    Tail mass up to ``max_tail`` is folded into the last outcome of the support.
    """
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if d.tail_mass > max_tail:
        raise TailTooLargeError(f"tail mass {d.tail_mass:.3e} exceeds {max_tail:.1e}")
    cdf = np.cumsum(d.prob)
    u = make_rng(seed).random(nu)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
    outcomes = d.outcomes[idx]
    outcomes.setflags(write=False)
    return SampleBatch(outcomes, nu, seed)


def mle_product(
    batch: SampleBatch, s: Scenario, b: PhotonBudget, probe: Probe
) -> tuple[float, float]:
    """Closed-form MLE ``mean(m_j) / (eta_j N_j)`` for coherent and Fock probes.

    Only the losses of ``s`` are used; its transmittances are the unknowns.
    """
    probe = Probe(probe)
    if probe is Probe.TMSV:
        raise ValueError("use mle_tmsv for the twin-beam probe")
    rates = np.array([s.eta_l * b.n_l, s.eta_r * b.n_r])
    if np.any(rates <= 0):
        raise ValueError("eta_j * N_j must be positive in both arms")
    t_hat = batch.mean_counts() / rates
    if probe is Probe.FOCK:
        t_hat = np.clip(t_hat, 0.0, 1.0)
    return float(t_hat[0]), float(t_hat[1])


def _count_table(batch: SampleBatch, size: int) -> np.ndarray:
    table = np.zeros((size, size))
    np.add.at(table, (batch.outcomes[:, 0], batch.outcomes[:, 1]), 1)
    return table


def _golden_max(fun, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def tmsv_log_likelihood(batch: SampleBatch, s: Scenario, n: float, cutoff: int | None = None):
    """Return ``loglik(t_l, t_r)`` for the batch under the twin-beam count model."""
    top = int(batch.outcomes.max())
    k = max(cutoff or thermal_cutoff(n), top)
    counts = _count_table(batch, k + 1)
    seen = counts > 0

    def loglik(t_l: float, t_r: float) -> float:
        prob = tmsv_grid(s.with_t(t_l, t_r), n, k)[0][seen]
        with np.errstate(divide="ignore"):
            return float(counts[seen] @ np.log(np.clip(prob, 0.0, None)))

    return loglik


def mle_tmsv(
    batch: SampleBatch,
    s: Scenario,
    n: float,
    grid: int = 21,
    tol: float = 1e-5,
    cutoff: int | None = None,
    degenerate: str = "raise",
) -> tuple[float, float]:
    """Numerical MLE of ``(T_L, T_R)`` from twin-beam counts.

    Coarse grid search over ``[0, 1]^2`` followed by coordinate-wise
    golden-section refinement until both coordinates move less than ``tol``.
    ``degenerate="boundary"`` returns ``(0, 0)`` for all-vacuum batches
    instead of raising.
    """
    if batch.nu == 0:
        raise ValueError("empty batch")
    if not np.any(batch.outcomes):
        if degenerate == "boundary":
            return 0.0, 0.0
        raise DegenerateLikelihoodError("all outcomes are (0, 0)")
    loglik = tmsv_log_likelihood(batch, s, n, cutoff)

    axis = np.linspace(0.0, 1.0, grid)
    values = np.array([[loglik(a, b) for b in axis] for a in axis])
    i, j = np.unravel_index(np.argmax(values), values.shape)
    est = np.array([axis[i], axis[j]])
    width = axis[1] - axis[0]
    for _ in range(50):
        prev = est.copy()
        est[0] = _golden_max(
            lambda t: loglik(t, est[1]), max(est[0] - width, 0.0), min(est[0] + width, 1.0), tol
        )
        est[1] = _golden_max(
            lambda t: loglik(est[0], t), max(est[1] - width, 0.0), min(est[1] + width, 1.0), tol
        )
        if np.abs(est - prev).max() < tol:
            break
        width = max(2 * np.abs(est - prev).max(), 10 * tol)
    return float(est[0]), float(est[1])


@dataclass(frozen=True, eq=False)
class EstimationReport:
    probe: Probe
    nu: int
    seeds: tuple[int, ...]
    gamma_true: float
    gamma_hat_mean: float
    gamma_hat_var: float
    cr_bound_per_nu: float
    ratio: float
    bias: float
    estimates: np.ndarray = field(repr=False)
    rng: str = RNG_ALGORITHM

    @property
    def ratio_stderr(self) -> float:
        """Standard error of ``ratio`` for Gaussian estimates."""
        return self.ratio * math.sqrt(2.0 / max(len(self.seeds) - 1, 1))


def probe_distribution(probe: Probe, s: Scenario, resources) -> PnrdDistribution:
    """Count distribution for ``probe``; ``resources`` is a budget or twin-beam ``n``."""
    probe = Probe(probe)
    if probe is Probe.COHERENT:
        return coherent_pnrd(s, resources)
    if probe is Probe.FOCK:
        return fock_pnrd(s, resources.n_l, resources.n_r)
    return tmsv_direct_pnrd(s, float(resources))


def _estimate_one(seed, d, probe, s, resources, nu, mle_options):
    batch = sample(d, nu, seed)
    if probe is Probe.TMSV:
        t_l, t_r = mle_tmsv(batch, s, float(resources), **mle_options)
    else:
        t_l, t_r = mle_product(batch, s, resources, probe)
    return t_l, t_r


def saturation_report(
    probe: Probe,
    s: Scenario,
    resources,
    nu: int,
    seeds,
    workers: int = 1,
    **mle_options,
) -> EstimationReport:
    """Compare the spread of plug-in estimates ``T_L - T_R`` with ``CR / nu``.

    Each seed is one experiment of ``nu`` shots; estimates are reduced in seed
    order whatever ``workers`` is.
    """
    probe = Probe(probe)
    seeds = tuple(int(x) for x in seeds)
    if len(seeds) < 2:
        raise ValueError("need at least two seeds to estimate a variance")
    d = probe_distribution(probe, s, resources)
    cr = cr_bound_gamma(d)
    job = partial(
        _estimate_one, d=d, probe=probe, s=s, resources=resources, nu=nu, mle_options=mle_options
    )
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            est = list(pool.map(job, seeds))
    else:
        est = [job(seed) for seed in seeds]
    est = np.array(est)
    gamma_hat = est[:, 0] - est[:, 1]
    var = float(gamma_hat.var(ddof=1))
    per_nu = cr / nu
    return EstimationReport(
        probe=probe,
        nu=nu,
        seeds=seeds,
        gamma_true=s.gamma_minus,
        gamma_hat_mean=float(gamma_hat.mean()),
        gamma_hat_var=var,
        cr_bound_per_nu=per_nu,
        ratio=var / per_nu if per_nu > 0 else math.inf,
        bias=float(gamma_hat.mean()) - s.gamma_minus,
        estimates=est,
    )
