"""Closed-form Fisher matrices and variance bounds for the three probes.

Every function takes a :class:`~cdsense.model.Scenario` and returns per-shot
quantities. Degenerate denominators give ``inf`` so that full ``[0, 1]^2``
sweeps never abort.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import (
    TCD,
    UNESTIMABLE,
    Fisher2,
    PhotonBudget,
    Scenario,
    var_gamma,
)

CHI_CLAMP_LIMIT = 1e-9


class BoundLabel(enum.Enum):
    COHERENT = "Coherent"
    UQL = "UQL"
    TMSV_DIRECT = "TmsvDirect"
    TMSV_LARGE_N = "TmsvLargeN"


@dataclass(frozen=True)
class BoundReport:
    label: BoundLabel
    var_gamma: float
    qfim: Fisher2 | None = None
    optimal_ratio: float | None = None

    def __post_init__(self):
        if not (self.var_gamma >= 0):
            raise ValueError(f"variance bound must be >= 0, got {self.var_gamma}")
        if self.optimal_ratio is not None and not 0 <= self.optimal_ratio <= 1:
            raise ValueError("optimal ratio must lie in [0, 1]")


def _fisher_entry(numerator: float, denominator: float) -> float:
    # no photons reach the detector: no information, even where T_j = 0
    if numerator == 0:
        return 0.0
    if denominator == 0:
        return math.inf
    return numerator / denominator


def _variance_term(numerator: float, denominator: float) -> float:
    if numerator == 0:
        return 0.0
    if denominator == 0:
        return UNESTIMABLE
    return numerator / denominator


def _ratio_from_x(x: float) -> float:
    if math.isinf(x):
        return 0.0
    return 1.0 / (1.0 + math.sqrt(x))


def _split_ratio(num: float, den: float) -> float:
    """``1 / (1 + sqrt(num / den))`` with the limits for zero arguments."""
    if den == 0:
        # both zero: neither arm constrains the split
        return 0.5 if num == 0 else 0.0
    return _ratio_from_x(num / den)


def qfim_coherent(s: Scenario, b: PhotonBudget) -> Fisher2:
    """QFIM of a product of coherent states, ``diag(eta_j N_j / T_j)``."""
    return Fisher2.diag(
        _fisher_entry(s.eta_l * b.n_l, s.t_l),
        _fisher_entry(s.eta_r * b.n_r, s.t_r),
    )


def var_coherent(s: Scenario, b: PhotonBudget) -> float:
    return _variance_term(s.t_l, s.eta_l * b.n_l) + _variance_term(
        s.t_r, s.eta_r * b.n_r
    )


def coherent_x(s: Scenario) -> float:
    """Abscissa ``eta_l T_r / (eta_r T_l)`` of the classical optimal split."""
    num, den = s.eta_l * s.t_r, s.eta_r * s.t_l
    if den == 0:
        return math.inf if num > 0 else 1.0
    return num / den


def optimal_ratio_classical(s: Scenario) -> float:
    """Fraction ``N_L / N_tot`` minimizing :func:`var_coherent`."""
    return _split_ratio(s.eta_l * s.t_r, s.eta_r * s.t_l)


def classical_benchmark(s: Scenario, n_tot: float) -> float:
    """Coherent-state bound at the optimal split (shot-noise benchmark)."""
    if n_tot <= 0:
        raise ValueError("n_tot must be positive")
    root = _variance_term(s.t_l, s.eta_l)
    root_r = _variance_term(s.t_r, s.eta_r)
    return (math.sqrt(root) + math.sqrt(root_r)) ** 2 / n_tot


def qfim_max(s: Scenario, b: PhotonBudget) -> Fisher2:
    """Largest QFIM over all input states with the given energies, with loss."""
    return Fisher2.diag(
        _fisher_entry(s.eta_l * b.n_l, s.t_l * (1 - s.tau_l)),
        _fisher_entry(s.eta_r * b.n_r, s.t_r * (1 - s.tau_r)),
    )


def var_uql(s: Scenario, b: PhotonBudget) -> float:
    """Ultimate quantum limit for a fixed split ``(N_L, N_R)``."""
    return _variance_term(s.t_l * (1 - s.tau_l), s.eta_l * b.n_l) + _variance_term(
        s.t_r * (1 - s.tau_r), s.eta_r * b.n_r
    )


def uql_x(s: Scenario) -> float:
    num = s.eta_l * s.t_r * (1 - s.tau_r)
    den = s.eta_r * s.t_l * (1 - s.tau_l)
    if den == 0:
        return math.inf if num > 0 else 1.0
    return num / den


def optimal_ratio_uql(s: Scenario) -> float:
    return _split_ratio(
        s.eta_l * s.t_r * (1 - s.tau_r), s.eta_r * s.t_l * (1 - s.tau_l)
    )


def uql_optimal(s: Scenario, n_tot: float) -> float:
    """Ultimate quantum limit at the optimal split of ``n_tot`` photons."""
    if n_tot <= 0:
        raise ValueError("n_tot must be positive")
    root_l = _variance_term(s.t_l * (1 - s.tau_l), s.eta_l)
    root_r = _variance_term(s.t_r * (1 - s.tau_r), s.eta_r)
    return (math.sqrt(root_l) + math.sqrt(root_r)) ** 2 / n_tot


def enhancement_factor(s: Scenario, n_tot: float) -> float:
    """Classical benchmark over UQL; ``1 / (1 - eta T)`` for symmetric arms."""
    cb = classical_benchmark(s, n_tot)
    uql = uql_optimal(s, n_tot)
    if uql == 0:
        return math.inf if cb > 0 else 1.0
    return cb / uql


def _arm(s: Scenario, j: str) -> tuple[float, float, float, float]:
    """``(eta_j, T_j, tau_j, tau_jbar)`` for arm ``j`` in ``{"L", "R"}``."""
    if j == "L":
        return s.eta_l, s.t_l, s.tau_l, s.tau_r
    if j == "R":
        return s.eta_r, s.t_r, s.tau_r, s.tau_l
    raise ValueError(f"arm must be 'L' or 'R', got {j!r}")


def _correlation_denominator(tau_a: float, tau_b: float, n: float) -> float:
    return 1 + tau_a * (1 - tau_b) * n + tau_b * (1 - tau_a) * n


def chi_factor(s: Scenario, n: float, j: str) -> float:
    """Reduction of the twin-beam diagonal QFIM caused by signal correlations."""
    if n < 0:
        raise ValueError("n must be >= 0")
    _, _, tau, tau_bar = _arm(s, j)
    chi = (1 - tau * (1 - tau_bar) + tau_bar * (1 - tau) * n) / _correlation_denominator(
        tau, tau_bar, n
    )
    if chi < -CHI_CLAMP_LIMIT or chi > 1 + CHI_CLAMP_LIMIT:
        raise ArithmeticError(f"chi factor {chi} outside [0, 1]")
    return min(max(chi, 0.0), 1.0)


def qfim_tmsv_direct(s: Scenario, n: float) -> Fisher2:
    """QFIM of a lossy two-mode squeezed vacuum sent directly into both arms.

    ``n`` is the mean photon number of each signal mode.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    diag = []
    for j in ("L", "R"):
        eta, t, tau, _ = _arm(s, j)
        diag.append(_fisher_entry(chi_factor(s, n, j) * eta * n, t * (1 - tau)))
    off = -s.eta_l * s.eta_r * n * (n + 1) / _correlation_denominator(s.tau_l, s.tau_r, n)
    return Fisher2(diag[0], off, off, diag[1])


def var_tmsv_direct(s: Scenario, n: float, tol: float = 1e-12) -> float:
    """Quantum Cramér-Rao bound on ``T_L - T_R`` for the direct twin-beam probe."""
    h = qfim_tmsv_direct(s, n)
    if not h.is_finite:
        return var_gamma(h, TCD)
    det = h.h_ll * h.h_rr - h.h_lr * h.h_rl
    scale = max(abs(h.h_ll), abs(h.h_rr), abs(h.h_lr)) ** 2
    if scale == 0 or det <= tol * scale:
        return UNESTIMABLE
    return (h.h_ll + h.h_rr + h.h_lr + h.h_rl) / det


def var_tmsv_large_n(s: Scenario) -> float:
    """Limit of :func:`var_tmsv_direct` as the squeezing grows without bound.

    The denominator ``1 - a(1 - b) - b(1 - a)`` equals ``(1 - a)(1 - b) + ab``
    with ``a, b = eta_j T_j``; it vanishes only at ``(a, b) = (1, 0)`` or
    ``(0, 1)``, where the finite-``n`` bound is already unestimable.
    """
    a, b = s.tau_l, s.tau_r
    den = 1 - a * (1 - b) - b * (1 - a)
    if den == 0:
        return UNESTIMABLE
    return (s.t_l - s.t_r) ** 2 * (1 - a) * (1 - b) / den


def snr_upper_bound(gamma_minus: float, var_qcr: float) -> float:
    """Largest signal-to-noise ratio ``gamma^2 / var`` an unbiased estimate can reach."""
    if math.isinf(var_qcr):
        return 0.0
    if var_qcr <= 0:
        raise ValueError("variance bound must be positive")
    return gamma_minus**2 / var_qcr


def coherent_report(s: Scenario, n_tot: float) -> BoundReport:
    r = optimal_ratio_classical(s)
    return BoundReport(
        BoundLabel.COHERENT,
        classical_benchmark(s, n_tot),
        qfim_coherent(s, PhotonBudget.from_ratio(n_tot, r)),
        r,
    )


def uql_report(s: Scenario, n_tot: float) -> BoundReport:
    r = optimal_ratio_uql(s)
    return BoundReport(
        BoundLabel.UQL,
        uql_optimal(s, n_tot),
        qfim_max(s, PhotonBudget.from_ratio(n_tot, r)),
        r,
    )


def tmsv_direct_report(s: Scenario, n_tot: float) -> BoundReport:
    # twin beams fix N_L = N_R = n_tot / 2
    n = n_tot / 2
    return BoundReport(BoundLabel.TMSV_DIRECT, var_tmsv_direct(s, n), qfim_tmsv_direct(s, n), 0.5)


def tmsv_large_n_report(s: Scenario) -> BoundReport:
    return BoundReport(BoundLabel.TMSV_LARGE_N, var_tmsv_large_n(s), None, 0.5)
