"""Cross-checks of every closed-form bound against an independent numerical route.

Each check returns a :class:`CheckResult`; ``run_all`` drives the ``validate``
command.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds, gaussian, pnrd
from .model import TCD, PhotonBudget, Scenario, var_gamma

SEED = 20210531


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    worst: float
    passed: bool
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status}  {self.name:<34s} worst={self.worst:.3e}  tol={self.tolerance:.1e}  ({self.seconds:.2f}s)"
        return text + (f"  {self.detail}" if self.detail else "")


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _result(name, tol, worst, start, detail=""):
    return CheckResult(name, tol, worst, bool(worst <= tol), time.perf_counter() - start, detail)


def random_scenarios(rng, count, t_range=(0.1, 0.9), eta_range=(0.5, 1.0)):
    for _ in range(count):
        t_l, t_r = rng.uniform(*t_range, 2)
        eta_l, eta_r = rng.uniform(*eta_range, 2)
        yield Scenario(t_l, t_r, eta_l, eta_r)


def check_qfim_oracle(count: int = 50, tol: float = 1e-6) -> CheckResult:
    """Analytic twin-beam QFIM against the fidelity finite-difference QFIM."""
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for s in random_scenarios(rng, count):
        n = float(rng.choice([0.5, 1.0, 2.0]))
        numeric = gaussian.qfim_from_fidelity(s, n).matrix
        worst = max(worst, _rel(numeric, bounds.qfim_tmsv_direct(s, n).matrix))
    return _result("qfim_tmsv_vs_fidelity", tol, worst, start, f"{count} scenarios")


def check_coherent_fim(count: int = 100, tol: float = 1e-10) -> CheckResult:
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for s in random_scenarios(rng, count, t_range=(0.05, 1.0)):
        b = PhotonBudget(*rng.uniform(0.1, 10.0, 2))
        fim = pnrd.fim_from_distribution(pnrd.coherent_pnrd(s, b)).matrix
        qfim = bounds.qfim_coherent(s, b).matrix
        worst = max(worst, _rel(np.diag(fim), np.diag(qfim)), abs(fim[0, 1]) / fim.max())
    return _result("coherent_fim_equals_qfim", tol, worst, start, f"{count} scenarios")


def check_fock_fim(max_n: int = 20, tol: float = 1e-10) -> CheckResult:
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 2)
    scenarios = list(random_scenarios(rng, 5, t_range=(0.05, 0.95)))
    worst = 0.0
    for s in scenarios:
        for n_l, n_r in itertools.product(range(1, max_n + 1), repeat=2):
            fim = pnrd.fim_from_distribution(pnrd.fock_pnrd(s, n_l, n_r)).matrix
            qfim = bounds.qfim_max(s, PhotonBudget(n_l, n_r)).matrix
            worst = max(worst, _rel(np.diag(fim), np.diag(qfim)), abs(fim[0, 1]) / fim.max())
    return _result("fock_fim_equals_qfim_max", tol, worst, start, f"N_L, N_R <= {max_n}")


def check_ancilla_uql(tol: float = 1e-5) -> CheckResult:
    start = time.perf_counter()
    worst = 0.0
    for t, eta, n in itertools.product((0.3, 0.5, 0.7), (0.8, 1.0), (1.0, 2.0)):
        expected = eta * n / (t * (1 - eta * t))
        worst = max(worst, _rel(gaussian.qfim_tmsv_ancilla(t, eta, n), expected))
    return _result("ancilla_twin_beam_reaches_uql", tol, worst, start, "12 grid points")


def check_diagonal_coincidence(tol: float = 1e-6, eta: float = 0.8, n_tot: float = 2.0) -> CheckResult:
    start = time.perf_counter()
    worst = 0.0
    for t in np.linspace(0.1, 0.9, 9):
        s = Scenario.balanced(t, t, eta)
        uql = bounds.uql_optimal(s, n_tot)
        qcr = bounds.var_tmsv_direct(s, n_tot / 2)
        cr = pnrd.cr_bound_gamma(pnrd.tmsv_direct_pnrd(s, n_tot / 2))
        worst = max(worst, _rel(qcr, uql), _rel(cr, uql), _rel(cr, qcr))
    return _result("diagonal_tmsv_qcr_cr_uql_agree", tol, worst, start, "T_L = T_R in [0.1, 0.9]")


def check_enhancement(tol: float = 1e-9) -> CheckResult:
    start = time.perf_counter()
    spots = [
        (bounds.enhancement_factor(Scenario.balanced(1.0, 1.0, 0.5), 2.0), 2.0),
        (bounds.enhancement_factor(Scenario.balanced(0.5, 0.5, 0.8), 2.0), 5.0 / 3.0),
    ]
    worst = max(abs(a - b) for a, b in spots)
    for eta, t in itertools.product(np.linspace(0.1, 1.0, 10), np.linspace(0.05, 0.95, 10)):
        got = bounds.enhancement_factor(Scenario.balanced(t, t, eta), 2.0)
        worst = max(worst, _rel(got, 1 / (1 - eta * t)))
    return _result("symmetric_enhancement_factor", tol, worst, start, "eta=0.5,T=1 -> 2; eta=0.8,T=0.5 -> 5/3")


LARGE_N_MIN_SPLIT = 0.3


def check_large_n(count: int = 20, tol: float = 1e-4, n: float = 1e6) -> CheckResult:
    """Finite-``n`` bound against its limit.

    The relative gap behaves like ``C / (n (T_L - T_R)^2)`` with ``C <= 8`` on
    the sampled range, so scenarios keep ``|T_L - T_R| >= 0.3``.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    done = 0
    for s in random_scenarios(rng, 50 * count):
        if abs(s.t_l - s.t_r) < LARGE_N_MIN_SPLIT:
            continue
        worst = max(worst, _rel(bounds.var_tmsv_direct(s, n), bounds.var_tmsv_large_n(s)))
        done += 1
        if done == count:
            break
    return _result("large_n_limit", tol, worst, start, f"{done} scenarios, n={n:g}, |T_L-T_R|>={LARGE_N_MIN_SPLIT}")


def first_order_slope(t_l: float = 0.5, eta: float = 0.8, n: float = 1.0, h: float = 1e-4) -> float:
    """Central-difference slope of ``Var_TMSV - UQL_opt`` in ``T_R - T_L`` at zero."""

    def gap(dt):
        s = Scenario.balanced(t_l, t_l + dt, eta)
        return bounds.var_tmsv_direct(s, n) - bounds.uql_optimal(s, 2 * n)

    return (gap(h) - gap(-h)) / (2 * h)


def check_first_order(tol: float = 1e-6) -> CheckResult:
    start = time.perf_counter()
    return _result("first_order_flatness", tol, abs(first_order_slope()), start, "eta=0.8, T_L=0.5")


def check_chi_range(draws: int = 10_000) -> CheckResult:
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for _ in range(draws):
        s = Scenario(*rng.uniform(0, 1, 4))
        n = rng.uniform(0, 100)
        for j in ("L", "R"):
            chi = bounds.chi_factor(s, n, j)
            worst = max(worst, -chi, chi - 1)
    return _result("chi_in_unit_interval", 0.0, worst, start, f"{draws} draws")


def check_fidelity_axioms(pairs: int = 50) -> CheckResult:
    """Symmetry (1e-12), F(V, V) = 1, range [0, 1] and the pure-overlap oracle (1e-9)."""
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for _ in range(pairs):
        a, b = gaussian.random_state(rng), gaussian.random_state(rng)
        fab, fba = gaussian.fidelity_two_mode(a, b), gaussian.fidelity_two_mode(b, a)
        worst = max(worst, abs(fab - fba) / 1e-12, abs(gaussian.fidelity_two_mode(a, a) - 1) / 1e-9)
        worst = max(worst, -fab / 1e-12, (fab - 1) / 1e-12)
        pa, pb = gaussian.random_state(rng, pure=True), gaussian.random_state(rng, pure=True)
        overlap = 1 / math.sqrt(np.linalg.det(pa.cov + pb.cov))
        worst = max(worst, _rel(gaussian.fidelity_two_mode(pa, pb), overlap) / 1e-9)
    return _result("fidelity_axioms", 1.0, worst, start, "normalized units: 1 = at tolerance")


def _distributions(rng, count):
    for s in random_scenarios(rng, count, t_range=(0.05, 0.95)):
        b = PhotonBudget(*rng.uniform(0.1, 5, 2))
        n_l, n_r = rng.integers(0, 8, 2)
        n = float(rng.uniform(0.1, 3))
        yield pnrd.coherent_pnrd(s, b), bounds.qfim_coherent(s, b)
        yield pnrd.fock_pnrd(s, n_l, n_r), bounds.qfim_max(s, PhotonBudget(n_l, n_r))
        yield pnrd.tmsv_direct_pnrd(s, n), bounds.qfim_tmsv_direct(s, n)


def check_distributions(count: int = 30) -> CheckResult:
    """Normalization, zero derivative sums, PSD FIM and ``QFIM - FIM >= 0``."""
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 6)
    worst = 0.0
    for d, qfim in _distributions(rng, count):
        worst = max(worst, abs(d.total + d.tail_mass - 1) / 1e-10)
        worst = max(worst, abs(d.dprob_dtl.sum()) / 1e-8, abs(d.dprob_dtr.sum()) / 1e-8)
        fim = pnrd.fim_from_distribution(d).matrix
        worst = max(worst, -np.linalg.eigvalsh(fim).min() / 1e-12)
        worst = max(worst, -np.linalg.eigvalsh(qfim.matrix - fim).min() / 1e-8)
    return _result("distribution_properties", 1.0, worst, start, "normalized units: 1 = at tolerance")


def check_ordering(count: int = 200) -> CheckResult:
    """UQL below the coherent and twin-beam bounds; Var_TMSV formula equals n^T H^+ n."""
    start = time.perf_counter()
    rng = np.random.default_rng(SEED + 7)
    worst = 0.0
    for s in random_scenarios(rng, count, t_range=(0.01, 0.99), eta_range=(0.05, 1.0)):
        b = PhotonBudget(*rng.uniform(0.1, 10, 2))
        n_tot = b.n_tot
        uql = bounds.uql_optimal(s, n_tot)
        tmsv = bounds.var_tmsv_direct(s, n_tot / 2)
        worst = max(worst, (bounds.var_uql(s, b) - bounds.var_coherent(s, b)) / 1e-12)
        worst = max(worst, (uql - bounds.classical_benchmark(s, n_tot)) / 1e-12)
        worst = max(worst, (uql - tmsv) / uql / 1e-12)
        worst = max(worst, _rel(tmsv, var_gamma(bounds.qfim_tmsv_direct(s, n_tot / 2), TCD)) / 1e-9)
    return _result("ordering_chain", 1.0, worst, start, "normalized units: 1 = at tolerance")


ALL_CHECKS = (
    check_qfim_oracle,
    check_coherent_fim,
    check_fock_fim,
    check_ancilla_uql,
    check_diagonal_coincidence,
    check_enhancement,
    check_large_n,
    check_first_order,
    check_chi_range,
    check_fidelity_axioms,
    check_distributions,
    check_ordering,
)


def run_all(echo=None) -> list[CheckResult]:
    results = []
    for check in ALL_CHECKS:
        res = check()
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
