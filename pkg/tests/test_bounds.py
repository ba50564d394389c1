import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdsense import bounds
from cdsense.model import TCD, Fisher2, PhotonBudget, Scenario, var_gamma

interior = st.floats(0.02, 0.98)
loss = st.floats(0.05, 1.0)


@st.composite
def scenarios(draw, t=interior, eta=loss):
    return Scenario(draw(t), draw(t), draw(eta), draw(eta))


def grid_min(fun, points=10_001):
    r = np.linspace(0, 1, points)[1:-1]
    values = np.array([fun(x) for x in r])
    k = int(np.argmin(values))
    return r[k], values[k]


# --- coherent probe ---------------------------------------------------------


@pytest.mark.parametrize(
    "s, b, expected",
    [
        (Scenario(0.5, 0.5), PhotonBudget(1, 1), (2.0, 2.0)),
        (Scenario(0.5, 0.5, 0, 0), PhotonBudget(1, 1), (0.0, 0.0)),
        (Scenario.balanced(0.5, 0.25, 0.8), PhotonBudget(1, 1), (1.6, 3.2)),
    ],
)
def test_qfim_coherent(s, b, expected):
    h = bounds.qfim_coherent(s, b)
    assert (h.h_ll, h.h_rr) == pytest.approx(expected, rel=1e-14)
    assert h.h_lr == 0


def test_var_coherent_values():
    assert bounds.var_coherent(Scenario(0.5, 0.5), PhotonBudget(1, 1)) == pytest.approx(1.0)
    assert bounds.var_coherent(Scenario(0, 0, 0.8, 0.8), PhotonBudget(1, 1)) == 0.0


def test_var_coherent_is_projected_bound():
    rng = np.random.default_rng(11)
    for _ in range(100):
        s = Scenario(*rng.uniform(0.01, 1, 4))
        b = PhotonBudget(*rng.uniform(0.1, 10, 2))
        got = bounds.var_coherent(s, b)
        assert got == pytest.approx(var_gamma(bounds.qfim_coherent(s, b), TCD), rel=1e-12)


@pytest.mark.parametrize(
    "s, expected",
    [
        (Scenario(0.5, 0.5), 0.5),
        (Scenario(1.0, 1.0, 1.0, 0.25), 1 / 3),  # x = 4
        (Scenario(0.7, 0.0, 0.8, 0.8), 1.0),
    ],
)
def test_optimal_ratio_classical(s, expected):
    assert bounds.optimal_ratio_classical(s) == pytest.approx(expected, abs=1e-15)


def test_coherent_x():
    assert bounds.coherent_x(Scenario(1.0, 1.0, 1.0, 0.25)) == 4.0


def test_classical_benchmark_values():
    assert bounds.classical_benchmark(Scenario(0.25, 0.25), 2) == pytest.approx(0.5)
    for t, eta in [(0.3, 0.8), (0.9, 0.5)]:
        s = Scenario.balanced(t, t, eta)
        assert bounds.classical_benchmark(s, 3.0) == pytest.approx(4 * t / (eta * 3.0), rel=1e-14)
    with pytest.raises(ValueError):
        bounds.classical_benchmark(Scenario(0.5, 0.5), 0)


@pytest.mark.parametrize("seed", range(5))
def test_classical_optimum_matches_grid_search(seed):
    rng = np.random.default_rng(seed)
    s = Scenario(*rng.uniform(0.05, 1, 4))
    n_tot = 2.0
    r_best, v_best = grid_min(lambda r: bounds.var_coherent(s, PhotonBudget.from_ratio(n_tot, r)))
    assert bounds.classical_benchmark(s, n_tot) == pytest.approx(v_best, rel=1e-6)
    assert v_best >= bounds.classical_benchmark(s, n_tot) * (1 - 1e-12)
    assert bounds.optimal_ratio_classical(s) == pytest.approx(r_best, abs=1e-4)  # grid spacing


# --- ultimate quantum limit ------------------------------------------------


def test_qfim_max_values():
    h = bounds.qfim_max(Scenario(0.5, 0.5), PhotonBudget(1, 1))
    assert (h.h_ll, h.h_rr) == pytest.approx((4.0, 4.0))
    assert bounds.qfim_max(Scenario(0.5, 0.5, 0, 0), PhotonBudget(1, 1)) == Fisher2.zeros()
    t, n = 0.3, 2.5
    h = bounds.qfim_max(Scenario(t, t), PhotonBudget(n, n))
    assert h.h_ll == pytest.approx(n / (t * (1 - t)), rel=1e-14)


def test_var_uql_values():
    assert bounds.var_uql(Scenario(1, 1), PhotonBudget(1, 1)) == 0.0
    assert bounds.var_uql(Scenario(0.5, 0.5), PhotonBudget(1, 1)) == pytest.approx(0.5)


def test_var_uql_below_coherent():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        s = Scenario(*rng.uniform(0, 1, 4))
        b = PhotonBudget(*rng.uniform(0.01, 10, 2))
        assert bounds.var_uql(s, b) <= bounds.var_coherent(s, b) * (1 + 1e-14)


def test_optimal_ratio_uql_values():
    assert bounds.optimal_ratio_uql(Scenario.balanced(0.4, 0.4, 0.7)) == 0.5
    s = Scenario(0.5, 0.9)
    assert bounds.uql_x(s) == pytest.approx(0.36)
    assert bounds.optimal_ratio_uql(s) == pytest.approx(0.625)


@pytest.mark.parametrize("seed", range(5))
def test_uql_optimum_matches_grid_search(seed):
    rng = np.random.default_rng(100 + seed)
    s = Scenario(*rng.uniform(0.05, 0.95, 4))
    r_best, v_best = grid_min(lambda r: bounds.var_uql(s, PhotonBudget.from_ratio(2.0, r)))
    assert bounds.uql_optimal(s, 2.0) == pytest.approx(v_best, rel=1e-6)
    assert bounds.optimal_ratio_uql(s) == pytest.approx(r_best, abs=1e-4)


def test_uql_optimal_values():
    assert bounds.uql_optimal(Scenario(0.5, 0.5), 2) == pytest.approx(0.5)
    t, eta, n = 0.6, 0.7, 3.0
    s = Scenario.balanced(t, t, eta)
    assert bounds.uql_optimal(s, n) == pytest.approx(4 * t * (1 - eta * t) / (eta * n), rel=1e-14)


def test_uql_below_classical_on_grid():
    axis = np.linspace(0, 1, 100)
    for t_l in axis:
        for t_r in axis:
            s = Scenario.balanced(t_l, t_r, 0.8)
            assert bounds.uql_optimal(s, 2) <= bounds.classical_benchmark(s, 2) * (1 + 1e-14)


@pytest.mark.parametrize("fun", [bounds.classical_benchmark, bounds.uql_optimal])
def test_benchmarks_scale_as_inverse_photon_number(fun):
    s = Scenario(0.3, 0.6, 0.9, 0.7)
    assert fun(s, 4.0) == pytest.approx(fun(s, 2.0) / 2, rel=1e-15)


@pytest.mark.parametrize(
    "s, expected",
    [
        (Scenario.balanced(1.0, 1.0, 0.5), 2.0),
        (Scenario.balanced(0.5, 0.5, 1.0), 2.0),
        (Scenario.balanced(0.5, 0.5, 0.8), 5 / 3),
        (Scenario.balanced(1.0, 1.0, 1.0), math.inf),
    ],
)
def test_enhancement_factor(s, expected):
    assert bounds.enhancement_factor(s, 2.0) == pytest.approx(expected, rel=1e-14)


def test_enhancement_diverges_near_lossless_unit_transmission():
    values = [bounds.enhancement_factor(Scenario.balanced(t, t, 1.0), 2) for t in (0.9, 0.99, 0.999)]
    assert values == pytest.approx([10, 100, 1000], rel=1e-9)


# --- twin beam --------------------------------------------------------------


def test_chi_values():
    assert bounds.chi_factor(Scenario(0.5, 0.5), 1.0, "L") == pytest.approx(2 / 3)
    assert bounds.chi_factor(Scenario(0.0, 0.5), 3.0, "L") == 1.0
    assert bounds.chi_factor(Scenario(1.0, 0.0), 3.0, "L") == 0.0
    with pytest.raises(ValueError):
        bounds.chi_factor(Scenario(0.5, 0.5), 1.0, "X")


@settings(max_examples=500, deadline=None)
@given(scenarios(st.floats(0, 1), st.floats(0, 1)), st.floats(0, 100))
def test_chi_in_unit_interval(s, n):
    for j in "LR":
        assert 0.0 <= bounds.chi_factor(s, n, j) <= 1.0


def test_qfim_tmsv_direct_hand_values():
    h = bounds.qfim_tmsv_direct(Scenario(0.5, 0.5), 1.0)
    assert h.h_ll == pytest.approx(8 / 3)
    assert h.h_rr == pytest.approx(8 / 3)
    assert h.h_lr == pytest.approx(-4 / 3)
    assert bounds.qfim_tmsv_direct(Scenario(0.3, 0.6, 0.8, 0.9), 0.0) == Fisher2.zeros()


@settings(max_examples=200, deadline=None)
@given(scenarios(), st.floats(0, 20))
def test_qfim_tmsv_swap_symmetry(s, n):
    a = bounds.qfim_tmsv_direct(s, n).matrix
    b = bounds.qfim_tmsv_direct(s.swapped(), n).matrix
    np.testing.assert_allclose(a, b[::-1, ::-1], rtol=1e-13)


@settings(max_examples=200, deadline=None)
@given(scenarios(), st.floats(0.01, 20))
def test_var_tmsv_is_projected_bound(s, n):
    got = bounds.var_tmsv_direct(s, n)
    assert got == pytest.approx(var_gamma(bounds.qfim_tmsv_direct(s, n), TCD), rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(scenarios(), st.floats(0.01, 20))
def test_diagonal_part_bounded_by_uql_over_chi(s, n):
    h = bounds.qfim_tmsv_direct(s, n)
    diag_only = var_gamma(Fisher2.diag(h.h_ll, h.h_rr), TCD)
    chi_max = max(bounds.chi_factor(s, n, j) for j in "LR")
    assert diag_only >= bounds.var_uql(s, PhotonBudget(n, n)) / chi_max * (1 - 1e-12)


@pytest.mark.parametrize("t", [0.1, 0.35, 0.5, 0.8])
@pytest.mark.parametrize("eta", [0.6, 0.8, 1.0])
@pytest.mark.parametrize("n", [0.5, 1.0, 4.0])
def test_var_tmsv_equals_uql_on_diagonal(t, eta, n):
    s = Scenario.balanced(t, t, eta)
    assert bounds.var_tmsv_direct(s, n) == pytest.approx(bounds.uql_optimal(s, 2 * n), rel=1e-10)


def test_var_tmsv_diverges_without_photons():
    s = Scenario(0.4, 0.6, 0.8, 0.8)
    assert bounds.var_tmsv_direct(s, 0.0) == math.inf
    assert bounds.var_tmsv_direct(s, 1e-8) > 1e6


@pytest.mark.parametrize(
    "s", [Scenario.balanced(0.3, 0.3, 0.7), Scenario(1.0, 0.5), Scenario(0.5, 1.0)]
)
def test_large_n_zeros(s):
    assert bounds.var_tmsv_large_n(s) == 0.0


@pytest.mark.parametrize("s", [Scenario(1.0, 0.0), Scenario(0.0, 1.0), Scenario(1.0, 1.0, 1.0, 0.0)])
def test_large_n_corners_follow_finite_n(s):
    assert bounds.var_tmsv_direct(s, 1e6) == math.inf
    assert bounds.var_tmsv_large_n(s) == math.inf


@pytest.mark.parametrize(
    "s",
    [Scenario(0.6, 0.3, 0.8, 0.9), Scenario(0.9, 0.1), Scenario(0.2, 0.7, 0.5, 0.95)],
)
def test_large_n_limit_converges_like_inverse_n(s):
    limit = bounds.var_tmsv_large_n(s)
    gaps = [abs(bounds.var_tmsv_direct(s, n) - limit) for n in (1e4, 1e5, 1e6)]
    assert gaps[1] / gaps[0] == pytest.approx(0.1, rel=0.01)
    assert gaps[2] / gaps[1] == pytest.approx(0.1, rel=0.01)
    assert gaps[2] / limit < 1e-4


def test_large_n_denominator_sign():
    # the limit's denominator is (1 - a)(1 - b) + ab; the variant with
    # 1 + a(1 - b) + b(1 - a) disagrees with the finite-n bound by ~3x here
    s = Scenario(0.6, 0.3, 0.8, 0.9)
    a, b = s.tau_l, s.tau_r
    numerator = (s.t_l - s.t_r) ** 2 * (1 - a) * (1 - b)
    finite = bounds.var_tmsv_direct(s, 1e8)
    assert finite == pytest.approx(numerator / ((1 - a) * (1 - b) + a * b), rel=1e-6)
    assert finite != pytest.approx(numerator / (1 + a * (1 - b) + b * (1 - a)), rel=0.5)


def test_snr_upper_bound():
    assert bounds.snr_upper_bound(0.0, 0.3) == 0.0
    assert bounds.snr_upper_bound(0.1, 0.01) == pytest.approx(1.0)
    assert bounds.snr_upper_bound(0.1, 0.02) == pytest.approx(0.5)
    assert bounds.snr_upper_bound(0.1, math.inf) == 0.0
    with pytest.raises(ValueError):
        bounds.snr_upper_bound(0.1, 0.0)


def test_reports():
    s = Scenario.balanced(0.5, 0.45, 0.8)
    reports = [
        bounds.coherent_report(s, 2),
        bounds.uql_report(s, 2),
        bounds.tmsv_direct_report(s, 2),
        bounds.tmsv_large_n_report(s),
    ]
    assert [r.label for r in reports] == list(bounds.BoundLabel)
    assert reports[1].var_gamma <= reports[0].var_gamma
    assert reports[1].var_gamma <= reports[2].var_gamma
    assert reports[0].var_gamma == pytest.approx(
        var_gamma(reports[0].qfim, TCD), rel=1e-12
    )
    with pytest.raises(ValueError):
        bounds.BoundReport(bounds.BoundLabel.UQL, -1.0)


@pytest.mark.parametrize("t_l", [0.0, 1.0])
@pytest.mark.parametrize("t_r", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("eta", [0.0, 0.8, 1.0])
def test_boundaries_never_nan(t_l, t_r, eta):
    s = Scenario.balanced(t_l, t_r, eta)
    values = [
        bounds.classical_benchmark(s, 2),
        bounds.uql_optimal(s, 2),
        bounds.var_tmsv_direct(s, 1),
        bounds.var_tmsv_large_n(s),
        bounds.optimal_ratio_classical(s),
        bounds.optimal_ratio_uql(s),
    ]
    assert not any(math.isnan(v) for v in values)
