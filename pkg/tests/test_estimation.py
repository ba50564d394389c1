import math

import numpy as np
import pytest

from cdsense import estimation, pnrd
from cdsense.errors import DegenerateLikelihoodError, TailTooLargeError
from cdsense.estimation import Probe, SampleBatch, mle_product, mle_tmsv, sample, saturation_report
from cdsense.model import PhotonBudget, Scenario

ACCEPT = Scenario.balanced(0.5, 0.45, 0.8)


def test_point_mass_sampling():
    d = pnrd.fock_pnrd(Scenario(1.0, 1.0), 2, 3)
    batch = sample(d, 100, seed=1)
    assert np.all(batch.outcomes == [2, 3])


def test_fair_fock_frequencies():
    d = pnrd.fock_pnrd(Scenario(0.5, 0.5), 1, 1)
    nu = 100_000
    batch = sample(d, nu, seed=7)
    sigma = math.sqrt(0.25 * 0.75 / nu)
    for m_l in (0, 1):
        for m_r in (0, 1):
            freq = np.mean((batch.outcomes[:, 0] == m_l) & (batch.outcomes[:, 1] == m_r))
            assert abs(freq - 0.25) < 5 * sigma


def test_sampling_is_deterministic():
    d = pnrd.tmsv_direct_pnrd(ACCEPT, 1.0)
    a, b = sample(d, 1000, seed=3), sample(d, 1000, seed=3)
    assert np.array_equal(a.outcomes, b.outcomes)
    assert not np.array_equal(a.outcomes, sample(d, 1000, seed=4).outcomes)


def test_sampling_refuses_large_tail():
    d = pnrd.tmsv_direct_pnrd(ACCEPT, 1.0, cutoff=15, tol=1e-3)
    with pytest.raises(TailTooLargeError):
        sample(d, 10, seed=0)


def test_rng_is_philox():
    assert isinstance(estimation.make_rng(0).bit_generator, np.random.Philox)
    assert "Philox" in estimation.RNG_ALGORITHM


def test_mle_product_noiseless_fock():
    batch = SampleBatch(np.ones((50, 2), dtype=int), 50, 0)
    assert mle_product(batch, Scenario(1, 1), PhotonBudget(1, 1), Probe.FOCK) == (1.0, 1.0)


def test_mle_product_hand_value():
    # mean count 0.4 in each arm with eta N = 0.8
    outcomes = np.array([[1, 1]] * 2 + [[0, 0]] * 3)
    batch = SampleBatch(outcomes, 5, 0)
    t_l, t_r = mle_product(batch, Scenario(0.5, 0.5, 0.8, 0.8), PhotonBudget(1, 1), Probe.COHERENT)
    assert (t_l, t_r) == pytest.approx((0.5, 0.5))


def test_mle_product_clamps_fock_only():
    batch = SampleBatch(np.full((4, 2), 2), 4, 0)
    s, b = Scenario(0.5, 0.5, 0.8, 0.8), PhotonBudget(2, 2)
    assert mle_product(batch, s, b, Probe.FOCK) == (1.0, 1.0)
    assert mle_product(batch, s, b, Probe.COHERENT)[0] == pytest.approx(1.25)
    with pytest.raises(ValueError):
        mle_product(batch, s, b, Probe.TMSV)


def test_coherent_mle_unbiased():
    b = PhotonBudget(1, 1)
    d = pnrd.coherent_pnrd(ACCEPT, b)
    est = np.array([mle_product(sample(d, 10_000, seed), ACCEPT, b, Probe.COHERENT) for seed in range(200)])
    stderr = est.std(axis=0, ddof=1) / math.sqrt(len(est))
    assert np.all(np.abs(est.mean(axis=0) - [ACCEPT.t_l, ACCEPT.t_r]) < 3 * stderr)


def test_mle_tmsv_recovers_truth():
    s, n, nu = Scenario(0.6, 0.35, 0.8, 0.8), 1.0, 20_000
    d = pnrd.tmsv_direct_pnrd(s, n)
    cov = np.linalg.inv(pnrd.fim_from_distribution(d).matrix) / nu
    t_l, t_r = mle_tmsv(sample(d, nu, seed=11), s, n)
    assert abs(t_l - s.t_l) < 3 * math.sqrt(cov[0, 0])
    assert abs(t_r - s.t_r) < 3 * math.sqrt(cov[1, 1])


def test_mle_tmsv_degenerate_batches():
    batch = SampleBatch(np.zeros((5, 2), dtype=int), 5, 0)
    with pytest.raises(DegenerateLikelihoodError):
        mle_tmsv(batch, ACCEPT, 1.0)
    assert mle_tmsv(batch, ACCEPT, 1.0, degenerate="boundary") == (0.0, 0.0)


def test_likelihood_prefers_truth():
    s, n = ACCEPT, 1.0
    d = pnrd.tmsv_direct_pnrd(s, n)
    wins = 0
    for seed in range(10):
        loglik = estimation.tmsv_log_likelihood(sample(d, 5000, seed), s, n)
        wins += loglik(s.t_l, s.t_r) >= loglik(s.t_l + 0.1, s.t_r + 0.1)
    assert wins > 5


def test_golden_section():
    assert estimation._golden_max(lambda x: -(x - 0.3) ** 2, 0, 1, 1e-8) == pytest.approx(0.3, abs=1e-7)


def test_fock_estimator_is_efficient():
    """The closed-form binomial MLE attains the bound; 5000 experiments pin the ratio to ~2%."""
    rep = saturation_report(Probe.FOCK, ACCEPT, PhotonBudget(1, 1), 10_000, range(5000))
    assert abs(rep.ratio - 1) < 3 * rep.ratio_stderr
    assert abs(rep.bias) < 3 * math.sqrt(rep.gamma_hat_var / len(rep.seeds))


def test_coherent_estimator_is_efficient():
    rep = saturation_report(Probe.COHERENT, ACCEPT, PhotonBudget(1, 1), 10_000, range(2000))
    assert abs(rep.ratio - 1) < 3 * rep.ratio_stderr


@pytest.mark.parametrize(
    "probe, resources, nu, seeds",
    [
        (Probe.FOCK, PhotonBudget(1, 1), 10_000, 200),
        (Probe.COHERENT, PhotonBudget(1, 1), 10_000, 200),
        (Probe.FOCK, PhotonBudget(3, 2), 1000, 200),
        (Probe.TMSV, 1.0, 2000, 12),
    ],
)
def test_variance_not_below_bound(probe, resources, nu, seeds):
    rep = saturation_report(probe, ACCEPT, resources, nu, range(seeds))
    sampling_error = math.sqrt(2 / (seeds - 1))  # relative spread of a sample variance
    assert rep.ratio > 1 - 5 * sampling_error


def test_variance_scales_inversely_with_shots():
    # shared seeds correlate the two runs, which sharpens the comparison
    small = saturation_report(Probe.FOCK, ACCEPT, PhotonBudget(1, 1), 1000, range(4000))
    large = saturation_report(Probe.FOCK, ACCEPT, PhotonBudget(1, 1), 2000, range(4000))
    assert small.gamma_hat_var / large.gamma_hat_var == pytest.approx(2.0, rel=0.1)


def test_report_is_deterministic_and_worker_independent():
    args = (Probe.COHERENT, ACCEPT, PhotonBudget(1, 2), 500, range(6))
    a, b = saturation_report(*args), saturation_report(*args)
    c = saturation_report(*args, workers=2)
    assert np.array_equal(a.estimates, b.estimates)
    assert np.array_equal(a.estimates, c.estimates)
    assert a.ratio == b.ratio == c.ratio
    assert a.rng == estimation.RNG_ALGORITHM


def test_report_needs_two_seeds():
    with pytest.raises(ValueError):
        saturation_report(Probe.FOCK, ACCEPT, PhotonBudget(1, 1), 100, [0])
