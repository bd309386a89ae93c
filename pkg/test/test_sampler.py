import math

import numpy as np
import pytest
from scipy import stats

from npmc.bootstrap import ExactLikelihood, effective_sample_size, \
        normalize_log_weights
from npmc.lowlevel import (
        ConfigError, DegenerateWeightsError, NumericalRangeError,
        ProposalDegeneracyError)
from npmc.sampler import (
        STATUS_DEGENERATE, STATUS_NUMERICAL, STATUS_OK, STATUS_OUTSIDE,
        GaussianProposal, NpmcConfig, PriorBox, ThetaVector,
        WeightedSampleSet, clip_log_weights, evaluate_log_iw,
        fit_gaussian_proposal, posterior_mean, posterior_mse, run_npmc)


TOY_BOX = PriorBox([-10.], [10.])


def toy_log_likelihood(theta):
    # N(theta; 1, 1) as a function of theta
    return stats.norm.logpdf(theta[0], 1., 1.)


def failing_likelihood(theta, rng):
    raise DegenerateWeightsError("all particles lost", tick=1)


# {{{ parameter space

def test_theta_vector():
    truth = ThetaVector.truth()
    assert truth.alpha == 216.
    assert np.array_equal(np.asarray(truth), [0.85, 2.6, 216., 0.85])
    assert truth.in_support()
    assert not ThetaVector(1.2, 2.6, 216., 0.85).in_support()

    with pytest.raises(ValueError):
        ThetaVector.from_array([1., 2.])


def test_prior_box():
    box = PriorBox.default()
    assert box.dim == 4
    assert box.contains([0.5, 3., 100., 0.5])
    assert not box.contains([0., 3., 100., 0.5])
    assert not box.contains([0.5, 5., 100., 0.5])
    assert box.log_density([0.5, 3., 100., 0.5]) == pytest.approx(
            -math.log(1 * 4 * 250 * 1))
    assert box.log_density([0.5, 3., 400., 0.5]) == -np.inf

    samples = box.sample(1000, np.random.default_rng(0))
    assert box.contains(samples).all()
    assert box.log_density(samples).shape == (1000,)


def test_prior_box_validation():
    with pytest.raises(ConfigError):
        PriorBox([1.], [0.])


def test_gaussian_proposal():
    q = GaussianProposal([0., 1.], [[1., 0.5], [0.5, 2.]])
    x = q.sample(50000, np.random.default_rng(1))
    assert np.allclose(x.mean(axis=0), [0., 1.], atol=0.03)
    assert np.allclose(np.cov(x.T), [[1., 0.5], [0.5, 2.]], atol=0.05)
    assert q.log_density([0., 1.]) == pytest.approx(
            stats.multivariate_normal.logpdf([0., 1.], [0., 1.],
                [[1., 0.5], [0.5, 2.]]))

    with pytest.raises(ProposalDegeneracyError):
        GaussianProposal([0., 0.], [[1., 2.], [2., 1.]])

# }}}


# {{{ clipping

def _clip_oracle(log_iws, m_c):
    order = sorted(range(len(log_iws)), key=lambda i: -log_iws[i])
    threshold = log_iws[order[m_c - 1]]
    out = list(log_iws)
    for i in order[:m_c]:
        out[i] = threshold
    return out


def test_clipping_example():
    log_iws = np.log([0.1, 5., 0.3, 2., 0.2])
    clipped = clip_log_weights(log_iws, 2)
    assert np.allclose(np.exp(clipped), [0.1, 2., 0.3, 2., 0.2])


def test_clipping_against_oracle():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        M = int(rng.integers(2, 60))
        log_iws = rng.normal(0, 5, M)
        if rng.random() < 0.3:
            # ties
            log_iws = np.round(log_iws)
        if rng.random() < 0.3:
            log_iws[rng.random(M) < 0.2] = -np.inf
            log_iws[0] = 0.
        m_c = int(rng.integers(1, np.isfinite(log_iws).sum() + 1))

        clipped = clip_log_weights(log_iws, m_c)
        assert list(clipped) == _clip_oracle(list(log_iws), m_c)

        ess_iw = effective_sample_size(normalize_log_weights(log_iws)[0])
        ess_tiw = effective_sample_size(normalize_log_weights(clipped)[0])
        assert ess_tiw >= ess_iw * (1 - 1e-12)


def test_clipping_preconditions():
    with pytest.raises(ValueError):
        clip_log_weights([0., 1.], 3)
    with pytest.raises(ValueError):
        clip_log_weights([0., 1.], 0)
    with pytest.raises(DegenerateWeightsError):
        clip_log_weights([-np.inf, -np.inf], 1)


def test_clipping_ignores_common_offset():
    rng = np.random.default_rng(19)
    for shift in [-700., -3.5, 0.25, 400.]:
        log_iws = rng.normal(0, 4, 30)
        log_iws[[4, 11]] = -np.inf
        base = normalize_log_weights(clip_log_weights(log_iws, 5))[0]
        shifted = normalize_log_weights(
                clip_log_weights(log_iws + shift, 5))[0]
        assert np.allclose(base, shifted, rtol=1e-9, atol=1e-15)


def test_clipping_all_equal_is_identity():
    log_iws = np.zeros(9)
    assert np.array_equal(clip_log_weights(log_iws, 3), log_iws)

# }}}


# {{{ estimators

def test_posterior_mean_and_mse():
    samples = WeightedSampleSet.from_weights([[0., 0.], [2., 4.]], [0.5, 0.5])
    assert np.allclose(posterior_mean(samples), [1., 2.])
    assert posterior_mse(samples, [1., 2.]) == pytest.approx(5.)


def test_fit_gaussian_proposal():
    rng = np.random.default_rng(3)
    thetas = rng.normal(size=(400, 2))
    weights = rng.random(400)
    weights /= weights.sum()
    samples = WeightedSampleSet.from_weights(thetas, weights)

    q = fit_gaussian_proposal(samples, [1e-3, 1e-3])
    mean = weights @ thetas
    cov = np.cov(thetas.T, aweights=weights, bias=True)
    assert np.allclose(q.mean, mean)
    assert np.allclose(q.cov, cov + 1e-3 * np.eye(2))


def test_fit_needs_two_weighted_samples():
    samples = WeightedSampleSet.from_weights([[0.], [1.], [2.]], [0., 1., 0.])
    with pytest.raises(ProposalDegeneracyError):
        fit_gaussian_proposal(samples, [1e-6])


def test_weighted_sample_set_requires_normalized_weights():
    with pytest.raises(ValueError):
        WeightedSampleSet.from_weights([[0.], [1.]], [0.5, 0.6])

# }}}


# {{{ importance weights

def test_weight_outside_support_skips_likelihood(mocker):
    likelihood = mocker.Mock(return_value=0.)
    ev = evaluate_log_iw(np.array([11.]), TOY_BOX, TOY_BOX, likelihood, None)
    assert ev.log_iw == -np.inf
    assert ev.status == STATUS_OUTSIDE
    assert likelihood.call_count == 0


def test_weight_under_prior_proposal():
    likelihood = ExactLikelihood(toy_log_likelihood)
    ev = evaluate_log_iw(np.array([0.5]), TOY_BOX, TOY_BOX, likelihood, None)
    assert ev.status == STATUS_OK
    assert ev.log_iw == pytest.approx(toy_log_likelihood([0.5]))


def test_weight_under_gaussian_proposal():
    likelihood = ExactLikelihood(toy_log_likelihood)
    q = GaussianProposal([0.], [[4.]])
    ev = evaluate_log_iw(np.array([0.5]), q, TOY_BOX, likelihood, None)
    expected = (toy_log_likelihood([0.5]) - math.log(20.)
            - stats.norm.logpdf(0.5, 0., 2.))
    assert ev.log_iw == pytest.approx(expected)


def test_weight_failures_become_zero(mocker):
    ev = evaluate_log_iw(np.array([0.5]), TOY_BOX, TOY_BOX,
            failing_likelihood, None)
    assert ev.log_iw == -np.inf
    assert ev.status == STATUS_DEGENERATE

    overflow = mocker.Mock(side_effect=NumericalRangeError("overflow", "C1"))
    ev = evaluate_log_iw(np.array([0.5]), TOY_BOX, TOY_BOX, overflow, None)
    assert ev.log_iw == -np.inf
    assert ev.status == STATUS_NUMERICAL

# }}}


# {{{ driver

def test_config_defaults_and_validation():
    config = NpmcConfig(M=200, K=15)
    assert config.M_c == 14
    assert config.N == 100
    assert NpmcConfig(M=50, K=10).M_c == 7

    with pytest.raises(ConfigError):
        NpmcConfig(M=10, K=2, M_c=4)
    with pytest.raises(ConfigError):
        NpmcConfig(M=1, K=2)
    with pytest.raises(ConfigError):
        NpmcConfig(M=10, K=-1)


def test_npmc_on_gaussian_target():
    likelihood = ExactLikelihood(toy_log_likelihood)
    result = run_npmc(NpmcConfig(M=400, K=6, seed=4), likelihood, TOY_BOX)

    assert len(result.sample_sets) == 7
    assert len(result.estimates) == 7
    assert len(result.proposals) == 6
    assert result.final.iteration == 6
    assert abs(result.final_estimate[0] - 1.) < 0.2
    assert result.final.ess > result.sample_sets[0].ess
    assert result.proposals[-1].cov[0, 0] == pytest.approx(1., rel=0.5)
    assert result.likelihood_calls <= 7 * 400


def test_npmc_is_seed_deterministic():
    likelihood = ExactLikelihood(toy_log_likelihood)
    a = run_npmc(NpmcConfig(M=50, K=3, seed=5), likelihood, TOY_BOX)
    b = run_npmc(NpmcConfig(M=50, K=3, seed=5), likelihood, TOY_BOX)
    for set_a, set_b in zip(a.sample_sets, b.sample_sets):
        assert np.array_equal(set_a.thetas, set_b.thetas)
        assert np.array_equal(set_a.weights, set_b.weights)


def test_npmc_independent_of_workers():
    likelihood = ExactLikelihood(stats.norm(1., 1.).logpdf)
    a = run_npmc(NpmcConfig(M=40, K=2, seed=6), likelihood, TOY_BOX)
    b = run_npmc(NpmcConfig(M=40, K=2, seed=6), likelihood, TOY_BOX, workers=2)
    assert np.array_equal(a.final.thetas, b.final.thetas)
    assert np.array_equal(a.final_estimate, b.final_estimate)


def test_npmc_zero_iterations_is_plain_importance_sampling():
    likelihood = ExactLikelihood(toy_log_likelihood)
    result = run_npmc(NpmcConfig(M=100, K=0, M_c=1, seed=7), likelihood,
            TOY_BOX)
    samples = result.final
    expected, _ = normalize_log_weights(
            [toy_log_likelihood(theta) for theta in samples.thetas])
    assert np.allclose(samples.weights, expected)
    assert result.proposals == []


def test_npmc_all_zero_weights():
    with pytest.raises(ProposalDegeneracyError):
        run_npmc(NpmcConfig(M=10, K=1), failing_likelihood, TOY_BOX)


def _error_slope(noise_scale, rng):
    sizes = 2**np.arange(5, 13)
    errors = []
    for M in sizes:
        m_c = int(math.floor(math.sqrt(M)))
        errs = []
        for _ in range(100):
            thetas = TOY_BOX.sample(M, rng)
            log_iws = stats.norm.logpdf(thetas[:, 0], 1., 1.)
            if noise_scale:
                log_iws = (log_iws + noise_scale * rng.standard_normal(M)
                        - 0.5 * noise_scale**2)
            weights, _ = normalize_log_weights(clip_log_weights(log_iws, m_c))
            errs.append(abs(weights @ thetas[:, 0] - 1.))
        errors.append(np.mean(errs))
    slope, _ = np.polyfit(np.log(sizes), np.log(errors), 1)
    return slope


@pytest.mark.slow
def test_error_rate_exact_weights():
    assert -0.65 <= _error_slope(0., np.random.default_rng(8)) <= -0.35


@pytest.mark.slow
def test_error_rate_noisy_weights():
    assert -0.65 <= _error_slope(0.5, np.random.default_rng(9)) <= -0.35


@pytest.mark.slow
def test_npmc_recovers_repressilator_parameters():
    from npmc.experiments import make_dataset, outcome_seed, run_method
    from npmc.settings import make_config

    close = 0
    for seed in range(10):
        config = make_config({
            "method": {"npmc": {"M": 50, "K": 10, "N": 100}},
            "seeds": {"master": seed}})
        trajectory, obs = make_dataset(config)
        assert len(obs) == 1000
        _, estimate = run_method(config, "npmc", obs, trajectory.states[0],
                outcome_seed(config), workers=4)
        q, _, _, beta_a = estimate
        if abs(q - 0.85) <= 0.15 and abs(beta_a - 0.85) <= 0.15:
            close += 1
    assert close >= 8

# }}}


if __name__ == "__main__":
    import sys
    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        from pytest import main
        main([__file__])

# vim: foldmethod=marker
