import math

import numpy as np
import pytest
from scipy import stats

from npmc.sampler import PriorBox, ThetaVector
from npmc.stats import (
        kde_grid, marginal_curves, nmse, prior_curve, silverman_bandwidth,
        weighted_kde)


# {{{ kernel density

def test_single_sample_kde_is_kernel():
    grid = np.linspace(-3, 5, 81)
    curve = weighted_kde([1.], [1.], grid, 0.7)
    assert np.allclose(curve.density, stats.norm.pdf(grid, 1., 0.7))


def test_symmetric_samples_give_symmetric_kde():
    grid = np.linspace(-4, 6, 101)
    curve = weighted_kde([0., 2.], [0.5, 0.5], grid, 0.5)
    assert np.allclose(curve.density, curve.density[::-1])


def test_kde_matches_double_loop():
    rng = np.random.default_rng(0)
    samples = rng.normal(size=30)
    weights = rng.random(30)
    weights /= weights.sum()
    grid = np.linspace(-4, 4, 25)
    bw = 0.3

    expected = []
    for x in grid:
        total = 0.
        for s, w in zip(samples, weights):
            total += w * math.exp(-0.5 * ((x - s) / bw)**2) / (
                    bw * math.sqrt(2 * math.pi))
        expected.append(total)

    curve = weighted_kde(samples, weights, grid, bw)
    assert np.allclose(curve.density, expected, rtol=0, atol=1e-12)


def test_kde_is_linear_in_weights():
    rng = np.random.default_rng(1)
    samples = rng.normal(size=20)
    w1, w2 = rng.random(20), rng.random(20)
    grid = np.linspace(-3, 3, 31)
    lhs = (weighted_kde(samples, w1, grid, 0.4).density
            + weighted_kde(samples, w2, grid, 0.4).density)
    rhs = weighted_kde(samples, w1 + w2, grid, 0.4).density
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-15)


def test_kde_integrates_to_one():
    rng = np.random.default_rng(2)
    samples = rng.normal(2., 1.5, size=200)
    bw = silverman_bandwidth(samples)
    grid = np.linspace(samples.min() - 3 * bw, samples.max() + 3 * bw, 2000)
    curve = weighted_kde(samples, None, grid)
    assert curve.bandwidth == pytest.approx(bw)
    assert (curve.density >= 0).all()
    assert abs(curve.integral() - 1) < 0.02


def test_kde_preconditions():
    with pytest.raises(ValueError):
        weighted_kde([], [], [0.], 1.)
    with pytest.raises(ValueError):
        weighted_kde([0.], [1.], [0.], 0.)
    with pytest.raises(ValueError):
        weighted_kde([0., 1.], [1.], [0.], 1.)


def test_silverman_bandwidth():
    rng = np.random.default_rng(3)
    x = rng.normal(size=100)
    x = (x - x.mean()) / x.std()
    assert silverman_bandwidth(x) == pytest.approx(1.06 * 100**-0.2)
    assert silverman_bandwidth(x) == pytest.approx(0.422, abs=1e-3)
    assert silverman_bandwidth(5 * x) == pytest.approx(
            5 * silverman_bandwidth(x))

    with pytest.raises(ValueError):
        silverman_bandwidth(np.ones(10))
    with pytest.raises(ValueError):
        silverman_bandwidth([1.])


def test_grids_and_prior_curves():
    box = PriorBox.default()
    grids = kde_grid(box, 11)
    assert len(grids) == 4
    assert grids[2][0] == 50. and grids[2][-1] == 300.

    curve = prior_curve(box, 2, [40., 100., 200., 310.])
    assert np.allclose(curve, [0., 1. / 250, 1. / 250, 0.])


def test_marginal_curves():
    rng = np.random.default_rng(4)
    thetas = PriorBox.default().sample(100, rng)
    thetas[:, 3] = 0.5
    curves = marginal_curves(thetas, None, kde_grid(PriorBox.default(), 50))
    assert curves[3] is None
    assert all(curve.density.shape == (50,) for curve in curves[:3])

# }}}


# {{{ NMSE

TRUTH = ThetaVector.truth()


def test_nmse_of_exact_estimates():
    report = nmse([TRUTH, TRUTH], TRUTH, method="oracle")
    assert np.array_equal(report.mean, np.zeros(4))
    assert report.names == ("Q", "m", "alpha", "beta_a")
    assert report.n_runs == 2


def test_nmse_of_doubled_estimate():
    report = nmse([2 * np.asarray(TRUTH)], TRUTH)
    assert np.allclose(report.mean, 1.)
    assert np.allclose(report.std, 0.)


def test_nmse_of_symmetric_errors():
    delta = np.array([0.1, 0.2, 5., 0.05])
    report = nmse([np.asarray(TRUTH) + delta, np.asarray(TRUTH) - delta],
            TRUTH)
    assert np.allclose(report.mean, delta**2 / np.asarray(TRUTH)**2)


def test_nmse_shift_affects_one_parameter():
    rng = np.random.default_rng(5)
    estimates = np.asarray(TRUTH) * (1 + 0.1 * rng.normal(size=(10, 4)))
    base = nmse(estimates, TRUTH)
    shifted = estimates.copy()
    shifted[:, 2] += 10.
    moved = nmse(shifted, TRUTH)
    assert moved.mean[2] > base.mean[2]
    assert np.array_equal(moved.mean[[0, 1, 3]], base.mean[[0, 1, 3]])


def test_nmse_preconditions():
    with pytest.raises(ValueError):
        nmse([], TRUTH)
    with pytest.raises(ValueError):
        nmse([[1., 1.]], [0., 1.])


def test_nmse_rows():
    rows = nmse([TRUTH], TRUTH, method="pmh", n_failed=2).as_rows()
    assert len(rows) == 4
    assert rows[0]["method"] == "pmh"
    assert rows[0]["failed"] == 2

# }}}


if __name__ == "__main__":
    import sys
    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        from pytest import main
        main([__file__])

# vim: foldmethod=marker
