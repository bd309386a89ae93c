__copyright__ = """
Copyright (C) 2026 The npmc contributors
"""

__license__ = """
Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in
all copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
THE SOFTWARE.
"""


"""Post-processing: weighted kernel density curves and NMSE tables."""

import numpy as np
from scipy import integrate, stats

from npmc.bootstrap import effective_sample_size


# {{{ kernel density

class KdeCurve(object):
    def __init__(self, grid, density, bandwidth):
        self.grid = grid
        self.density = density
        self.bandwidth = bandwidth

    def integral(self):
        return float(integrate.trapezoid(self.density, self.grid))

    def __repr__(self):
        return "KdeCurve(%d points on [%g, %g], bandwidth=%g)" % (
                len(self.grid), self.grid[0], self.grid[-1], self.bandwidth)


def _check_samples(samples, weights):
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if not len(samples):
        raise ValueError("no samples to estimate a density from")
    if weights is None:
        weights = np.full(len(samples), 1. / len(samples))
    weights = np.asarray(weights, dtype=np.float64).ravel()
    if weights.shape != samples.shape:
        raise ValueError("got %d weights for %d samples"
                % (len(weights), len(samples)))
    if np.any(weights < 0):
        raise ValueError("weights must be nonnegative")
    return samples, weights


def silverman_bandwidth(samples, weights=None):
    """``1.06 * sigma_w * ESS**(-1/5)``, with the weighted standard deviation
    and the effective sample size of the normalized weights.
    """
    samples, weights = _check_samples(samples, weights)
    if len(samples) < 2:
        raise ValueError("a bandwidth needs at least two samples")

    weights = weights / weights.sum()
    mean = weights @ samples
    sigma = np.sqrt(weights @ (samples - mean)**2)
    if not sigma > 0:
        raise ValueError("samples have zero weighted variance")
    return 1.06 * sigma * effective_sample_size(weights)**(-0.2)


def weighted_kde(samples, weights, grid, bandwidth=None):
    """Evaluate ``sum_i w_i N(x; samples_i, bandwidth**2)`` on *grid*.

    The weights are used as given; pass normalized weights for a density.
    Without *bandwidth* the Silverman rule is used.
    """
    samples, weights = _check_samples(samples, weights)
    grid = np.asarray(grid, dtype=np.float64)
    if bandwidth is None:
        bandwidth = silverman_bandwidth(samples, weights)
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")

    kernel = stats.norm.pdf(grid[:, np.newaxis], loc=samples[np.newaxis, :],
            scale=bandwidth)
    return KdeCurve(grid, kernel @ weights, float(bandwidth))


def kde_grid(box, points=200):
    """One evaluation grid per parameter, spanning the prior box."""
    return [np.linspace(low, high, points)
            for low, high in zip(box.lows, box.highs)]


def prior_curve(box, index, grid):
    """The uniform prior density of parameter *index* on *grid*."""
    low, high = box.lows[index], box.highs[index]
    grid = np.asarray(grid, dtype=np.float64)
    inside = (grid > low) & (grid < high)
    return np.where(inside, 1. / (high - low), 0.)


def marginal_curves(thetas, weights, grids):
    """Weighted KDE of every column of *thetas* on its grid. Columns whose
    weighted variance vanishes yield ``None``.
    """
    thetas = np.asarray(thetas)
    curves = []
    for j, grid in enumerate(grids):
        try:
            curves.append(weighted_kde(thetas[:, j], weights, grid))
        except ValueError:
            curves.append(None)
    return curves

# }}}


# {{{ NMSE

class NmseReport(object):
    def __init__(self, method, names, mean, std, n_runs, n_failed=0):
        if n_runs < 1:
            raise ValueError("an NMSE report needs at least one run")
        self.method = method
        self.names = tuple(names)
        self.mean = mean
        self.std = std
        self.n_runs = n_runs
        self.n_failed = n_failed

    def as_rows(self):
        return [dict(method=self.method, parameter=name, nmse_mean=mu,
                    nmse_std=sd, runs=self.n_runs, failed=self.n_failed)
                for name, mu, sd in zip(self.names, self.mean, self.std)]

    def __repr__(self):
        return "NmseReport(%s, runs=%d, %s)" % (self.method, self.n_runs,
                ", ".join("%s=%.4g" % (name, mu)
                    for name, mu in zip(self.names, self.mean)))


def nmse(estimates, truth, method="", names=None, n_failed=0):
    """Squared errors relative to ``truth**2``, averaged over runs.

    :arg estimates: one estimate vector per run.
    """
    if names is None:
        names = getattr(truth, "_fields", None)
    estimates = np.atleast_2d(np.asarray(estimates, dtype=np.float64))
    truth = np.asarray(truth, dtype=np.float64)
    if not estimates.size:
        raise ValueError("no estimates to score")
    if np.any(truth == 0):
        raise ValueError("NMSE is undefined for a zero true parameter")
    if names is None:
        names = ["theta%d" % j for j in range(len(truth))]

    errors = (estimates - truth)**2 / truth**2
    return NmseReport(method, names, errors.mean(axis=0), errors.std(axis=0),
            len(estimates), n_failed)

# }}}

# vim:foldmethod=marker
