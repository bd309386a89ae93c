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


"""Nonlinear population Monte Carlo: iterated importance sampling whose
weights are clipped before normalization and whose Gaussian proposals are
refit to the previous iteration's weighted sample.
"""

import time
from collections import namedtuple

import numpy as np
from scipy import stats

from npmc.bootstrap import normalize_log_weights, effective_sample_size
from npmc.lowlevel import (
        ConfigError, DegenerateWeightsError, NumericalRangeError,
        ProposalDegeneracyError, derive_rng, inference_log, parallel_map)
from npmc.ssm import THETA_NAMES

__all__ = [
        "ThetaVector", "PriorBox", "GaussianProposal", "WeightedSampleSet",
        "NpmcConfig", "NpmcResult", "WeightEvaluation",
        "clip_log_weights", "evaluate_log_iw", "fit_gaussian_proposal",
        "run_npmc", "posterior_mean", "posterior_mse", "effective_sample_size",
        ]


# {{{ parameter vectors and prior

class ThetaVector(namedtuple("ThetaVector", THETA_NAMES)):
    """The unknowns ``(Q, m, alpha, beta_a)``."""

    __slots__ = ()

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(THETA_NAMES),):
            raise ValueError("theta has %d entries" % len(THETA_NAMES))
        return cls(*(float(v) for v in values))

    @classmethod
    def truth(cls):
        return cls(0.85, 2.6, 216., 0.85)

    def as_array(self):
        return np.array(self, dtype=np.float64)

    def __array__(self, dtype=None, copy=None):
        return np.array(tuple(self), dtype=dtype or np.float64)

    def in_support(self, box=None):
        box = PriorBox.default() if box is None else box
        return bool(box.contains(self.as_array()))


class PriorBox(object):
    """Independent uniform priors on the open box ``(low, high)``."""

    def __init__(self, lows, highs, names=None):
        self.lows = np.atleast_1d(np.asarray(lows, dtype=np.float64))
        self.highs = np.atleast_1d(np.asarray(highs, dtype=np.float64))
        if self.lows.shape != self.highs.shape or self.lows.ndim != 1:
            raise ConfigError("prior bounds must be matching vectors")
        if not np.all(self.lows < self.highs):
            raise ConfigError("every prior lower bound must be below its "
                    "upper bound")
        self.names = tuple(names) if names is not None else tuple(
                "theta%d" % i for i in range(len(self.lows)))
        self._log_volume = float(np.sum(np.log(self.highs - self.lows)))

    @classmethod
    def default(cls):
        return cls([0., 1., 50., 0.], [1., 5., 300., 1.], THETA_NAMES)

    @property
    def dim(self):
        return len(self.lows)

    @property
    def ranges(self):
        return self.highs - self.lows

    def contains(self, theta):
        theta = np.asarray(theta, dtype=np.float64)
        return np.all((theta > self.lows) & (theta < self.highs), axis=-1)

    def log_density(self, theta):
        inside = self.contains(theta)
        return np.where(inside, -self._log_volume, -np.inf)[()]

    def sample(self, n, rng):
        return self.lows + self.ranges * rng.random((n, self.dim))

    def as_dict(self):
        return dict((name, [float(lo), float(hi)])
                for name, lo, hi in zip(self.names, self.lows, self.highs))

# }}}


# {{{ proposals and weighted samples

class GaussianProposal(object):
    def __init__(self, mean, cov):
        self.mean = np.asarray(mean, dtype=np.float64)
        cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
        if cov.shape != (len(self.mean), len(self.mean)):
            raise ValueError("covariance shape does not match the mean")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * np.abs(cov).max()):
            raise ValueError("proposal covariance must be symmetric")
        self.cov = 0.5 * (cov + cov.T)
        try:
            self._dist = stats.multivariate_normal(self.mean, self.cov)
        except (ValueError, np.linalg.LinAlgError) as e:
            raise ProposalDegeneracyError(
                    "proposal covariance is not positive definite: %s" % e)

    def sample(self, n, rng):
        return rng.multivariate_normal(self.mean, self.cov, size=n,
                method="cholesky")

    def log_density(self, theta):
        return self._dist.logpdf(theta)

    def __repr__(self):
        return "GaussianProposal(mean=%r, cov=%r)" % (self.mean, self.cov)


class WeightedSampleSet(object):
    """One iteration's samples with raw (IW) and clipped (TIW) log-weights
    and the normalized clipped weights.
    """

    def __init__(self, thetas, log_iws, log_tiws, weights, iteration):
        self.thetas = np.asarray(thetas, dtype=np.float64)
        self.log_iws = np.asarray(log_iws, dtype=np.float64)
        self.log_tiws = np.asarray(log_tiws, dtype=np.float64)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.iteration = iteration

        if abs(self.weights.sum() - 1) > 1e-12:
            raise ValueError("normalized weights must sum to one")

    @classmethod
    def from_weights(cls, thetas, weights, iteration=0):
        """A set with given normalized weights and no clipping."""
        weights = np.asarray(weights, dtype=np.float64)
        with np.errstate(divide="ignore"):
            log_w = np.log(weights)
        return cls(thetas, log_w, log_w, weights, iteration)

    @property
    def n_samples(self):
        return len(self.thetas)

    @property
    def ess(self):
        return effective_sample_size(self.weights)

    @property
    def n_zero_weight(self):
        return int(np.sum(self.log_iws == -np.inf))

# }}}


# {{{ clipping

def clip_log_weights(log_iws, m_c):
    """Flatten the *m_c* largest weights to the *m_c*-th largest one.

    Ties are ranked by index, lowest first. Works on logarithms, which the
    transformation commutes with.
    """
    log_iws = np.asarray(log_iws, dtype=np.float64)
    if not 1 <= m_c <= len(log_iws):
        raise ValueError("clip count must be between 1 and the number of "
                "weights")
    if not np.isfinite(log_iws).any():
        raise DegenerateWeightsError("no finite weight to clip")

    order = np.argsort(-log_iws, kind="stable")
    top = order[:m_c]
    out = log_iws.copy()
    out[top] = log_iws[order[m_c - 1]]
    return out

# }}}


# {{{ estimators

def posterior_mean(samples):
    return samples.weights @ samples.thetas


def posterior_mse(samples, estimate):
    diff = samples.thetas - np.asarray(estimate, dtype=np.float64)
    return float(samples.weights @ np.sum(diff**2, axis=1))


def fit_gaussian_proposal(samples, jitter):
    """Weighted mean and covariance of *samples*, plus ``diag(jitter)``."""
    weights = samples.weights
    if np.count_nonzero(weights) < 2:
        raise ProposalDegeneracyError(
                "cannot fit a proposal to fewer than two weighted samples "
                "(iteration %s)" % samples.iteration)

    mean = weights @ samples.thetas
    diff = samples.thetas - mean
    cov = (weights[:, np.newaxis] * diff).T @ diff
    cov = 0.5 * (cov + cov.T)
    cov = cov + np.diag(np.broadcast_to(
        np.asarray(jitter, dtype=np.float64), mean.shape))
    return GaussianProposal(mean, cov)

# }}}


# {{{ importance weights

STATUS_OK = "ok"
STATUS_OUTSIDE = "outside"
STATUS_DEGENERATE = "degenerate"
STATUS_NUMERICAL = "numerical"

WeightEvaluation = namedtuple("WeightEvaluation",
        ["log_iw", "log_likelihood", "status"])


def evaluate_log_iw(theta, proposal, prior, likelihood, rng):
    """``log l^N(y|theta) + log p_0(theta) - log q(theta)``.

    *likelihood* is a callable ``(theta, rng) -> log-likelihood``. Samples
    outside the prior box get ``-inf`` without calling it. When *proposal* is
    the prior itself, the ratio cancels and the log-likelihood is returned
    as is.
    """
    log_prior = prior.log_density(theta)
    if log_prior == -np.inf:
        return WeightEvaluation(-np.inf, np.nan, STATUS_OUTSIDE)

    try:
        log_lik = likelihood(theta, rng)
    except DegenerateWeightsError as e:
        inference_log.info("zero likelihood estimate at %s: %s", theta, e)
        return WeightEvaluation(-np.inf, -np.inf, STATUS_DEGENERATE)
    except NumericalRangeError as e:
        inference_log.warning("model left the numerical range at %s: %s",
                theta, e)
        return WeightEvaluation(-np.inf, np.nan, STATUS_NUMERICAL)

    if proposal is prior:
        return WeightEvaluation(log_lik, log_lik, STATUS_OK)
    return WeightEvaluation(
            log_lik + log_prior - proposal.log_density(theta), log_lik,
            STATUS_OK)

# }}}


# {{{ driver

class NpmcConfig(object):
    def __init__(self, M, K, N=100, seed=0, M_c=None, jitter=None):
        self.M = int(M)
        self.K = int(K)
        self.N = int(N)
        self.seed = int(seed)
        self.M_c = int(np.floor(np.sqrt(self.M))) if M_c is None else int(M_c)
        self.jitter = jitter
        self.validate()

    def validate(self):
        if self.M < 2:
            raise ConfigError("NPMC needs M >= 2 samples per iteration")
        if self.K < 0:
            raise ConfigError("the number of iterations K must be >= 0")
        if self.N < 1:
            raise ConfigError("the filter needs N >= 1 particles")
        if not 1 <= self.M_c or self.M_c**2 > self.M:
            raise ConfigError("the clip count must satisfy 1 <= M_c <= sqrt(M)")
        if self.jitter is not None and np.any(np.asarray(self.jitter) < 0):
            raise ConfigError("covariance jitter must be nonnegative")

    def resolve_jitter(self, prior):
        if self.jitter is None:
            return 1e-6 * prior.ranges**2
        return np.broadcast_to(np.asarray(self.jitter, dtype=np.float64),
                (prior.dim,)).copy()

    def as_dict(self):
        jitter = self.jitter
        if jitter is not None:
            jitter = np.asarray(jitter).tolist()
        return dict(M=self.M, K=self.K, N=self.N, seed=self.seed, M_c=self.M_c,
                jitter=jitter)


class NpmcResult(object):
    """Everything a run produced; index *k* of the per-iteration lists is
    iteration *k*, with iteration 0 the draw from the prior.
    """

    def __init__(self, config, prior, jitter):
        self.config = config
        self.prior = prior
        self.jitter = jitter
        self.sample_sets = []
        self.proposals = []
        self.estimates = []
        self.mses = []
        self.zero_weight_counts = []
        self.status_counts = []
        self.wall_clock = []

    @property
    def final(self):
        return self.sample_sets[-1]

    @property
    def final_estimate(self):
        return self.estimates[-1]

    @property
    def likelihood_calls(self):
        return sum(counts.get(STATUS_OK, 0) + counts.get(STATUS_DEGENERATE, 0)
                + counts.get(STATUS_NUMERICAL, 0)
                for counts in self.status_counts)


def run_npmc(config, likelihood, prior, workers=1):
    """Run ``config.K`` adaptive iterations after the prior-sampling step.

    Sample *i* of iteration *k* evaluates the likelihood with the random
    stream ``derive_rng(seed, k, 1, i)`` and the draws of iteration *k* come
    from ``derive_rng(seed, k, 0)``, so the result does not depend on
    *workers*.
    """
    jitter = config.resolve_jitter(prior)
    result = NpmcResult(config, prior, jitter)
    proposal = prior

    for k in range(config.K + 1):
        start = time.perf_counter()

        draw_rng = derive_rng(config.seed, k, 0)
        if k == 0:
            thetas = prior.sample(config.M, draw_rng)
        else:
            proposal = fit_gaussian_proposal(result.sample_sets[-1], jitter)
            result.proposals.append(proposal)
            thetas = proposal.sample(config.M, draw_rng)

        evaluations = parallel_map(evaluate_log_iw, [
            (thetas[i], proposal, prior, likelihood,
                derive_rng(config.seed, k, 1, i))
            for i in range(config.M)], workers)

        log_iws = np.array([ev.log_iw for ev in evaluations])
        counts = {}
        for ev in evaluations:
            counts[ev.status] = counts.get(ev.status, 0) + 1

        if not np.isfinite(log_iws).any():
            raise ProposalDegeneracyError(
                    "every importance weight is zero at iteration %d "
                    "(%s); the proposal misses the prior support or the "
                    "likelihood" % (k, ", ".join(
                        "%s: %d" % item for item in sorted(counts.items()))))

        # with fewer nonzero weights than M_c only those are flattened
        m_c = min(config.M_c, int(np.isfinite(log_iws).sum()))
        log_tiws = clip_log_weights(log_iws, m_c)
        weights, _ = normalize_log_weights(log_tiws)
        sample_set = WeightedSampleSet(thetas, log_iws, log_tiws, weights, k)

        estimate = posterior_mean(sample_set)
        result.sample_sets.append(sample_set)
        result.estimates.append(estimate)
        result.mses.append(posterior_mse(sample_set, estimate))
        result.zero_weight_counts.append(sample_set.n_zero_weight)
        result.status_counts.append(counts)
        result.wall_clock.append(time.perf_counter() - start)

        inference_log.info(
                "npmc iteration %d/%d: estimate %s, ESS %.1f, %d zero weights, "
                "%.1fs", k, config.K, np.array2string(estimate, precision=4),
                sample_set.ess, sample_set.n_zero_weight,
                result.wall_clock[-1])

    return result

# }}}

# vim:foldmethod=marker
