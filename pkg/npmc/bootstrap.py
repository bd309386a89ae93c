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


"""Bootstrap particle filter and the unbiased likelihood estimate it yields.

All weights are handled as logarithms: the product over thousands of ticks
underflows any floating point format otherwise.
"""

import numpy as np

from npmc.lowlevel import DegenerateWeightsError


# {{{ weights and resampling

def normalize_log_weights(log_w):
    """
    :returns: ``(weights, log_mean)`` where *weights* is the softmax of
        *log_w* and *log_mean* is ``log(mean(exp(log_w)))``.
    :raises DegenerateWeightsError: if every entry is ``-inf``.
    """
    log_w = np.asarray(log_w, dtype=np.float64)
    if log_w.ndim != 1 or not len(log_w):
        raise ValueError("log-weights must be a nonempty vector")
    if np.isnan(log_w).any():
        raise ValueError("log-weights contain NaN")

    top = log_w.max()
    if top == -np.inf:
        raise DegenerateWeightsError("all weights are zero")
    if top == np.inf:
        raise ValueError("log-weights contain +inf")

    w = np.exp(log_w - top)
    total = w.sum()
    return w / total, top + (np.log(total) - np.log(len(log_w)))


def multinomial_resample(weights, n_out, rng):
    """Draw *n_out* i.i.d. indices from the categorical law *weights*."""
    if n_out < 1:
        raise ValueError("need at least one draw")
    cdf = np.cumsum(weights)
    u = rng.random(n_out) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(cdf) - 1)


def effective_sample_size(weights):
    weights = np.asarray(weights, dtype=np.float64)
    return 1. / np.sum(weights**2)

# }}}


# {{{ results

class ParticleCloud(object):
    def __init__(self, particles, weights, tick):
        weights = np.asarray(weights, dtype=np.float64)
        if len(particles) < 1 or len(particles) != len(weights):
            raise ValueError("need as many weights as particles, at least one")
        if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
            raise ValueError("particle weights must be a probability vector")
        self.particles = particles
        self.weights = weights
        self.tick = tick

    @property
    def n_particles(self):
        return len(self.particles)


class LogLikelihoodEstimate(object):
    """``log l^N(y | theta)`` together with its per-tick terms
    ``log((1/N) sum_i l_n(y_n | x_n^i))``.
    """

    def __init__(self, increments, n_particles, ess=None, cloud=None):
        self.increments = np.asarray(increments, dtype=np.float64)
        self.log_value = float(np.sum(self.increments))
        self.n_particles = n_particles
        self.ess = ess
        self.cloud = cloud

    @property
    def n_observations(self):
        return len(self.increments)

    def cumulative(self):
        """``log l^N(y_{1:n} | theta)`` for ``n = 1..R``."""
        return np.cumsum(self.increments)

    def __repr__(self):
        return "LogLikelihoodEstimate(log_value=%r, N=%d, R=%d)" % (
                self.log_value, self.n_particles, self.n_observations)

# }}}


def run_filter(model, theta, obs, n_particles, rng, diagnostics=False):
    """Run the bootstrap filter with *n_particles* particles over *obs*.

    Each tick propagates every particle through the model's transition,
    weights it by the observation density and resamples multinomially.

    :raises DegenerateWeightsError: with the failing ``tick`` (1-based) when
        every particle lands where the observation density is zero.
    """
    if n_particles < 1:
        raise ValueError("need at least one particle")
    if not len(obs):
        raise ValueError("need at least one observation")

    values = getattr(obs, "values", obs)
    increments = np.empty(len(values))
    ess = np.empty(len(values)) if diagnostics else None

    x = model.sample_prior(n_particles, rng, theta)
    weights = None
    for n, y in enumerate(values):
        x = model.sample_transition(x, theta, rng)
        log_w = model.log_obs_density(y, x, theta)
        try:
            weights, increments[n] = normalize_log_weights(log_w)
        except DegenerateWeightsError:
            raise DegenerateWeightsError(
                    "all particles have zero weight at tick %d" % (n + 1),
                    tick=n + 1)
        if diagnostics:
            ess[n] = effective_sample_size(weights)
        x = x[multinomial_resample(weights, n_particles, rng)]

    cloud = ParticleCloud(x, np.full(n_particles, 1. / n_particles),
            len(values))
    return LogLikelihoodEstimate(increments, n_particles, ess=ess, cloud=cloud)


# {{{ likelihood callables

class ParticleLikelihood(object):
    """``(theta, rng) -> log l^N(y | theta)`` by a fresh filter run."""

    def __init__(self, model, obs, n_particles):
        self.model = model
        self.obs = obs
        self.n_particles = n_particles

    def estimate(self, theta, rng):
        return run_filter(self.model, theta, self.obs, self.n_particles, rng)

    def __call__(self, theta, rng):
        return self.estimate(theta, rng).log_value


class ExactLikelihood(object):
    """Wrap a deterministic ``theta -> log l(y | theta)``; *rng* is ignored."""

    def __init__(self, log_likelihood):
        self.log_likelihood = log_likelihood

    def __call__(self, theta, rng):
        return float(np.asarray(self.log_likelihood(theta)).item())

# }}}

# vim:foldmethod=marker
