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


"""Comparison methods: particle Metropolis-Hastings and a plain ABC-SMC
driven by the deterministic model.
"""

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from npmc.bootstrap import multinomial_resample
from npmc.lowlevel import (
        ConfigError, DegenerateWeightsError, NumericalRangeError,
        StageFailureError, derive_rng, inference_log, parallel_map)
from npmc.model import NoiseScales, OBSERVED_INDICES
from npmc.ssm import CompositeKernelConfig, composite_transition, \
        params_from_theta


# {{{ particle Metropolis-Hastings

# (Q, m, alpha, beta_a)
DEFAULT_PMH_PROPOSAL_VARIANCES = (0.01, 0.01, 100., 0.01)


class PmhConfig(object):
    def __init__(self, L=6000, proposal_variances=DEFAULT_PMH_PROPOSAL_VARIANCES,
            N=100, initial=None, seed=0):
        self.L = int(L)
        self.proposal_variances = np.atleast_1d(
                np.asarray(proposal_variances, dtype=np.float64))
        self.N = int(N)
        self.initial = None if initial is None else np.atleast_1d(
                np.asarray(initial, dtype=np.float64))
        self.seed = int(seed)

        if self.L < 1:
            raise ConfigError("PMH chain length must be at least 1")
        if np.any(self.proposal_variances <= 0):
            raise ConfigError("PMH proposal variances must be positive")
        if self.N < 1:
            raise ConfigError("the filter needs N >= 1 particles")

    def initial_theta(self, prior):
        if self.initial is None:
            return 0.5 * (prior.lows + prior.highs)
        return self.initial

    def as_dict(self):
        return dict(L=self.L, proposal_variances=self.proposal_variances.tolist(),
                N=self.N, seed=self.seed,
                initial=None if self.initial is None else self.initial.tolist())


class PmhChain(object):
    def __init__(self, config, thetas, log_likelihoods, accepted, n_outside=0,
            n_degenerate=0):
        self.config = config
        self.thetas = np.asarray(thetas)
        self.log_likelihoods = np.asarray(log_likelihoods)
        self.accepted = np.asarray(accepted, dtype=bool)
        self.n_outside = n_outside
        self.n_degenerate = n_degenerate

    def __len__(self):
        return len(self.thetas)

    @property
    def acceptance_rate(self):
        return float(np.mean(self.accepted))

    def posterior_mean(self, burn_in=0):
        return self.thetas[burn_in:].mean(axis=0)


def run_pmh(config, likelihood, prior):
    """Gaussian random-walk Metropolis-Hastings on a likelihood estimate.

    Only candidates are sent to *likelihood*; the incumbent keeps the
    estimate it was accepted with. Candidates outside the prior box are
    rejected without evaluation.
    """
    theta = np.array(config.initial_theta(prior), dtype=np.float64)
    log_prior = prior.log_density(theta)
    if log_prior == -np.inf:
        raise ConfigError("the initial PMH state lies outside the prior support")

    rng = derive_rng(config.seed, 0)
    filter_rng = derive_rng(config.seed, 1)

    d = len(theta)
    steps = rng.standard_normal((config.L, d)) * np.sqrt(
            config.proposal_variances)
    log_u = np.log(rng.random(config.L))

    log_lik = likelihood(theta, filter_rng)

    thetas = np.empty((config.L, d))
    log_liks = np.empty(config.L)
    accepted = np.zeros(config.L, dtype=bool)
    n_outside = n_degenerate = 0

    for j in range(config.L):
        candidate = theta + steps[j]
        cand_log_prior = prior.log_density(candidate)

        if cand_log_prior == -np.inf:
            n_outside += 1
        else:
            try:
                cand_log_lik = likelihood(candidate, filter_rng)
            except (DegenerateWeightsError, NumericalRangeError):
                n_degenerate += 1
            else:
                log_ratio = (cand_log_lik + cand_log_prior) - (log_lik + log_prior)
                if log_u[j] < log_ratio:
                    theta, log_lik, log_prior = (
                            candidate, cand_log_lik, cand_log_prior)
                    accepted[j] = True

        thetas[j] = theta
        log_liks[j] = log_lik

    chain = PmhChain(config, thetas, log_liks, accepted, n_outside, n_degenerate)
    inference_log.info("pmh: %d steps, acceptance %.3f, %d outside prior, "
            "%d degenerate", config.L, chain.acceptance_rate, n_outside,
            n_degenerate)
    return chain

# }}}


# {{{ ABC-SMC

DEFAULT_TOLERANCES = (3., 2.5, 2.3, 2.2, 2.1)


class AbcConfig(object):
    def __init__(self, tolerances=DEFAULT_TOLERANCES, n_accept=1200,
            max_draws=1600 * 10**3, kernel_scale=1., batch_size=200, seed=0):
        self.tolerances = tuple(float(eps) for eps in tolerances)
        self.n_accept = int(n_accept)
        self.max_draws = int(max_draws)
        self.kernel_scale = float(kernel_scale)
        self.batch_size = int(batch_size)
        self.seed = int(seed)

        if not self.tolerances:
            raise ConfigError("ABC needs at least one tolerance")
        if any(eps <= 0 for eps in self.tolerances):
            raise ConfigError("ABC tolerances must be positive")
        if any(b >= a for a, b in zip(self.tolerances, self.tolerances[1:])):
            raise ConfigError("ABC tolerances must be strictly decreasing")
        if self.n_accept < 1 or self.max_draws < 1 or self.batch_size < 1:
            raise ConfigError("ABC stage sizes must be positive")
        if self.kernel_scale <= 0:
            raise ConfigError("ABC kernel scale must be positive")

    def as_dict(self):
        return dict(tolerances=list(self.tolerances), n_accept=self.n_accept,
                max_draws=self.max_draws, kernel_scale=self.kernel_scale,
                batch_size=self.batch_size, seed=self.seed)


class DeterministicSimulator(object):
    """Noise-free observation sequences ``(a_1, a_2)`` for a batch of
    parameter vectors, all started from the same recorded state.
    """

    def __init__(self, initial_state, h, m_o, n_observations, known=None):
        self.initial_state = np.asarray(initial_state, dtype=np.float64)
        self.kernel = CompositeKernelConfig(m_o, h, NoiseScales.zero())
        self.n_observations = int(n_observations)
        self.known = known

    def _run(self, thetas):
        params = params_from_theta(thetas, self.known)
        x = np.tile(self.initial_state, (len(thetas), 1))
        ys = np.empty((len(thetas), self.n_observations, len(OBSERVED_INDICES)))
        for n in range(self.n_observations):
            x = composite_transition(x, params, self.kernel, None)
            ys[:, n] = x[:, OBSERVED_INDICES]
        return ys

    def simulate(self, thetas):
        """:returns: a ``(B, R, 2)`` array; rows whose integration failed are
        NaN.
        """
        thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
        if not len(thetas):
            return np.empty((0, self.n_observations, len(OBSERVED_INDICES)))
        try:
            return self._run(thetas)
        except NumericalRangeError:
            if len(thetas) == 1:
                return np.full((1, self.n_observations,
                    len(OBSERVED_INDICES)), np.nan)
            return np.concatenate([self.simulate(theta[np.newaxis])
                for theta in thetas])


def abc_distances(y_obs, y_syn):
    """Normalized RMSE between *y_obs* ``(R, d)`` and each sequence of
    *y_syn* ``(..., R, d)``.

    Per component the RMSE is divided by the standard deviation of
    *y_obs*, then the components are averaged. Invalid (NaN) sequences are
    at distance ``inf``; so is any mismatch on a constant component of
    *y_obs*.
    """
    y_obs = np.asarray(y_obs, dtype=np.float64)
    y_syn = np.asarray(y_syn, dtype=np.float64)
    if y_syn.shape[-2:] != y_obs.shape:
        raise ValueError("observation sequences differ in shape: %s vs %s"
                % (y_obs.shape, y_syn.shape[-2:]))

    rmse = np.sqrt(np.mean((y_syn - y_obs)**2, axis=-2))
    scale = y_obs.std(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rmse == 0, 0., rmse / scale)
    dist = ratio.mean(axis=-1)
    return np.where(np.isnan(dist), np.inf, dist)


def abc_distance(y_obs, y_syn):
    y_obs = getattr(y_obs, "values", y_obs)
    y_syn = getattr(y_syn, "values", y_syn)
    if len(y_obs) != len(y_syn):
        raise ValueError("observation sequences differ in length")
    return float(abc_distances(y_obs, y_syn))


class AbcStage(object):
    def __init__(self, index, tolerance, thetas, weights, distances, draws):
        self.index = index
        self.tolerance = tolerance
        self.thetas = thetas
        self.weights = weights
        self.distances = distances
        self.draws = draws

    @property
    def n_accepted(self):
        return len(self.thetas)

    @property
    def acceptance_rate(self):
        return self.n_accepted / self.draws

    def posterior_mean(self):
        return self.weights @ self.thetas

    def weighted_std(self):
        mean = self.posterior_mean()
        return np.sqrt(self.weights @ (self.thetas - mean)**2)


class AbcPopulation(object):
    def __init__(self, config, stages):
        self.config = config
        self.stages = stages

    @property
    def final(self):
        return self.stages[-1]

    @property
    def total_draws(self):
        return sum(stage.draws for stage in self.stages)

    def posterior_mean(self):
        return self.final.posterior_mean()


def _kernel_log_density(thetas, previous, kernel_sd):
    # log sum_j w_j N(theta | theta_j, diag(kernel_sd**2)) for every theta
    log_k = stats.norm.logpdf(
            thetas[:, np.newaxis, :], loc=previous.thetas[np.newaxis, :, :],
            scale=kernel_sd).sum(axis=-1)
    with np.errstate(divide="ignore"):
        log_w = np.log(previous.weights)
    return logsumexp(log_k + log_w[np.newaxis, :], axis=1)


def _propose(stage_index, batch_index, size, config, prior, previous,
        kernel_sd):
    rng = derive_rng(config.seed, stage_index, batch_index)
    if previous is None:
        return prior.sample(size, rng)
    idx = multinomial_resample(previous.weights, size, rng)
    return previous.thetas[idx] + kernel_sd * rng.standard_normal(
            (size, prior.dim))


def _evaluate_batch(candidates, simulator, y_obs, prior):
    dist = np.full(len(candidates), np.inf)
    inside = prior.contains(candidates)
    if inside.any():
        dist[inside] = abc_distances(y_obs, simulator.simulate(
            candidates[inside]))
    return dist


def run_abc_smc(config, simulator, obs, prior, workers=1):
    """ABC-SMC over ``config.tolerances``.

    Each stage draws candidates (from the prior first, then from the
    previous population moved by a Gaussian kernel), accepts those within
    the stage tolerance and stops after ``n_accept`` acceptances or
    ``max_draws`` draws. Batches are evaluated *workers* at a time but
    consumed in order, so the outcome does not depend on *workers*.
    """
    y_obs = getattr(obs, "values", obs)
    stages = []
    previous = None
    kernel_sd = None
    wave = max(1, workers or 1)

    for t, eps in enumerate(config.tolerances):
        if previous is not None:
            kernel_sd = config.kernel_scale * np.maximum(
                    previous.weighted_std(), 1e-12 * prior.ranges)

        thetas, dists = [], []
        n_accepted = draws = 0
        batch_index = 0
        while n_accepted < config.n_accept and draws < config.max_draws:
            sizes = []
            budget = config.max_draws - draws
            for _ in range(wave):
                size = min(config.batch_size, budget - sum(sizes))
                if size <= 0:
                    break
                sizes.append(size)

            batches = [
                    _propose(t, batch_index + i, size, config, prior, previous,
                        kernel_sd)
                    for i, size in enumerate(sizes)]
            results = parallel_map(_evaluate_batch, [
                (candidates, simulator, y_obs, prior) for candidates in batches],
                workers)

            for candidates, dist in zip(batches, results):
                if n_accepted >= config.n_accept:
                    break
                hit = np.flatnonzero(dist <= eps)[:config.n_accept - n_accepted]
                thetas.append(candidates[hit])
                dists.append(dist[hit])
                n_accepted += len(hit)
                draws += len(candidates)
                batch_index += 1

        if n_accepted == 0:
            raise StageFailureError(
                    "ABC stage %d accepted nothing within tolerance %g after "
                    "%d draws" % (t + 1, eps, draws),
                    stage=t + 1, draws=draws, tolerance=eps)
        if n_accepted < config.n_accept:
            inference_log.warning("ABC stage %d stopped at the draw limit with "
                    "%d of %d acceptances", t + 1, n_accepted, config.n_accept)

        thetas = np.concatenate(thetas)
        if previous is None:
            weights = np.full(len(thetas), 1. / len(thetas))
        else:
            log_w = prior.log_density(thetas) - _kernel_log_density(
                    thetas, previous, kernel_sd)
            weights = np.exp(log_w - logsumexp(log_w))

        stage = AbcStage(t + 1, eps, thetas, weights, np.concatenate(dists),
                draws)
        stages.append(stage)
        previous = stage

        inference_log.info("ABC stage %d (eps=%g): %d accepted of %d draws, "
                "mean %s", t + 1, eps, n_accepted, draws,
                np.array2string(stage.posterior_mean(), precision=4))

    return AbcPopulation(config, stages)

# }}}

# vim:foldmethod=marker
