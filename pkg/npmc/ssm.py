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


"""State-space models: a prior, a Markov transition sampler and an observation
log-density, plus the exact linear-Gaussian reference model.
"""

import numpy as np
from scipy import linalg as la

from npmc.model import (
        ModelParams, NoiseScales, ObservationSequence, ClampCounter,
        INITIAL_MEAN, SIGMA0, STATE_DIM, OBSERVED_INDICES,
        euler_maruyama_step)
from npmc.lowlevel import NumericalRangeError, model_log

THETA_NAMES = ("Q", "m", "alpha", "beta_a")

LOG_2PI = np.log(2 * np.pi)


# {{{ interface

class StateSpaceModel(object):
    """Interface used by the bootstrap filter.

    Implementations are immutable after construction. *theta* is whatever
    parameter object the model understands; models that do not depend on it
    ignore it.
    """

    state_dim = None
    obs_dim = None

    def sample_prior(self, n, rng, theta=None):
        """:returns: an ``(n, state_dim)`` array drawn from the prior."""
        raise NotImplementedError

    def sample_transition(self, states, theta, rng):
        """Propagate every row of *states* one observation tick ahead."""
        raise NotImplementedError

    def log_obs_density(self, y, states, theta=None):
        """:returns: ``log l(y | x)`` for every row of *states*."""
        raise NotImplementedError

# }}}


# {{{ repressilator

class CompositeKernelConfig(object):
    def __init__(self, m_o, h, noise=None):
        if int(m_o) != m_o or m_o < 1:
            raise ValueError("m_o must be a positive integer")
        if not h > 0:
            raise ValueError("h must be positive")
        self.m_o = int(m_o)
        self.h = float(h)
        self.noise = NoiseScales.zero() if noise is None else noise

    @property
    def tick_duration(self):
        return self.m_o * self.h

    def __repr__(self):
        return "CompositeKernelConfig(m_o=%d, h=%r, noise=%r)" % (
                self.m_o, self.h, self.noise)


def params_from_theta(theta, known=None):
    """Override ``(Q, m, alpha, beta_a)`` of *known* (standard values by
    default) with *theta*. A ``(B, 4)`` *theta* gives batched parameters.
    """
    if isinstance(theta, ModelParams):
        return theta
    if known is None:
        known = ModelParams.standard()

    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[-1] != len(THETA_NAMES):
        raise ValueError("theta must have %d entries" % len(THETA_NAMES))
    return known.replace(**dict(
        (name, theta[..., i]) for i, name in enumerate(THETA_NAMES)))


def composite_transition(state, theta, cfg, rng, known=None,
        clamp_counter=None):
    """Advance *state* by ``cfg.m_o`` Euler-Maruyama steps, i.e. one
    observation tick.
    """
    params = params_from_theta(theta, known)
    x = state
    for _ in range(cfg.m_o):
        x = euler_maruyama_step(x, params, cfg.noise, cfg.h, rng, clamp_counter)
    return x


def repressilator_log_obs_density(y, x, sigma_y):
    """Log of the bivariate density ``N(y; (a_1, a_2), sigma_y**2 I)``."""
    if not sigma_y > 0:
        raise ValueError("sigma_y must be positive for a proper density")
    x = np.asarray(x, dtype=np.float64)
    residual = np.asarray(y, dtype=np.float64) - x[..., OBSERVED_INDICES]
    return (-LOG_2PI - 2 * np.log(sigma_y)
            - 0.5 * np.sum(residual**2, axis=-1) / sigma_y**2)


class RepressilatorSSM(StateSpaceModel):
    """The repressilator seen once per observation tick.

    *theta* is the 4-vector ``(Q, m, alpha, beta_a)``; every other constant
    is taken from *known*.
    """

    state_dim = STATE_DIM
    obs_dim = 2

    def __init__(self, kernel, sigma_y=1., initial_mean=INITIAL_MEAN,
            sigma0=SIGMA0, known=None):
        if not sigma_y > 0:
            raise ValueError("sigma_y must be positive")
        self.kernel = kernel
        self.sigma_y = float(sigma_y)
        self.initial_mean = np.asarray(initial_mean, dtype=np.float64)
        self.sigma0 = float(sigma0)
        self.known = ModelParams.standard() if known is None else known

    def sample_prior(self, n, rng, theta=None):
        x0 = self.initial_mean + self.sigma0 * rng.standard_normal(
                (n, STATE_DIM))
        return np.maximum(x0, 0.)

    def sample_transition(self, states, theta, rng):
        counter = ClampCounter()
        try:
            return composite_transition(states, theta, self.kernel, rng,
                    known=self.known, clamp_counter=counter)
        finally:
            if counter.count:
                model_log.debug("clamped %d components in one tick",
                        counter.count)

    def log_obs_density(self, y, states, theta=None):
        return repressilator_log_obs_density(y, states, self.sigma_y)

# }}}


# {{{ linear-Gaussian reference model

def _cholesky(matrix, what):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if not np.allclose(matrix, matrix.T):
        raise ValueError("%s must be symmetric" % what)
    try:
        return la.cholesky(matrix, lower=True)
    except la.LinAlgError:
        raise ValueError("%s must be positive definite" % what)


class LinearGaussianModel(StateSpaceModel):
    """``x_0 ~ N(m0, P0)``, ``x_n = F x_{n-1} + N(0, Q)``,
    ``y_n = H x_n + N(0, R)``.
    """

    def __init__(self, F, Q, H, R, m0, P0):
        self.F = np.atleast_2d(np.asarray(F, dtype=np.float64))
        self.Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
        self.H = np.atleast_2d(np.asarray(H, dtype=np.float64))
        self.R = np.atleast_2d(np.asarray(R, dtype=np.float64))
        self.m0 = np.atleast_1d(np.asarray(m0, dtype=np.float64))
        self.P0 = np.atleast_2d(np.asarray(P0, dtype=np.float64))

        self.state_dim = len(self.m0)
        self.obs_dim = self.H.shape[0]

        if (self.F.shape != (self.state_dim, self.state_dim)
                or self.Q.shape != self.F.shape
                or self.P0.shape != self.F.shape
                or self.H.shape[1] != self.state_dim
                or self.R.shape != (self.obs_dim, self.obs_dim)):
            raise ValueError("inconsistent linear-Gaussian model dimensions")

        self._chol_Q = _cholesky(self.Q, "transition noise covariance")
        self._chol_R = _cholesky(self.R, "observation noise covariance")
        self._chol_P0 = _cholesky(self.P0, "prior covariance")
        self._log_det_R = 2 * np.sum(np.log(np.diag(self._chol_R)))

    @classmethod
    def scalar(cls, F, Q, H, R, m0, P0):
        return cls([[F]], [[Q]], [[H]], [[R]], [m0], [[P0]])

    def sample_prior(self, n, rng, theta=None):
        z = rng.standard_normal((n, self.state_dim))
        return self.m0 + z @ self._chol_P0.T

    def sample_transition(self, states, theta, rng):
        z = rng.standard_normal(states.shape)
        return states @ self.F.T + z @ self._chol_Q.T

    def log_obs_density(self, y, states, theta=None):
        residual = np.atleast_1d(y) - states @ self.H.T
        white = la.solve_triangular(self._chol_R, residual.T, lower=True)
        return (-0.5 * np.sum(white**2, axis=0)
                - 0.5 * (self.obs_dim * LOG_2PI + self._log_det_R))


class LinearGaussianFamily(StateSpaceModel):
    """Linear-Gaussian models indexed by a parameter: ``builder(theta)``
    returns the :class:`LinearGaussianModel` for *theta*.
    """

    def __init__(self, builder, state_dim, obs_dim):
        self.builder = builder
        self.state_dim = state_dim
        self.obs_dim = obs_dim

    def bind(self, theta):
        return self.builder(theta)

    def sample_prior(self, n, rng, theta=None):
        return self.bind(theta).sample_prior(n, rng)

    def sample_transition(self, states, theta, rng):
        return self.bind(theta).sample_transition(states, theta, rng)

    def log_obs_density(self, y, states, theta=None):
        return self.bind(theta).log_obs_density(y, states)


def kalman_log_likelihood(model, obs):
    """Exact ``log p(y_1, ..., y_R)`` by the Kalman predict/update recursion."""
    values = obs.values if isinstance(obs, ObservationSequence) else obs
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, np.newaxis]
    if values.shape[1] != model.obs_dim:
        raise ValueError("observation dimension %d does not match the model's %d"
                % (values.shape[1], model.obs_dim))

    mean = model.m0.copy()
    cov = model.P0.copy()
    eye = np.eye(model.state_dim)
    total = 0.

    for n, y in enumerate(values):
        mean = model.F @ mean
        cov = model.F @ cov @ model.F.T + model.Q

        innovation = y - model.H @ mean
        s_cov = model.H @ cov @ model.H.T + model.R
        s_cov = 0.5 * (s_cov + s_cov.T)
        try:
            s_chol = la.cho_factor(s_cov, lower=True)
        except la.LinAlgError:
            raise NumericalRangeError(
                    "innovation covariance not positive definite at tick %d"
                    % (n + 1), step=n + 1)

        log_det = 2 * np.sum(np.log(np.diag(s_chol[0])))
        total += -0.5 * (model.obs_dim * LOG_2PI + log_det
                + innovation @ la.cho_solve(s_chol, innovation))

        gain = la.cho_solve(s_chol, model.H @ cov).T
        mean = mean + gain @ innovation
        cov = (eye - gain @ model.H) @ cov

    return float(total)

# }}}

# vim:foldmethod=marker
