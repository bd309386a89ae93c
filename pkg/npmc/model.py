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


"""Stochastic coupled repressilator: two cells, three repressors each, coupled
through a diffusing autoinducer. Concentrations are dimensionless.

A state is a float array whose last axis has length 14, laid out per cell as
``(a, b, c, A, B, C, S)`` for cell 1 and then for cell 2. All functions here
accept a single state of shape ``(14,)`` or a batch of shape ``(n, 14)``.
"""

from collections import namedtuple

import numpy as np
from scipy.special import expit

from npmc.lowlevel import NumericalRangeError, model_log


# {{{ constants

N_CELLS = 2
CELL_VARIABLES = ("a", "b", "c", "A", "B", "C", "S")
N_VARS = len(CELL_VARIABLES)
STATE_DIM = N_CELLS * N_VARS

STATE_COLUMNS = tuple(
        "%s%d" % (name, cell + 1)
        for cell in range(N_CELLS)
        for name in CELL_VARIABLES)

OBSERVED_COLUMNS = ("a1", "a2")
OBSERVED_INDICES = [0, N_VARS]

INITIAL_MEAN = np.array([
    4.5, 6, 3, 4.2, 19, 4.3, 0.1,
    7.3, 1.5, 3.4, 7, 6.5, 3.6, 0.08])
SIGMA0 = 0.05

# }}}


# {{{ parameters

PARAM_NAMES = ("Q", "m", "alpha", "beta_a", "beta_b", "beta_c",
        "eta", "kappa", "ks0", "ks1")

_STANDARD_VALUES = dict(
        Q=0.85, m=2.6, alpha=216., beta_a=0.85, beta_b=0.1, beta_c=0.1,
        eta=2., kappa=25., ks0=1., ks1=0.01)


class ModelParams(object):
    """Kinetic constants of the coupled repressilator.

    Any field may be a 1-d array instead of a scalar, in which case row *i*
    of a state batch is integrated with entry *i* of every array field.
    """

    n_cells = N_CELLS

    def __init__(self, Q, m, alpha, beta_a, beta_b, beta_c, eta, kappa,
            ks0, ks1):
        self.Q = Q
        self.m = m
        self.alpha = alpha
        self.beta_a = beta_a
        self.beta_b = beta_b
        self.beta_c = beta_c
        self.eta = eta
        self.kappa = kappa
        self.ks0 = ks0
        self.ks1 = ks1

        self._columns = None

    @classmethod
    def standard(cls):
        return cls(**_STANDARD_VALUES)

    def replace(self, **kwargs):
        values = self.as_dict()
        unknown = set(kwargs) - set(values)
        if unknown:
            raise ValueError("unknown model parameters: %s"
                    % ", ".join(sorted(unknown)))
        values.update(kwargs)
        return type(self)(**values)

    def as_dict(self):
        return dict((name, getattr(self, name)) for name in PARAM_NAMES)

    @property
    def is_batched(self):
        return any(np.ndim(getattr(self, name)) for name in PARAM_NAMES)

    def validate(self):
        for name in PARAM_NAMES:
            value = np.asarray(getattr(self, name), dtype=np.float64)
            if not np.all(np.isfinite(value)):
                raise ValueError("parameter %s must be finite" % name)
            if name == "Q":
                if np.any(value <= 0) or np.any(value >= 1):
                    raise ValueError("Q must lie in (0, 1)")
            elif np.any(value <= 0):
                raise ValueError("parameter %s must be positive" % name)
        return self

    def columns(self):
        """Parameters as arrays broadcastable against per-cell quantities
        of shape ``(..., 2)``.
        """
        if self._columns is None:
            self._columns = dict(
                    (name, np.asarray(getattr(self, name), dtype=np.float64)
                        [..., np.newaxis])
                    for name in PARAM_NAMES)
        return self._columns

    def __eq__(self, other):
        return (type(self) is type(other)
                and all(np.array_equal(getattr(self, name), getattr(other, name))
                    for name in PARAM_NAMES))

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "ModelParams(%s)" % ", ".join(
                "%s=%r" % (name, getattr(self, name)) for name in PARAM_NAMES)


class NoiseScales(object):
    """Multiplicative noise factors, one per variable class. All zero gives
    the deterministic model.
    """

    def __init__(self, sigma_a=0., sigma_b=0., sigma_c=0., sigma_A=0.,
            sigma_B=0., sigma_C=0., sigma_S=0.):
        self.sigma_a = sigma_a
        self.sigma_b = sigma_b
        self.sigma_c = sigma_c
        self.sigma_A = sigma_A
        self.sigma_B = sigma_B
        self.sigma_C = sigma_C
        self.sigma_S = sigma_S

        scales = np.array([sigma_a, sigma_b, sigma_c, sigma_A, sigma_B,
            sigma_C, sigma_S], dtype=np.float64)
        if not np.all(np.isfinite(scales)) or np.any(scales < 0):
            raise ValueError("noise scales must be finite and nonnegative")

        self._state_vector = np.tile(scales, N_CELLS)

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def uniform(cls, sigma):
        return cls(*([sigma] * N_VARS))

    @property
    def is_zero(self):
        return not np.any(self._state_vector)

    def state_vector(self):
        """Scale factor for each of the 14 state components."""
        return self._state_vector

    def as_dict(self):
        return dict(
                ("sigma_" + name, float(getattr(self, "sigma_" + name)))
                for name in CELL_VARIABLES)

    def __eq__(self, other):
        return (type(self) is type(other)
                and np.array_equal(self._state_vector, other._state_vector))

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "NoiseScales(%s)" % ", ".join(
                "%s=%r" % item for item in sorted(self.as_dict().items()))

# }}}


# {{{ state containers

CellState = namedtuple("CellState", CELL_VARIABLES)


class SystemState(object):
    """A validated single state of the two-cell system."""

    def __init__(self, values):
        values = np.array(values, dtype=np.float64)
        if values.shape != (STATE_DIM,):
            raise ValueError("a system state has %d entries, got shape %s"
                    % (STATE_DIM, values.shape))
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("state entries must be finite and nonnegative")
        self.values = values

    @classmethod
    def from_cells(cls, cells):
        if len(cells) != N_CELLS:
            raise ValueError("the model has exactly %d cells" % N_CELLS)
        return cls(np.concatenate([np.asarray(cell, dtype=np.float64)
            for cell in cells]))

    @property
    def cells(self):
        return [CellState(*self.values[i*N_VARS:(i+1)*N_VARS])
                for i in range(N_CELLS)]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    def __repr__(self):
        return "SystemState(%r)" % (self.cells,)


class Trajectory(object):
    """States on the grid ``t = j * record_every * h``."""

    def __init__(self, h, states, record_every=1, n_clamped=0):
        states = np.asarray(states, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != STATE_DIM or not len(states):
            raise ValueError("trajectory needs a nonempty (T, %d) state array"
                    % STATE_DIM)
        self.h = h
        self.states = states
        self.record_every = record_every
        self.n_clamped = n_clamped

    @property
    def times(self):
        return np.arange(len(self.states)) * (self.record_every * self.h)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, index):
        return self.states[index]


class Observation(object):
    def __init__(self, y, index):
        self.y = np.asarray(y, dtype=np.float64)
        self.index = index

    def __repr__(self):
        return "Observation(y=%r, index=%d)" % (self.y, self.index)


class ObservationSequence(object):
    """Observations ``y_1, ..., y_R`` taken at ticks ``n = 1..R``; tick *n*
    corresponds to integrator step ``n * m_o``.
    """

    def __init__(self, values, h=None, m_o=None, ticks=None):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, np.newaxis]
        self.values = values
        if ticks is None:
            ticks = np.arange(1, len(values) + 1)
        self.ticks = np.asarray(ticks, dtype=np.int64)
        self.h = h
        self.m_o = m_o

    @property
    def times(self):
        if self.h is None or self.m_o is None:
            return self.ticks.astype(np.float64)
        return self.ticks * (self.m_o * self.h)

    @property
    def obs_dim(self):
        return self.values.shape[1]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, index):
        return Observation(self.values[index], int(self.ticks[index]))

# }}}


# {{{ dynamics

def extracellular_ai(states, Q):
    """Quasi-steady-state extracellular autoinducer, ``Q * mean_i(S_i)``."""
    x = np.asarray(states, dtype=np.float64)
    s_mean = 0.5 * (x[..., N_VARS - 1] + x[..., 2*N_VARS - 1])
    return Q * s_mean


def _repression(x, m):
    # 1/(1 + x**m) evaluated as expit(-m log x): saturates to 0 for huge x
    # instead of overflowing, and is exactly 1 at x = 0.
    with np.errstate(divide="ignore"):
        return expit(-m * np.log(x))


def _first_nonfinite_component(values):
    bad = ~np.isfinite(values.reshape(-1, STATE_DIM))
    return STATE_COLUMNS[int(np.argmax(bad.any(axis=0)))]


def drift(state, params):
    """Deterministic right-hand side of the 14 coupled equations."""
    x = np.asarray(state, dtype=np.float64)
    cells = x.reshape(x.shape[:-1] + (N_CELLS, N_VARS))
    a, b, c, A, B, C, S = [cells[..., j] for j in range(N_VARS)]
    p = params.columns()

    s_e = np.asarray(extracellular_ai(x, np.asarray(params.Q, dtype=float)))

    out = np.empty_like(cells)
    with np.errstate(over="ignore", invalid="ignore"):
        out[..., 0] = p["alpha"] * _repression(C, p["m"]) - a
        out[..., 1] = p["alpha"] * _repression(A, p["m"]) - b
        out[..., 2] = (p["alpha"] * _repression(B, p["m"])
                + p["kappa"] * S / (1 + S) - c)
        out[..., 3] = p["beta_a"] * (a - A)
        out[..., 4] = p["beta_b"] * (b - B)
        out[..., 5] = p["beta_c"] * (c - C)
        out[..., 6] = -(p["ks0"] * S - p["ks1"] * B
                + p["eta"] * (S - s_e[..., np.newaxis]))

    out = out.reshape(x.shape)
    if not np.all(np.isfinite(out)):
        component = _first_nonfinite_component(out)
        raise NumericalRangeError(
                "drift of %s is not finite" % component, component=component)
    return out


class ClampCounter(object):
    def __init__(self):
        self.count = 0


def euler_maruyama_step(state, params, noise, h, rng, clamp_counter=None):
    """One Euler-Maruyama step with multiplicative noise
    ``sigma_x * x * sqrt(h) * xi``, clamped at zero afterwards.
    """
    if h < 0:
        raise ValueError("step size must be nonnegative")

    x = np.asarray(state, dtype=np.float64)
    x_new = x + h * drift(x, params)

    if not noise.is_zero:
        xi = rng.standard_normal(x.shape)
        x_new = x_new + noise.state_vector() * x * np.sqrt(h) * xi

    if not np.all(np.isfinite(x_new)):
        component = _first_nonfinite_component(x_new)
        raise NumericalRangeError(
                "Euler-Maruyama step produced a non-finite %s" % component,
                component=component)

    negative = x_new < 0
    if negative.any():
        if clamp_counter is not None:
            clamp_counter.count += int(negative.sum())
        x_new = np.where(negative, 0., x_new)

    return x_new


def simulate(initial, params, noise, h, n_steps, rng, record_every=1):
    """Iterate :func:`euler_maruyama_step` *n_steps* times.

    Every *record_every*-th state is kept, starting with *initial*.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if record_every < 1:
        raise ValueError("record_every must be at least 1")

    x = np.array(initial, dtype=np.float64)
    states = [x]
    counter = ClampCounter()

    for step in range(1, n_steps + 1):
        try:
            x = euler_maruyama_step(x, params, noise, h, rng, counter)
        except NumericalRangeError as e:
            raise NumericalRangeError(
                    "%s (at step %d)" % (e, step),
                    component=e.component, step=step)
        if step % record_every == 0:
            states.append(x)

    if counter.count:
        model_log.info("clamped %d negative components at zero in %d steps",
                counter.count, n_steps)

    return Trajectory(h, np.array(states), record_every=record_every,
            n_clamped=counter.count)


def observe(state, sigma_y, rng, index=0):
    """Noisy reading of ``(a_1, a_2)``."""
    if sigma_y < 0:
        raise ValueError("sigma_y must be nonnegative")
    x = np.asarray(state, dtype=np.float64)
    y = x[..., OBSERVED_INDICES] + sigma_y * rng.standard_normal(2)
    return Observation(y, index)


def sample_initial_state(rng, mean=INITIAL_MEAN, sigma0=SIGMA0):
    x0 = np.asarray(mean, dtype=np.float64) + sigma0 * rng.standard_normal(
            STATE_DIM)
    return np.maximum(x0, 0.)


def generate_dataset(params, noise, h, m_o, R, sigma_y, rng,
        initial_mean=INITIAL_MEAN, sigma0=SIGMA0, record_every=1):
    """Simulate ``R * m_o`` steps from a Gaussian initial condition and read
    ``(a_1, a_2)`` every *m_o* steps.

    :returns: ``(trajectory, observations)``; the trajectory holds all
        ``R * m_o + 1`` states, or every *record_every*-th of them.
    """
    if m_o < 1 or R < 1:
        raise ValueError("m_o and R must be at least 1")
    if record_every < 1:
        raise ValueError("record_every must be at least 1")

    x = sample_initial_state(rng, initial_mean, sigma0)
    states = [x]
    ys = []
    counter = ClampCounter()

    step = 0
    for n in range(1, R + 1):
        for _ in range(m_o):
            step += 1
            try:
                x = euler_maruyama_step(x, params, noise, h, rng, counter)
            except NumericalRangeError as e:
                raise NumericalRangeError(
                        "%s (at step %d)" % (e, step),
                        component=e.component, step=step)
            if step % record_every == 0:
                states.append(x)
        ys.append(observe(x, sigma_y, rng, index=n).y)

    if counter.count:
        model_log.info("clamped %d negative components while generating "
                "the dataset", counter.count)

    trajectory = Trajectory(h, np.array(states), record_every=record_every,
            n_clamped=counter.count)
    return trajectory, ObservationSequence(np.array(ys), h=h, m_o=m_o)

# }}}


# {{{ phase diagrams

def phase_pairs(trajectory):
    """Columns for the ``(a1, b1)`` and ``(a1, a2)`` phase-space views."""
    states = np.asarray(trajectory.states)
    return {
            "t": trajectory.times,
            "a1": states[:, 0],
            "b1": states[:, 1],
            "a2": states[:, N_VARS],
            }


def count_oscillations(values, prominence=1.):
    from scipy.signal import find_peaks
    peaks, _ = find_peaks(np.asarray(values), prominence=prominence)
    return len(peaks)

# }}}

# vim:foldmethod=marker
