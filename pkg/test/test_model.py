import math

import numpy as np
import pytest

from npmc.lowlevel import NumericalRangeError
from npmc.model import (
        INITIAL_MEAN, N_VARS, STATE_DIM, ModelParams, NoiseScales,
        SystemState, count_oscillations, drift, euler_maruyama_step,
        extracellular_ai, generate_dataset, observe, phase_pairs, simulate)


def _rng(seed=0):
    return np.random.default_rng(seed)


# {{{ parameters

def test_standard_values():
    p = ModelParams.standard()
    assert (p.Q, p.m, p.alpha, p.beta_a) == (0.85, 2.6, 216., 0.85)
    assert (p.beta_b, p.beta_c, p.eta, p.kappa) == (0.1, 0.1, 2., 25.)
    assert (p.ks0, p.ks1) == (1., 0.01)
    assert p.n_cells == 2


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams.standard().replace(Q=1.).validate()
    with pytest.raises(ValueError):
        ModelParams.standard().replace(alpha=-1.).validate()
    with pytest.raises(ValueError):
        ModelParams.standard().replace(hill=2.)


def test_negative_noise_rejected():
    with pytest.raises(ValueError):
        NoiseScales(sigma_a=-0.1)
    assert NoiseScales.zero().is_zero
    assert not NoiseScales.uniform(0.02).is_zero


def test_system_state_layout():
    state = SystemState(INITIAL_MEAN)
    cell1, cell2 = state.cells
    assert cell1.a == 4.5 and cell1.S == 0.1
    assert cell2.a == 7.3 and cell2.S == 0.08
    assert np.array_equal(SystemState.from_cells([cell1, cell2]).values,
            INITIAL_MEAN)

    with pytest.raises(ValueError):
        SystemState(-INITIAL_MEAN)

# }}}


# {{{ drift

def _state_with_S(s1, s2):
    x = np.ones(STATE_DIM)
    x[N_VARS - 1] = s1
    x[2*N_VARS - 1] = s2
    return x


def test_extracellular_ai():
    assert extracellular_ai(_state_with_S(2, 4), 0.85) == pytest.approx(2.55)
    assert extracellular_ai(_state_with_S(2, 4), 0.) == 0
    assert extracellular_ai(_state_with_S(3, 3), 1.) == 3


def test_drift_without_transcription():
    params = ModelParams.standard().replace(alpha=0., kappa=0., beta_a=1.,
            beta_b=1., beta_c=1.)
    d = drift(np.ones(STATE_DIM), params)
    assert d[0] == -1
    assert d[3] == 0
    assert d[N_VARS] == -1


def test_drift_unrepressed_transcription():
    x = INITIAL_MEAN.copy()
    x[0] = 1.
    x[5] = 0.
    d = drift(x, ModelParams.standard())
    assert d[0] == pytest.approx(215.)


def _reference_drift(x, p):
    out = []
    s_e = p.Q * (x[6] + x[13]) / 2
    for i in range(2):
        a, b, c, A, B, C, S = x[7*i:7*i + 7]
        out.extend([
            -(a - p.alpha / (1 + C**p.m)),
            -(b - p.alpha / (1 + A**p.m)),
            -(c - p.alpha / (1 + B**p.m) - p.kappa * S / (1 + S)),
            p.beta_a * (a - A),
            p.beta_b * (b - B),
            p.beta_c * (c - C),
            -(p.ks0 * S - p.ks1 * B + p.eta * (S - s_e)),
            ])
    return out


def test_drift_matches_scalar_evaluation():
    params = ModelParams.standard()
    expected = _reference_drift([float(v) for v in INITIAL_MEAN], params)
    assert np.allclose(drift(INITIAL_MEAN, params), expected, rtol=1e-12,
            atol=1e-12)

    rng = _rng(3)
    for _ in range(20):
        x = rng.uniform(0, 30, STATE_DIM)
        assert np.allclose(drift(x, params),
                _reference_drift([float(v) for v in x], params),
                rtol=1e-10, atol=1e-10)


def test_drift_batched_params():
    rng = _rng(4)
    states = rng.uniform(0, 10, (3, STATE_DIM))
    alphas = np.array([60., 216., 290.])
    batched = ModelParams.standard().replace(alpha=alphas)
    assert batched.is_batched

    d = drift(states, batched)
    for i, alpha in enumerate(alphas):
        single = drift(states[i], ModelParams.standard().replace(alpha=alpha))
        assert np.allclose(d[i], single, rtol=1e-14, atol=0)


def test_drift_huge_repressor_saturates():
    x = INITIAL_MEAN.copy()
    x[5] = 1e300
    d = drift(x, ModelParams.standard())
    assert np.isfinite(d).all()
    assert d[0] == pytest.approx(-x[0])


def test_drift_nonfinite_reported():
    x = INITIAL_MEAN.copy()
    x[2] = np.inf
    with pytest.raises(NumericalRangeError) as excinfo:
        drift(x, ModelParams.standard())
    assert excinfo.value.component == "c1"

# }}}


# {{{ Euler-Maruyama

def test_zero_noise_is_forward_euler():
    rng = _rng(5)
    params = ModelParams.standard()
    states = rng.uniform(0, 20, (1000, STATE_DIM))
    h = 1e-3

    stepped = euler_maruyama_step(states, params, NoiseScales.zero(), h, rng)
    expected = np.maximum(states + h * drift(states, params), 0)
    assert np.array_equal(stepped, expected)


def test_zero_step_leaves_state():
    x = INITIAL_MEAN.copy()
    stepped = euler_maruyama_step(x, ModelParams.standard(),
            NoiseScales.uniform(0.5), 0., _rng())
    assert np.array_equal(stepped, x)


def test_noise_variance():
    # beta_a = 0 and a == A freeze the drift of A, so the increment of A_1
    # is pure noise with variance h * sigma**2 * A**2
    params = ModelParams.standard().replace(beta_a=0.)
    x = INITIAL_MEAN.copy()
    x[3] = x[0] = 4.
    n = 10**5
    h = 1e-2
    states = np.tile(x, (n, 1))

    for sigma in [0.02, 0.04]:
        stepped = euler_maruyama_step(states, params,
                NoiseScales(sigma_A=sigma), h, _rng(6))
        incr = stepped[:, 3] - x[3]
        target = h * sigma**2 * x[3]**2
        stderr = target * math.sqrt(2. / n)
        assert abs(incr.var() - target) < 3 * stderr


def test_clamping_keeps_states_nonnegative():
    from npmc.model import ClampCounter
    x = np.zeros(STATE_DIM) + 1e-3
    counter = ClampCounter()
    rng = _rng(7)
    for _ in range(200):
        x = euler_maruyama_step(x, ModelParams.standard(),
                NoiseScales.uniform(20.), 1e-2, rng, counter)
        assert (x >= 0).all()
    assert counter.count > 0

# }}}


# {{{ simulation

def test_single_step_simulation():
    x0 = INITIAL_MEAN.copy()
    traj = simulate(x0, ModelParams.standard(), NoiseScales.uniform(0.02),
            1e-3, 1, _rng(8))
    step = euler_maruyama_step(x0, ModelParams.standard(),
            NoiseScales.uniform(0.02), 1e-3, _rng(8))
    assert len(traj) == 2
    assert np.array_equal(traj[0], x0)
    assert np.array_equal(traj[1], step)


def test_simulation_is_seed_deterministic():
    args = (INITIAL_MEAN, ModelParams.standard(), NoiseScales.uniform(0.02),
            1e-3, 500)
    t1 = simulate(*args, rng=_rng(9))
    t2 = simulate(*args, rng=_rng(9))
    assert np.array_equal(t1.states, t2.states)
    assert np.array_equal(t1.times, t2.times)


def test_decimated_recording():
    traj = simulate(INITIAL_MEAN, ModelParams.standard(), NoiseScales.zero(),
            1e-3, 100, None, record_every=10)
    full = simulate(INITIAL_MEAN, ModelParams.standard(), NoiseScales.zero(),
            1e-3, 100, None)
    assert len(traj) == 11
    assert np.array_equal(traj.states, full.states[::10])
    assert traj.times[-1] == pytest.approx(0.1)


@pytest.mark.slow
def test_deterministic_attractor():
    # 1000 time units; the bound follows from a, b, c <= alpha + kappa
    params = ModelParams.standard()
    traj = simulate(INITIAL_MEAN, params, NoiseScales.zero(), 1e-3, 10**6,
            None, record_every=100)
    assert np.isfinite(traj.states).all()
    assert (traj.states >= 0).all()
    assert traj.states.max() < 1.5 * (params.alpha + params.kappa)

    pairs = phase_pairs(traj)
    assert count_oscillations(pairs["a1"]) >= 10

# }}}


# {{{ observations

def test_noiseless_observation():
    y = observe(INITIAL_MEAN, 0., _rng()).y
    assert np.array_equal(y, [INITIAL_MEAN[0], INITIAL_MEAN[N_VARS]])


def test_observation_noise_covariance():
    rng = _rng(10)
    n = 10**5
    sigma_y = 1.5
    ys = np.array([observe(INITIAL_MEAN, sigma_y, rng).y for _ in range(n)])
    resid = ys - INITIAL_MEAN[[0, N_VARS]]
    cov = np.cov(resid.T)
    stderr = sigma_y**2 * math.sqrt(2. / n)
    assert abs(cov[0, 0] - sigma_y**2) < 3 * stderr
    assert abs(cov[1, 1] - sigma_y**2) < 3 * stderr
    assert abs(cov[0, 1]) < 3 * sigma_y**2 / math.sqrt(n)


def test_dataset_shapes():
    traj, obs = generate_dataset(ModelParams.standard(), NoiseScales.zero(),
            1e-3, 1, 1, 1., _rng(11))
    assert len(traj) == 2
    assert len(obs) == 1

    traj, obs = generate_dataset(ModelParams.standard(),
            NoiseScales.uniform(0.02), 1e-3, 20, 50, 1., _rng(11))
    assert len(traj) == 50 * 20 + 1
    assert obs.values.shape == (50, 2)
    assert obs.times[0] == pytest.approx(0.02)
    assert obs.times[-1] == pytest.approx(1.)


def test_dataset_initial_state():
    traj, _ = generate_dataset(ModelParams.standard(), NoiseScales.zero(),
            1e-3, 20, 5, 1., _rng(12))
    assert np.abs(traj[0] - INITIAL_MEAN).max() < 0.5
    assert not np.array_equal(traj[0], INITIAL_MEAN)


def test_noiseless_dataset_reads_states():
    traj, obs = generate_dataset(ModelParams.standard(), NoiseScales.zero(),
            1e-3, 20, 5, 0., _rng(13))
    assert np.array_equal(obs.values, traj.states[20::20][:, [0, N_VARS]])

# }}}


if __name__ == "__main__":
    import sys
    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        from pytest import main
        main([__file__])

# vim: foldmethod=marker
