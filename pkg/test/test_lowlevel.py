import logging

import numpy as np
import pytest

from npmc.lowlevel import (
        ConfigError, DegenerateWeightsError, NpmcError, NumericalRangeError,
        OutputExistsError, StageFailureError, derive_int_seed, derive_rng,
        getlogfile, inference_log, parallel_map, set_verbosity, setlogfile)


# {{{ random sources

def test_derived_streams_are_reproducible():
    a = derive_rng(7, 2, 1).standard_normal(5)
    b = derive_rng(7, 2, 1).standard_normal(5)
    assert np.array_equal(a, b)


def test_derived_streams_differ():
    draws = [derive_rng(*keys).random(4) for keys in [
        (7,), (8,), (7, 0), (7, 1), (7, 0, 1), (7, 1, 0)]]
    for i in range(len(draws)):
        for j in range(i + 1, len(draws)):
            assert not np.array_equal(draws[i], draws[j])


def test_derive_order_does_not_matter():
    first = derive_rng(1, 5).random(3)
    derive_rng(1, 4).random(100)
    assert np.array_equal(first, derive_rng(1, 5).random(3))


def test_int_seeds():
    seed = derive_int_seed(3, 0, 1)
    assert seed == derive_int_seed(3, 0, 1)
    assert seed != derive_int_seed(3, 1, 1)
    assert 0 <= seed < 2**63

# }}}


# {{{ worker pool

def _power(base, exponent):
    return base ** exponent


def test_parallel_map_keeps_order():
    args = [(i, 2) for i in range(10)]
    expected = [i**2 for i in range(10)]
    assert parallel_map(_power, args) == expected
    assert parallel_map(_power, args, workers=2) == expected
    assert parallel_map(_power, [], workers=2) == []


def test_parallel_map_runs_inline(mocker):
    parallel = mocker.patch("joblib.Parallel")
    assert parallel_map(lambda x: x + 1, [(1,), (2,)], workers=1) == [2, 3]
    assert not parallel.called

# }}}


# {{{ log file

def test_setlogfile(tmp_path, mocker):
    mocker.patch("npmc.lowlevel.logfile", [None])
    assert getlogfile() is None

    path = str(tmp_path / "session.log")
    setlogfile(path)
    assert getlogfile() == path

    set_verbosity(True)
    try:
        inference_log.info("iteration %d done", 3)
    finally:
        set_verbosity(False)
    inference_log.info("not shown")

    with open(path) as inf:
        text = inf.read()
    assert "npmc session log started" in text
    assert "INFO iteration 3 done" in text
    assert "not shown" not in text


def test_verbosity_levels():
    set_verbosity(True)
    assert inference_log.level == logging.INFO
    set_verbosity(False)
    assert inference_log.level == logging.WARNING

# }}}


def test_error_hierarchy():
    e = NumericalRangeError("overflow", component=4, step=12)
    assert isinstance(e, NpmcError)
    assert (e.component, e.step, str(e)) == (4, 12, "overflow")

    e = DegenerateWeightsError("gone", tick=9)
    assert e.tick == 9

    e = StageFailureError("empty", stage=2, draws=100, tolerance=0.5)
    assert (e.stage, e.draws, e.tolerance) == (2, 100, 0.5)

    assert issubclass(OutputExistsError, ConfigError)
    with pytest.raises(ValueError):
        raise ConfigError("bad")


if __name__ == "__main__":
    import sys
    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        from pytest import main
        main([__file__])

# vim: foldmethod=marker
