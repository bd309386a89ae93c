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


import logging
from datetime import datetime

import numpy as np

logfile = [None]


# {{{ log file

def getlogfile():
    return logfile[0]


def setlogfile(destfile):
    logfile[0] = destfile
    with open(destfile, "a") as openfile:
        openfile.write(
            "\n*** npmc session log started at {date} ***\n".format(
                date=datetime.now()
            ))

# }}}


# {{{ loggers

class LogfileOrStreamHandler(logging.StreamHandler):
    """
    Logging handler that appends records to the session log file if one has
    been set with :func:`setlogfile`, and writes them to stderr otherwise.
    """
    def emit(self, record):
        logfile = getlogfile()

        self.acquire()
        try:
            if logfile is not None:
                message = self.format(record)
                with open(logfile, "a") as openfile:
                    openfile.write("%s\n" % message)
            else:
                super(LogfileOrStreamHandler, self).emit(record)
        finally:
            self.release()


def _make_logger(name, fmt):
    handler = LogfileOrStreamHandler()
    handler.setFormatter(logging.Formatter(fmt=fmt))
    log = logging.getLogger(name)
    log.addHandler(handler)
    log.propagate = False
    return log


def _init_loggers():
    model_log = _make_logger(
            "npmc.model", "*** npmc model: %(message)s")
    inference_log = _make_logger(
            "npmc.inference", "[%(asctime)s] %(levelname)s %(message)s")
    settings_log = _make_logger(
            "npmc.settings", "*** npmc settings problem: %(message)s ***")
    run_log = _make_logger(
            "npmc.run", "[%(asctime)s] %(message)s")

    return model_log, inference_log, settings_log, run_log


model_log, inference_log, settings_log, run_log = _init_loggers()


def set_verbosity(verbose):
    level = logging.INFO if verbose else logging.WARNING
    for log in [model_log, inference_log, settings_log, run_log]:
        log.setLevel(level)

# }}}


# {{{ errors

class NpmcError(Exception):
    """Base class for runtime and numerical failures."""


class NumericalRangeError(NpmcError):
    def __init__(self, message, component=None, step=None):
        NpmcError.__init__(self, message)
        self.component = component
        self.step = step


class DegenerateWeightsError(NpmcError):
    """All weights vanished (every log-weight is -inf)."""

    def __init__(self, message, tick=None):
        NpmcError.__init__(self, message)
        self.tick = tick


class ProposalDegeneracyError(NpmcError):
    pass


class StageFailureError(NpmcError):
    def __init__(self, message, stage=None, draws=None, tolerance=None):
        NpmcError.__init__(self, message)
        self.stage = stage
        self.draws = draws
        self.tolerance = tolerance


class ConfigError(ValueError):
    pass


class OutputExistsError(ConfigError):
    pass

# }}}


# {{{ random sources

def derive_seed_sequence(seed, *keys):
    return np.random.SeedSequence(
            entropy=int(seed), spawn_key=tuple(int(k) for k in keys))


def derive_rng(seed, *keys):
    """Return an independent generator for the integer path *keys* below
    *seed*. The same ``(seed, keys)`` always yields the same stream, no matter
    in which order or in which process the generators are created.
    """
    return np.random.default_rng(derive_seed_sequence(seed, *keys))


def derive_int_seed(seed, *keys):
    return int(derive_seed_sequence(seed, *keys).generate_state(
        1, dtype=np.uint64)[0] >> np.uint64(1))

# }}}


# {{{ worker pool

def parallel_map(func, arg_tuples, workers=1):
    """Apply *func* to every tuple in *arg_tuples*, in order.

    With ``workers <= 1`` everything runs in this process, which also keeps
    unpicklable callables usable.
    """
    arg_tuples = list(arg_tuples)
    if workers is None or workers <= 1 or len(arg_tuples) <= 1:
        return [func(*args) for args in arg_tuples]

    from joblib import Parallel, delayed
    return Parallel(n_jobs=workers)(delayed(func)(*args) for args in arg_tuples)

# }}}

# vim:foldmethod=marker
