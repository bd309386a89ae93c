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


"""Run directories: CSV tables through pandas, JSON metadata and the run
manifest that lists every file a command wrote.
"""

import json
import os
from os.path import exists, isdir, join

import numpy as np
import pandas as pd

from npmc import VERSION
from npmc.lowlevel import ConfigError, OutputExistsError, run_log
from npmc.model import (
        OBSERVED_COLUMNS, STATE_COLUMNS, STATE_DIM, ObservationSequence)
from npmc.ssm import THETA_NAMES


MANIFEST_FILE_NAME = "manifest-%s.json"
CONFIG_FILE_NAME = "config-%s.json"
DATASET_FILE_NAME = "dataset.json"
TRAJECTORY_FILE_NAME = "trajectory.csv"
OBSERVATIONS_FILE_NAME = "observations.csv"


def _to_builtin(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError("cannot serialize %r" % type(value))


def dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_to_builtin) + "\n"


# {{{ run directory

class RunManifest(object):
    def __init__(self, command, config_hash, seed, files, timings, version):
        self.command = command
        self.config_hash = config_hash
        self.seed = seed
        self.files = files
        self.timings = timings
        self.version = version

    def as_dict(self):
        return dict(command=self.command, config_hash=self.config_hash,
                seed=self.seed, files=self.files, timings=self.timings,
                version=self.version, config=CONFIG_FILE_NAME % self.command)

    @classmethod
    def from_dict(cls, data):
        return cls(data["command"], data["config_hash"], data["seed"],
                data["files"], data["timings"], data["version"])


class RunDirectory(object):
    """Write-once files below *root*.

    Every writer refuses to replace an existing file unless *overwrite* is
    set, and records the file for the manifest.
    """

    def __init__(self, root, command, overwrite=False):
        self.root = root
        self.command = command
        self.overwrite = overwrite
        self.files = []
        self.timings = {}

        if exists(root) and not isdir(root):
            raise ConfigError("output path '%s' is not a directory" % root)
        if not isdir(root):
            os.makedirs(root)

    def path(self, name):
        return join(self.root, name)

    def _refuse_existing(self, name):
        path = self.path(name)
        if exists(path) and not self.overwrite:
            raise OutputExistsError("refusing to overwrite '%s' "
                    "(pass --overwrite to replace it)" % path)
        return path

    def claim(self, name):
        path = self._refuse_existing(name)
        if name not in self.files:
            self.files.append(name)
        return path

    def check_free(self, *names):
        """Fail before any work starts if one of *names* would be replaced."""
        for name in names + (self.manifest_name, self.config_name):
            self._refuse_existing(name)

    @property
    def manifest_name(self):
        return MANIFEST_FILE_NAME % self.command

    @property
    def config_name(self):
        return CONFIG_FILE_NAME % self.command

    def write_config(self, text):
        path = self.claim(self.config_name)
        with open(path, "w") as outf:
            outf.write(text)
        return path

    def write_frame(self, name, frame):
        path = self.claim(name)
        frame.to_csv(path, index=False)
        run_log.info("wrote %s", path)
        return path

    def write_json(self, name, obj):
        path = self.claim(name)
        with open(path, "w") as outf:
            outf.write(dump_json(obj))
        return path

    def write_manifest(self, config_hash, seed):
        manifest = RunManifest(self.command, config_hash, seed, list(self.files),
                self.timings, VERSION)
        path = self._refuse_existing(self.manifest_name)
        with open(path, "w") as outf:
            outf.write(dump_json(manifest.as_dict()))
        return manifest


def read_manifest(directory, command):
    with open(join(directory, MANIFEST_FILE_NAME % command)) as inf:
        return RunManifest.from_dict(json.load(inf))

# }}}


# {{{ datasets

def trajectory_frame(trajectory):
    frame = pd.DataFrame(trajectory.states, columns=list(STATE_COLUMNS))
    frame.insert(0, "t", trajectory.times)
    return frame


def observations_frame(obs):
    frame = pd.DataFrame(obs.values, columns=list(OBSERVED_COLUMNS))
    frame.insert(0, "t", obs.times)
    frame.insert(0, "n", obs.ticks)
    return frame


def write_dataset(rundir, trajectory, obs, initial_state, meta):
    """Write the trajectory, the observations and a JSON header that also
    records the initial state, so that deterministic simulators can restart
    from it.
    """
    rundir.write_frame(TRAJECTORY_FILE_NAME, trajectory_frame(trajectory))
    rundir.write_frame(OBSERVATIONS_FILE_NAME, observations_frame(obs))

    header = dict(meta)
    header.update(
            initial_state=np.asarray(initial_state).tolist(),
            n_observations=len(obs),
            n_clamped=trajectory.n_clamped,
            h=obs.h, m_o=obs.m_o)
    rundir.write_json(DATASET_FILE_NAME, header)


class Dataset(object):
    def __init__(self, obs, initial_state, meta):
        self.obs = obs
        self.initial_state = initial_state
        self.meta = meta


def read_dataset(directory):
    header_path = join(directory, DATASET_FILE_NAME)
    obs_path = join(directory, OBSERVATIONS_FILE_NAME)
    for path in [header_path, obs_path]:
        if not exists(path):
            raise ConfigError("no dataset in '%s' (missing %s); run "
                    "'npmc simulate' first" % (directory, path))

    try:
        with open(header_path) as inf:
            meta = json.load(inf)
        initial_state = meta["initial_state"]
        h, m_o = meta["h"], meta["m_o"]
    except ValueError as e:
        raise ConfigError("%s is not valid JSON: %s" % (header_path, e))
    except KeyError as e:
        raise ConfigError("%s lacks the entry %s" % (header_path, e))
    except TypeError:
        raise ConfigError("%s must hold a JSON object" % header_path)

    frame = pd.read_csv(obs_path)
    missing = set(OBSERVED_COLUMNS + ("n",)) - set(frame.columns)
    if missing:
        raise ConfigError("%s lacks columns %s" % (obs_path,
            ", ".join(sorted(missing))))

    initial_state = np.asarray(initial_state, dtype=np.float64)
    if initial_state.shape != (STATE_DIM,):
        raise ConfigError("%s holds a malformed initial state" % header_path)

    obs = ObservationSequence(frame[list(OBSERVED_COLUMNS)].to_numpy(),
            h=h, m_o=m_o, ticks=frame["n"].to_numpy())
    return Dataset(obs, initial_state, meta)

# }}}


# {{{ inference results

def theta_frame(thetas, **extra_columns):
    frame = pd.DataFrame(np.asarray(thetas), columns=list(THETA_NAMES))
    for name, values in extra_columns.items():
        frame[name] = values
    return frame


def npmc_sample_frame(sample_set):
    return theta_frame(sample_set.thetas, log_iw=sample_set.log_iws,
            log_tiw=sample_set.log_tiws, weight=sample_set.weights)


def npmc_iteration_frame(result):
    rows = []
    for k, sample_set in enumerate(result.sample_sets):
        row = dict(iteration=k)
        for name, mean in zip(THETA_NAMES, result.estimates[k]):
            row["mean_" + name] = mean
        row.update(mse=result.mses[k], ess=sample_set.ess,
                zero_weights=result.zero_weight_counts[k])
        for status, count in sorted(result.status_counts[k].items()):
            row["status_" + status] = count
        rows.append(row)
    return pd.DataFrame(rows).fillna(0)


def write_npmc_result(rundir, result):
    for sample_set in result.sample_sets:
        rundir.write_frame("npmc_samples_%03d.csv" % sample_set.iteration,
                npmc_sample_frame(sample_set))
    rundir.write_frame("npmc_iterations.csv", npmc_iteration_frame(result))
    rundir.write_json("npmc_result.json", dict(
        method="npmc", config=result.config.as_dict(),
        prior=result.prior.as_dict(), jitter=result.jitter,
        estimate=dict(zip(THETA_NAMES, result.final_estimate)),
        # the proposal iteration k drew its samples from, k >= 1
        proposals=[dict(iteration=k + 1, mean=proposal.mean, cov=proposal.cov)
            for k, proposal in enumerate(result.proposals)],
        likelihood_calls=result.likelihood_calls))
    rundir.timings["npmc_iterations"] = list(result.wall_clock)


def write_pmh_chain(rundir, chain, burn_in):
    rundir.write_frame("pmh_chain.csv", theta_frame(chain.thetas,
        log_likelihood=chain.log_likelihoods,
        accepted=chain.accepted.astype(int)))
    rundir.write_json("pmh_result.json", dict(
        method="pmh", config=chain.config.as_dict(), burn_in=burn_in,
        acceptance_rate=chain.acceptance_rate, outside_prior=chain.n_outside,
        degenerate=chain.n_degenerate,
        estimate=dict(zip(THETA_NAMES, chain.posterior_mean(burn_in)))))


def write_abc_population(rundir, population):
    rows = []
    for stage in population.stages:
        rundir.write_frame("abc_stage_%d.csv" % stage.index,
                theta_frame(stage.thetas, weight=stage.weights,
                    distance=stage.distances))
        row = dict(stage=stage.index, tolerance=stage.tolerance,
                accepted=stage.n_accepted, draws=stage.draws)
        row.update(("mean_" + name, value) for name, value in zip(
            THETA_NAMES, stage.posterior_mean()))
        rows.append(row)
    rundir.write_frame("abc_stages.csv", pd.DataFrame(rows))
    rundir.write_json("abc_result.json", dict(
        method="abc", config=population.config.as_dict(),
        total_draws=population.total_draws,
        estimate=dict(zip(THETA_NAMES, population.posterior_mean()))))


def kde_frame(grid, curves):
    """*curves* maps a column label to a density on *grid*; ``None`` curves
    are left out.
    """
    frame = pd.DataFrame({"x": grid})
    for label, density in curves.items():
        if density is not None:
            frame[label] = density
    return frame


def filter_diagnostics_frame(estimate, obs):
    frame = pd.DataFrame({
        "n": obs.ticks, "t": obs.times,
        "increment": estimate.increments,
        "cumulative": estimate.cumulative()})
    if estimate.ess is not None:
        frame["ess"] = estimate.ess
    return frame

# }}}

# vim:foldmethod=marker
