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


"""The experiment commands behind the ``npmc`` command line: each one reads a
validated configuration, runs, and leaves CSV/JSON files plus a manifest in
a run directory.

Random streams are derived from the master seed as ``(run, role, ...)``:
role 0 generates the dataset of run *run*, role 1 seeds the inference
method and role 2 the likelihood study filters.
"""

import time
from collections import OrderedDict
from glob import glob
from os.path import basename, exists, join

import numpy as np
import pandas as pd

from npmc import settings, storage
from npmc.baselines import DeterministicSimulator, run_abc_smc, run_pmh
from npmc.bootstrap import ParticleLikelihood, run_filter
from npmc.lowlevel import (
        ConfigError, NpmcError, derive_int_seed, derive_rng, parallel_map,
        run_log)
from npmc.model import count_oscillations, generate_dataset, phase_pairs
from npmc.sampler import PriorBox, ThetaVector, run_npmc
from npmc.ssm import THETA_NAMES, RepressilatorSSM
from npmc.stats import kde_grid, marginal_curves, nmse, prior_curve


ROLE_DATA = 0
ROLE_METHOD = 1
ROLE_STUDY = 2

PHASE_FILE_NAME = "phase.csv"


# {{{ building blocks

def master_seed(config):
    return config["seeds"]["master"]


def truth_theta(config):
    params = config["model"]["params"]
    return ThetaVector.from_array([params[name] for name in THETA_NAMES])


def make_dataset(config, run=0):
    model = config["model"]
    return generate_dataset(
            settings.model_params(config), settings.noise_scales(config),
            model["h"], model["m_o"], settings.n_observations(config),
            model["sigma_y"], derive_rng(master_seed(config), run, ROLE_DATA),
            initial_mean=np.asarray(model["initial_mean"]),
            sigma0=model["sigma0"],
            record_every=config["output"]["record_every"])


def make_ssm(config):
    model = config["model"]
    return RepressilatorSSM(settings.kernel_config(config),
            sigma_y=model["sigma_y"],
            initial_mean=np.asarray(model["initial_mean"]),
            sigma0=model["sigma0"], known=settings.model_params(config))


def run_method(config, method, obs, initial_state, seed, workers=1, M=None):
    """Run one inference *method* on *obs*.

    :returns: ``(outcome, estimate)``, where *outcome* is the method's own
        result object (``None`` for ``oracle``).
    """
    prior = PriorBox.default()

    if method == "npmc":
        npmc_config = settings.npmc_config(config, seed, M)
        likelihood = ParticleLikelihood(make_ssm(config), obs, npmc_config.N)
        result = run_npmc(npmc_config, likelihood, prior, workers)
        return result, result.final_estimate

    elif method == "pmh":
        pmh_config = settings.pmh_config(config, seed)
        likelihood = ParticleLikelihood(make_ssm(config), obs, pmh_config.N)
        chain = run_pmh(pmh_config, likelihood, prior)
        return chain, chain.posterior_mean(settings.pmh_burn_in(config))

    elif method == "abc":
        model = config["model"]
        simulator = DeterministicSimulator(initial_state, model["h"],
                model["m_o"], len(obs), known=settings.model_params(config))
        population = run_abc_smc(settings.abc_config(config, seed), simulator,
                obs, prior, workers)
        return population, population.posterior_mean()

    elif method == "oracle":
        return None, truth_theta(config).as_array()

    else:
        raise ConfigError("unknown inference method '%s'" % method)


def kde_sources(method, outcome, burn_in=0):
    """The weighted samples drawn as posterior curves for each method."""
    sources = OrderedDict()
    if method == "npmc":
        sets = outcome.sample_sets
        for sample_set in ([sets[1], sets[-1]] if len(sets) > 1 else sets):
            sources["iteration_%d" % sample_set.iteration] = (
                    sample_set.thetas, sample_set.weights)
    elif method == "pmh":
        sources["pmh"] = (outcome.thetas[burn_in:], None)
    elif method == "abc":
        for stage in [outcome.stages[0], outcome.final]:
            sources["stage_%d" % stage.index] = (stage.thetas, stage.weights)
    return sources


def kde_tables(sources, points, box=None):
    """One frame per parameter with the prior curve and one density column
    per source; also returns the bandwidths used.
    """
    if box is None:
        box = PriorBox.default()
    grids = kde_grid(box, points)
    curves = OrderedDict(
            (label, marginal_curves(thetas, weights, grids))
            for label, (thetas, weights) in sources.items())

    tables = OrderedDict()
    bandwidths = dict((label, {}) for label in curves)
    for j, name in enumerate(THETA_NAMES):
        columns = OrderedDict(prior=prior_curve(box, j, grids[j]))
        for label, label_curves in curves.items():
            curve = label_curves[j]
            if curve is not None:
                columns[label] = curve.density
                bandwidths[label][name] = curve.bandwidth
        tables[name] = storage.kde_frame(grids[j], columns)
    return tables, bandwidths


def _finish(rundir, config, started):
    rundir.timings["total_seconds"] = time.perf_counter() - started
    rundir.write_config(settings.canonical_json(config))
    manifest = rundir.write_manifest(settings.config_hash(config),
            master_seed(config))
    run_log.info("%s: wrote %d files to %s", rundir.command,
            len(manifest.files), rundir.root)
    return manifest

# }}}


# {{{ simulate

def cmd_simulate(config, out, overwrite=False):
    started = time.perf_counter()
    rundir = storage.RunDirectory(out, "simulate", overwrite)
    rundir.check_free(storage.TRAJECTORY_FILE_NAME,
            storage.OBSERVATIONS_FILE_NAME, storage.DATASET_FILE_NAME,
            PHASE_FILE_NAME)

    trajectory, obs = make_dataset(config)
    noise = settings.noise_scales(config)
    storage.write_dataset(rundir, trajectory, obs, trajectory.states[0], dict(
        seed=master_seed(config),
        params=config["model"]["params"],
        noise=noise.as_dict(),
        sigma_y=config["model"]["sigma_y"],
        deterministic=noise.is_zero,
        record_every=trajectory.record_every))

    phase = pd.DataFrame(phase_pairs(trajectory))
    rundir.write_frame(PHASE_FILE_NAME, phase)

    run_log.info("simulate: %d observations, %d oscillations of a1, "
            "%d clamp events", len(obs), count_oscillations(phase["a1"]),
            trajectory.n_clamped)
    return _finish(rundir, config, started)

# }}}


# {{{ infer

def write_outcome(rundir, config, method, outcome):
    if method == "npmc":
        storage.write_npmc_result(rundir, outcome)
    elif method == "pmh":
        storage.write_pmh_chain(rundir, outcome, settings.pmh_burn_in(config))
    elif method == "abc":
        storage.write_abc_population(rundir, outcome)


def outcome_seed(config, run=0):
    return derive_int_seed(master_seed(config), run, ROLE_METHOD)


def cmd_infer(config, out, overwrite=False, method=None, data=None,
        workers=1):
    started = time.perf_counter()
    if method is None:
        method = config["method"]["name"]
    if method not in settings.METHODS:
        raise ConfigError("unknown inference method '%s'" % method)

    dataset = storage.read_dataset(data or out)
    rundir = storage.RunDirectory(out, "infer-%s" % method, overwrite)
    rundir.check_free("estimate_%s.json" % method)

    outcome, estimate = run_method(config, method, dataset.obs,
            dataset.initial_state, outcome_seed(config), workers)
    write_outcome(rundir, config, method, outcome)

    tables, bandwidths = kde_tables(
            kde_sources(method, outcome, settings.pmh_burn_in(config)),
            config["output"]["kde_points"])
    for name, frame in tables.items():
        rundir.write_frame("kde_%s_%s.csv" % (method, name), frame)

    rundir.write_json("estimate_%s.json" % method, dict(
        method=method,
        estimate=dict(zip(THETA_NAMES, estimate)),
        truth=truth_theta(config)._asdict(),
        kde_bandwidths=bandwidths,
        kde_bandwidth_rule="silverman"))

    run_log.info("infer: %s estimate %s", method,
            np.array2string(np.asarray(estimate), precision=4))
    return _finish(rundir, config, started)

# }}}


# {{{ likelihood study

def cmd_likelihood_study(config, out, overwrite=False, thetas=None,
        data=None):
    """Cumulative log-likelihood estimates ``log l^N(y_{1:n} | theta)`` for
    every theta, and their pairwise differences.

    Every theta is filtered with the same random stream, so identical
    thetas give identical curves.
    """
    started = time.perf_counter()
    if thetas is None:
        thetas = settings.study_thetas(config)
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    if not thetas.size:
        raise ConfigError("the likelihood study needs at least one theta")

    dataset = storage.read_dataset(data or out)
    obs = dataset.obs
    rundir = storage.RunDirectory(out, "likelihood-study", overwrite)
    rundir.check_free("likelihood_study.csv", "likelihood_study.json")

    ssm = make_ssm(config)
    n_particles = int(config["study"]["N"])

    columns = OrderedDict([("n", obs.ticks), ("t", obs.times)])
    finals = []
    for i, theta in enumerate(thetas):
        estimate = run_filter(ssm, theta, obs, n_particles,
                derive_rng(master_seed(config), 0, ROLE_STUDY),
                diagnostics=True)
        rundir.write_frame("likelihood_filter_%d.csv" % i,
                storage.filter_diagnostics_frame(estimate, obs))
        columns["loglik_%d" % i] = estimate.cumulative()
        finals.append(estimate.log_value)

    for i in range(len(thetas)):
        for j in range(i + 1, len(thetas)):
            columns["log_ratio_%d_%d" % (i, j)] = (
                    columns["loglik_%d" % i] - columns["loglik_%d" % j])

    rundir.write_frame("likelihood_study.csv", pd.DataFrame(columns))
    rundir.write_json("likelihood_study.json", dict(
        thetas=[dict(zip(THETA_NAMES, theta)) for theta in thetas],
        N=n_particles, log_likelihoods=finals))
    return _finish(rundir, config, started)

# }}}


# {{{ benchmark

def benchmark_labels(config):
    """``(label, method, M)`` for every entry of the comparison; NPMC
    appears once per configured sample size.
    """
    labels = []
    for method in config["benchmark"]["methods"]:
        if method == "npmc":
            labels.extend(("npmc-%d" % M, "npmc", int(M))
                    for M in config["benchmark"]["npmc_sizes"])
        else:
            labels.append((method, method, None))
    return labels


def _benchmark_run(config, run, labels):
    rows = []
    seconds = {}
    try:
        trajectory, obs = make_dataset(config, run)
    except NpmcError as e:
        run_log.warning("benchmark run %d: dataset failed: %s", run, e)
        return [dict(run=run, method=label, status=type(e).__name__)
                for label, _, _ in labels], seconds

    for label, method, M in labels:
        start = time.perf_counter()
        row = dict(run=run, method=label, status="ok")
        try:
            _, estimate = run_method(config, method, obs, trajectory.states[0],
                    outcome_seed(config, run), M=M)
        except NpmcError as e:
            run_log.warning("benchmark run %d: %s failed: %s", run, label, e)
            row["status"] = type(e).__name__
        else:
            row.update(zip(THETA_NAMES, estimate))
        seconds[label] = time.perf_counter() - start
        rows.append(row)
    return rows, seconds


def nmse_rows(estimates, config, labels):
    truth = truth_theta(config)
    rows = []
    for label, _, _ in labels:
        mine = estimates[estimates["method"] == label]
        ok = mine[mine["status"] == "ok"]
        n_failed = len(mine) - len(ok)
        if len(ok):
            report = nmse(ok[list(THETA_NAMES)].to_numpy(), truth,
                    method=label, n_failed=n_failed)
            rows.extend(report.as_rows())
        else:
            run_log.warning("benchmark: every run of %s failed", label)
            rows.extend(dict(method=label, parameter=name, nmse_mean=np.nan,
                nmse_std=np.nan, runs=0, failed=n_failed)
                for name in THETA_NAMES)
    return rows


def cmd_benchmark(config, out, overwrite=False, workers=1):
    started = time.perf_counter()
    rundir = storage.RunDirectory(out, "benchmark", overwrite)
    rundir.check_free("benchmark_estimates.csv", "nmse.csv")

    labels = benchmark_labels(config)
    n_runs = config["seeds"]["runs"]
    results = parallel_map(_benchmark_run,
            [(config, run, labels) for run in range(n_runs)], workers)

    rows = [row for run_rows, _ in results for row in run_rows]
    estimates = pd.DataFrame(rows, columns=["run", "method", "status"]
            + list(THETA_NAMES))
    rundir.write_frame("benchmark_estimates.csv", estimates)
    rundir.write_frame("nmse.csv", pd.DataFrame(nmse_rows(
        estimates, config, labels)))
    rundir.timings["method_seconds"] = [seconds for _, seconds in results]

    return _finish(rundir, config, started)

# }}}


# {{{ plot data

def _read_samples(path, with_weights=True):
    frame = pd.read_csv(path)
    weights = frame["weight"].to_numpy() if with_weights else None
    return frame[list(THETA_NAMES)].to_numpy(), weights


def _file_index(path):
    # trailing number of names like npmc_samples_003.csv
    return int(basename(path).rsplit("_", 1)[-1].split(".")[0])


def _numbered(source, pattern):
    return sorted(glob(join(source, pattern % "*")), key=_file_index)


def collect_sample_sources(source, burn_in=0):
    """Weighted samples per method found among the files of an earlier
    ``infer`` run in *source*.
    """
    found = OrderedDict()

    npmc_paths = _numbered(source, "npmc_samples_%s.csv")
    if npmc_paths:
        picks = [npmc_paths[1], npmc_paths[-1]] if len(npmc_paths) > 1 \
                else npmc_paths
        found["npmc"] = OrderedDict(
                ("iteration_%d" % _file_index(path),
                    _read_samples(path))
                for path in picks)

    chain_path = join(source, "pmh_chain.csv")
    if exists(chain_path):
        thetas, _ = _read_samples(chain_path, with_weights=False)
        found["pmh"] = OrderedDict(pmh=(thetas[burn_in:], None))

    abc_paths = _numbered(source, "abc_stage_%s.csv")
    if abc_paths:
        found["abc"] = OrderedDict(
                ("stage_%d" % _file_index(path), _read_samples(path))
                for path in [abc_paths[0], abc_paths[-1]])

    return found


def render_plots(rundir, phase, tables):
    try:
        import matplotlib
    except ImportError:
        raise ConfigError("--render needs matplotlib, which is not installed")
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if phase is not None:
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.5))
        ax1.plot(phase["a1"], phase["b1"], lw=0.3)
        ax1.set_xlabel("a1")
        ax1.set_ylabel("b1")
        ax2.plot(phase["a1"], phase["a2"], lw=0.3)
        ax2.set_xlabel("a1")
        ax2.set_ylabel("a2")
        fig.tight_layout()
        fig.savefig(rundir.claim("phase.png"))
        plt.close(fig)

    for (method, name), frame in tables.items():
        fig, ax = plt.subplots(figsize=(5, 4))
        for column in frame.columns[1:]:
            ax.plot(frame["x"], frame[column], label=column)
        ax.set_xlabel(name)
        ax.legend()
        fig.tight_layout()
        fig.savefig(rundir.claim("kde_%s_%s.png" % (method, name)))
        plt.close(fig)


def cmd_plot_data(config, out, overwrite=False, data=None, render=False):
    """Rebuild plot-ready phase-diagram and posterior-curve tables from the
    outputs of earlier commands, optionally drawing them.
    """
    started = time.perf_counter()
    source = data or out
    rundir = storage.RunDirectory(out, "plot-data", overwrite)
    rundir.check_free("plot_phase.csv")

    phase = None
    trajectory_path = join(source, storage.TRAJECTORY_FILE_NAME)
    if exists(trajectory_path):
        trajectory = pd.read_csv(trajectory_path)
        phase = trajectory[["t", "a1", "b1", "a2"]]
        rundir.write_frame("plot_phase.csv", phase)

    tables = OrderedDict()
    points = config["output"]["kde_points"]
    sources = collect_sample_sources(source, settings.pmh_burn_in(config))
    for method, method_sources in sources.items():
        method_tables, _ = kde_tables(method_sources, points)
        for name, frame in method_tables.items():
            rundir.write_frame("plot_kde_%s_%s.csv" % (method, name), frame)
            tables[method, name] = frame

    if phase is None and not tables:
        raise ConfigError("nothing to plot in '%s': no trajectory and no "
                "inference samples" % source)

    if render:
        render_plots(rundir, phase, tables)

    return _finish(rundir, config, started)

# }}}

# vim:foldmethod=marker
