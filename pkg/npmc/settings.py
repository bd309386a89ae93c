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


import copy
import hashlib
import json
import os

import numpy as np

from npmc.baselines import AbcConfig, PmhConfig
from npmc.lowlevel import ConfigError, settings_log
from npmc.model import (
        CELL_VARIABLES, INITIAL_MEAN, SIGMA0, ModelParams, NoiseScales,
        STATE_DIM)
from npmc.sampler import NpmcConfig
from npmc.ssm import CompositeKernelConfig


OUTPUT_ROOT_ENV = "NPMC_OUTPUT_ROOT"

METHODS = ("npmc", "pmh", "abc")
BENCHMARK_METHODS = METHODS + ("oracle",)

_TRUTH = [0.85, 2.6, 216., 0.85]


def _noise_block(sigma):
    return dict(("sigma_%s" % name, sigma) for name in CELL_VARIABLES)


DEFAULT_CONFIG = {
        "model": {
            "params": ModelParams.standard().as_dict(),
            # data are generated with this noise; zero is the deterministic
            # model
            "noise": _noise_block(0.),
            # noise of the transition kernel the filter propagates with
            "filter_noise": _noise_block(0.02),
            "h": 1e-3,
            "m_o": 20,
            "sigma_y": 1.,
            "horizon": 20.,
            "initial_mean": INITIAL_MEAN.tolist(),
            "sigma0": SIGMA0,
            },
        "method": {
            "name": "npmc",
            "npmc": {"M": 200, "K": 15, "N": 100, "M_c": None, "jitter": None},
            "pmh": {"L": 6000, "N": 100,
                "proposal_variances": [0.01, 0.01, 100., 0.01],
                "initial": None, "burn_in": 0},
            "abc": {"tolerances": [3., 2.5, 2.3, 2.2, 2.1], "n_accept": 1200,
                "max_draws": 1600000, "kernel_scale": 1., "batch_size": 200},
            },
        "seeds": {"master": 0, "runs": 45},
        "output": {
            "directory": "npmc-output",
            "formats": ["csv", "json"],
            "record_every": 1,
            "kde_points": 200,
            },
        "study": {
            "thetas": [_TRUTH, [0.85, 2.6, 206., 0.85]],
            "N": 600,
            },
        "benchmark": {
            "methods": ["npmc", "pmh", "abc"],
            "npmc_sizes": [50, 200],
            },
        }


# {{{ merging and validation

def _merge(base, update, path):
    for key, value in update.items():
        where = "%s.%s" % (path, key) if path else key
        if key not in base:
            raise ConfigError("unknown configuration key '%s'" % where)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("configuration entry '%s' must be a mapping"
                        % where)
            _merge(base[key], value, where)
        else:
            base[key] = value


def make_config(overrides=None):
    config = copy.deepcopy(DEFAULT_CONFIG)
    if overrides:
        _merge(config, overrides, "")
    return config


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


def validate_config(config):
    """Build every object the configuration describes, turning all
    module-level precondition failures into :exc:`ConfigError`.
    """
    try:
        model_params(config)
        noise_scales(config)
        kernel_config(config)
        n_observations(config)
        study_thetas(config)
        npmc_config(config)
        pmh_config(config)
        abc_config(config)
        pmh_burn_in(config)
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e))

    model = config["model"]
    _require(model["sigma_y"] > 0, "model.sigma_y must be positive")
    _require(model["sigma0"] >= 0, "model.sigma0 must be nonnegative")
    _require(len(model["initial_mean"]) == STATE_DIM,
            "model.initial_mean must have %d entries" % STATE_DIM)

    method = config["method"]["name"]
    _require(method in METHODS, "method.name must be one of %s, got '%s'"
            % (", ".join(METHODS), method))

    seeds = config["seeds"]
    _require(isinstance(seeds["master"], int) and seeds["master"] >= 0,
            "seeds.master must be a nonnegative integer")
    _require(isinstance(seeds["runs"], int) and seeds["runs"] >= 1,
            "seeds.runs must be a positive integer")

    output = config["output"]
    _require(int(output["record_every"]) >= 1,
            "output.record_every must be at least 1")
    _require(int(output["kde_points"]) >= 2,
            "output.kde_points must be at least 2")
    unknown = set(output["formats"]) - {"csv", "json"}
    _require(not unknown, "unsupported output formats: %s"
            % ", ".join(sorted(unknown)))

    _require(int(config["study"]["N"]) >= 1, "study.N must be at least 1")

    bench = config["benchmark"]
    for name in bench["methods"]:
        _require(name in BENCHMARK_METHODS,
                "unknown benchmark method '%s'" % name)
    _require(bench["npmc_sizes"] and all(
        int(M) >= 2 for M in bench["npmc_sizes"]),
        "benchmark.npmc_sizes must list sample sizes of at least 2")

    return config

# }}}


# {{{ files

def canonical_json(config):
    return json.dumps(config, sort_keys=True, indent=2) + "\n"


def config_hash(config):
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def load_config(path=None, environ=None):
    """Default configuration updated from the JSON file at *path*, with the
    output directory overridden by ``$NPMC_OUTPUT_ROOT`` when set.
    """
    if environ is None:
        environ = os.environ

    overrides = None
    if path is not None:
        try:
            with open(path) as inf:
                overrides = json.load(inf)
        except OSError as e:
            raise ConfigError("cannot read configuration '%s': %s" % (path, e))
        except ValueError as e:
            raise ConfigError("configuration '%s' is not valid JSON: %s"
                    % (path, e))
        if not isinstance(overrides, dict):
            raise ConfigError("configuration '%s' must hold a JSON object"
                    % path)

    config = make_config(overrides)

    output_root = environ.get(OUTPUT_ROOT_ENV)
    if output_root:
        settings_log.info("output directory taken from %s: %s",
                OUTPUT_ROOT_ENV, output_root)
        config["output"]["directory"] = output_root

    return validate_config(config)


def save_config(config, path):
    with open(path, "w") as outf:
        outf.write(canonical_json(config))

# }}}


# {{{ builders

def model_params(config):
    return ModelParams(**config["model"]["params"]).validate()


def noise_scales(config, key="noise"):
    return NoiseScales(**config["model"][key])


def kernel_config(config):
    """The transition kernel the filter runs with."""
    model = config["model"]
    return CompositeKernelConfig(model["m_o"], model["h"],
            noise_scales(config, "filter_noise"))


def n_observations(config):
    model = config["model"]
    R = int(round(model["horizon"] / (model["h"] * model["m_o"])))
    _require(R >= 1, "model.horizon is shorter than one observation interval")
    return R


def study_thetas(config):
    thetas = np.asarray(config["study"]["thetas"], dtype=np.float64)
    _require(thetas.ndim == 2 and len(thetas) and thetas.shape[1] == 4,
            "study.thetas must be a nonempty list of 4-vectors")
    return thetas


def npmc_config(config, seed=0, M=None):
    block = dict(config["method"]["npmc"])
    if M is not None:
        block["M"] = M
        block["M_c"] = None
    return NpmcConfig(seed=seed, **block)


def pmh_config(config, seed=0):
    block = dict(config["method"]["pmh"])
    block.pop("burn_in")
    return PmhConfig(seed=seed, **block)


def pmh_burn_in(config):
    burn_in = int(config["method"]["pmh"]["burn_in"])
    _require(0 <= burn_in < config["method"]["pmh"]["L"],
            "method.pmh.burn_in must lie in [0, L)")
    return burn_in


def abc_config(config, seed=0):
    return AbcConfig(seed=seed, **config["method"]["abc"])

# }}}

# vim:foldmethod=marker
