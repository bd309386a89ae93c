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


import sys


EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _theta_list(text):
    values = [float(v) for v in text.split(",")]
    if len(values) != 4:
        raise ValueError("expected four comma-separated values, got '%s'" % text)
    return values


def make_parser():
    import argparse

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON file with configuration overrides")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="Master seed (overrides seeds.master)")
    common.add_argument("--workers", type=int, default=1, metavar="N",
                        help="Size of the worker pool")
    common.add_argument("--out", metavar="DIR",
                        help="Run directory (default: output.directory)")
    common.add_argument("--overwrite", action="store_true",
                        help="Replace existing output files")
    common.add_argument("-le", "--log-errors", nargs=1, metavar="FILE",
                        help="Write log messages to the given file")
    common.add_argument("-v", "--verbose", action="store_true",
                        help="Log progress, not only problems")

    parser = argparse.ArgumentParser(prog="npmc",
            description="Stochastic coupled repressilator: simulation and "
            "parameter inference experiments")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    sub.add_parser("simulate", parents=[common],
            help="Simulate a trajectory and its observations")

    infer = sub.add_parser("infer", parents=[common],
            help="Estimate (Q, m, alpha, beta_a) from a simulated dataset")
    infer.add_argument("--method", choices=["npmc", "pmh", "abc"],
            help="Inference method (default: method.name)")
    infer.add_argument("--data", metavar="DIR",
            help="Directory holding the dataset (default: --out)")

    study = sub.add_parser("likelihood-study", parents=[common],
            help="Compare likelihood estimates along the observation record")
    study.add_argument("--theta", action="append", type=_theta_list,
            metavar="Q,M,ALPHA,BETA_A",
            help="Parameter vector to evaluate (repeatable; default: "
            "study.thetas)")
    study.add_argument("--data", metavar="DIR",
            help="Directory holding the dataset (default: --out)")

    sub.add_parser("benchmark", parents=[common],
            help="NMSE comparison over independent replications")

    plot = sub.add_parser("plot-data", parents=[common],
            help="Rebuild plot-ready tables from an earlier run")
    plot.add_argument("--data", metavar="DIR",
            help="Directory holding the run (default: --out)")
    plot.add_argument("--render", action="store_true",
            help="Also draw PNG files (needs matplotlib)")

    return parser


def run_command(options):
    from npmc import experiments
    from npmc.settings import load_config, validate_config

    config = load_config(options.config)
    if options.seed is not None:
        config["seeds"]["master"] = options.seed
        validate_config(config)
    if options.workers < 1:
        from npmc.lowlevel import ConfigError
        raise ConfigError("--workers must be at least 1")

    out = options.out or config["output"]["directory"]
    if options.command == "simulate":
        return experiments.cmd_simulate(config, out, options.overwrite)
    elif options.command == "infer":
        return experiments.cmd_infer(config, out, options.overwrite,
                method=options.method, data=options.data,
                workers=options.workers)
    elif options.command == "likelihood-study":
        return experiments.cmd_likelihood_study(config, out,
                options.overwrite, thetas=options.theta, data=options.data)
    elif options.command == "benchmark":
        return experiments.cmd_benchmark(config, out, options.overwrite,
                workers=options.workers)
    elif options.command == "plot-data":
        return experiments.cmd_plot_data(config, out, options.overwrite,
                data=options.data, render=options.render)
    else:
        raise AssertionError(options.command)


def main(argv=None):
    options = make_parser().parse_args(argv)

    from npmc.lowlevel import (
            NpmcError, getlogfile, run_log, set_verbosity, setlogfile)
    if options.log_errors:
        setlogfile(options.log_errors[0])
    set_verbosity(options.verbose)

    def report(message):
        run_log.error("%s", message)
        if getlogfile() is not None:
            print("npmc: %s" % message, file=sys.stderr)

    try:
        run_command(options)
    except ValueError as e:
        # ConfigError and OutputExistsError included
        report("error: %s" % e)
        sys.exit(EXIT_CONFIG)
    except (NpmcError, OSError) as e:
        report("%s failed: %s" % (options.command, e))
        sys.exit(EXIT_RUNTIME)

    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
