"""Command-line entry point.

Subcommands::

    sgdavg run CONFIG [--out DIR] [--jobs N] [--seed N]
    sgdavg preset NAME [--out DIR] [--seed N] [--reps N] [--jobs N] [--T N]
    sgdavg weights --T N --eta E
    sgdavg bound --kind K --T N --params G=1 lambda=1 ...
    sgdavg parse-check DATASET

The master seed can also be set with the SGDAVG_SEED environment variable;
an explicit --seed wins. Exit codes: 0 success, 1 bound-compliance failure,
2 usage or configuration error, 3 I/O error.
"""

import argparse
import logging
import os
import sys

import numpy as np

from .analysis import BOUND_KINDS, theoretical_bound
from .averaging import polydecay_weights
from .exceptions import ParseError, UsageError
from .harness.config import config_from_dict, load_config
from .harness.presets import ALIASES, PRESETS, preset
from .harness.runner import EXIT_IO, EXIT_OK, EXIT_USAGE, run_experiment
from .svmlight import load_svmlight

SEED_ENV = "SGDAVG_SEED"

log = logging.getLogger("sgdavg")


def _apply_seed(cfg, seed):
    env = os.environ.get(SEED_ENV)
    if seed is not None:
        cfg.seed = seed
    elif env is not None:
        try:
            cfg.seed = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
        print(f"master seed {cfg.seed} taken from {SEED_ENV}", file=sys.stderr)
    if cfg.seed < 0:
        raise UsageError("seed must be >= 0")


def _execute(cfg, args):
    _apply_seed(cfg, args.seed)
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if args.out is not None:
        cfg.output["dir"] = args.out
    result = run_experiment(cfg)
    for line in result.summary_lines():
        print(line)
    for name, path in result.files.items():
        print(f"wrote {path}")
    return result.exit_code


def cmd_run(args):
    return _execute(load_config(args.config), args)


def cmd_preset(args):
    try:
        raw = preset(args.name)
    except KeyError:
        names = ", ".join(sorted([*PRESETS, *ALIASES]))
        raise UsageError(f"unknown preset {args.name!r}; available: {names}") from None
    if args.reps is not None:
        raw["repetitions"] = args.reps
    if args.T is not None:
        raw["T"] = args.T
    if args.reference_steps is not None:
        raw["reference"] = {**raw.get("reference", {}), "steps": args.reference_steps}
    if args.no_plot:
        raw["output"] = {"plot": False}
    return _execute(config_from_dict(raw), args)


def cmd_weights(args):
    for w in polydecay_weights(args.T, args.eta):
        print(f"{w:.17g}")
    return EXIT_OK


def _parse_params(items):
    params = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"{key}: expected a number, got {value!r}") from None
    return params


def cmd_bound(args):
    value = theoretical_bound(args.kind, _parse_params(args.params), args.T)
    print(f"{value:.17g}")
    return EXIT_OK


def cmd_parse_check(args):
    data = load_svmlight(args.dataset)
    n_pos = int(np.sum(data.y > 0))
    print(f"examples: {data.n_examples}")
    print(f"dim: {data.dim}")
    print(f"nonzeros: {data.X.nnz}")
    print(f"labels: +1 x {n_pos}, -1 x {data.n_examples - n_pos}")
    print(f"max row norm: {float(np.max(data.row_norms)):.17g}")
    return EXIT_OK


def _add_run_options(p, with_preset_overrides=False):
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="master seed (overrides config and $%s)" % SEED_ENV)
    p.add_argument("-j", "--jobs", type=int, help="worker processes for repetitions")
    if with_preset_overrides:
        p.add_argument("--reps", type=int, help="number of repetitions")
        p.add_argument("--T", type=int, help="iteration budget")
        p.add_argument("--reference-steps", type=int, help="steps of the hinge reference solver")
        p.add_argument("--no-plot", action="store_true", help="skip plot.svg")


def build_parser():
    parser = argparse.ArgumentParser(prog="sgdavg", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a YAML config")
    p.add_argument("config")
    _add_run_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a shipped preset")
    p.add_argument("name", help=", ".join(sorted([*PRESETS, *ALIASES])))
    _add_run_options(p, with_preset_overrides=True)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("weights", help="print polynomial-decay weights")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("bound", help="evaluate a closed-form error bound")
    p.add_argument("--kind", required=True, choices=BOUND_KINDS)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--params", nargs="+", default=[], metavar="KEY=VALUE",
                   help="G, lambda, D, c, alpha, eta")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("parse-check", help="validate an SVMlight dataset")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_parse_check)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
