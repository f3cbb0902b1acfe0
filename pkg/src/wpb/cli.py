"""Command-line entry point ``wpb``.

Subcommands::

    wpb run <config.json> [--out DIR] [--frames-every K] [--quiet]
    wpb validate <config.json>
    wpb spectrum <config.json> --levels K

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O
error.  The output directory is taken from ``--out``, else from the
``WPB_OUTPUT_DIR`` environment variable, else from the config.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .config import parse_config
from .errors import ConfigError, DomainError, NumericalFailure

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4
OUTPUT_ENV = "WPB_OUTPUT_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpb", description="Gaussian wave-packet scenarios")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and write its outputs")
    run.add_argument("config")
    run.add_argument("--out", help=f"output directory (overrides ${OUTPUT_ENV} and the config)")
    run.add_argument("--frames-every", type=int, dest="frames_every",
                     help="write every K-th time sample as a frame")
    run.add_argument("--quiet", action="store_true", help="do not print metrics")
    val = sub.add_parser("validate", help="check a config and print the resolved values")
    val.add_argument("config")
    spec = sub.add_parser("spectrum", help="print the lowest grid energies of the potential")
    spec.add_argument("config")
    spec.add_argument("--levels", type=int, required=True)
    return parser


def _err(msg):
    print(f"wpb: error: {msg}", file=sys.stderr)


def _run(args) -> int:
    from .scenarios import run_scenario

    cfg = parse_config(args.config)
    out = args.out or os.environ.get(OUTPUT_ENV) or cfg.output_dir
    if args.frames_every is not None and args.frames_every < 1:
        raise ConfigError("--frames-every must be at least 1", key="frames_every")
    report = run_scenario(cfg, out, args.frames_every)
    if not args.quiet:
        print(json.dumps(report.metrics, indent=2, sort_keys=True))
        print(f"wrote {len(report.manifest['files'])} files to {report.out_dir}")
    return EXIT_OK


def _validate(args) -> int:
    cfg = parse_config(args.config)
    print(json.dumps(cfg.raw, indent=2, sort_keys=True))
    print(f"config ok: scenario {cfg.scenario}, digest {cfg.digest[:16]}")
    return EXIT_OK


def _spectrum(args) -> int:
    from .scenarios import spectrum

    cfg = parse_config(args.config)
    n_max = cfg.grid.n_points // 8
    if not 1 <= args.levels <= n_max:
        raise ConfigError(f"--levels must be in 1..{n_max}", key="levels")
    print("level,energy")
    for i, e in enumerate(spectrum(cfg, args.levels)):
        print(f"{i},{e:.12e}")
    return EXIT_OK


_COMMANDS = {"run": _run, "validate": _validate, "spectrum": _spectrum}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError, json.JSONDecodeError) as exc:
        _err(f"invalid configuration: {exc}")
        return EXIT_CONFIG
    except (NumericalFailure, ArithmeticError) as exc:
        _err(f"numerical failure: {exc}")
        return EXIT_NUMERICAL
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_IO
    except ValueError as exc:
        _err(f"invalid configuration: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
