"""Command-line front end.

Exit status: 0 success, 2 invalid configuration or usage, 3 computation
failure, 4 file-system failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import yaml

from . import __version__
from .config import apply_overrides, load_mapping, parse_mapping
from .errors import ConfigError, EmdofError
from .output import write_results
from .sweep import run

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 0, 2, 3, 4
FIGURES = ("fig2", "fig3a", "fig3b", "fig4", "fig5")

log = logging.getLogger("emdof")


def _common(p):
    p.add_argument("--config", "-c", help="YAML or JSON experiment config")
    p.add_argument("--out", "-o", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), help="data table format (default csv)")
    p.add_argument("--threshold", type=float, help="relative eigenvalue threshold for DOF")
    p.add_argument("--snr-db", help="SNR range in dB as start:stop:step")
    p.add_argument("--workers", type=int, help="sweep points evaluated concurrently")
    p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field, e.g. geometry.D=1:13:1 (repeatable)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="emdof", description="EDOF, DOF and capacity of free-space MIMO links")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="summarise a single geometry point")
    _common(p)
    p = sub.add_parser("sweep", help="run the sweep described by a config file")
    _common(p)
    p = sub.add_parser("figure", help="run a figure preset")
    p.add_argument("tag", choices=FIGURES)
    _common(p)
    p = sub.add_parser("validate", help="check a config and print it fully resolved")
    _common(p)
    return parser


def _raw_config(args) -> dict:
    raw = load_mapping(args.config) if args.config else {}
    if args.command == "figure":
        raw["preset"] = args.tag
    overrides = list(args.override)
    if args.threshold is not None:
        overrides.append(f"analysis.threshold={args.threshold!r}")
    if args.snr_db is not None:
        overrides.append(f"sweep.snr_db={args.snr_db}")
    if args.workers is not None:
        overrides.append(f"sweep.workers={args.workers}")
    if args.out is not None:
        overrides.append(f"output.out={args.out}")
    if args.format is not None:
        overrides.append(f"output.format={args.format}")
    return apply_overrides(raw, overrides)


def _compute(cfg):
    if (len(cfg.L), len(cfg.N), len(cfg.D), len(cfg.modes)) != (1, 1, 1, 1):
        raise ConfigError([("geometry", "compute takes exactly one L, N, D and mode")])
    return run(cfg.model_copy(update={"preset": "custom"}))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command in ("sweep", "validate") and not args.config:
        parser.error(f"{args.command} requires --config")
    try:
        cfg, merge = parse_mapping(_raw_config(args))
        if args.command == "validate":
            yaml.safe_dump(cfg.to_dict(), sys.stdout, sort_keys=False)
            return EXIT_OK
        result = _compute(cfg) if args.command == "compute" else run(cfg, merge)
        if args.command == "compute" and not cfg.out:
            json.dump(result.records(), sys.stdout, indent=1)
            sys.stdout.write("\n")
            return EXIT_OK
        paths = write_results(result, cfg.format, cfg.out or ".",
                              stem=args.tag if args.command == "figure" else None)
        for p in paths:
            print(p)
        return EXIT_OK
    except ConfigError as exc:
        for path, msg in exc.problems:
            print(f"config error: {path + ': ' if path else ''}{msg}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EmdofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
