"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 numerical failure (or every
sweep point failed), 3 partial sweep failure (some points produced output).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import default_config, load_config
from .errors import ConfigError, TunnelwellError
from .geometry import constants_preset
from .runner import describe_config, run_experiment, run_scan

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_PARTIAL = 3

_SERIES_OUTPUTS = ("rhs_prob", "entropy", "variance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunnelwell",
        description="Bound states, tunneling dynamics, and classical "
        "comparisons for a particle in a box with one rectangular barrier.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        metavar="FILE",
        help="experiment file (INI); the symmetric reference setup when omitted",
    )
    common.add_argument(
        "--levels", type=int, metavar="N", help="override the number of levels"
    )
    common.add_argument(
        "--preset",
        choices=("natural", "paper"),
        help="override the constants preset",
    )
    writing = argparse.ArgumentParser(add_help=False)
    writing.add_argument(
        "--out",
        metavar="DIR",
        default="tunnelwell-out",
        help="output directory (default: %(default)s)",
    )
    writing.add_argument(
        "--plot",
        action="store_true",
        help="render a PNG figure next to each CSV",
    )

    sub = parser.add_subparsers(dest="verb", required=True, metavar="VERB")
    sub.add_parser(
        "solve",
        parents=[common, writing],
        help="write the energy spectrum table",
    )
    sub.add_parser(
        "evolve",
        parents=[common, writing],
        help="write sampled density profiles over the time window",
    )
    sub.add_parser(
        "observe",
        parents=[common, writing],
        help="write the enabled observable series (right-chamber "
        "probability, entropy, position variance)",
    )
    sub.add_parser(
        "diverge",
        parents=[common, writing],
        help="compare against the matched classical packet and find the "
        "divergence time",
    )
    sub.add_parser(
        "scan",
        parents=[common, writing],
        help="sweep the barrier position: near-degeneracy table and "
        "entropy curves",
    )
    sub.add_parser(
        "describe",
        parents=[common],
        help="print the resolved setup, spectrum preview, and warnings",
    )
    return parser


def _apply_overrides(config, args):
    if args.levels is not None:
        if args.levels < 1:
            raise ConfigError(f"--levels: need at least 1, got {args.levels}")
        config = replace(config, n_levels=args.levels)
    if args.preset is not None:
        config = replace(
            config, preset=args.preset, constants=constants_preset(args.preset)
        )
    return config


def _observe_outputs(config):
    chosen = tuple(n for n in config.outputs if n in _SERIES_OUTPUTS)
    return chosen or _SERIES_OUTPUTS


def _dispatch(args, config) -> dict:
    if args.verb == "solve":
        return run_experiment(config, args.out, outputs=("spectrum",), plot=args.plot)
    if args.verb == "evolve":
        return run_experiment(config, args.out, outputs=("density",), plot=args.plot)
    if args.verb == "observe":
        return run_experiment(
            config, args.out, outputs=_observe_outputs(config), plot=args.plot
        )
    if args.verb == "diverge":
        return run_experiment(config, args.out, outputs=("divergence",), plot=args.plot)
    if args.verb == "scan":
        return run_scan(config, args.out, plot=args.plot)
    raise ConfigError(f"unknown verb {args.verb!r}")


def _report(manifest: dict, out_dir: str) -> None:
    if "points" in manifest:
        n_files = sum(len(p["files"]) for p in manifest["points"])
        failures = [
            (p["index"], p["error"]) for p in manifest["points"] if p["error"]
        ]
    else:
        n_files = len(manifest["files"])
        seen = {}
        for errors in manifest["errors"].values():
            for i, err in enumerate(errors):
                if err is not None:
                    seen.setdefault(i, err)
        failures = sorted(seen.items())
    for index, err in failures:
        print(f"point {index} failed: {err}", file=sys.stderr)
    print(f"{manifest['status']}: wrote {n_files} file(s) to {out_dir}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config else default_config()
        config = _apply_overrides(config, args)
        if args.verb == "describe":
            print(describe_config(config))
            return EXIT_OK
        manifest = _dispatch(args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TunnelwellError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    _report(manifest, args.out)
    if manifest["status"] == "failed":
        return EXIT_NUMERICAL
    if manifest["status"] == "partial":
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
