"""Command-line entry point: sweep key rates to a CSV file."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .sweep import ConfigError, default_run_config, parse_config, sweep, write_csv


def _parse_distance(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--dist-km expects start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--dist-km values must be numbers: {exc}")
    return start, stop, step


def _parse_d_list(spec: str):
    try:
        return tuple(int(p) for p in spec.split(",") if p)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--D expects a comma-separated int list: {exc}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rate",
        description="Compute secret-key-rate lower bounds for discretely "
        "phase-randomized decoy-state QKD and write them to CSV.",
    )
    parser.add_argument("--protocol", choices=["bb84", "mdi"])
    parser.add_argument("--method", choices=["analytic", "numeric", "both"])
    parser.add_argument("--D", type=_parse_d_list, metavar="LIST",
                        help="comma-separated phase-slice counts, e.g. 5,6,7")
    parser.add_argument("--dist-km", type=_parse_distance, metavar="START:STOP:STEP")
    parser.add_argument("--params", metavar="CONFIG.JSON",
                        help="JSON run configuration (CLI flags override it)")
    parser.add_argument("--out", metavar="FILE.CSV", help="output CSV path")
    parser.add_argument("--cpr-baseline", action="store_true", default=None,
                        help="also emit the continuous-randomization baseline (D=0 rows)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.params:
            cfg = parse_config(args.params)
        elif args.protocol:
            cfg = default_run_config(args.protocol)
        else:
            print("error: --protocol is required when no --params file is given",
                  file=sys.stderr)
            return 2
        overrides = {}
        if args.protocol and args.protocol != cfg.protocol:
            cfg = default_run_config(args.protocol)
            overrides["protocol"] = args.protocol
        if args.method:
            overrides["method"] = args.method
        if args.D:
            overrides["phase_counts"] = args.D
        if args.dist_km:
            start, stop, step = args.dist_km
            overrides.update(
                distance_start_km=start, distance_stop_km=stop, distance_step_km=step
            )
        if args.out:
            overrides["output_path"] = args.out
        if args.cpr_baseline is not None:
            overrides["cpr_baseline"] = args.cpr_baseline
        if overrides:
            cfg = replace(cfg, **overrides)
        points = sweep(cfg)
        write_csv(points, cfg.output_path)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(points)} rate points to {cfg.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
