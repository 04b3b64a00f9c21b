"""plot_portrait --csv <path> --out <png> [--cvs <json>] [--controls-out <png>]"""

from __future__ import annotations

import argparse
import json
import sys

from .render import PlotSpec, SchemaError, render_control_set, render_portrait


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot_portrait",
                                     description="plot trajectory CSVs")
    parser.add_argument("--csv", required=True, help="trajectory CSV path")
    parser.add_argument("--out", required=True, help="output PNG for the portrait")
    parser.add_argument("--cvs", help="gauge spec JSON (inline or @file) for the "
                        "control-set overlay")
    parser.add_argument("--controls-out", help="output PNG for the control-set "
                        "scatter (requires --cvs)")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def _load_cvs(arg):
    text = arg
    if arg.startswith("@"):
        with open(arg[1:]) as fh:
            text = fh.read()
    return json.loads(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overlay = None
    if args.cvs:
        try:
            overlay = _load_cvs(args.cvs)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: --cvs: {exc}", file=sys.stderr)
            return 2
    try:
        count = render_portrait(PlotSpec(csv_path=args.csv, out_png=args.out,
                                         overlay_cvs=overlay, dpi=args.dpi))
        print(f"wrote {args.out} ({count} trajectories)")
        if args.controls_out:
            report = render_control_set(PlotSpec(csv_path=args.csv,
                                                 out_png=args.controls_out,
                                                 overlay_cvs=overlay, dpi=args.dpi))
            print(f"wrote {args.controls_out} ({report.num_points} control samples, "
                  f"max phi = {report.max_gauge_value:.6g}, "
                  f"{report.outside_count} outside)")
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
