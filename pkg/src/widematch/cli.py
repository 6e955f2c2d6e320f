"""Command-line front end.

Subcommands take a scenario TOML file (or the name of a bundled preset) and
write a bundle directory; ``plots`` re-renders figures from a bundle.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from typing import Optional, Sequence

from .pipeline import ScenarioRunError, run_scenario
from .plots import emit_plots
from .scenario import RunOptions, ScenarioError, bundled_presets, load_scenario, preset_path

__all__ = ["main", "build_parser"]

_DEFAULTS = RunOptions()

_COMMANDS = {
    "constraints": ("derive the Bode-Fano constraints and write constraints.json",
                    ("constraints",)),
    "optimize": ("solve for the rate-optimal transmission and evaluate the benchmarks",
                 ("constraints", "optimize")),
    "fit-ladder": ("optimize, then fit LC ladders to the optimal and flat profiles",
                   ("constraints", "optimize", "fit")),
    "sweep": ("rate versus bandwidth for every strategy (sweep.csv)", ("constraints", "sweep")),
    "run": ("every stage: constraints, optimize, fit-ladder and sweep",
            ("constraints", "optimize", "fit", "sweep")),
}


def _add_globals(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-points", type=int, default=None,
                   help=f"frequency samples per profile (default: scenario value, "
                        f"else {_DEFAULTS.grid_points})")
    p.add_argument("--tol", type=float, default=None,
                   help=f"relative solver tolerance (default: scenario value, "
                        f"else {_DEFAULTS.tol:g})")
    p.add_argument("--out-dir", default=None,
                   help=f"bundle directory (default: scenario value, else "
                        f"'{_DEFAULTS.output_dir}/<scenario name>')")
    p.add_argument("--seed", type=int, default=None,
                   help=f"ladder fit restart seed (default: scenario value, else {_DEFAULTS.seed})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="widematch",
        description="Rate-optimal broadband transmit matching under Bode-Fano limits.",
        epilog="Bundled presets: " + ", ".join(bundled_presets()),
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (text, _) in _COMMANDS.items():
        p = sub.add_parser(name, help=text, description=text,
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        p.add_argument("scenario", help="scenario TOML file or bundled preset name")
        p.add_argument("--no-plots", action="store_true", help="skip SVG rendering")
        _add_globals(p)
    p = sub.add_parser("plots", help="render SVG figures from an existing bundle",
                       description="Render SVG figures from an existing bundle.")
    p.add_argument("bundle", help="bundle directory written by another subcommand")
    return parser


def _resolve(path: str) -> str:
    if os.path.exists(path):
        return path
    candidate = preset_path(path)
    if os.path.exists(candidate):
        return candidate
    raise ScenarioError(f"no such scenario file or preset: {path!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plots":
            for path in emit_plots(args.bundle):
                print(path)
            return 0
        scn = load_scenario(_resolve(args.scenario))
        changes = {}
        if args.grid_points is not None:
            changes["grid_points"] = args.grid_points
        if args.tol is not None:
            changes["tol"] = args.tol
        if args.seed is not None:
            changes["seed"] = args.seed
        if changes:
            scn = dataclasses.replace(scn, run=dataclasses.replace(scn.run, **changes))
        out = args.out_dir
        if out is None:
            out = scn.run.output_dir
            if out == _DEFAULTS.output_dir:
                out = os.path.join(out, scn.name)
        stages = _COMMANDS[args.command][1]
        bundle = run_scenario(scn, out, stages=stages, plots=not args.no_plots)
    except (ScenarioError, ScenarioRunError, OSError) as exc:
        print(f"widematch: error: {exc}", file=sys.stderr)
        return 2
    summary = {"scenario": scn.name, "out_dir": out,
               "constraints": [c.label for c in bundle.constraints],
               "rates_bps": bundle.rates}
    if bundle.sweep is not None:
        summary["sweep_argmax_hz"] = {s: bundle.sweep.argmax(s) for s in scn.run.strategies}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
