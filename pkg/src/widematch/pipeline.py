"""Scenario orchestration: constraints, optimum, benchmarks, ladders, sweeps.

``run_scenario`` writes a bundle directory:

``constraints.json``
    Derived constraints and the slack of every evaluated profile.
``transmission.csv``, ``snr.csv``
    Spectral tables with columns ``f_hz,strategy,value``.
``sweep.csv``
    ``bandwidth_hz,strategy,rate_bps`` when a bandwidth list is given.
``ladder_<strategy>.json``, ``ladder_<strategy>.s2p``
    Fitted element values and their sampled S-parameters.
``summary.json``
    Rates per strategy and solver diagnostics.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bodefano import BodeFanoConstraint, derive_constraints, feasibility_check
from .ladder import LadderNetwork, export_touchstone, fit, transmission_into_load
from .network import Link, chu_scattering_rational
from .optimizer import (OptimizationResult, circuit_support, conjugate_match, frequency_flat,
                        no_match_profile, solve)
from .profiles import TransmissionProfile, ideal_profile, rate
from .rational import FitOrderTooLowError, RationalFunction, SampledResponse, fit_rational
from .scenario import Scenario
from .sweep import STRATEGIES, bandwidth_sweep
from .touchstone import read_touchstone

__all__ = ["Bundle", "ScenarioRunError", "load_model", "run_scenario", "STAGES"]

STAGES = ("constraints", "optimize", "fit", "sweep")
LADDER_SOURCES = {"ladder-optimal": "optimal", "ladder-flat": "frequency-flat"}
# profiles that meet the constraints by construction; circuits are checked too
CHECKED = ("optimal", "frequency-flat", "conjugate-match", "no-match",
           "ladder-optimal", "ladder-flat")


class ScenarioRunError(RuntimeError):
    """A pipeline stage failed; the message names the scenario and stage."""


@dataclass
class Bundle:
    """In-memory results of one scenario run."""

    scenario: Scenario
    load: RationalFunction
    load_info: dict
    constraints: list[BodeFanoConstraint]
    profiles: dict[str, TransmissionProfile] = field(default_factory=dict)
    rates: dict[str, float] = field(default_factory=dict)
    optimum: Optional[OptimizationResult] = None
    networks: dict[str, LadderNetwork] = field(default_factory=dict)
    fit_reports: dict = field(default_factory=dict)
    feasibility: dict = field(default_factory=dict)
    sweep: object = None
    snr: object = None
    out_dir: Optional[str] = None


def load_model(scn: Scenario) -> tuple[RationalFunction, dict]:
    """Rational model of the equivalent load, and how it was obtained."""
    cfg, opts = scn.config, scn.load
    if opts.touchstone is not None:
        data = read_touchstone(opts.touchstone, ports=1)
        f, s = data.frequencies, data.one_port()
        if not np.isclose(data.resistance, cfg.z0):
            raise ScenarioRunError(
                f"{scn.name}: touchstone reference {data.resistance:g} ohm differs from "
                f"z0 = {cfg.z0:g} ohm")
        source = os.path.basename(opts.touchstone)
    elif opts.model == "analytic":
        if cfg.resistance != cfg.z0:
            raise ScenarioRunError(f"{scn.name}: the analytic Chu load assumes R = z0")
        return chu_scattering_rational(cfg), {"model": "analytic"}
    else:
        band = opts.fit_band or cfg.band
        f = band.grid(opts.fit_points)
        s = Link(cfg).load(f)
        source = "model"
    try:
        res = fit_rational(SampledResponse(f, s), opts.fit_order, tol=opts.fit_tol)
    except FitOrderTooLowError as exc:
        raise ScenarioRunError(f"{scn.name}: rational fit: {exc}") from exc
    info = {"model": "fit", "source": source, "order": opts.fit_order,
            "error": res.error, "passivity_scale": res.passivity_scale,
            "band_hz": [float(f[0]), float(f[-1])], "points": int(f.size)}
    return res.function, info


def _stage(scn: Scenario, name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, typ, exc, tb):
            if exc is not None and not isinstance(exc, ScenarioRunError) \
                    and isinstance(exc, Exception):
                raise ScenarioRunError(f"{scn.name}: stage {name!r} failed: {exc}") from exc
            return False
    return _Ctx()


def run_scenario(scn: Scenario, out_dir: Optional[str] = None, *,
                 stages: Sequence[str] = STAGES, plots: bool = True) -> Bundle:
    """Run the requested stages and write the bundle.

    Parameters
    ----------
    scn : Scenario
    out_dir : str, optional
        Bundle directory; default ``scn.run.output_dir``.  Nothing is
        written when it is the empty string.
    stages : sequence of str
        Any of ``constraints``, ``optimize``, ``fit`` and ``sweep``.
        Constraints are always derived.
    plots : bool
        Also render SVG figures into the bundle.

    Raises
    ------
    ScenarioRunError
        Any failure, with the scenario name and stage in the message.
    """
    unknown = set(stages) - set(STAGES)
    if unknown:
        raise ValueError(f"unknown stages: {sorted(unknown)}")
    cfg, run = scn.config, scn.run
    strategies = list(run.strategies)
    with _stage(scn, "constraints"):
        load_fn, info = load_model(scn)
        constraints = derive_constraints(load_fn)
    bundle = Bundle(scn, load_fn, info, constraints)

    link = Link(cfg)
    grid = link.grid(run.grid_points)
    snr = link.snr_profile(grid)
    bundle.snr = snr
    load = link.load_response(grid)

    if "optimize" in stages and strategies:
        with _stage(scn, "optimize"):
            if "ideal" in strategies:
                bundle.profiles["ideal"] = ideal_profile(snr)
            if {"optimal", "ladder-optimal"} & set(strategies):
                bundle.optimum = solve(snr, constraints, tol=run.tol)
                bundle.profiles["optimal"] = bundle.optimum.profile
            if {"frequency-flat", "ladder-flat"} & set(strategies):
                bundle.profiles["frequency-flat"] = frequency_flat(constraints, cfg.band, grid)
            if "conjugate-match" in strategies:
                bundle.profiles["conjugate-match"] = conjugate_match(cfg, load)
            if "no-match" in strategies:
                bundle.profiles["no-match"] = no_match_profile(
                    load, support=circuit_support(cfg.f_c))

    if "fit" in stages and "optimize" in stages:
        with _stage(scn, "fit"):
            for name, source in LADDER_SOURCES.items():
                if name not in strategies:
                    continue
                net, report = fit(bundle.profiles[source], load, run.ladder_order,
                                  run.ladder_seeds, snr=snr, seed=run.seed, z0=cfg.z0,
                                  shunt_first=run.shunt_first, fit_points=run.ladder_fit_points)
                bundle.networks[name] = net
                bundle.fit_reports[name] = report
                bundle.profiles[name] = transmission_into_load(
                    net, load, support=circuit_support(cfg.f_c), strategy="ladder")

    for name, prof in bundle.profiles.items():
        bundle.rates[name] = rate(prof, snr)
    with _stage(scn, "constraints"):
        for name in CHECKED:
            if name in bundle.profiles:
                bundle.feasibility[name] = feasibility_check(constraints, bundle.profiles[name])

    if "sweep" in stages and run.sweep_bandwidths and strategies:
        with _stage(scn, "sweep"):
            bundle.sweep = bandwidth_sweep(
                cfg, constraints, run.sweep_bandwidths, strategies,
                grid_points=run.grid_points, tol=run.tol, ladder_order=run.ladder_order,
                seeds=run.ladder_seeds, seed=run.seed, fit_points=run.ladder_fit_points,
                shunt_first=run.shunt_first)

    out_dir = run.output_dir if out_dir is None else out_dir
    if out_dir:
        write_bundle(bundle, out_dir)
        if plots:
            from .plots import emit_plots
            emit_plots(out_dir)
    return bundle


def _num(x: float) -> str:
    return f"{float(x):.17g}"


def _write_rows(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _constraint_dict(c: BodeFanoConstraint) -> dict:
    root = None if not np.isfinite(abs(c.root)) else [c.root.real, c.root.imag]
    return {"label": c.label, "kind": c.kind, "root_rad_per_s": root,
            "multiplicity": c.multiplicity, "bound": c.bound, "index": c.index}


def write_bundle(bundle: Bundle, out_dir: str) -> None:
    """Serialize a bundle; every file is a deterministic function of it."""
    os.makedirs(out_dir, exist_ok=True)
    scn, cfg = bundle.scenario, bundle.scenario.config
    grid = bundle.snr.frequencies
    order = [s for s in STRATEGIES if s in bundle.profiles]

    report = {
        "scenario": scn.name,
        "load": bundle.load_info,
        "constraints": [_constraint_dict(c) for c in bundle.constraints],
        "profiles": {
            name: {"lhs": [float(v) for v in fr.lhs],
                   "slack": [float(v) for v in fr.slack],
                   "relative_slack": [float(v) for v in fr.relative_slack],
                   "feasible": fr.feasible}
            for name, fr in bundle.feasibility.items()
        },
    }
    _json(os.path.join(out_dir, "constraints.json"), report)

    if order:
        rows = []
        for name in order:
            vals = bundle.profiles[name](grid)
            rows.extend((_num(f), name, _num(v)) for f, v in zip(grid, vals))
        _write_rows(os.path.join(out_dir, "transmission.csv"), ("f_hz", "strategy", "value"), rows)
        snr_ideal = bundle.snr(grid)
        rows = []
        for name in order:
            vals = snr_ideal * bundle.profiles[name](grid)
            rows.extend((_num(f), name, _num(v)) for f, v in zip(grid, vals))
        _write_rows(os.path.join(out_dir, "snr.csv"), ("f_hz", "strategy", "value"), rows)

    for name, net in bundle.networks.items():
        rep = bundle.fit_reports[name]
        _json(os.path.join(out_dir, f"ladder_{name}.json"), {
            "strategy": name, "order": net.order, "z0_ohm": net.z0,
            "shunt_first": net.shunt_first,
            "inductances_h": list(net.inductances), "capacitances_f": list(net.capacitances),
            "objective": rep.objective, "rate_ratio": rep.rate_ratio,
        })
        export_touchstone(net, grid, os.path.join(out_dir, f"ladder_{name}.s2p"),
                          comment=f"{scn.name}: {name}, order {net.order}")

    if bundle.sweep is not None:
        rows = [(_num(r.bandwidth), r.strategy, _num(r.rate)) for r in bundle.sweep.rows]
        _write_rows(os.path.join(out_dir, "sweep.csv"),
                    ("bandwidth_hz", "strategy", "rate_bps"), rows)

    summary = {
        "scenario": scn.name,
        "mode": cfg.mode,
        "band_hz": [cfg.band.f_min, cfg.band.f_max],
        "rates_bps": {k: bundle.rates[k] for k in order},
        "constraint_count": len(bundle.constraints),
    }
    if bundle.optimum is not None:
        opt = bundle.optimum
        summary["optimum"] = {
            "method": opt.method, "multipliers": [float(m) for m in opt.multipliers],
            "stationarity": opt.stationarity,
            "complementary_slackness": opt.complementary_slackness,
        }
    if bundle.sweep is not None:
        summary["sweep_argmax_hz"] = {s: bundle.sweep.argmax(s) for s in scn.run.strategies}
    _json(os.path.join(out_dir, "summary.json"), summary)
