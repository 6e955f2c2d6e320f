"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import dataclasses
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conftest import array_cfg, array_constraints  # noqa: E402
from oracles import brute_force_rate, chu_bounds  # noqa: E402
from widematch import (Link, ScenarioConfig, SnrProfile, TransmissionProfile,  # noqa: E402
                       bandwidth_sweep, chu_scattering_rational, derive_constraints,
                       feasibility_check, frequency_flat, rate, reflection_roots, solve)
from widematch.bodefano import SLACK_EPS  # noqa: E402
from widematch.pipeline import load_model, run_scenario  # noqa: E402
from widematch.scenario import bundled_presets, load_scenario, preset_path  # noqa: E402

RESULTS: list[str] = []
SWEEP = [0.7e9, 1.4e9, 2.1e9, 2.8e9, 3.5e9, 4.2e9]
FIT_STAGES = ("constraints", "optimize", "fit")


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _bundles(grid_scale: int = 1) -> dict:
    out = {}
    for name in bundled_presets():
        scn = load_scenario(preset_path(name))
        if grid_scale != 1:
            scn = dataclasses.replace(
                scn, run=dataclasses.replace(scn.run, grid_points=grid_scale * scn.run.grid_points))
        out[name] = run_scenario(scn, "", stages=FIT_STAGES)
    return out


@pytest.fixture(scope="module")
def bundles():
    return _bundles()


def test_criterion_1_constraint_closed_forms():
    cfg = ScenarioConfig()
    t0 = time.perf_counter()
    cons = derive_constraints(chu_scattering_rational(cfg))
    elapsed = time.perf_counter() - t0
    b1, b2 = chu_bounds(cfg.tau)
    f = np.geomspace(1e8, 1e11, 31)
    ok = (len(cons) == 2
          and abs(cons[0].bound / b1 - 1) <= 1e-9 and abs(cons[1].bound / b2 - 1) <= 1e-9
          and np.allclose(cons[0].weight(f), 1 / (2 * np.pi**2 * f**2), rtol=1e-9, atol=0)
          and np.allclose(cons[1].weight(f), 1 / (8 * np.pi**4 * f**4), rtol=1e-9, atol=0)
          and elapsed < 1.0)
    verdict(1, ok, f"{len(cons)} constraints, bound errors {cons[0].bound / b1 - 1:.1e}, "
                   f"{cons[1].bound / b2 - 1:.1e}; {elapsed:.3f} s")


def test_criterion_2_reflection_roots():
    t0 = time.perf_counter()
    single = reflection_roots(chu_scattering_rational(ScenarioConfig()))
    counts = {}
    for mode in ("even", "odd"):
        cons = array_constraints(array_cfg(mode))
        counts[mode] = sum(c.kind == "right-half-plane" for c in cons)
        counts[mode + "_total"] = len(cons)
    elapsed = time.perf_counter() - t0
    ok = (single == [(0j, 4)] and counts["even"] == counts["even_total"] == 2
          and counts["odd"] == counts["odd_total"] == 2 and elapsed < 5.0)
    verdict(2, ok, f"single {single}; RHP roots even {counts['even']}, odd {counts['odd']}; "
                   f"{elapsed:.2f} s")


def test_criterion_3_frequency_flat():
    cfg = ScenarioConfig()
    cons = derive_constraints(chu_scattering_rational(cfg))
    ff = frequency_flat(cons, cfg.band)
    rep = feasibility_check(cons, ff)
    binding = int(np.argmin(rep.slack / rep.bounds))
    rel = abs(rep.slack[1]) / rep.bounds[1]
    ok = abs(ff.meta["t_ff"] - 0.719) <= 0.005 and binding == 1 and rel <= 1e-6
    verdict(3, ok, f"T_ff = {ff.meta['t_ff']:.6f}; f^-4 slack {rel:.1e} B")


def test_criterion_4_rate_ordering(bundles):
    parts, ok = [], True
    for name, b in bundles.items():
        r = b.rates
        good = (r["no-match"] <= r["conjugate-match"]
                and r["frequency-flat"] <= r["optimal"] * (1 + 1e-9)
                and r["optimal"] <= r["ideal"] * (1 + 1e-9))
        ok &= good
        parts.append(f"{name.removesuffix('.toml')} {'ok' if good else 'VIOLATED'}")
    # strict gap: single Chu at 4.2 GHz, optimal above flat beyond about 6.1 GHz
    b = bundles["single_chu_4g2.toml"]
    strict = b.rates["frequency-flat"] < b.rates["optimal"] < b.rates["ideal"]
    f = np.linspace(4.9e9, 9.1e9, 42001)
    d = b.profiles["optimal"](f) - b.profiles["frequency-flat"](f)
    cross = f[np.nonzero(np.diff(np.sign(d)))[0]]
    cross_ok = cross.size == 1 and abs(cross[0] - 6.1e9) <= 0.05e9 and d[-1] > 0
    ok &= strict and cross_ok
    verdict(4, ok, "; ".join(parts) + f"; 4.2 GHz strict {strict}, "
                   f"T* > T_ff above {cross[0] / 1e9:.3f} GHz")


def test_criterion_5_single_sweep():
    cfg = ScenarioConfig(p_total=0.25)
    cons = derive_constraints(chu_scattering_rational(cfg))
    t0 = time.perf_counter()
    table = bandwidth_sweep(cfg, cons, SWEEP, ("optimal", "conjugate-match"))
    elapsed = time.perf_counter() - t0
    a_opt, a_cm = table.argmax("optimal"), table.argmax("conjugate-match")
    ok = a_opt == 2.8e9 and a_cm == 2.1e9 and elapsed < 60
    verdict(5, ok, f"argmax optimal {a_opt / 1e9:.1f} GHz, conjugate {a_cm / 1e9:.1f} GHz; "
                   f"{elapsed:.1f} s")


@pytest.mark.slow
def test_criterion_6_array_sweep():
    tables = {}
    for mode in ("even", "odd"):
        cfg = array_cfg(mode)
        tables[mode] = bandwidth_sweep(cfg, array_constraints(cfg), SWEEP,
                                       ("ideal", "optimal", "ladder-optimal", "ladder-flat"),
                                       grid_points=801, ladder_order=7)
    peaks = {(m, s): tables[m].argmax(s) for m in tables for s in ("ladder-optimal", "ladder-flat")}
    last = {s: (tables["even"].rates(s)[1][-1], tables["odd"].rates(s)[1][-1])
            for s in ("ideal", "optimal", "ladder-optimal", "ladder-flat")}
    ok = all(p == 1.4e9 for p in peaks.values()) and all(e >= o for e, o in last.values())
    peak_txt = ", ".join(f"{m} {s} {p / 1e9:.1f}" for (m, s), p in peaks.items())
    verdict(6, ok, f"peaks (GHz): {peak_txt}; 4.2 GHz ladder-optimal even "
                   f"{last['ladder-optimal'][0] / 1e9:.3f} vs odd "
                   f"{last['ladder-optimal'][1] / 1e9:.3f} Gbit/s")


def test_criterion_7_kkt(bundles):
    worst_st, worst_cs, worst_slack, ok = 0.0, 0.0, np.inf, True
    for b in bundles.values():
        opt = b.optimum
        worst_st = max(worst_st, opt.stationarity)
        worst_cs = max(worst_cs, opt.complementary_slackness)
        rel = opt.report.slack / opt.report.bounds
        worst_slack = min(worst_slack, float(np.min(rel)))
        ok &= bool(np.all(opt.multipliers >= 0)) and bool(np.any(opt.multipliers > 0))
    ok &= worst_st <= 1e-6 and worst_cs <= 1e-6 and worst_slack >= -SLACK_EPS
    verdict(7, ok, f"stationarity {worst_st:.1e}, complementary slackness {worst_cs:.1e} B, "
                   f"min primal slack {worst_slack:.1e} B over {len(bundles)} scenarios")


def test_criterion_8_oracle():
    t0 = time.perf_counter()
    errs = {}
    cases = {"single": ScenarioConfig(p_total=0.25),
             "even": array_cfg("even"), "odd": array_cfg("odd")}
    for name, cfg in cases.items():
        cons = (derive_constraints(chu_scattering_rational(cfg)) if name == "single"
                else array_constraints(cfg))
        f = cfg.band.grid(64)
        snr = SnrProfile(f, Link(cfg).snr_ideal(f), cfg.band)
        r = solve(snr, cons).rate
        ref, _ = brute_force_rate(f, snr.values, [c.weight for c in cons], [c.bound for c in cons])
        errs[name] = abs(r / ref - 1)
    elapsed = time.perf_counter() - t0
    ok = max(errs.values()) <= 0.01 and elapsed < 30
    verdict(8, ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items()) + f"; {elapsed:.1f} s")


def test_criterion_9_ladder_closure(bundles):
    worst, where = np.inf, ""
    for name, b in bundles.items():
        for lad in ("ladder-optimal", "ladder-flat"):
            rep = b.feasibility[lad]
            rel = rep.slack / rep.bounds
            k = int(np.argmin(rel))
            if rel[k] < worst:
                worst, where = float(rel[k]), f"{name.removesuffix('.toml')} {lad} {b.constraints[k].label}"
    b = bundles["single_chu_4g2.toml"]
    ratio = b.rates["ladder-optimal"] / b.rates["optimal"]
    ok = worst >= -1e-4 and ratio >= 0.85
    verdict(9, ok, f"worst ladder slack {worst:.4f} B ({where}); "
                   f"order-4 ladder reaches {ratio:.3f} of R_max")


def _sampled(name: str, scale: int):
    """Rates and integrals from grid samples only (trapezoid rule, no evaluators)."""
    scn = load_scenario(preset_path(name))
    cfg, link = scn.config, Link(scn.config)
    cons = derive_constraints(load_model(scn)[0])
    f = link.grid(scale * scn.run.grid_points)
    snr = SnrProfile(f, link.snr_ideal(f), cfg.band)
    res = solve(snr, cons)
    ff = frequency_flat(cons, cfg.band, f)
    ff = TransmissionProfile(f, ff(f), "frequency-flat", cfg.band)
    return ([res.rate, rate(ff, snr)],
            np.concatenate([res.report.lhs, feasibility_check(cons, ff).lhs]))


def test_criterion_10_grid_doubling(bundles):
    # adaptive path: every reported rate and integral of the scenario runs
    fine = _bundles(grid_scale=2)
    worst_rate, worst_lhs = 0.0, 0.0
    for name, b in bundles.items():
        c = fine[name]
        for k, v in b.rates.items():
            worst_rate = max(worst_rate, abs(c.rates[k] / v - 1))
        for k, fr in b.feasibility.items():
            a, z = np.asarray(fr.lhs), np.asarray(c.feasibility[k].lhs)
            worst_lhs = max(worst_lhs, float(np.max(np.abs(z - a) / np.abs(a))))
    # sampled path, where the grid enters through the trapezoid rule
    s_rate, s_lhs = 0.0, 0.0
    for name in bundles:
        (r1, l1), (r2, l2) = _sampled(name, 1), _sampled(name, 2)
        s_rate = max(s_rate, float(np.max(np.abs(np.divide(r2, r1) - 1))))
        s_lhs = max(s_lhs, float(np.max(np.abs(l2 / l1 - 1))))
    ok = max(worst_rate, worst_lhs, s_rate, s_lhs) < 1e-3
    verdict(10, ok, f"max relative change: adaptive rates {worst_rate:.1e}, integrals "
                    f"{worst_lhs:.1e}; sampled rates {s_rate:.1e}, integrals {s_lhs:.1e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
