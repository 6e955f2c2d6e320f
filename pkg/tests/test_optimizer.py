import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import brute_force_rate, flat_transmission
from widematch import (Link, SnrProfile, conjugate_match, feasibility_check, frequency_flat,
                       ideal_profile, no_match_profile, rate, solve,
                       transmission_from_multipliers, transmission_into_load)
from widematch.optimizer import circuit_support, conjugate_network, stationarity_residual
from widematch.network import chu_impedance

# 1 - max_i exp(-B_i / int xi_i) on [4.9, 9.1] GHz for a = 4.29 mm, closed form
T_FF_CHU = 0.720124012242842


def _snr64(cfg):
    f = cfg.band.grid(64)
    return SnrProfile(f, Link(cfg).snr_ideal(f), cfg.band)


def test_frequency_flat_frozen(chu_cfg, chu_constraints):
    assert flat_transmission(chu_cfg.tau, 4.9e9, 9.1e9) == pytest.approx(T_FF_CHU, rel=1e-12)
    ff = frequency_flat(chu_constraints, chu_cfg.band)
    assert ff.meta["t_ff"] == pytest.approx(T_FF_CHU, rel=1e-9)
    assert np.argmax(ff.meta["r"]) == 1  # the f^-4 constraint binds


@given(st.floats(0.3e9, 4.2e9))
def test_frequency_flat_any_band(chu_cfg, chu_constraints, width):
    band = chu_cfg.with_bandwidth(width).band
    got = frequency_flat(chu_constraints, band).meta["t_ff"]
    assert got == pytest.approx(flat_transmission(chu_cfg.tau, band.f_min, band.f_max),
                                rel=1e-9, abs=1e-12)


def test_solve_matches_brute_force_single(chu_cfg, chu_constraints):
    snr = _snr64(chu_cfg)
    res = solve(snr, chu_constraints)
    ref, _ = brute_force_rate(snr.frequencies, snr.values, [c.weight for c in chu_constraints],
                              [c.bound for c in chu_constraints])
    assert res.method == "single"
    assert res.rate == pytest.approx(ref, rel=1e-6)


def test_solve_matches_brute_force_joint(chu_cfg, chu_constraints):
    # scaling the f^-2 bound makes both constraints active together
    cons = [dataclasses.replace(chu_constraints[0], bound=0.24 * chu_constraints[0].bound),
            chu_constraints[1]]
    snr = _snr64(chu_cfg)
    res = solve(snr, cons)
    ref, _ = brute_force_rate(snr.frequencies, snr.values, [c.weight for c in cons],
                              [c.bound for c in cons])
    assert res.method == "joint"
    assert np.all(res.active)
    assert res.rate == pytest.approx(ref, rel=1e-6)
    assert res.complementary_slackness <= 1e-6
    assert res.stationarity <= 1e-6


def test_optimal_beats_benchmarks(chu_cfg, chu_constraints):
    link = Link(chu_cfg)
    grid = link.grid()
    snr = link.snr_profile(grid)
    res = solve(snr, chu_constraints)
    r_ff = rate(frequency_flat(chu_constraints, chu_cfg.band, grid), snr)
    assert r_ff < res.rate < rate(ideal_profile(snr), snr)
    assert res.report.feasible


def test_transmission_from_multipliers_validation(chu_cfg, chu_constraints):
    snr = _snr64(chu_cfg)
    with pytest.raises(ValueError):
        transmission_from_multipliers([1.0], chu_constraints, snr)
    with pytest.raises(ValueError):
        transmission_from_multipliers([-1.0, 1.0], chu_constraints, snr)


def test_kkt_form_and_stationarity(chu_cfg, chu_constraints):
    snr = _snr64(chu_cfg)
    res = solve(snr, chu_constraints)
    t = res.profile(snr.frequencies)
    assert np.all((t >= 0) & (t <= 1))
    mu = res.multipliers
    prof = transmission_from_multipliers(mu, chu_constraints, snr)
    np.testing.assert_allclose(prof(snr.frequencies), t, atol=1e-12)
    assert stationarity_residual(res.profile, chu_constraints, snr) <= 1e-6


def test_solve_errors(chu_cfg, chu_constraints):
    snr = _snr64(chu_cfg)
    with pytest.raises(ValueError):
        solve(snr, [])
    zero = SnrProfile(snr.frequencies, np.zeros_like(snr.values), snr.band)
    with pytest.raises(ValueError):
        solve(zero, chu_constraints)


@pytest.mark.parametrize("f_c", [3e9, 7e9, 12e9])
def test_conjugate_network_matches_at_center(chu_cfg, f_c):
    z = complex(chu_impedance(chu_cfg, np.array([f_c]))[0])
    net = conjugate_network(z, f_c, chu_cfg.z0)
    link = Link(chu_cfg)
    load = link.load_response(np.array([f_c * 0.9, f_c, f_c * 1.1]))
    t = transmission_into_load(net, load)(np.array([f_c]))[0]
    assert t == pytest.approx(1.0, abs=1e-12)


def test_conjugate_network_rejects_reactive_load():
    with pytest.raises(ValueError):
        conjugate_network(-5j, 7e9, 50.0)


def test_benchmark_profiles_feasible_f2(chu_cfg, chu_constraints):
    link = Link(chu_cfg)
    load = link.load_response(link.grid())
    cm = conjugate_match(chu_cfg, load)
    nm = no_match_profile(load, support=circuit_support(chu_cfg.f_c))
    for prof in (cm, nm):
        rep = feasibility_check(chu_constraints[:1], prof)
        assert rep.slack[0] >= -1e-6 * rep.bounds[0]
