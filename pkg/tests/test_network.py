import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import chu_impedance as chu_z_ref, chu_reflection_sq
from widematch import Link, ScenarioConfig, beamformer, chu_impedance, chu_scattering_rational
from widematch.network import array_scattering, mutual_impedance, s_to_z, z_to_s
from conftest import array_cfg

# |S_T(j 2 pi 7 GHz)| for a = 4.29 mm, from 1 / sqrt(1 + 4 (w tau)^4)
CHU_S_AT_FC = 0.7838255253670295


def test_chu_reflection_magnitude_frozen(chu_cfg):
    s = chu_scattering_rational(chu_cfg).at_frequency(np.array([7e9]))[0]
    assert abs(s) == pytest.approx(CHU_S_AT_FC, rel=1e-12)
    assert np.sqrt(chu_reflection_sq(7e9, chu_cfg.tau)) == pytest.approx(CHU_S_AT_FC, rel=1e-12)


@given(st.floats(1e8, 5e10))
def test_chu_rational_matches_impedance(f):
    cfg = ScenarioConfig()
    z = chu_impedance(cfg, np.array([f]))[0]
    assert z == pytest.approx(chu_z_ref(f, cfg.tau, cfg.resistance), rel=1e-12)
    s_imp = (z - cfg.z0) / (z + cfg.z0)
    s_rat = chu_scattering_rational(cfg).at_frequency(np.array([f]))[0]
    assert abs(s_imp - s_rat) <= 1e-12


def test_single_load_is_chu(chu_cfg):
    f = np.linspace(1e9, 20e9, 50)
    np.testing.assert_allclose(Link(chu_cfg).load(f),
                               chu_scattering_rational(chu_cfg).at_frequency(f), atol=1e-13)


@given(st.complex_numbers(max_magnitude=1e4).filter(lambda z: z.real > 1e-3))
def test_z_s_roundtrip(z):
    s = z_to_s(np.array([z]), 50.0)
    assert abs(s[0]) < 1
    assert s_to_z(s, 50.0)[0] == pytest.approx(z, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("mode", ["even", "odd"])
def test_array_reciprocal_passive(mode):
    cfg = array_cfg(mode)
    f = np.linspace(1e9, 20e9, 200)
    st_ = array_scattering(cfg, f)
    np.testing.assert_allclose(st_.matrices[:, 0, 1], st_.matrices[:, 1, 0], atol=1e-15)
    assert st_.is_passive()


def test_mutual_impedance_far_field_decay():
    cfg = array_cfg("even")
    f = np.array([7e9])
    near = abs(mutual_impedance(cfg, f)[0])
    far = abs(mutual_impedance(cfg.replace(spacing=cfg.spacing * 20), f)[0])
    # leading term falls as 1/(k d)
    assert far / near == pytest.approx(1 / 20, rel=0.2)


@pytest.mark.parametrize("mode,sign", [("even", 1.0), ("odd", -1.0)])
def test_mode_loads(mode, sign):
    # -j/sqrt2 [1, +-1] beamformer: S_eq = -(S11 +- S12)
    cfg = array_cfg(mode)
    f = np.linspace(4e9, 10e9, 30)
    s = array_scattering(cfg, f).matrices
    np.testing.assert_allclose(Link(cfg).load(f), -(s[:, 0, 0] + sign * s[:, 0, 1]), atol=1e-13)


def test_beamformer_lossless():
    for mode in ("single", "even", "odd"):
        assert np.sum(np.abs(beamformer(mode).s21) ** 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        beamformer("diagonal")


@pytest.mark.parametrize("mode", ["single", "even", "odd"])
def test_snr_positive_in_band_zero_outside(mode):
    cfg = array_cfg(mode) if mode != "single" else ScenarioConfig()
    link = Link(cfg)
    f = np.array([4e9, 5e9, 7e9, 9e9, 9.5e9])
    s = link.snr_ideal(f)
    assert s[0] == 0 and s[-1] == 0 and np.all(s[1:-1] > 0)
    # the unmatched link never beats the ideal one
    assert np.all(link.snr_no_match(f) <= s * (1 + 1e-12))


def test_snr_unsorted_input_odd_mode():
    link = Link(array_cfg("odd"))
    f = np.array([8e9, 5e9, 7e9])
    np.testing.assert_allclose(link.snr_ideal(f), link.snr_ideal(np.sort(f))[[2, 0, 1]])


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(radius=-1.0)
    with pytest.raises(ValueError):
        ScenarioConfig(mode="triple")
    with pytest.raises(ValueError):
        ScenarioConfig(es=-1.0)
    cfg = ScenarioConfig(p_total=0.25).with_bandwidth(1.4e9)
    assert cfg.es == pytest.approx(0.25 / 1.4e9)
    assert cfg.band.center == pytest.approx(7e9)
