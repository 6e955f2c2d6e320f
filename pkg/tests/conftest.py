"""Shared fixtures.  Expensive scenario runs are session-scoped."""

from __future__ import annotations

import os
import sys

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from widematch import (Link, ScenarioConfig, SampledResponse, chu_scattering_rational,  # noqa: E402
                       derive_constraints, fit_rational)
from widematch.scenario import load_scenario, preset_path  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

TWO_CHU_RADIUS = 299_792_458.0 / 7e9 / 15


@pytest.fixture(scope="session")
def chu_cfg() -> ScenarioConfig:
    return ScenarioConfig(p_total=0.25)


@pytest.fixture(scope="session")
def chu_constraints(chu_cfg):
    return derive_constraints(chu_scattering_rational(chu_cfg))


def array_cfg(mode: str) -> ScenarioConfig:
    theta = 0.0 if mode == "even" else np.pi / 2
    return ScenarioConfig(mode=mode, theta=theta, radius=TWO_CHU_RADIUS, p_total=0.25)


def array_constraints(cfg: ScenarioConfig):
    f = cfg.band.grid(401)
    fn = fit_rational(SampledResponse(f, Link(cfg).load(f)), 4).function
    return derive_constraints(fn)


@pytest.fixture(scope="session")
def preset():
    """Load a bundled preset by name."""
    return lambda name: load_scenario(preset_path(name))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
