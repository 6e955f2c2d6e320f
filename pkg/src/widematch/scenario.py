"""TOML scenario files: physical parameters plus run options.

Every key carries its unit in the name.  Unknown keys are rejected by the
schema, so a typo fails loudly instead of silently keeping a default.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import jsonschema
import tomli

from .config import SPEED_OF_LIGHT, ScenarioConfig
from .profiles import Band
from .sweep import STRATEGIES

__all__ = ["Scenario", "LoadOptions", "RunOptions", "ScenarioError", "load_scenario",
           "parse_scenario", "bundled_presets", "preset_path", "SCHEMA", "BOLTZMANN"]

BOLTZMANN = 1.380649e-23

_POS = {"type": "number", "exclusiveMinimum": 0}
_BAND = {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["scenario"],
    "properties": {
        "scenario": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "name": {"type": "string"},
                "mode": {"enum": ["single", "even", "odd"]},
                "radius_m": _POS,
                "radius_wavelengths": _POS,
                "resistance_ohm": _POS,
                "z0_ohm": _POS,
                "speed_of_light_m_per_s": _POS,
                "f_c_hz": _POS,
                "band_hz": _BAND,
                "bandwidth_hz": _POS,
                "es_w_per_hz": {"type": "number", "minimum": 0},
                "p_total_w": _POS,
                "n0_w_per_hz": _POS,
                "boltzmann_j_per_k": _POS,
                "temperature_k": _POS,
                "gain": _POS,
                "link_distance_m": _POS,
                "spacing_m": _POS,
                "spacing_wavelengths": _POS,
                "theta_rad": {"type": "number"},
            },
        },
        "load": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "model": {"enum": ["analytic", "fit"]},
                "fit_order": {"type": "integer", "minimum": 1, "maximum": 20},
                "fit_band_hz": _BAND,
                "fit_points": {"type": "integer", "minimum": 8},
                "fit_tol": _POS,
                "touchstone": {"type": "string"},
            },
        },
        "run": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grid_points": {"type": "integer", "minimum": 16},
                "tol": _POS,
                "strategies": {"type": "array", "items": {"enum": list(STRATEGIES)},
                               "uniqueItems": True},
                "sweep_bandwidths_hz": {"type": "array", "items": _POS},
                "ladder_order": {"type": "integer", "minimum": 1, "maximum": 10},
                "ladder_seeds": {"type": "integer", "minimum": 1},
                "ladder_fit_points": {"type": "integer", "minimum": 8},
                "shunt_first": {"type": "boolean"},
                "seed": {"type": "integer", "minimum": 0},
                "output_dir": {"type": "string"},
            },
        },
    },
}


class ScenarioError(ValueError):
    """Invalid scenario file; the message names the file and the key."""


@dataclass(frozen=True)
class LoadOptions:
    """How the equivalent load's rational model is obtained.

    Attributes
    ----------
    model : str
        ``analytic`` uses the closed-form Chu reflection (single antenna
        only); ``fit`` fits a rational function to sampled data.
    fit_order : int
        Denominator degree of the rational fit.
    fit_band : Band, optional
        Frequency span of the fit samples; default the scenario band.
    fit_points : int
    fit_tol : float
        Relative fit error target.
    touchstone : str, optional
        One-port file whose samples replace the modeled load in the
        constraint derivation.
    """

    model: str = "analytic"
    fit_order: int = 4
    fit_band: Optional[Band] = None
    fit_points: int = 401
    fit_tol: float = 1e-3
    touchstone: Optional[str] = None


@dataclass(frozen=True)
class RunOptions:
    grid_points: int = 2001
    tol: float = 1e-8
    strategies: tuple[str, ...] = STRATEGIES
    sweep_bandwidths: tuple[float, ...] = ()
    ladder_order: int = 4
    ladder_seeds: int = 16
    ladder_fit_points: int = 161
    shunt_first: bool = False
    seed: int = 0
    output_dir: str = "out"


@dataclass(frozen=True)
class Scenario:
    name: str
    config: ScenarioConfig
    load: LoadOptions = field(default_factory=LoadOptions)
    run: RunOptions = field(default_factory=RunOptions)
    source: Optional[str] = None


def _physical(sec: dict, where: str) -> ScenarioConfig:
    kw = {}
    mode = sec.get("mode", "single")
    kw["mode"] = mode
    c = float(sec.get("speed_of_light_m_per_s", SPEED_OF_LIGHT))
    kw["c"] = c
    f_c = float(sec.get("f_c_hz", 7e9))
    kw["f_c"] = f_c
    lam = c / f_c

    def exclusive(a, b):
        if a in sec and b in sec:
            raise ScenarioError(f"{where}: set at most one of {a!r} and {b!r}")

    exclusive("radius_m", "radius_wavelengths")
    if "radius_m" in sec:
        kw["radius"] = float(sec["radius_m"])
    elif "radius_wavelengths" in sec:
        kw["radius"] = float(sec["radius_wavelengths"]) * lam
    exclusive("spacing_m", "spacing_wavelengths")
    kw["spacing"] = float(sec.get("spacing_m", float(sec.get("spacing_wavelengths", 0.5)) * lam))
    for key, name in (("resistance_ohm", "resistance"), ("z0_ohm", "z0"), ("gain", "gain"),
                      ("link_distance_m", "link_distance"), ("theta_rad", "theta")):
        if key in sec:
            kw[name] = float(sec[key])

    exclusive("band_hz", "bandwidth_hz")
    if "band_hz" in sec:
        lo, hi = (float(x) for x in sec["band_hz"])
        kw["band"] = Band(lo, hi)
    else:
        kw["band"] = Band.centered(f_c, float(sec.get("bandwidth_hz", 4.2e9)))
    width = kw["band"].width

    exclusive("es_w_per_hz", "p_total_w")
    if "p_total_w" in sec:
        kw["p_total"] = float(sec["p_total_w"])
        kw["es"] = kw["p_total"] / width
    elif "es_w_per_hz" in sec:
        kw["es"] = float(sec["es_w_per_hz"])
    else:
        kw["p_total"] = 0.25
        kw["es"] = 0.25 / width

    has_kt = "boltzmann_j_per_k" in sec or "temperature_k" in sec
    if has_kt and "n0_w_per_hz" in sec:
        raise ScenarioError(f"{where}: give either n0_w_per_hz or temperature_k, not both")
    if has_kt:
        if "temperature_k" not in sec:
            raise ScenarioError(f"{where}: boltzmann_j_per_k needs temperature_k")
        kw["n0"] = float(sec.get("boltzmann_j_per_k", BOLTZMANN)) * float(sec["temperature_k"])
    elif "n0_w_per_hz" in sec:
        kw["n0"] = float(sec["n0_w_per_hz"])
    try:
        return ScenarioConfig(**kw)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def parse_scenario(text: str, source: Optional[str] = None) -> Scenario:
    """Parse and validate scenario TOML text.

    Raises
    ------
    ScenarioError
        TOML syntax errors, schema violations and inconsistent key pairs.
    """
    where = source or "<scenario>"
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"{where}: {path}: {exc.message}") from exc
    sec = doc["scenario"]
    cfg = _physical(sec, where)
    name = sec.get("name") or (os.path.splitext(os.path.basename(source))[0] if source else "scenario")

    ld = doc.get("load", {})
    model = ld.get("model", "analytic" if cfg.mode == "single" and "touchstone" not in ld else "fit")
    if model == "analytic" and cfg.mode != "single":
        raise ScenarioError(f"{where}: load.model = 'analytic' is only available in single mode")
    touchstone = ld.get("touchstone")
    if touchstone is not None and source is not None and not os.path.isabs(touchstone):
        touchstone = os.path.join(os.path.dirname(os.path.abspath(source)), touchstone)
    fit_band = Band(*(float(x) for x in ld["fit_band_hz"])) if "fit_band_hz" in ld else None
    load = LoadOptions(model, int(ld.get("fit_order", 4)), fit_band,
                       int(ld.get("fit_points", 401)), float(ld.get("fit_tol", 1e-3)), touchstone)

    rn = doc.get("run", {})
    run = RunOptions(
        grid_points=int(rn.get("grid_points", 2001)),
        tol=float(rn.get("tol", 1e-8)),
        strategies=tuple(rn.get("strategies", STRATEGIES)),
        sweep_bandwidths=tuple(float(b) for b in rn.get("sweep_bandwidths_hz", ())),
        ladder_order=int(rn.get("ladder_order", 4)),
        ladder_seeds=int(rn.get("ladder_seeds", 16)),
        ladder_fit_points=int(rn.get("ladder_fit_points", 161)),
        shunt_first=bool(rn.get("shunt_first", False)),
        seed=int(rn.get("seed", 0)),
        output_dir=str(rn.get("output_dir", "out")),
    )
    return Scenario(name, cfg, load, run, source)


def load_scenario(path) -> Scenario:
    """Read a scenario file (UTF-8 TOML)."""
    path = os.fspath(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ScenarioError(f"{path}: not UTF-8: {exc}") from exc
    return parse_scenario(text, path)


def bundled_presets() -> list[str]:
    """Names of the scenario files shipped with the package."""
    from importlib import resources
    root = resources.files("widematch") / "presets"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".toml"))


def preset_path(name: str) -> str:
    from importlib import resources
    if not name.endswith(".toml"):
        name += ".toml"
    return str(resources.files("widematch") / "presets" / name)
