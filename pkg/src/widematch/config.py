"""Physical parameters of a transmit-matching scenario."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .profiles import Band

SPEED_OF_LIGHT = 299_792_458.0
MODES = ("single", "even", "odd")


@dataclass(frozen=True)
class ScenarioConfig:
    """Link and antenna parameters, all in SI units.

    Attributes
    ----------
    radius : float
        Chu sphere radius ``a`` in m.
    resistance : float
        Characteristic resistance ``R`` of the Chu model in ohm.
    z0 : float
        Real reference impedance of the source and matching network in ohm.
    c : float
        Propagation speed in m/s.
    f_c : float
        Center frequency in Hz.
    band : Band
        Band of interest ``[f_min, f_max]``.
    es : float
        Supplied power spectral density in W/Hz.
    n0 : float
        Noise spectral density in W/Hz.
    gain : float
        Antenna gain ``G``.
    link_distance : float
        Transmitter-receiver distance in m.
    spacing : float
        Element spacing ``d`` in m (array only).
    theta : float
        Receiver angle from broadside in rad (array only).
    mode : str
        ``"single"`` for one antenna, ``"even"`` or ``"odd"`` for the
        two-element array with the matching beamformer.
    p_total : float, optional
        Total power in W.  When set, ``es`` follows ``p_total / bandwidth``
        under :meth:`with_bandwidth`.
    """

    radius: float = 4.29e-3
    resistance: float = 50.0
    z0: float = 50.0
    c: float = SPEED_OF_LIGHT
    f_c: float = 7e9
    band: Band = Band(4.9e9, 9.1e9)
    es: float = 0.25 / 4.2e9
    n0: float = 4e-21
    gain: float = 1.5
    link_distance: float = 500.0
    spacing: float = SPEED_OF_LIGHT / 7e9 / 2
    theta: float = 0.0
    mode: str = "single"
    p_total: Optional[float] = None

    def __post_init__(self):
        positive = ("radius", "resistance", "z0", "c", "f_c", "n0",
                    "gain", "link_distance", "spacing")
        for name in positive:
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (np.isfinite(self.es) and self.es >= 0):
            raise ValueError(f"es must be nonnegative and finite, got {self.es!r}")
        if not isinstance(self.band, Band):
            raise TypeError("band must be a Band")
        if self.band.f_min <= 0:
            raise ValueError("band must lie at positive frequencies")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if self.p_total is not None and not self.p_total > 0:
            raise ValueError("p_total must be positive")

    @property
    def antennas(self) -> int:
        return 1 if self.mode == "single" else 2

    @property
    def wavelength(self) -> float:
        return self.c / self.f_c

    @property
    def tau(self) -> float:
        """Light travel time across the sphere radius, ``a / c``."""
        return self.radius / self.c

    def with_bandwidth(self, bandwidth: float) -> "ScenarioConfig":
        """Re-center the band on ``f_c`` with a new width.

        ``es`` is rescaled to keep ``p_total`` fixed when that is set.
        """
        es = self.p_total / bandwidth if self.p_total is not None else self.es
        return dataclasses.replace(self, band=Band.centered(self.f_c, bandwidth), es=es)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)
