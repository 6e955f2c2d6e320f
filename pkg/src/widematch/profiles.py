"""Frequency profiles shared by the network, optimizer and ladder modules.

A profile holds samples on a frequency grid and, optionally, a vectorized
evaluator.  When the evaluator is present integrals use adaptive quadrature;
otherwise they fall back to the trapezoid rule on the samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._quadrature import integrate

Evaluator = Callable[[np.ndarray], np.ndarray]

STRATEGIES = (
    "ideal",
    "optimal",
    "frequency-flat",
    "conjugate-match",
    "no-match",
    "ladder",
)

# rtol used for every adaptive integral in the package
QUAD_RTOL = 1e-10
_T_SLOP = 1e-9


@dataclass(frozen=True)
class Band:
    """Closed frequency interval ``[f_min, f_max]`` in Hz."""

    f_min: float
    f_max: float

    def __post_init__(self):
        if not (np.isfinite(self.f_min) and np.isfinite(self.f_max)):
            raise ValueError("band edges must be finite")
        if not 0.0 <= self.f_min < self.f_max:
            raise ValueError(f"invalid band [{self.f_min}, {self.f_max}]")

    @classmethod
    def centered(cls, f_c: float, bandwidth: float) -> "Band":
        return cls(f_c - 0.5 * bandwidth, f_c + 0.5 * bandwidth)

    @property
    def width(self) -> float:
        return self.f_max - self.f_min

    @property
    def center(self) -> float:
        return 0.5 * (self.f_min + self.f_max)

    def contains(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return (f >= self.f_min) & (f <= self.f_max)

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.f_min, self.f_max, n)


def _check_grid(frequencies: np.ndarray, values: np.ndarray) -> None:
    if frequencies.ndim != 1 or frequencies.size < 2:
        raise ValueError("need a 1-D grid with at least two points")
    if values.shape[0] != frequencies.size:
        raise ValueError("values and frequencies differ in length")
    if np.any(np.diff(frequencies) <= 0):
        raise ValueError("frequency grid must be strictly increasing")


@dataclass(frozen=True, eq=False)
class SnrProfile:
    """Frequency-dependent SNR that is zero outside ``band``.

    Attributes
    ----------
    frequencies, values : ndarray
        Samples; ``values`` are nonnegative reals.
    band : Band
        Band of interest.  Samples outside it are forced to zero.
    evaluator : callable, optional
        Vectorized ``f -> snr(f)`` used for quadrature and resampling.
    """

    frequencies: np.ndarray
    values: np.ndarray
    band: Band
    evaluator: Optional[Evaluator] = None

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        _check_grid(f, v)
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValueError("SNR must be finite and nonnegative")
        v = np.where(self.band.contains(f), v, 0.0)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)

    def __call__(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if self.evaluator is not None:
            out = np.asarray(self.evaluator(f), dtype=float)
        else:
            out = np.interp(f, self.frequencies, self.values)
        return np.where(self.band.contains(f), out, 0.0)

    @property
    def band_samples(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.band.contains(self.frequencies)
        return self.frequencies[m], self.values[m]


@dataclass(frozen=True, eq=False)
class TransmissionProfile:
    """Power transmission ``T(f)`` delivered into the load.

    Attributes
    ----------
    frequencies, values : ndarray
        Samples in ``[0, 1]``.
    strategy : str
        Provenance tag, one of :data:`STRATEGIES`.
    support : Band
        Interval over which the profile is defined and integrated.
    evaluator : callable, optional
        Vectorized ``f -> T(f)``.
    log_loss : callable, optional
        Vectorized ``f -> ln(1 / (1 - T(f)))``.  Supplying it keeps the
        constraint integrals accurate when ``T`` is within rounding of 1.
    """

    frequencies: np.ndarray
    values: np.ndarray
    strategy: str
    support: Band
    evaluator: Optional[Evaluator] = None
    log_loss: Optional[Evaluator] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy tag {self.strategy!r}")
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        _check_grid(f, v)
        if np.any(~np.isfinite(v)) or np.any(v < -_T_SLOP) or np.any(v > 1 + _T_SLOP):
            raise ValueError("transmission must lie in [0, 1]")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", np.clip(v, 0.0, 1.0))

    def __call__(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if self.evaluator is not None:
            out = np.asarray(self.evaluator(f), dtype=float)
        else:
            out = np.interp(f, self.frequencies, self.values)
        return np.clip(out, 0.0, 1.0)

    def log_inverse_loss(self, f) -> np.ndarray:
        """Return ``ln(1 / (1 - T))``; infinite where ``T == 1``."""
        f = np.asarray(f, dtype=float)
        if self.log_loss is not None:
            return np.asarray(self.log_loss(f), dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log1p(-self(f))

    def resample(self, frequencies: np.ndarray) -> "TransmissionProfile":
        frequencies = np.asarray(frequencies, dtype=float)
        return TransmissionProfile(frequencies, self(frequencies), self.strategy,
                                   self.support, self.evaluator, self.log_loss,
                                   dict(self.meta))


def band_integral(func: Evaluator, band: Band, *, breakpoints=()) -> float:
    """Adaptive integral of a vectorized function over ``band``."""
    value, _ = integrate(func, band.f_min, band.f_max, rtol=QUAD_RTOL,
                         breakpoints=breakpoints)
    return value


def rate(profile: TransmissionProfile, snr: SnrProfile) -> float:
    """Achievable rate ``int log2(1 + snr T) df`` over the band, in bit/s.

    Uses adaptive quadrature when both profiles carry evaluators and the
    trapezoid rule on the SNR grid otherwise.
    """
    if profile.evaluator is not None and snr.evaluator is not None:
        return band_integral(lambda f: np.log2(1.0 + snr(f) * profile(f)), snr.band)
    f, s = snr.band_samples
    return float(np.trapezoid(np.log2(1.0 + s * profile(f)), f))


def ideal_profile(snr: SnrProfile) -> TransmissionProfile:
    """Unit transmission over the band (the Shannon reference)."""
    return TransmissionProfile(snr.frequencies, np.ones_like(snr.frequencies),
                               "ideal", snr.band,
                               evaluator=lambda f: np.ones_like(np.asarray(f, dtype=float)))
