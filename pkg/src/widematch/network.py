"""Circuit models for Chu antennas, the coupled two-element array and the link.

Every function works on a 1-D frequency array in Hz and is vectorized over
it.  :class:`Link` bundles a scenario into evaluators that the optimizer can
call at arbitrary quadrature nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .profiles import SnrProfile
from .rational import RationalFunction, SampledResponse

__all__ = [
    "MultiportScattering",
    "Beamformer",
    "ChannelResponse",
    "LosslessLoadError",
    "z_to_s",
    "s_to_z",
    "chu_impedance",
    "chu_scattering_rational",
    "mutual_impedance",
    "array_impedance",
    "array_scattering",
    "beamformer",
    "equivalent_load",
    "channel_response",
    "snr_ideal",
    "snr_no_match",
    "equivalent_channel",
    "Link",
]

PASSIVITY_TOL = 1e-9


class LosslessLoadError(ValueError):
    """``|S_eq| >= 1`` inside the band, where the ideal SNR diverges."""


def _freq(f) -> np.ndarray:
    f = np.atleast_1d(np.asarray(f, dtype=float))
    if np.any(~np.isfinite(f)) or np.any(f <= 0):
        raise ValueError("frequencies must be positive and finite")
    return f


@dataclass(frozen=True, eq=False)
class MultiportScattering:
    """Per-frequency ``N x N`` scattering matrices, shape ``(F, N, N)``."""

    frequencies: np.ndarray
    matrices: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        m = np.asarray(self.matrices, dtype=complex)
        if m.ndim != 3 or m.shape[1] != m.shape[2] or m.shape[0] != f.size:
            raise ValueError("matrices must have shape (F, N, N)")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "matrices", m)

    @property
    def ports(self) -> int:
        return self.matrices.shape[1]

    def max_singular_value(self) -> np.ndarray:
        return np.linalg.norm(self.matrices, ord=2, axis=(1, 2))

    def is_passive(self, tol: float = PASSIVITY_TOL) -> bool:
        return bool(np.all(self.max_singular_value() <= 1 + tol))


@dataclass(frozen=True, eq=False)
class Beamformer:
    """Lossless, frequency-flat analog beamformer blocks.

    ``s21`` maps the single RF-chain port to the ``N`` antenna ports.  The
    network is reciprocal, so ``s12 = s21``.
    """

    s21: np.ndarray
    s11: complex = 0j
    s22: np.ndarray | None = None

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.s21, dtype=complex))
        n = v.size
        s22 = np.zeros((n, n), complex) if self.s22 is None else np.asarray(self.s22, complex)
        if s22.shape != (n, n):
            raise ValueError("s22 must be N x N")
        object.__setattr__(self, "s21", v)
        object.__setattr__(self, "s22", s22)
        object.__setattr__(self, "s11", complex(self.s11))

    @property
    def ports(self) -> int:
        return self.s21.size


def beamformer(mode: str) -> Beamformer:
    """Beamformer for ``"single"``, ``"even"`` or ``"odd"`` operation."""
    if mode == "single":
        return Beamformer([1.0])
    if mode == "even":
        return Beamformer(-1j / np.sqrt(2) * np.array([1.0, 1.0]))
    if mode == "odd":
        return Beamformer(-1j / np.sqrt(2) * np.array([1.0, -1.0]))
    raise ValueError(f"unknown beamforming mode {mode!r}")


@dataclass(frozen=True, eq=False)
class ChannelResponse:
    """Channel vectors ``s_RT(f)``, shape ``(F, N)``."""

    frequencies: np.ndarray
    vectors: np.ndarray


def z_to_s(z, r_ref: float):
    """Impedance to scattering: ``S = (Z + R I)^-1 (Z - R I)``.

    Accepts scalars, arrays of scalars, or stacks of square matrices with the
    matrix dimensions last.
    """
    z = np.asarray(z, dtype=complex)
    if z.ndim >= 2 and z.shape[-1] == z.shape[-2] and z.shape[-1] > 1:
        eye = np.eye(z.shape[-1])
        return np.linalg.solve(z + r_ref * eye, z - r_ref * eye)
    den = z + r_ref
    if np.any(den == 0):
        raise np.linalg.LinAlgError("Z + R is singular")
    return (z - r_ref) / den


def s_to_z(s, r_ref: float):
    """Scattering to impedance: ``Z = R (I - S)^-1 (I + S)``."""
    s = np.asarray(s, dtype=complex)
    if s.ndim >= 2 and s.shape[-1] == s.shape[-2] and s.shape[-1] > 1:
        eye = np.eye(s.shape[-1])
        return r_ref * np.linalg.solve(eye - s, eye + s)
    den = 1 - s
    if np.any(den == 0):
        raise np.linalg.LinAlgError("I - S is singular")
    return r_ref * (1 + s) / den


def chu_impedance(cfg: ScenarioConfig, f) -> np.ndarray:
    """Input impedance of Chu's TM01 antenna, a series C ahead of L in parallel with R."""
    x = 2j * np.pi * _freq(f) * cfg.tau
    return cfg.resistance / x + cfg.resistance / (1.0 + 1.0 / x)


def chu_scattering_rational(cfg: ScenarioConfig) -> RationalFunction:
    """``S_T(s) = 1 / (2 s^2 tau^2 + 2 s tau + 1)`` with ``tau = a / c``."""
    tau = cfg.tau
    return RationalFunction.from_coefficients([1.0], [2 * tau * tau, 2 * tau, 1.0])


def mutual_impedance(cfg: ScenarioConfig, f, z11=None, z22=None) -> np.ndarray:
    """Mutual impedance of two parallel Chu dipoles spaced ``cfg.spacing`` apart."""
    f = _freq(f)
    z11 = chu_impedance(cfg, f) if z11 is None else np.asarray(z11)
    z22 = z11 if z22 is None else np.asarray(z22)
    kd = 2 * np.pi * f * cfg.spacing / cfg.c
    bracket = 1 / (1j * kd) - 1 / kd**2 + 1j / kd**3
    return -1.5 * np.sqrt(z11.real * z22.real) * bracket * np.exp(-1j * kd)


def array_impedance(cfg: ScenarioConfig, f) -> np.ndarray:
    """``(F, N, N)`` impedance matrix; ``N = 1`` in single mode."""
    f = _freq(f)
    z = chu_impedance(cfg, f)
    if cfg.antennas == 1:
        return z[:, None, None]
    out = np.empty((f.size, 2, 2), complex)
    out[:, 0, 0] = out[:, 1, 1] = z
    out[:, 0, 1] = out[:, 1, 0] = mutual_impedance(cfg, f, z, z)
    return out


def array_scattering(cfg: ScenarioConfig, f) -> MultiportScattering:
    """Scattering matrix of the transmit antennas referenced to ``R``."""
    f = _freq(f)
    z = array_impedance(cfg, f)
    if z.shape[1] == 1:
        s = z_to_s(z[:, 0, 0], cfg.resistance)[:, None, None]
    else:
        s = z_to_s(z, cfg.resistance)
    return MultiportScattering(f, s)


def _through_beamformer(s_t: MultiportScattering, bf: Beamformer) -> np.ndarray:
    """``(I - S_F22 S_T)^-1 s_F21`` for every frequency, shape ``(F, N)``."""
    if bf.ports != s_t.ports:
        raise ValueError("beamformer and array port counts differ")
    n = s_t.ports
    if not np.any(bf.s22):
        return np.broadcast_to(bf.s21, (s_t.frequencies.size, n))
    a = np.eye(n) - bf.s22[None] @ s_t.matrices
    return np.linalg.solve(a, np.broadcast_to(bf.s21, (s_t.frequencies.size, n))[..., None])[..., 0]


def equivalent_load(s_t: MultiportScattering, bf: Beamformer) -> SampledResponse:
    """Scalar load seen through the beamformer.

    ``S_eq = S_F11 + s_F12^T S_T (I - S_F22 S_T)^-1 s_F21``.
    """
    return SampledResponse(s_t.frequencies, _s_eq(s_t, bf))


def _s_eq(s_t: MultiportScattering, bf: Beamformer) -> np.ndarray:
    v = _through_beamformer(s_t, bf)
    return bf.s11 + np.einsum("i,fij,fj->f", bf.s21, s_t.matrices, v)


def channel_response(cfg: ScenarioConfig, s_t: MultiportScattering) -> ChannelResponse:
    """Far-field channel from each transmit port to the receive port.

    The receive antenna is a Chu antenna with the transmitter's ``a`` and
    ``R``.  In array mode the receiver sits at angle ``theta`` from broadside.
    """
    f = s_t.frequencies
    z_t = chu_impedance(cfg, f)
    z_r = z_t
    scale = cfg.c * cfg.gain * z_t.real / (2 * np.pi * f * cfg.link_distance * (cfg.z0 + z_r))
    n = s_t.ports
    if n == 1:
        vec = (1.0 - s_t.matrices[:, 0, 0])[:, None]
    else:
        steer = np.ones((f.size, n), complex)
        steer[:, 1] = np.exp(2j * np.pi * f * cfg.spacing / cfg.c * np.sin(cfg.theta))
        vec = steer - np.einsum("fij,fj->fi", s_t.matrices, steer)
    return ChannelResponse(f, vec * scale[:, None])


def _effective_gain(s_t: MultiportScattering, bf: Beamformer,
                    s_rt: ChannelResponse) -> np.ndarray:
    """``|s_RT^T (I - S_F22 S_T)^-1 s_F21|^2``."""
    h = np.einsum("fi,fi->f", s_rt.vectors, _through_beamformer(s_t, bf))
    return np.abs(h) ** 2


def _no_match_values(cfg, s_t, bf, s_rt) -> np.ndarray:
    return _effective_gain(s_t, bf, s_rt) * cfg.es / cfg.n0


def _ideal_values(cfg, s_t, bf, s_rt) -> np.ndarray:
    f = s_t.frequencies
    s_eq = _s_eq(s_t, bf)
    in_band = cfg.band.contains(f)
    loss = 1.0 - np.abs(s_eq) ** 2
    if np.any(loss[in_band] <= 0):
        raise LosslessLoadError("lossless load singularity: |S_eq| >= 1 in band")
    gain = _effective_gain(s_t, bf, s_rt)
    return np.where(in_band, gain / np.where(in_band, loss, 1.0), 0.0) * cfg.es / cfg.n0


def snr_no_match(cfg: ScenarioConfig, s_t: MultiportScattering, bf: Beamformer,
                 s_rt: ChannelResponse) -> SnrProfile:
    """SNR with the source wired straight to the beamformer."""
    return SnrProfile(s_t.frequencies, _no_match_values(cfg, s_t, bf, s_rt), cfg.band)


def snr_ideal(cfg: ScenarioConfig, s_t: MultiportScattering, bf: Beamformer,
              s_rt: ChannelResponse) -> SnrProfile:
    """SNR behind an ideal lossless matching network (``T = 1``).

    Raises
    ------
    LosslessLoadError
        If ``|S_eq| >= 1`` at an in-band frequency.
    """
    return SnrProfile(s_t.frequencies, _ideal_values(cfg, s_t, bf, s_rt), cfg.band)


def equivalent_channel(s_m: np.ndarray, s_eq: np.ndarray, s_t: MultiportScattering,
                       bf: Beamformer, s_rt: ChannelResponse) -> np.ndarray:
    """End-to-end SISO channel through a matching two-port.

    Parameters
    ----------
    s_m : ndarray, shape (F, 2, 2)
        Matching-network scattering matrices, port 1 at the source.
    s_eq : ndarray, shape (F,)
        Equivalent load reflection.

    Returns
    -------
    ndarray
        ``s_RT^T (I - S_F22 S_T)^-1 s_F21 * S_M21 / (1 - S_M22 S_eq)``.
    """
    den = 1.0 - s_m[:, 1, 1] * s_eq
    if np.any(np.abs(den) < 1e-12):
        raise ZeroDivisionError("resonant denominator 1 - S_M22 S_eq")
    h = np.einsum("fi,fi->f", s_rt.vectors, _through_beamformer(s_t, bf))
    return h * s_m[:, 1, 0] / den


class Link:
    """Scenario-bound evaluators for the load and the SNR.

    Parameters
    ----------
    cfg : ScenarioConfig
    """

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.bf = beamformer(cfg.mode)

    def scattering(self, f) -> MultiportScattering:
        return array_scattering(self.cfg, f)

    def load(self, f) -> np.ndarray:
        """``S_eq(f)`` samples."""
        return _s_eq(self.scattering(f), self.bf)

    def load_response(self, f) -> SampledResponse:
        f = _freq(f)
        return SampledResponse(f, self.load(f), model=self.load)

    def _snr(self, f, kind: str) -> np.ndarray:
        f = np.atleast_1d(np.asarray(f, dtype=float))
        out = np.zeros(f.shape)
        m = self.cfg.band.contains(f) & (f > 0)
        if np.any(m):
            s_t = self.scattering(f[m])
            s_rt = channel_response(self.cfg, s_t)
            fn = _ideal_values if kind == "ideal" else _no_match_values
            out[m] = fn(self.cfg, s_t, self.bf, s_rt)
        return out

    def snr_ideal(self, f) -> np.ndarray:
        return self._snr(f, "ideal")

    def snr_no_match(self, f) -> np.ndarray:
        return self._snr(f, "no-match")

    def snr_profile(self, f, kind: str = "ideal") -> SnrProfile:
        """SNR samples on ``f`` with an attached evaluator."""
        f = _freq(f)
        ev = self.snr_ideal if kind == "ideal" else self.snr_no_match
        return SnrProfile(f, ev(f), self.cfg.band, evaluator=ev)

    def grid(self, points: int = 2001, guard: float = 0.05, guard_points: int = 50) -> np.ndarray:
        """Band grid with ``points`` samples plus guard samples on each side."""
        band = self.cfg.band
        inner = band.grid(points)
        width = guard * band.width
        if guard_points <= 0 or width <= 0:
            return inner
        lo = np.linspace(max(band.f_min - width, band.f_min * 0.5), band.f_min, guard_points + 1)[:-1]
        hi = np.linspace(band.f_max, band.f_max + width, guard_points + 1)[1:]
        return np.concatenate([lo, inner, hi])
