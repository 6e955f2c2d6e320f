"""Lossless LC matching networks: evaluation, fitting and Touchstone export.

Networks are cascades of series and shunt reactive elements between the
source (port 1) and the load (port 2).  A :class:`LadderNetwork` alternates
series inductors and shunt capacitors; a :class:`LumpedNetwork` is an
arbitrary element list, used for the conjugate-match L-section.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize

from .profiles import Band, SnrProfile, TransmissionProfile, rate
from .rational import SampledResponse
from .touchstone import TouchstoneData, write_touchstone

# |S_L| up to 1 + PASSIVE_TOL is taken as a rounded lossless load
PASSIVE_TOL = 1e-9

__all__ = [
    "Element",
    "LumpedNetwork",
    "LadderNetwork",
    "FitReport",
    "LadderFitError",
    "ResonanceError",
    "two_port_scattering",
    "transmission_values",
    "transmission_into_load",
    "fit",
    "export_touchstone",
    "L_BOUNDS",
    "C_BOUNDS",
]

L_BOUNDS = (1e-12, 1e-6)
C_BOUNDS = (1e-15, 1e-9)
MAX_ORDER = 10


class LadderFitError(RuntimeError):
    """All restarts failed; ``best`` holds the least-bad candidate, if any."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ResonanceError(ZeroDivisionError):
    """``|1 - S22 S_L|`` vanished at some frequency."""


@dataclass(frozen=True)
class Element:
    """One reactive element.

    Attributes
    ----------
    position : str
        ``"series"`` or ``"shunt"``.
    kind : str
        ``"L"`` (henries) or ``"C"`` (farads).
    value : float
        Positive element value.
    """

    position: str
    kind: str
    value: float

    def __post_init__(self):
        if self.position not in ("series", "shunt"):
            raise ValueError(f"bad element position {self.position!r}")
        if self.kind not in ("L", "C"):
            raise ValueError(f"bad element kind {self.kind!r}")
        if not (np.isfinite(self.value) and self.value > 0):
            raise ValueError("element values must be positive and finite")

    def immittance(self, w: np.ndarray) -> np.ndarray:
        """Series impedance or shunt admittance at angular frequency ``w``."""
        jw = 1j * w
        if self.position == "series":
            return jw * self.value if self.kind == "L" else 1.0 / (jw * self.value)
        return jw * self.value if self.kind == "C" else 1.0 / (jw * self.value)


@dataclass(frozen=True)
class LumpedNetwork:
    """Arbitrary cascade of reactive elements, listed source to load."""

    elements: tuple[Element, ...]
    z0: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.z0 > 0:
            raise ValueError("z0 must be positive")


@dataclass(frozen=True)
class LadderNetwork:
    """Series-L / shunt-C ladder of ``order`` stages.

    Attributes
    ----------
    inductances, capacitances : tuple of float
        One value of each per stage, listed from the source side.
    z0 : float
        Reference impedance of both ports.
    shunt_first : bool
        Put the shunt capacitor ahead of the series inductor in every stage.
    """

    inductances: tuple[float, ...]
    capacitances: tuple[float, ...]
    z0: float = 50.0
    shunt_first: bool = False

    def __post_init__(self):
        ls = tuple(float(v) for v in self.inductances)
        cs = tuple(float(v) for v in self.capacitances)
        if len(ls) != len(cs):
            raise ValueError("need one inductor and one capacitor per stage")
        if not 1 <= len(ls) <= MAX_ORDER:
            raise ValueError(f"order must be within 1..{MAX_ORDER}")
        if not all(np.isfinite(v) and v > 0 for v in ls + cs):
            raise ValueError("element values must be positive and finite")
        object.__setattr__(self, "inductances", ls)
        object.__setattr__(self, "capacitances", cs)

    @property
    def order(self) -> int:
        return len(self.inductances)

    @property
    def elements(self) -> tuple[Element, ...]:
        out = []
        for l, c in zip(self.inductances, self.capacitances):
            stage = [Element("series", "L", l), Element("shunt", "C", c)]
            out.extend(stage[::-1] if self.shunt_first else stage)
        return tuple(out)

    @classmethod
    def from_log(cls, x: np.ndarray, z0: float = 50.0, shunt_first: bool = False) -> "LadderNetwork":
        x = np.asarray(x, dtype=float)
        n = x.size // 2
        return cls(tuple(np.exp(x[:n])), tuple(np.exp(x[n:])), z0, shunt_first)

    def to_log(self) -> np.ndarray:
        return np.log(np.concatenate([self.inductances, self.capacitances]))


def _abcd(elements: Sequence[Element], w: np.ndarray) -> np.ndarray:
    m = np.zeros((w.size, 2, 2), complex)
    m[:, 0, 0] = m[:, 1, 1] = 1.0
    for e in elements:
        y = e.immittance(w)
        if e.position == "series":
            # [[a, b], [c, d]] @ [[1, z], [0, 1]]
            m[:, 0, 1] += m[:, 0, 0] * y
            m[:, 1, 1] += m[:, 1, 0] * y
        else:
            # [[a, b], [c, d]] @ [[1, 0], [y, 1]]
            m[:, 0, 0] += m[:, 0, 1] * y
            m[:, 1, 0] += m[:, 1, 1] * y
    return m


def two_port_scattering(net, f) -> np.ndarray:
    """Scattering matrices ``(F, 2, 2)`` of a lumped network at ``f`` in Hz."""
    f = np.atleast_1d(np.asarray(f, dtype=float))
    if np.any(f <= 0):
        raise ValueError("frequencies must be positive")
    m = _abcd(net.elements, 2 * np.pi * f)
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    z0 = net.z0
    den = a + b / z0 + c * z0 + d
    s = np.empty_like(m)
    s[:, 0, 0] = (a + b / z0 - c * z0 - d) / den
    # reciprocal elements only, so AD - BC = 1 exactly; computing it by
    # cancellation loses digits in the stopband
    s[:, 0, 1] = s[:, 1, 0] = 2 / den
    s[:, 1, 1] = (-a + b / z0 - c * z0 + d) / den
    return s


def transmission_values(s_m: np.ndarray, s_l: np.ndarray) -> np.ndarray:
    """``|S21|^2 (1 - |S_L|^2) / |1 - S22 S_L|^2`` per frequency."""
    den = np.abs(1.0 - s_m[:, 1, 1] * s_l) ** 2
    if np.any(den < 1e-24):
        raise ResonanceError("resonance: |1 - S22 S_L| < 1e-12")
    # rounding can push a nearly lossless load to |S_L| = 1 + O(eps)
    absorbed = np.maximum(1.0 - np.abs(s_l) ** 2, 0.0)
    return np.abs(s_m[:, 1, 0]) ** 2 * absorbed / den


def transmission_into_load(net, load: SampledResponse, frequencies=None,
                           support: Optional[Band] = None,
                           strategy: str = "ladder") -> TransmissionProfile:
    """Power transmission from the source into ``load`` through ``net``.

    Parameters
    ----------
    net : LadderNetwork or LumpedNetwork
    load : SampledResponse
        Load reflection; its ``model`` (if any) provides off-grid values.
    frequencies : array_like, optional
        Sample grid, default the load's own grid.
    support : Band, optional
        Integration support of the profile, default the sample span.
    """
    f = load.frequencies if frequencies is None else np.asarray(frequencies, dtype=float)
    support = support or Band(float(f[0]), float(f[-1]))

    def evaluate(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s_l = load(x)
        if np.any(np.abs(s_l) > 1 + PASSIVE_TOL):
            raise ValueError("active load: |S_L| > 1")
        return transmission_values(two_port_scattering(net, x), s_l)

    ev = evaluate if load.model is not None else None
    return TransmissionProfile(f, evaluate(f), strategy, support, evaluator=ev,
                               meta={"network": net, "tails": True})


def _fast_transmission(x: np.ndarray, w: np.ndarray, s_l: np.ndarray, z0: float,
                       shunt_first: bool, jacobian: bool = False):
    """Transmission of a log-parameterized ladder, with its gradient.

    Uses ``T = 4 (1 - |S_L|^2) / |l^T M r|^2`` with ``l = [1, z0]`` and
    ``r = [1 + S_L, (1 - S_L) / z0]`` for the chain matrix ``M``.
    """
    n = x.size // 2
    vals = np.exp(x)
    ls, cs = vals[:n], vals[n:]
    kinds = []
    for i in range(n):
        stage = [("series", i), ("shunt", n + i)]
        kinds.extend(stage[::-1] if shunt_first else stage)
    jw = 1j * w
    imm = [jw * vals[k] for _, k in kinds]
    # left vectors l^T M_1 ... M_{k-1}
    lv = np.empty((len(kinds) + 1, w.size, 2), complex)
    lv[0, :, 0] = 1.0
    lv[0, :, 1] = z0
    for k, ((pos, _), y) in enumerate(zip(kinds, imm)):
        a, b = lv[k, :, 0], lv[k, :, 1]
        if pos == "series":
            lv[k + 1, :, 0] = a
            lv[k + 1, :, 1] = a * y + b
        else:
            lv[k + 1, :, 0] = a + b * y
            lv[k + 1, :, 1] = b
    r_end = np.stack([1.0 + s_l, (1.0 - s_l) / z0], axis=-1)
    u = np.sum(lv[-1] * r_end, axis=-1)
    k_load = 1.0 - np.abs(s_l) ** 2
    t = 4.0 * k_load / np.abs(u) ** 2
    if not jacobian:
        return t
    # right vectors M_{k+1} ... M_n r
    rv = np.empty((len(kinds) + 1, w.size, 2), complex)
    rv[-1] = r_end
    for k in range(len(kinds) - 1, -1, -1):
        pos, _ = kinds[k]
        y = imm[k]
        p, q = rv[k + 1, :, 0], rv[k + 1, :, 1]
        if pos == "series":
            rv[k, :, 0] = p + y * q
            rv[k, :, 1] = q
        else:
            rv[k, :, 0] = p
            rv[k, :, 1] = y * p + q
    jac = np.empty((w.size, x.size))
    for k, ((pos, idx), y) in enumerate(zip(kinds, imm)):
        if pos == "series":
            du = lv[k, :, 0] * y * rv[k + 1, :, 1]
        else:
            du = lv[k, :, 1] * y * rv[k + 1, :, 0]
        jac[:, idx] = -2.0 * t * np.real(np.conj(u) * du) / np.abs(u) ** 2
    return t, jac


@dataclass(frozen=True)
class FitReport:
    """Diagnostics of a ladder fit.

    Attributes
    ----------
    objective : float
        Weighted mean squared transmission error of the best network.
    rate_ratio : float
        ``R(T_net) / R(T_target)`` when an SNR profile was given, else nan.
    restarts : int
        Number of starting points tried.
    objectives : tuple of float
        Final objective of every restart.
    """

    objective: float
    rate_ratio: float
    restarts: int
    objectives: tuple[float, ...] = field(default_factory=tuple)


def _start_points(order: int, f_c: float, z0: float, rng: np.random.Generator,
                  count: int) -> list[np.ndarray]:
    w = 2 * np.pi * f_c
    l_mid = np.log(z0 / w)
    c_mid = np.log(1.0 / (z0 * w))
    lo = np.log([L_BOUNDS[0]] * order + [C_BOUNDS[0]] * order)
    hi = np.log([L_BOUNDS[1]] * order + [C_BOUNDS[1]] * order)
    out = []
    for _ in range(count):
        x = np.concatenate([l_mid + rng.normal(0, 1.0, order),
                            c_mid + rng.normal(0, 1.0, order)])
        out.append(np.clip(x, lo + 1e-9, hi - 1e-9))
    return out


def fit(target: TransmissionProfile, load: SampledResponse, order: int, seeds: int = 16,
        *, snr: Optional[SnrProfile] = None, seed: int = 0, z0: float = 50.0,
        shunt_first: bool = False, frequencies=None, fit_points: int = 161,
        warm_start: Optional[Sequence[LadderNetwork]] = None,
        max_simplex_evals: int = 1500, band: Optional[Band] = None) -> tuple[LadderNetwork, FitReport]:
    """Fit ladder element values to a target transmission profile.

    Each restart runs Nelder-Mead in log-element space, then a bounded
    least-squares polish with the analytic Jacobian.  The objective is
    ``mean w(f) (T_net(f) - T_target(f))^2`` on the fitting grid with
    ``w = 1 + snr / max(snr)``.

    Parameters
    ----------
    target : TransmissionProfile
        Desired ``T(f)``.
    load : SampledResponse
        Load reflection, evaluated on the fitting grid.
    order : int
        Number of L-C stages, 1 to 10.
    seeds : int
        Number of random restarts.
    snr : SnrProfile, optional
        Enables rate-relevant weighting and the rate ratio in the report.
    seed : int
        Base seed of the deterministic restart generator.
    frequencies : array_like, optional
        Fitting grid; default ``fit_points`` uniform samples over ``band``.
    warm_start : sequence of LadderNetwork, optional
        Extra starting points.  Lower-order networks are padded with a
        near-transparent stage at the load end.
    band : Band, optional
        Fitting band; default the SNR band when ``snr`` is given, else the
        target support.

    Returns
    -------
    network : LadderNetwork
    report : FitReport

    Raises
    ------
    LadderFitError
        If no restart produced a finite objective.
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be within 1..{MAX_ORDER}")
    if band is None:
        band = snr.band if snr is not None else target.support
    f = band.grid(fit_points) if frequencies is None else np.asarray(frequencies, dtype=float)
    w = 2 * np.pi * f
    s_l = load(f)
    t_goal = target(f)
    if snr is not None:
        s = snr(f)
        weight = 1.0 + s / max(float(np.max(s)), 1e-300)
    else:
        weight = np.ones_like(f)
    sw = np.sqrt(weight / f.size)
    lo = np.log([L_BOUNDS[0]] * order + [C_BOUNDS[0]] * order)
    hi = np.log([L_BOUNDS[1]] * order + [C_BOUNDS[1]] * order)

    def residual(x):
        return sw * (_fast_transmission(x, w, s_l, z0, shunt_first) - t_goal)

    def residual_jac(x):
        _, jac = _fast_transmission(x, w, s_l, z0, shunt_first, jacobian=True)
        return sw[:, None] * jac

    def objective(x):
        if np.any(x < lo) or np.any(x > hi):
            return np.inf
        return float(np.sum(residual(x) ** 2))

    rng = np.random.default_rng(seed)
    starts = _start_points(order, band.center, z0, rng, seeds)
    for net in warm_start or ():
        starts.insert(0, _pad(net, order, lo, hi))

    best_x, best_obj, finals = None, np.inf, []
    for x0 in starts:
        try:
            x = x0
            if max_simplex_evals > 0:
                res = minimize(objective, x0, method="Nelder-Mead",
                               options={"maxfev": max_simplex_evals, "xatol": 1e-6,
                                        "fatol": 1e-12, "adaptive": True})
                if np.isfinite(res.fun):
                    x = res.x
            pol = least_squares(residual, np.clip(x, lo, hi), jac=residual_jac,
                                bounds=(lo, hi), method="trf", x_scale=1.0,
                                max_nfev=400, xtol=1e-12, ftol=1e-14, gtol=1e-12)
            x, obj = pol.x, 2.0 * pol.cost
            obj0 = objective(np.clip(x0, lo, hi))
            if obj0 < obj:
                x, obj = np.clip(x0, lo, hi), obj0
        except (FloatingPointError, ValueError, np.linalg.LinAlgError):
            obj = np.inf
            x = x0
        finals.append(float(obj))
        if np.isfinite(obj) and obj < best_obj:
            best_x, best_obj = x, obj
    if best_x is None:
        raise LadderFitError("every restart diverged")

    net = LadderNetwork.from_log(best_x, z0, shunt_first)
    ratio = float("nan")
    if snr is not None:
        achieved = transmission_into_load(net, load, f, band)
        r_goal = rate(target, snr)
        ratio = rate(achieved, snr) / r_goal if r_goal > 0 else float("nan")
    return net, FitReport(float(best_obj), ratio, len(starts), tuple(finals))


def _pad(net: LadderNetwork, order: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    if net.order > order:
        raise ValueError("warm start has a higher order than requested")
    ls = list(net.inductances) + [L_BOUNDS[0]] * (order - net.order)
    cs = list(net.capacitances) + [C_BOUNDS[0]] * (order - net.order)
    return np.clip(np.log(np.array(ls + cs)), lo, hi)


def export_touchstone(net, frequencies, path=None, comment: str | None = None) -> TouchstoneData:
    """Sample ``net`` on ``frequencies`` as Touchstone v1 two-port RI data.

    The file is written to ``path`` when given.
    """
    f = np.asarray(frequencies, dtype=float)
    data = TouchstoneData(f, two_port_scattering(net, f), float(net.z0), "RI", "Hz")
    if path is not None:
        write_touchstone(path, data, comment=comment)
    return data


def lumped_from_reactances(x_series: float, b_shunt: float, f: float, z0: float,
                           shunt_at_source: bool) -> LumpedNetwork:
    """L-section realizing series reactance ``x_series`` and shunt susceptance ``b_shunt`` at ``f``."""
    w = 2 * np.pi * f
    series = []
    if x_series > 0:
        series = [Element("series", "L", x_series / w)]
    elif x_series < 0:
        series = [Element("series", "C", -1.0 / (w * x_series))]
    shunt = []
    if b_shunt > 0:
        shunt = [Element("shunt", "C", b_shunt / w)]
    elif b_shunt < 0:
        shunt = [Element("shunt", "L", -1.0 / (w * b_shunt))]
    elements = shunt + series if shunt_at_source else series + shunt
    return LumpedNetwork(tuple(elements), z0)

