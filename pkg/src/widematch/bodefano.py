"""Bode-Fano integral constraints of a passive rational load.

Each constraint reads ``int xi(f) ln(1 / (1 - T(f))) df <= B`` for any
lossless matching two-port driving the load.  The weight ``xi`` and bound
``B`` depend on where the roots of ``S(-s) S(s) = 1`` lie.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._quadrature import QuadratureError, integrate
from .profiles import QUAD_RTOL, TransmissionProfile
from .rational import RationalFunction, log_taylor_coefficients, reflection_roots

__all__ = [
    "BodeFanoConstraint",
    "UnsupportedRootError",
    "DivergentIntegralError",
    "FeasibilityReport",
    "derive_constraints",
    "constraint_lhs",
    "feasibility_check",
]

KINDS = ("imaginary-axis", "right-half-plane", "infinity", "origin")
SLACK_EPS = 1e-6
# an axis root within this relative distance of Re = 0 counts as on the axis
AXIS_TOL = 1e-9
INF_ROOT = complex(np.inf, 0.0)
LOSS_CAP = -float(np.log(np.finfo(float).eps))
# rounding noise in 1 - |S_L|^2 near DC can stall the rule; an estimate whose
# error is this far below the slack tolerance is still accepted
QUAD_ACCEPT = 1e-2 * SLACK_EPS


class UnsupportedRootError(ValueError):
    """Root configuration outside the handled cases."""


class DivergentIntegralError(ValueError):
    """``T = 1`` on a set of positive measure."""


@dataclass(frozen=True)
class BodeFanoConstraint:
    """One constraint ``int xi(f) ln(1/(1-T)) df <= bound``.

    Attributes
    ----------
    kind : str
        One of ``imaginary-axis``, ``right-half-plane``, ``infinity`` or
        ``origin``.
    root : complex
        Orbit representative in rad/s (``Re >= 0``, ``Im >= 0``).
    multiplicity : int
        Multiplicity of the root of ``S(-s) S(s) - 1``.
    bound : float
        Right-hand side, strictly positive.
    index : int
        For origin roots, 1 selects the ``f^-2`` weight and 2 the ``f^-4``
        weight.  Unused otherwise.
    """

    kind: str
    root: complex
    multiplicity: int
    bound: float
    index: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if not (np.isfinite(self.bound) and self.bound > 0):
            raise ValueError(f"Bode-Fano bound must be positive, got {self.bound!r}")

    def weight(self, f) -> np.ndarray:
        """Weight ``xi(f)`` on positive frequencies in Hz."""
        f = np.asarray(f, dtype=float)
        if self.kind == "infinity":
            return np.ones_like(f)
        if self.kind == "origin":
            if self.index == 1:
                return 1.0 / (2 * np.pi**2 * f**2)
            return 1.0 / (8 * np.pi**4 * f**4)
        if self.kind == "right-half-plane":
            s = complex(self.root)
            jw = 2j * np.pi * f
            return np.real(1.0 / (s - jw) + 1.0 / (s + jw))
        fi = self.root.imag / (2 * np.pi)
        return ((fi - f) ** -2 + (fi + f) ** -2) / (4 * np.pi**2)

    @property
    def label(self) -> str:
        if self.kind == "origin":
            return f"origin (f^-{2 * self.index})"
        if self.kind == "infinity":
            return "infinity"
        return f"{self.kind} s={self.root.real:.6g}{self.root.imag:+.6g}j"


def _mirrored(load: RationalFunction) -> RationalFunction:
    """``S(s) prod (s + z) / (s - z)`` over every zero ``z`` of ``S``."""
    return RationalFunction(-load.zeros, load.poles, load.gain)


def derive_constraints(load: RationalFunction) -> list[BodeFanoConstraint]:
    """Constraints implied by every root of ``S(-s) S(s) = 1``.

    One representative per ``{s, -s, conj(s), -conj(s)}`` orbit is used.

    Parameters
    ----------
    load : RationalFunction
        Stable and passive equivalent load.

    Returns
    -------
    list of BodeFanoConstraint
        Sorted by kind, then by root.

    Raises
    ------
    UnsupportedRootError
        Repeated roots off the origin, origin multiplicity other than 4, or
        an axis root sitting on a pole or zero.
    ValueError
        Unstable or active load, or a nonpositive computed bound.
    """
    if not load.is_stable():
        raise ValueError("load must be stable")
    peak = load.max_on_axis()
    if peak > 1 + 1e-9:
        raise ValueError(f"load is not passive: max |S(jw)| = {peak:.12g}")

    w = _mirrored(load)
    scale = load.scale()
    out: list[BodeFanoConstraint] = []
    for root, mult in reflection_roots(load):
        if np.isinf(root.real):
            if mult != 2:
                raise UnsupportedRootError(f"root at infinity with multiplicity {mult}")
            bound = -0.5 * float(np.sum(load.poles).real + np.sum(load.zeros).real)
            out.append(_checked("infinity", INF_ROOT, mult, bound))
            continue
        if root == 0:
            if mult != 4:
                raise UnsupportedRootError(
                    f"unsupported root multiplicity {mult} at the origin")
            c = log_taylor_coefficients(w, 0.0, 4)
            out.append(_checked("origin", 0j, mult, float(c[1].real), 1))
            out.append(_checked("origin", 0j, mult, float(-c[3].real), 2))
            continue
        on_axis = abs(root.real) <= AXIS_TOL * max(abs(root), scale)
        if on_axis:
            if root.imag < 0:
                continue
            if mult != 2:
                raise UnsupportedRootError(
                    f"unsupported root multiplicity {mult} on the imaginary axis at {root}")
            jw = 1j * root.imag
            near = lambda v: np.abs(v) <= 1e-9 * max(abs(jw), scale)  # noqa: E731
            if np.any(near(load.poles - jw)) or np.any(near(load.zeros + jw)):
                raise UnsupportedRootError("imaginary-axis root coincides with a pole or zero")
            total = np.sum(1.0 / (load.poles - jw)) + np.sum(1.0 / (load.zeros + jw))
            out.append(_checked("imaginary-axis", jw, mult, float(-total.real)))
            continue
        if root.real < 0 or root.imag < 0:
            continue
        if mult != 1:
            raise UnsupportedRootError(
                f"unsupported root multiplicity {mult} at {root}")
        bound = -float(np.log(abs(w(root))))
        out.append(_checked("right-half-plane", complex(root), mult, bound))
    order = {k: i for i, k in enumerate(KINDS)}
    out.sort(key=lambda c: (order[c.kind], c.index, abs(c.root) if np.isfinite(abs(c.root)) else 0))
    return out


def _checked(kind, root, mult, bound, index=1) -> BodeFanoConstraint:
    if not bound > 0:
        raise ValueError(f"modeling error: nonpositive Bode-Fano bound {bound!r} ({kind})")
    return BodeFanoConstraint(kind, root, mult, bound, index)


def _support_breakpoints(profile: TransmissionProfile) -> list[float]:
    band = profile.support
    extra = list(profile.meta.get("breakpoints", ()))
    if band.f_max / max(band.f_min, 1e-300) > 10:
        extra += list(np.geomspace(band.f_min, band.f_max, 61)[1:-1])
    return extra


def _probe_grid(band) -> np.ndarray:
    if band.f_max / max(band.f_min, 1e-300) > 10:
        return np.geomspace(band.f_min, band.f_max, 4097)
    return np.linspace(band.f_min, band.f_max, 4097)


def constraint_lhs(c: BodeFanoConstraint, profile: TransmissionProfile) -> float:
    """``int xi(f) ln(1 / (1 - T(f))) df`` over the profile support.

    Adaptive Gauss-Kronrod when the profile has an evaluator, the trapezoid
    rule on its samples otherwise.  Isolated points with ``T = 1`` (a
    perfect match) are integrable; an infinite log there is replaced by
    ``ln(1 / eps)``.

    Raises
    ------
    DivergentIntegralError
        When ``T = 1`` at two adjacent probe frequencies, taken as ``T = 1``
        on a set of positive measure.
    """
    band = profile.support
    if profile.evaluator is None:
        m = band.contains(profile.frequencies)
        f = profile.frequencies[m]
        probe = f
    else:
        probe = _probe_grid(band)
    hit = np.isinf(profile.log_inverse_loss(probe))
    if np.any(hit[1:] & hit[:-1]):
        raise DivergentIntegralError("T = 1 on a set of positive measure; integral diverges")

    def integrand(x):
        loss = profile.log_inverse_loss(x)
        return c.weight(x) * np.where(np.isinf(loss), LOSS_CAP, loss)

    if profile.evaluator is None:
        if f.size < 2:
            return 0.0
        return float(np.trapezoid(integrand(f), f))
    try:
        value, _ = integrate(integrand, band.f_min, band.f_max, rtol=QUAD_RTOL,
                             atol=1e-9 * c.bound, breakpoints=_support_breakpoints(profile))
    except QuadratureError as exc:
        if not (np.isfinite(exc.error) and exc.error <= QUAD_ACCEPT * c.bound):
            raise DivergentIntegralError(str(exc)) from exc
        value = float(exc.value)
    if profile.meta.get("tails", False):
        value += _tail(integrand, band.f_min, lower=True)
        value += _tail(integrand, band.f_max, lower=False)
    return value


def _tail(integrand, edge: float, lower: bool) -> float:
    """Power-law continuation of the integral beyond a support edge.

    Fits ``g(f) ~ f^p`` from the edge and its octave inside the support.
    """
    inner = 2.0 * edge if lower else 0.5 * edge
    g0, g1 = (float(v) for v in integrand(np.array([edge, inner])))
    if g0 == 0.0:
        return 0.0
    if not (g0 > 0 and g1 > 0):
        return 0.0
    p = np.log(g1 / g0) / np.log(inner / edge)
    if (lower and p <= -1) or (not lower and p >= -1):
        raise DivergentIntegralError(
            f"integrand ~ f^{p:.3g} beyond the support edge {edge:.6g} Hz; integral diverges")
    return edge * g0 / (p + 1) * (1.0 if lower else -1.0)


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-constraint slack ``B_i - lhs_i``."""

    constraints: tuple[BodeFanoConstraint, ...]
    lhs: np.ndarray
    slack: np.ndarray
    eps: float = SLACK_EPS

    @property
    def bounds(self) -> np.ndarray:
        return np.array([c.bound for c in self.constraints])

    @property
    def relative_slack(self) -> np.ndarray:
        return self.slack / self.bounds

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.slack >= -self.eps * self.bounds))


def feasibility_check(constraints: Sequence[BodeFanoConstraint],
                      profile: TransmissionProfile, eps: float = SLACK_EPS) -> FeasibilityReport:
    """Evaluate every constraint; divergent integrals report ``lhs = inf``."""
    lhs = []
    for c in constraints:
        try:
            lhs.append(constraint_lhs(c, profile))
        except DivergentIntegralError:
            lhs.append(np.inf)
    lhs = np.array(lhs, dtype=float)
    bounds = np.array([c.bound for c in constraints], dtype=float)
    return FeasibilityReport(tuple(constraints), lhs, bounds - lhs, eps)
