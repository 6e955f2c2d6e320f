"""Rational functions of the Laplace variable ``s``.

Provides a zero/pole/gain representation, a Sanathanan-Koerner fit to
complex frequency samples, the roots of ``S(-s) S(s) - 1`` and the Taylor
coefficients of ``ln(1 / S(s))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize_scalar

__all__ = [
    "RationalFunction",
    "SampledResponse",
    "FitResult",
    "FitOrderTooLowError",
    "DegenerateFunctionError",
    "fit_rational",
    "reflection_roots",
    "log_taylor_coefficients",
]

# coefficients this small relative to the largest are treated as cancelled
COEF_CANCEL = 1e-9
# roots closer than this (relative) are merged into one multiple root
ROOT_MERGE = 1e-6
# pole/zero pairs closer than this (relative to |pole|) are cancelled
PZ_CANCEL = 1e-3
INF = complex(np.inf, 0.0)


class FitOrderTooLowError(ValueError):
    """The requested order cannot reach the error tolerance.

    The best fit found is attached as ``best``.
    """

    def __init__(self, message: str, best: "FitResult"):
        super().__init__(message)
        self.best = best


class DegenerateFunctionError(ValueError):
    """``|S| = 1`` identically, so no reflection roots are defined."""


@dataclass(frozen=True, eq=False)
class SampledResponse:
    """Complex scalar response sampled on a frequency grid in Hz.

    ``model`` optionally evaluates the response off-grid; otherwise values are
    interpolated linearly in real and imaginary parts.
    """

    frequencies: np.ndarray
    values: np.ndarray
    model: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if f.ndim != 1 or v.shape != f.shape:
            raise ValueError("frequencies and values must be 1-D and equal length")
        if f.size == 0:
            raise ValueError("empty response")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if np.any(~np.isfinite(v)):
            raise ValueError("response contains non-finite samples")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "values", v)

    def __call__(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if self.model is not None:
            return np.asarray(self.model(f), dtype=complex)
        re = np.interp(f, self.frequencies, self.values.real)
        im = np.interp(f, self.frequencies, self.values.imag)
        return re + 1j * im


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """``gain * prod(s - z) / prod(s - p)`` with real coefficients.

    Parameters
    ----------
    zeros, poles : array_like of complex
        Closed under conjugation.
    gain : float
        Real leading-coefficient ratio.
    """

    zeros: np.ndarray
    poles: np.ndarray
    gain: float

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.zeros, dtype=complex))
        p = np.atleast_1d(np.asarray(self.poles, dtype=complex))
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(p))):
            raise ValueError("zeros and poles must be finite")
        if not np.isfinite(self.gain) or np.iscomplexobj(self.gain):
            raise ValueError("gain must be a finite real number")
        object.__setattr__(self, "zeros", z)
        object.__setattr__(self, "poles", p)
        object.__setattr__(self, "gain", float(self.gain))

    @classmethod
    def from_coefficients(cls, numerator: Sequence[float],
                          denominator: Sequence[float]) -> "RationalFunction":
        """Build from real polynomial coefficients, highest power first."""
        num = np.trim_zeros(np.asarray(numerator, dtype=float), "f")
        den = np.trim_zeros(np.asarray(denominator, dtype=float), "f")
        if den.size == 0:
            raise ZeroDivisionError("denominator is identically zero")
        if num.size == 0:
            return cls([], np.roots(den), 0.0)
        return cls(np.roots(num), np.roots(den), num[0] / den[0])

    @property
    def order(self) -> int:
        return max(self.zeros.size, self.poles.size)

    def __call__(self, s) -> np.ndarray:
        """Evaluate at complex frequencies ``s`` (rad/s).

        Raises
        ------
        ZeroDivisionError
            If any ``s`` is exactly a pole.
        """
        s = np.asarray(s, dtype=complex)
        if self.poles.size and np.any(s[..., None] == self.poles):
            raise ZeroDivisionError("evaluation at a pole")
        num = np.ones_like(s)
        for z in self.zeros:
            num = num * (s - z)
        den = np.ones_like(s)
        for p in self.poles:
            den = den * (s - p)
        return self.gain * num / den

    def flip(self) -> "RationalFunction":
        """``g(s) = f(-s)``."""
        sign = -1.0 if (self.zeros.size - self.poles.size) % 2 else 1.0
        return RationalFunction(-self.zeros, -self.poles, sign * self.gain)

    def at_frequency(self, f) -> np.ndarray:
        """Evaluate on the imaginary axis, ``s = j 2 pi f``."""
        return self(2j * np.pi * np.asarray(f, dtype=float))

    def is_stable(self) -> bool:
        return bool(np.all(self.poles.real < 0))

    def scale(self) -> float:
        """Natural frequency scale in rad/s, used to condition polynomials."""
        mags = np.abs(np.concatenate([self.zeros, self.poles]))
        mags = mags[mags > 0]
        return float(np.exp(np.mean(np.log(mags)))) if mags.size else 1.0

    def max_on_axis(self, n: int = 10001, w_span: tuple[float, float] | None = None) -> float:
        """Largest ``|S(j w)|`` over a log grid, ``w = 0`` and ``w -> inf``.

        The grid maximum is refined with a bounded scalar search.
        """
        w0 = self.scale()
        lo, hi = w_span if w_span is not None else (w0 * 1e-4, w0 * 1e4)
        w = np.geomspace(lo, hi, n)
        mag = np.abs(self(1j * w))
        k = int(np.argmax(mag))
        left, right = w[max(k - 1, 0)], w[min(k + 1, n - 1)]
        best = float(mag[k])
        if right > left:
            res = minimize_scalar(lambda x: -abs(self(1j * x)), bounds=(left, right),
                                  method="bounded", options={"xatol": 1e-12 * right})
            best = max(best, -float(res.fun))
        edge = [abs(self(0.0)) if not np.any(self.poles == 0) else np.inf, abs(self._at_infinity())]
        return max(best, *edge)

    def _at_infinity(self) -> float:
        if self.zeros.size < self.poles.size:
            return 0.0
        if self.zeros.size > self.poles.size:
            return np.inf if self.gain != 0 else 0.0
        return self.gain


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of :func:`fit_rational`.

    Attributes
    ----------
    function : RationalFunction
        Stable, passivity-scaled model.
    error : float
        ``max |S(j w_k) - H_k| / max |H_k|`` over the samples.
    passivity_scale : float
        Factor applied to the gain (1.0 if none was needed).
    cancelled : int
        Number of pole/zero pairs removed by the overfitting guard.
    """

    function: RationalFunction
    error: float
    passivity_scale: float = 1.0
    cancelled: int = 0


def _fit_error(fn: RationalFunction, s: np.ndarray, h: np.ndarray) -> float:
    ref = float(np.max(np.abs(h)))
    ref = ref if ref > 0 else 1.0
    return float(np.max(np.abs(fn(s) - h)) / ref)


def _sk_iterations(x: np.ndarray, h: np.ndarray, order: int, iters: int) -> np.ndarray:
    """Denominator coefficients (ascending, monic) from SK reweighting."""
    n = order
    vn = np.vander(x, n + 1, increasing=True)
    den = np.zeros(n + 1)
    den[-1] = 1.0
    weight = np.ones(x.size)
    prev = None
    for _ in range(iters):
        # N(x) - H * D_low(x) = H * x^n, D monic
        a = np.hstack([vn, -h[:, None] * vn[:, :n]]) * weight[:, None]
        b = h * x ** n * weight
        a_ri = np.vstack([a.real, a.imag])
        b_ri = np.concatenate([b.real, b.imag])
        col = np.linalg.norm(a_ri, axis=0)
        col[col == 0] = 1.0
        sol, *_ = np.linalg.lstsq(a_ri / col, b_ri, rcond=None)
        sol = sol / col
        den = np.concatenate([sol[n + 1:], [1.0]])
        d_val = P.polyval(x, den)
        weight = 1.0 / np.maximum(np.abs(d_val), 1e-300)
        if prev is not None and np.allclose(den, prev, rtol=1e-12, atol=1e-14):
            break
        prev = den
    return den


def _numerator_for_poles(x: np.ndarray, h: np.ndarray, poles_x: np.ndarray,
                         degree: int) -> np.ndarray:
    """Real numerator (ascending) minimizing ``|N/D - H|`` for fixed poles."""
    den = np.real(P.polyfromroots(poles_x)) if poles_x.size else np.array([1.0])
    d_val = P.polyval(x, den)
    vn = np.vander(x, degree + 1, increasing=True) / d_val[:, None]
    a_ri = np.vstack([vn.real, vn.imag])
    b_ri = np.concatenate([h.real, h.imag])
    col = np.linalg.norm(a_ri, axis=0)
    col[col == 0] = 1.0
    sol, *_ = np.linalg.lstsq(a_ri / col, b_ri, rcond=None)
    sol = sol / col
    # drop top coefficients whose contribution is at rounding level
    if degree > 0:
        size = np.abs(P.polyval(x, sol))
        top = np.abs(sol[-1] * x ** degree)
        if np.max(top) <= 1e-10 * np.max(size):
            return _numerator_for_poles(x, h, poles_x, degree - 1)
    return sol


def _from_scaled(num_x: np.ndarray, poles_x: np.ndarray, w0: float) -> RationalFunction:
    num_x = np.trim_zeros(np.asarray(num_x, dtype=float), "b")
    if num_x.size == 0:
        return RationalFunction([], poles_x * w0, 0.0)
    zeros_x = P.polyroots(num_x) if num_x.size > 1 else np.array([], dtype=complex)
    lead = num_x[-1]
    gain = lead * w0 ** (poles_x.size - zeros_x.size)
    return RationalFunction(zeros_x * w0, poles_x * w0, gain)


def _conjugate_clean(roots: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Snap nearly-real roots onto the real axis."""
    roots = np.asarray(roots, dtype=complex)
    scale = np.maximum(np.abs(roots), 1e-300)
    return np.where(np.abs(roots.imag) <= tol * scale, roots.real + 0j, roots)


def _cancel_pairs(zeros: np.ndarray, poles: np.ndarray, w0: float):
    zeros, poles = list(zeros), list(poles)
    removed = 0
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(poles):
            for j, z in enumerate(zeros):
                ref = max(abs(p), abs(z), 1e-9 * w0)
                if abs(p - z) <= PZ_CANCEL * ref:
                    del poles[i], zeros[j]
                    removed += 1
                    changed = True
                    break
            if changed:
                break
    return np.array(zeros, dtype=complex), np.array(poles, dtype=complex), removed


def fit_rational(data: SampledResponse, order: int, tol: float = 1e-3,
                 iterations: int = 50) -> FitResult:
    """Fit a stable, passive rational function to sampled data.

    Sanathanan-Koerner iteration on the normalized variable
    ``x = j w / w0`` with ``w0`` the geometric mean of the sampled angular
    frequencies.  Unstable poles are reflected into the left half-plane,
    the numerator is refit, nearly coincident pole/zero pairs are cancelled
    and the gain is scaled so that ``|S(j w)| <= 1``.

    Parameters
    ----------
    data : SampledResponse
        Samples at positive frequencies in Hz.
    order : int
        Numerator and denominator degree.
    tol : float
        Maximum acceptable normwise relative error.
    iterations : int
        Cap on SK reweighting passes.

    Returns
    -------
    FitResult

    Raises
    ------
    FitOrderTooLowError
        When the final error exceeds ``tol``; carries the best fit.
    ValueError
        On an order below 1 or nonpositive sample frequencies.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    f = data.frequencies
    if np.any(f <= 0):
        raise ValueError("sample frequencies must be positive")
    if f.size < order + 1:
        raise ValueError("too few samples for the requested order")
    h = data.values
    w0 = 2 * np.pi * float(np.exp(np.mean(np.log(f))))
    x = 2j * np.pi * f / w0

    den = _sk_iterations(x, h, order, iterations)
    poles_x = _conjugate_clean(P.polyroots(den))
    poles_x = np.where(poles_x.real > 0, -poles_x.real + 1j * poles_x.imag, poles_x)
    poles_x = np.where(poles_x.real == 0, poles_x - 1e-9, poles_x)
    num = _numerator_for_poles(x, h, poles_x, order)
    fn = _from_scaled(num, poles_x, w0)
    s = 2j * np.pi * f

    # overfitting guard
    zeros, poles, removed = _cancel_pairs(fn.zeros, fn.poles, w0)
    if removed:
        p_x = _conjugate_clean(poles / w0)
        n_deg = max(order - removed, 0)
        trial = _from_scaled(_numerator_for_poles(x, h, p_x, n_deg), p_x, w0)
        if _fit_error(trial, s, h) <= max(tol, _fit_error(fn, s, h)):
            fn = trial
        else:
            removed = 0

    peak = fn.max_on_axis(w_span=(float(np.min(2 * np.pi * f)) * 1e-3,
                                  float(np.max(2 * np.pi * f)) * 1e3))
    factor = 1.0
    if peak > 1.0:
        factor = 1.0 / peak
        fn = RationalFunction(fn.zeros, fn.poles, fn.gain * factor)

    result = FitResult(fn, _fit_error(fn, s, h), factor, removed)
    if result.error > tol:
        raise FitOrderTooLowError(
            f"order {order} reaches error {result.error:.3g} > {tol:.3g}", result)
    return result


def _merge_roots(roots: np.ndarray) -> list[tuple[complex, int]]:
    out: list[list] = []
    for r in sorted(roots, key=lambda c: (round(c.real, 12), round(c.imag, 12))):
        for item in out:
            if abs(item[0] - r) <= ROOT_MERGE * max(1.0, abs(r)):
                item[2].append(r)
                break
        else:
            out.append([r, 0, [r]])
    merged = []
    for _, _, members in out:
        merged.append((complex(np.mean(members)), len(members)))
    return merged


def reflection_roots(fn: RationalFunction) -> list[tuple[complex, int]]:
    """Roots of ``S(-s) S(s) - 1`` with multiplicities.

    The numerator ``N(s) N(-s) - D(s) D(-s)`` is even, so it is solved as a
    polynomial in ``u = s**2`` (companion-matrix eigenvalues), which keeps
    the ``s -> -s`` symmetry exact.  A degree deficit shows up as roots at
    infinity, reported as ``complex(inf, 0)``.

    Raises
    ------
    DegenerateFunctionError
        If ``|S| = 1`` identically (all-pass or unit-modulus constant).
    """
    w0 = fn.scale()
    zx = fn.zeros / w0
    px = fn.poles / w0
    k = fn.gain * w0 ** (zx.size - px.size)
    n_s = P.polyfromroots(zx) if zx.size else np.array([1.0 + 0j])
    d_s = P.polyfromroots(px) if px.size else np.array([1.0 + 0j])
    flip = lambda c: c * (-1.0) ** np.arange(c.size)  # noqa: E731
    poly = P.polysub(k * k * P.polymul(n_s, flip(n_s)), P.polymul(d_s, flip(d_s)))
    poly = np.real_if_close(poly, tol=1e6).real if np.iscomplexobj(poly) else poly
    poly = np.asarray(poly, dtype=float)
    full_deg = 2 * fn.order
    poly = np.concatenate([poly, np.zeros(max(0, full_deg + 1 - poly.size))])
    peak = np.max(np.abs(poly)) if poly.size else 0.0
    if peak == 0 or peak < COEF_CANCEL * max(1.0, k * k):
        raise DegenerateFunctionError("|S(jw)| = 1 identically; load is lossless")
    poly[np.abs(poly) <= COEF_CANCEL * peak] = 0.0
    q = poly[0::2]  # even polynomial in u = s^2

    nz = np.nonzero(q)[0]
    low, high = int(nz[0]), int(nz[-1])
    roots: list[tuple[complex, int]] = []
    if low:
        roots.append((0j, 2 * low))
    body = q[low:high + 1]
    if body.size > 1:
        u = P.polyroots(body)
        s = np.concatenate([np.sqrt(u.astype(complex)), -np.sqrt(u.astype(complex))])
        s = _conjugate_clean(s)
        s = np.where(np.abs(s.real) <= 1e-9 * np.maximum(np.abs(s), 1e-300), 1j * s.imag, s)
        roots.extend((r * w0, m) for r, m in _merge_roots(s))
    deficit = 2 * (q.size - 1 - high)
    if deficit:
        roots.append((INF, deficit))
    return roots


def log_taylor_coefficients(fn: RationalFunction, center: complex,
                            count: int) -> np.ndarray:
    """Taylor coefficients of ``ln(1 / fn(s))`` about ``center``.

    Returns ``c[0..count-1]`` with
    ``ln(1/fn(s)) = sum_n c[n] (s - center)**n`` near ``center``.  ``c[0]``
    uses the principal branch.

    Raises
    ------
    ValueError
        If ``center`` is a zero or a pole of ``fn``.
    """
    center = complex(center)
    if count < 1:
        return np.zeros(0, dtype=complex)
    dz = center - fn.zeros
    dp = center - fn.poles
    if np.any(dz == 0):
        raise ValueError("ln(1/S) is singular: center is a zero of S")
    if np.any(dp == 0):
        raise ValueError("ln(1/S) is singular: center is a pole of S")
    if fn.gain == 0:
        raise ValueError("ln(1/S) is undefined for S = 0")
    c = np.zeros(count, dtype=complex)
    c[0] = -np.log(complex(fn(center)))
    for n in range(1, count):
        sign = (-1.0) ** n
        c[n] = sign / n * (np.sum(dz ** -n) - np.sum(dp ** -n))
    return c
