"""Rate-optimal transmission under Bode-Fano constraints and the benchmarks.

The optimum has the closed form

    T*(f) = [(1 - W(f) / snr(f)) / (1 + W(f))]^+,  W = ln 2 * sum_i mu_i xi_i(f),

so the search is over the multipliers ``mu``.  They are handled as
``log(mu)`` throughout, which keeps ``ln(1 / (1 - T*))`` exact even when
``T*`` rounds to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .bodefano import BodeFanoConstraint, FeasibilityReport, feasibility_check
from .config import ScenarioConfig
from .ladder import lumped_from_reactances, transmission_into_load, LumpedNetwork
from .network import s_to_z
from .profiles import (Band, SnrProfile, TransmissionProfile, band_integral,
                       ideal_profile, rate)
from .rational import SampledResponse

__all__ = [
    "OptimizationResult",
    "Candidate",
    "rate",
    "ideal_profile",
    "no_match_profile",
    "transmission_from_multipliers",
    "solve",
    "frequency_flat",
    "conjugate_match",
    "conjugate_network",
    "circuit_support",
    "stationarity_residual",
]

LN2 = math.log(2.0)
MAX_DOUBLINGS = 128
CS_EPS = 1e-6
SLACK_EPS = 1e-6


class _KKTProfile:
    """Evaluator of ``T*`` and ``ln(1/(1-T*))`` for fixed ``log(mu)``."""

    def __init__(self, log_mu: np.ndarray, constraints: Sequence[BodeFanoConstraint],
                 snr: SnrProfile):
        self.log_mu = np.asarray(log_mu, dtype=float)
        if not np.any(np.isfinite(self.log_mu)):
            raise ValueError("unconstrained profile is T = 1; use the ideal benchmark instead")
        self.constraints = tuple(constraints)
        self.snr = snr
        self._active = [i for i, x in enumerate(self.log_mu) if np.isfinite(x)]

    def log_w(self, f: np.ndarray, s: np.ndarray | None = None) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        terms = np.empty((len(self._active), f.size))
        with np.errstate(divide="ignore"):
            for row, i in enumerate(self._active):
                terms[row] = self.log_mu[i] + np.log(self.constraints[i].weight(f))
        return math.log(LN2) + logsumexp(terms, axis=0)

    def parts(self, f, s=None):
        f = np.atleast_1d(np.asarray(f, dtype=float))
        s = self.snr(f) if s is None else np.asarray(s, dtype=float)
        log_w = self.log_w(f)
        w = np.exp(log_w)
        on = (s > 0) & (log_w < np.log(np.where(s > 0, s, 1.0)))
        t = np.zeros(f.shape)
        loss = np.zeros(f.shape)
        ss = np.where(on, s, 1.0)
        t[on] = (1.0 - w[on] / ss[on]) / (1.0 + w[on])
        loss[on] = np.log1p(w[on]) - log_w[on] - np.log1p(1.0 / ss[on])
        return t, loss, w, s

    def transmission(self, f) -> np.ndarray:
        return self.parts(f)[0]

    def log_loss(self, f) -> np.ndarray:
        return self.parts(f)[1]

    def profile(self) -> TransmissionProfile:
        snr = self.snr
        if snr.evaluator is not None:
            t = self.transmission(snr.frequencies)
            return TransmissionProfile(snr.frequencies, t, "optimal", snr.band,
                                       evaluator=self.transmission, log_loss=self.log_loss,
                                       meta={"log_mu": self.log_mu.copy()})
        t, loss, _, _ = self.parts(snr.frequencies, snr.values)
        grid = snr.frequencies
        return TransmissionProfile(grid, t, "optimal", snr.band,
                                   log_loss=lambda f: np.interp(f, grid, loss),
                                   meta={"log_mu": self.log_mu.copy()})


def transmission_from_multipliers(mu: Sequence[float],
                                  constraints: Sequence[BodeFanoConstraint],
                                  snr: SnrProfile) -> TransmissionProfile:
    """Optimal-form profile for given multipliers.

    Raises
    ------
    ValueError
        If any ``mu < 0``, the lengths differ, or all ``mu`` are zero.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (len(constraints),):
        raise ValueError("need one multiplier per constraint")
    if np.any(mu < 0) or np.any(~np.isfinite(mu)):
        raise ValueError("multipliers must be finite and nonnegative")
    with np.errstate(divide="ignore"):
        log_mu = np.log(mu)
    return _KKTProfile(log_mu, constraints, snr).profile()


def stationarity_residual(profile: TransmissionProfile, constraints, snr: SnrProfile,
                          frequencies=None) -> float:
    """Largest relative KKT stationarity residual over interior points.

    At each frequency with ``0 < T < 1`` evaluates
    ``|-snr/(1 + snr T) + W/(1 - T)| / (snr/(1 + snr T))``.
    """
    log_mu = profile.meta.get("log_mu")
    if log_mu is None:
        raise ValueError("profile does not carry multipliers")
    kkt = _KKTProfile(log_mu, constraints, snr)
    f = snr.frequencies if frequencies is None else np.asarray(frequencies, dtype=float)
    t, loss, w, s = kkt.parts(f, snr(f))
    inner = (t > 0) & (t < 1) & (s > 0)
    if not np.any(inner):
        return 0.0
    first = s[inner] / (1.0 + s[inner] * t[inner])
    second = w[inner] * np.exp(loss[inner])  # W / (1 - T)
    return float(np.max(np.abs(-first + second) / first))


@dataclass(frozen=True)
class Candidate:
    """One single-constraint candidate of the bisection procedure."""

    index: int
    log_mu: float
    rate: float
    feasible: bool
    report: FeasibilityReport


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of :func:`solve`.

    Attributes
    ----------
    profile : TransmissionProfile
        ``T*``.
    multipliers : ndarray
        ``mu*`` (may underflow to 0 for extremely slack bounds; see
        ``log_multipliers``).
    log_multipliers : ndarray
        ``log(mu*)``, ``-inf`` for inactive constraints.
    rate : float
        ``R_max`` in bit/s.
    report : FeasibilityReport
        Per-constraint lhs and slack of ``T*``.
    stationarity : float
        Largest relative stationarity residual on the SNR grid.
    complementary_slackness : float
        ``max |slack_i| / B_i`` over constraints with ``mu_i > 0``.
    method : str
        ``"single"`` when a single-constraint candidate was feasible,
        ``"joint"`` after coordinate refinement.
    candidates : tuple of Candidate
        The single-constraint candidates, for comparison.
    """

    profile: TransmissionProfile
    multipliers: np.ndarray
    log_multipliers: np.ndarray
    rate: float
    report: FeasibilityReport
    stationarity: float
    complementary_slackness: float
    method: str
    candidates: tuple[Candidate, ...] = field(default_factory=tuple)

    @property
    def slack(self) -> np.ndarray:
        return self.report.slack

    @property
    def active(self) -> np.ndarray:
        return np.isfinite(self.log_multipliers)


def _lhs(log_mu, constraints, snr, which: Sequence[int]) -> tuple[np.ndarray, TransmissionProfile]:
    prof = _KKTProfile(log_mu, constraints, snr).profile()
    report = feasibility_check([constraints[j] for j in which], prof)
    return report.lhs, prof


def _bisect(i: int, log_mu: np.ndarray, constraints, snr: SnrProfile, tol: float) -> float:
    """``log(mu_i)`` making constraint ``i`` tight with the others fixed."""
    c = constraints[i]
    f_band, _ = snr.band_samples
    x0 = -math.log(LN2 * float(np.max(c.weight(f_band))))
    bound = c.bound

    def g(x):
        trial = log_mu.copy()
        trial[i] = x
        return _lhs(trial, constraints, snr, [i])[0][0] - bound

    g0 = g(x0)
    if abs(g0) <= tol * bound:
        return x0
    step = 1.0
    direction = 1.0 if g0 > 0 else -1.0
    lo = hi = x0
    for _ in range(MAX_DOUBLINGS):
        x = x0 + direction * step
        gx = g(x)
        if abs(gx) <= tol * bound:
            return x
        if (gx > 0) == (g0 > 0):
            x0, g0 = x, gx
            step *= 2.0
            continue
        lo, hi = (x0, x) if direction > 0 else (x, x0)
        break
    else:
        raise RuntimeError(f"bisection bracket not found after {MAX_DOUBLINGS} doublings")
    # g(lo) > 0 > g(hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol * bound:
            return mid
        if gm > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(mid)):
            return mid
    return 0.5 * (lo + hi)


def solve(snr: SnrProfile, constraints: Sequence[BodeFanoConstraint],
          tol: float = 1e-8, max_sweeps: int = 200) -> OptimizationResult:
    """Maximize ``int log2(1 + snr T) df`` subject to the constraints.

    For each constraint alone, bisect its multiplier until it is tight;
    return the best candidate that satisfies every constraint.  If none
    does, refine all multipliers by cyclic coordinate bisection.

    Parameters
    ----------
    snr : SnrProfile
        Ideal SNR; with an evaluator the integrals are adaptive, otherwise
        they use the trapezoid rule on its grid.
    constraints : sequence of BodeFanoConstraint
    tol : float
        Relative tolerance on tight constraints.

    Raises
    ------
    ValueError
        No constraints, a nonpositive bound, or an SNR that vanishes on the
        band.
    RuntimeError
        Bisection bracket or refinement failure.
    """
    constraints = tuple(constraints)
    if not constraints:
        raise ValueError("at least one constraint is required")
    if any(not c.bound > 0 for c in constraints):
        raise ValueError("infeasible geometry: nonpositive Bode-Fano bound")
    if not np.any(snr.values > 0):
        raise ValueError("SNR is identically zero on the band")
    n = len(constraints)
    everyone = range(n)
    slack_tol = SLACK_EPS

    candidates = []
    for i in everyone:
        log_mu = np.full(n, -np.inf)
        log_mu[i] = _bisect(i, log_mu, constraints, snr, tol)
        prof = _KKTProfile(log_mu, constraints, snr).profile()
        report = feasibility_check(constraints, prof, slack_tol)
        candidates.append(Candidate(i, float(log_mu[i]), rate(prof, snr), report.feasible, report))

    feasible = [c for c in candidates if c.feasible]
    if feasible:
        best = max(feasible, key=lambda c: c.rate)
        log_mu = np.full(n, -np.inf)
        log_mu[best.index] = best.log_mu
        method = "single"
    else:
        log_mu = np.array([c.log_mu for c in candidates])
        log_mu = _refine(log_mu, constraints, snr, tol, max_sweeps)
        method = "joint"

    kkt = _KKTProfile(log_mu, constraints, snr)
    prof = kkt.profile()
    report = feasibility_check(constraints, prof, slack_tol)
    active = np.isfinite(log_mu)
    rel = np.abs(report.slack) / report.bounds
    cs = float(np.max(rel[active])) if np.any(active) else 0.0
    with np.errstate(under="ignore"):
        mu = np.exp(log_mu)
    return OptimizationResult(prof, mu, log_mu, rate(prof, snr), report,
                              stationarity_residual(prof, constraints, snr), cs,
                              method, tuple(candidates))


def _refine(log_mu, constraints, snr, tol, max_sweeps):
    n = len(constraints)
    for _ in range(max_sweeps):
        changed = False
        for i in range(n):
            trial = log_mu.copy()
            trial[i] = -np.inf
            if np.any(np.isfinite(trial)):
                lhs_i = _lhs(trial, constraints, snr, [i])[0][0]
                if lhs_i <= constraints[i].bound * (1 + tol):
                    if np.isfinite(log_mu[i]):
                        changed = True
                    log_mu = trial
                    continue
            new = _bisect(i, log_mu, constraints, snr, tol)
            if not np.isfinite(log_mu[i]) or abs(new - log_mu[i]) > 1e-9 * max(1.0, abs(new)):
                changed = True
            log_mu[i] = new
        lhs, _ = _lhs(log_mu, constraints, snr, range(n))
        bounds = np.array([c.bound for c in constraints])
        active = np.isfinite(log_mu)
        tight = np.all(np.abs(lhs[active] - bounds[active]) <= 10 * tol * bounds[active])
        within = np.all(lhs <= bounds * (1 + 10 * tol))
        if (tight and within) or not changed:
            return log_mu
    raise RuntimeError("joint multiplier refinement did not converge")


def frequency_flat(constraints: Sequence[BodeFanoConstraint], band: Band,
                   frequencies=None) -> TransmissionProfile:
    """Largest constant ``T`` on ``band`` meeting every constraint.

    ``T_ff = 1 - max_i exp(-B_i / int_band xi_i df)``.
    """
    if not constraints:
        raise ValueError("at least one constraint is required")
    exponents = np.array([c.bound / band_integral(c.weight, band) for c in constraints])
    r = np.exp(-exponents)
    t_ff = float(1.0 - np.max(r))
    loss = float(np.min(exponents))  # ln(1/(1-T_ff)) without rounding
    f = band.grid(2001) if frequencies is None else np.asarray(frequencies, dtype=float)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return np.where(band.contains(x), t_ff, 0.0)

    def log_loss(x):
        x = np.asarray(x, dtype=float)
        return np.where(band.contains(x), loss, 0.0)

    return TransmissionProfile(f, evaluate(f), "frequency-flat", band, evaluate, log_loss,
                               meta={"r": r, "t_ff": t_ff})


def circuit_support(f_c: float, below: float = 3.0, above: float = 6.0) -> Band:
    """Wide band, in decades around ``f_c``, for circuit constraint checks.

    Rounding noise in ``1 - |S_L|^2`` limits how far below ``f_c`` the
    integrand is meaningful; above ``f_c`` the only cost is evaluations.
    """
    return Band(f_c * 10.0 ** -below, f_c * 10.0 ** above)


def conjugate_network(z_load: complex, f_c: float, z0: float) -> LumpedNetwork:
    """Lossless L-section presenting ``z0`` to the source at ``f_c``.

    Of the two solutions, the one with the smaller stored-energy measure
    ``|X| / R_L + |B| z0`` is returned.

    Raises
    ------
    ValueError
        If ``Re(z_load) <= 0``.
    """
    r_l, x_l = float(np.real(z_load)), float(np.imag(z_load))
    if not r_l > 0:
        raise ValueError("unmatchable load: Re(Z_L) <= 0")
    options = []
    if r_l > z0:
        # shunt B across the load, series X toward the source
        root = math.sqrt(r_l / z0) * math.sqrt(r_l**2 + x_l**2 - z0 * r_l)
        for sign in (1.0, -1.0):
            b = (x_l + sign * root) / (r_l**2 + x_l**2)
            x = 1.0 / b + x_l * z0 / r_l - z0 / (b * r_l) if b != 0 else 0.0
            options.append((x, b, False))
    else:
        # series X next to the load, shunt B toward the source
        for sign in (1.0, -1.0):
            b = sign * math.sqrt((z0 - r_l) / r_l) / z0
            x = sign * math.sqrt(r_l * (z0 - r_l)) - x_l
            options.append((x, b, True))
    x, b, shunt_at_source = min(options, key=lambda o: abs(o[0]) / r_l + abs(o[1]) * z0)
    return lumped_from_reactances(x, b, f_c, z0, shunt_at_source)


def conjugate_match(cfg: ScenarioConfig, load: SampledResponse,
                    frequencies=None) -> TransmissionProfile:
    """Transmission of the single-frequency conjugate match at ``cfg.f_c``.

    The profile depends only on the load and ``f_c``, not on the band.
    """
    s_c = complex(load(np.array([cfg.f_c]))[0])
    net = conjugate_network(complex(s_to_z(s_c, cfg.z0)), cfg.f_c, cfg.z0)
    f = load.frequencies if frequencies is None else np.asarray(frequencies, dtype=float)
    return transmission_into_load(net, load, f, circuit_support(cfg.f_c), "conjugate-match")


def no_match_profile(load: SampledResponse, frequencies=None,
                     support: Optional[Band] = None) -> TransmissionProfile:
    """``T = 1 - |S_eq|^2``: the source wired directly to the load."""
    f = load.frequencies if frequencies is None else np.asarray(frequencies, dtype=float)
    support = support or Band(float(f[0]), float(f[-1]))

    def evaluate(x):
        return 1.0 - np.abs(load(np.atleast_1d(x))) ** 2

    def log_loss(x):
        # ln(1 / |S|^2) stays finite where 1 - |S|^2 rounds to 1
        with np.errstate(divide="ignore"):
            return -2.0 * np.log(np.abs(load(np.atleast_1d(x))))

    ev = evaluate if load.model is not None else None
    return TransmissionProfile(f, evaluate(f), "no-match", support, evaluator=ev,
                               log_loss=log_loss if ev is not None else None,
                               meta={"tails": True})


def rates_by_strategy(profiles: Iterable[TransmissionProfile], snr: SnrProfile) -> dict:
    return {p.strategy: rate(p, snr) for p in profiles}
