"""Achievable rate versus bandwidth for every matching strategy.

The total supplied power is held fixed, so the power density scales as
``p_total / B``.  Circuit strategies fit a ladder at each bandwidth, warm
started from the previous bandwidth's network.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bodefano import BodeFanoConstraint
from .config import ScenarioConfig
from .ladder import LadderNetwork, fit, transmission_into_load
from .network import Link
from .optimizer import conjugate_match, frequency_flat, no_match_profile, solve
from .profiles import ideal_profile, rate

__all__ = ["STRATEGIES", "SweepRow", "SweepTable", "bandwidth_sweep"]

STRATEGIES = ("ideal", "optimal", "frequency-flat", "conjugate-match", "no-match",
              "ladder-optimal", "ladder-flat")


@dataclass(frozen=True)
class SweepRow:
    bandwidth: float
    strategy: str
    rate: float


@dataclass
class SweepTable:
    """Rows of ``(bandwidth, strategy, rate)`` plus the fitted networks."""

    rows: list[SweepRow] = field(default_factory=list)
    networks: dict = field(default_factory=dict)

    def rates(self, strategy: str) -> tuple[np.ndarray, np.ndarray]:
        """Bandwidths and rates of one strategy, in sweep order."""
        sel = [r for r in self.rows if r.strategy == strategy]
        return (np.array([r.bandwidth for r in sel]), np.array([r.rate for r in sel]))

    def argmax(self, strategy: str) -> float:
        b, r = self.rates(strategy)
        if b.size == 0:
            raise KeyError(f"no rows for strategy {strategy!r}")
        return float(b[int(np.argmax(r))])


def bandwidth_sweep(cfg: ScenarioConfig, constraints: Sequence[BodeFanoConstraint],
                    bandwidths: Sequence[float], strategies: Sequence[str] = STRATEGIES,
                    *, grid_points: int = 2001, tol: float = 1e-8, ladder_order: int = 4,
                    seeds: int = 16, seed: int = 0, fit_points: int = 161,
                    shunt_first: bool = False) -> SweepTable:
    """Rate of each strategy at each bandwidth centered on ``cfg.f_c``.

    Parameters
    ----------
    cfg : ScenarioConfig
        Template scenario; must set ``p_total``.
    constraints : sequence of BodeFanoConstraint
        Constraints of the scenario's load, which do not depend on the band.
    bandwidths : sequence of float
        Positive bandwidths in Hz.
    strategies : sequence of str
        Subset of ``STRATEGIES``.

    Returns
    -------
    SweepTable
        One row per ``(bandwidth, strategy)``, in input order.
    """
    unknown = set(strategies) - set(STRATEGIES)
    if unknown:
        raise ValueError(f"unknown strategies: {sorted(unknown)}")
    if cfg.p_total is None:
        raise ValueError("a bandwidth sweep needs a fixed total power (p_total)")
    bandwidths = [float(b) for b in bandwidths]
    if any(not b > 0 for b in bandwidths):
        raise ValueError("bandwidths must be positive")
    table = SweepTable()
    warm: dict[str, Optional[LadderNetwork]] = {"ladder-optimal": None, "ladder-flat": None}
    for b in bandwidths:
        c = cfg.with_bandwidth(b)
        link = Link(c)
        grid = link.grid(grid_points)
        snr = link.snr_profile(grid)
        load = link.load_response(grid)
        profiles = {}
        if "ideal" in strategies:
            profiles["ideal"] = ideal_profile(snr)
        if {"optimal", "ladder-optimal"} & set(strategies):
            profiles["optimal"] = solve(snr, constraints, tol=tol).profile
        if {"frequency-flat", "ladder-flat"} & set(strategies):
            profiles["frequency-flat"] = frequency_flat(constraints, c.band, grid)
        if "conjugate-match" in strategies:
            profiles["conjugate-match"] = conjugate_match(c, load)
        if "no-match" in strategies:
            profiles["no-match"] = no_match_profile(load)
        for name, source in (("ladder-optimal", "optimal"), ("ladder-flat", "frequency-flat")):
            if name not in strategies:
                continue
            starts = [warm[name]] if warm[name] is not None else None
            net, _ = fit(profiles[source], load, ladder_order, seeds, snr=snr, seed=seed,
                         z0=c.z0, shunt_first=shunt_first, fit_points=fit_points,
                         warm_start=starts)
            warm[name] = net
            table.networks[(b, name)] = net
            profiles[name] = transmission_into_load(net, load, strategy="ladder")
        for name in strategies:
            table.rows.append(SweepRow(b, name, rate(profiles[name], snr)))
    return table
