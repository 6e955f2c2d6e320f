"""How much rate a single small antenna can carry over a wide band.

A Chu antenna of radius 4.29 mm at 7 GHz is badly mismatched to 50 ohm.  Any
lossless matching network obeys integral limits on how well it can match over
frequency.  This script derives those limits, solves for the best
transmission profile and compares it with simpler matching strategies.
"""

import numpy as np

from widematch import (Link, ScenarioConfig, chu_scattering_rational, conjugate_match,
                       derive_constraints, feasibility_check, frequency_flat, ideal_profile,
                       no_match_profile, rate, solve)
from widematch.optimizer import circuit_support

cfg = ScenarioConfig(p_total=0.25)  # 4.9 to 9.1 GHz, 0.25 W in total
link = Link(cfg)

# The load has a fourfold root at the origin, which gives two constraints
# with weights 1/f^2 and 1/f^4.
constraints = derive_constraints(chu_scattering_rational(cfg))
for c in constraints:
    print(f"{c.label:16s} bound {c.bound:.6e}")

# Best constant transmission over the band, and the rate-optimal profile.
grid = link.grid()
snr = link.snr_profile(grid)
flat = frequency_flat(constraints, cfg.band, grid)
best = solve(snr, constraints)
print(f"\nflat transmission T_ff = {flat.meta['t_ff']:.4f}")
print(f"optimum found by the '{best.method}' step, multipliers {best.multipliers}")

# The optimum gives up transmission at the low edge, where the antenna is
# hardest to match, and spends it higher up.
f = np.linspace(cfg.band.f_min, cfg.band.f_max, 8)
for fi, t in zip(f, best.profile(f)):
    print(f"  {fi / 1e9:5.2f} GHz  T* = {t:.3f}")

load = link.load_response(grid)
profiles = {
    "ideal": ideal_profile(snr),
    "optimal": best.profile,
    "frequency-flat": flat,
    "conjugate-match": conjugate_match(cfg, load),
    "no-match": no_match_profile(load, support=circuit_support(cfg.f_c)),
}
print()
for name, prof in profiles.items():
    print(f"{name:16s} {rate(prof, snr) / 1e9:.3f} Gbit/s")

# The optimum and the flat profile use the limits exactly; the conjugate
# match is a real circuit and is checked against them below.
for name in ("optimal", "frequency-flat", "conjugate-match"):
    rep = feasibility_check(constraints, profiles[name])
    print(f"{name:16s} slack / bound = {np.round(rep.relative_slack, 4)}")
