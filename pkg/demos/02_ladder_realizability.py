"""Can a real LC ladder follow the optimal transmission profile?

Fits a four-stage ladder to the optimal and flat profiles of the single
antenna, then checks the fitted circuits against the integral limits.  The
1/f^2 limit holds for every circuit.  The 1/f^4 limit is exceeded by real
lossless circuits, the plain conjugate match included.
"""

import numpy as np

from widematch import (Link, ScenarioConfig, chu_scattering_rational, conjugate_match,
                       derive_constraints, feasibility_check, fit_ladder, frequency_flat,
                       rate, solve, transmission_into_load)
from widematch.optimizer import circuit_support

cfg = ScenarioConfig(p_total=0.25)
link = Link(cfg)
grid = link.grid()
snr = link.snr_profile(grid)
load = link.load_response(grid)
constraints = derive_constraints(chu_scattering_rational(cfg))

targets = {"optimal": solve(snr, constraints).profile,
           "frequency-flat": frequency_flat(constraints, cfg.band, grid)}

for name, target in targets.items():
    net, report = fit_ladder(target, load, 4, 16, snr=snr)
    achieved = transmission_into_load(net, load, support=circuit_support(cfg.f_c))
    rep = feasibility_check(constraints, achieved)
    print(f"{name} target, order 4")
    print("  L (nH):", np.round(np.array(net.inductances) * 1e9, 4))
    print("  C (pF):", np.round(np.array(net.capacitances) * 1e12, 4))
    print(f"  rate {rate(achieved, snr) / 1e9:.3f} of {rate(target, snr) / 1e9:.3f} Gbit/s")
    print(f"  slack / bound {np.round(rep.relative_slack, 4)}")

# The single-frequency L-section is about as simple as a lossless match gets,
# yet it also lands above the 1/f^4 bound.
cm = conjugate_match(cfg, load)
rep = feasibility_check(constraints, cm)
print("\nconjugate L-section:", [f"{e.position} {e.kind} {e.value:.4g}" for e in cm.meta["network"].elements])
print(f"  slack / bound {np.round(rep.relative_slack, 4)}")
