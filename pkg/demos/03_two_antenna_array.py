"""Two coupled antennas behind an analog beamformer.

With half-wavelength spacing the mutual coupling makes the load seen by the
radio depend on the beam direction.  The even mode (broadside) and the odd
mode (endfire) each get a rational load model, a pair of right-half-plane
constraints, and their own optimum.
"""

import numpy as np

from widematch import (Link, SampledResponse, ScenarioConfig, derive_constraints,
                       fit_rational, frequency_flat, ideal_profile, rate, solve)

radius = 299_792_458.0 / 7e9 / 15
for mode, theta in (("even", 0.0), ("odd", np.pi / 2)):
    cfg = ScenarioConfig(mode=mode, theta=theta, radius=radius, p_total=0.25)
    link = Link(cfg)

    # A fourth-order rational model of the mode load, fitted over the band.
    f = cfg.band.grid(401)
    fitted = fit_rational(SampledResponse(f, link.load(f)), 4)
    constraints = derive_constraints(fitted.function)
    print(f"{mode} mode: fit error {fitted.error:.1e}")
    for c in constraints:
        print(f"  {c.label}  bound {c.bound:.4f}")

    grid = link.grid(801)
    snr = link.snr_profile(grid)
    best = solve(snr, constraints)
    flat = frequency_flat(constraints, cfg.band, grid)
    print(f"  rates (Gbit/s): ideal {rate(ideal_profile(snr), snr) / 1e9:.3f}, "
          f"optimal {best.rate / 1e9:.3f}, flat {rate(flat, snr) / 1e9:.3f}")
