"""Rate-optimal broadband transmit matching under Bode-Fano limits.

The package models electrically small antennas (single Chu antennas and a
coupled two-element array behind an analog beamformer), derives the
Bode-Fano integral constraints of the equivalent load, solves for the
transmission coefficient that maximizes the achievable rate, and fits
lossless LC ladders that realize it.
"""

from .bodefano import (BodeFanoConstraint, DivergentIntegralError, FeasibilityReport,
                       UnsupportedRootError, constraint_lhs, derive_constraints,
                       feasibility_check)
from .config import SPEED_OF_LIGHT, ScenarioConfig
from .ladder import (LadderNetwork, LumpedNetwork, export_touchstone, fit as fit_ladder,
                     transmission_into_load, two_port_scattering)
from .network import (Link, array_scattering, beamformer, channel_response, chu_impedance,
                      chu_scattering_rational, equivalent_load, mutual_impedance)
from .optimizer import (OptimizationResult, conjugate_match, frequency_flat, no_match_profile,
                        solve, transmission_from_multipliers)
from .profiles import Band, SnrProfile, TransmissionProfile, ideal_profile, rate
from .rational import (RationalFunction, SampledResponse, fit_rational, log_taylor_coefficients,
                       reflection_roots)
from .sweep import STRATEGIES, bandwidth_sweep
from .touchstone import TouchstoneData, read_touchstone, write_touchstone

__version__ = "0.1.0"

__all__ = [
    "Band", "BodeFanoConstraint", "DivergentIntegralError", "FeasibilityReport",
    "LadderNetwork", "Link", "LumpedNetwork", "OptimizationResult", "RationalFunction",
    "SPEED_OF_LIGHT", "STRATEGIES", "SampledResponse", "ScenarioConfig", "SnrProfile",
    "TouchstoneData", "TransmissionProfile", "UnsupportedRootError", "array_scattering",
    "bandwidth_sweep", "beamformer", "channel_response", "chu_impedance",
    "chu_scattering_rational", "conjugate_match", "constraint_lhs", "derive_constraints",
    "equivalent_load", "export_touchstone", "feasibility_check", "fit_ladder", "fit_rational",
    "frequency_flat", "ideal_profile", "log_taylor_coefficients", "mutual_impedance",
    "no_match_profile", "rate", "read_touchstone", "reflection_roots", "solve",
    "transmission_from_multipliers", "transmission_into_load", "two_port_scattering",
    "write_touchstone",
]
