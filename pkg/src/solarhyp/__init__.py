"""Closed-form solar-core structure from a two-parameter density law.

The density ``rho = rho_c (1 - x**delta)**gamma`` integrates to mass,
pressure and temperature profiles expressed through terminating
hypergeometric sums, and a power-law energy rate integrates term by term
to the luminosity profile.
"""

from .energy import epsilon_direct, epsilon_expansion, epsilon_from_expansion
from .luminosity import build_luminosity_terms, luminosity_profile, total_luminosity
from .profiles import (
    Composition,
    ModelParams,
    PhysicalConstants,
    central_values,
    f_density,
    f_mass,
    f_pressure,
    f_temperature,
    physical_profiles,
)

__all__ = [
    "Composition",
    "ModelParams",
    "PhysicalConstants",
    "build_luminosity_terms",
    "central_values",
    "epsilon_direct",
    "epsilon_expansion",
    "epsilon_from_expansion",
    "f_density",
    "f_mass",
    "f_pressure",
    "f_temperature",
    "luminosity_profile",
    "physical_profiles",
    "total_luminosity",
]
__version__ = "0.1.0"
