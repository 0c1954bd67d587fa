"""Kinetic-fluid slip boundary verification toolkit (python surface)."""

from _kinslip import (  # noqa: F401
    CollisionModel,
    VelocityLattice,
    collision_frequency,
    extract_slip,
    global_maxwellian,
    half_space_moment_mass,
    local_maxwellian,
    shear_bracket,
    slip_coefficients,
    steady_couette,
    steady_couette_cns,
    transport_coefficients,
)

__all__ = [
    "CollisionModel",
    "VelocityLattice",
    "collision_frequency",
    "extract_slip",
    "global_maxwellian",
    "half_space_moment_mass",
    "local_maxwellian",
    "shear_bracket",
    "slip_coefficients",
    "steady_couette",
    "steady_couette_cns",
    "transport_coefficients",
]
