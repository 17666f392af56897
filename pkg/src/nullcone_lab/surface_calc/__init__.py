from .checks import area_radius_average, isoperimetric_check, trace_check
from .grid_ops import SphereOps, stencil_weights
from .hodge import HodgeSolution, hodge_energy_identity, hodge_solve
from .maximal import maximal_function, maximal_function_bruteforce
from .section import SphereSection, section, section_from_embedding

__all__ = [
    "area_radius_average",
    "isoperimetric_check",
    "trace_check",
    "SphereOps",
    "stencil_weights",
    "HodgeSolution",
    "hodge_energy_identity",
    "hodge_solve",
    "maximal_function",
    "maximal_function_bruteforce",
    "SphereSection",
    "section",
    "section_from_embedding",
]
