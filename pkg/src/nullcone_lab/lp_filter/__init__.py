from .cutoff import DyadicCutoff, dyadic_range
from .grid import GridField, band_project, project_below, spectral_energy
from .microlocal import MicrolocalFamily, microlocalize
from .synth import fit_loglog_slope, shell_gradient_energies, synthesize_rough_metric

__all__ = [
    "DyadicCutoff",
    "dyadic_range",
    "GridField",
    "band_project",
    "project_below",
    "spectral_energy",
    "MicrolocalFamily",
    "microlocalize",
    "fit_loglog_slope",
    "shell_gradient_energies",
    "synthesize_rough_metric",
]
