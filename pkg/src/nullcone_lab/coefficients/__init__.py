from .direct import (
    chi_direct,
    chibar_direct,
    chi_from_evolution,
    direct_coefficients,
    eta_direct,
    grad_metric_norm,
    slice_curvature_pieces,
)
from .fields import RicciCoefficientField, ThetaField
from .mass_aspect import (
    lbar_derivative,
    mass_aspect,
    mu_slash,
    normal_derivative,
    outgoing_derivative,
    time_derivative,
)
from .theta import l2t_linf_norm, theta_field, theta_lq_norm, theta_lq_norm_sorted
from .transport import (
    blowup_time_from_samples,
    riccati_blowup_closed_form,
    transport_coefficients,
)

__all__ = [
    "chi_direct",
    "chibar_direct",
    "chi_from_evolution",
    "direct_coefficients",
    "eta_direct",
    "grad_metric_norm",
    "slice_curvature_pieces",
    "RicciCoefficientField",
    "ThetaField",
    "lbar_derivative",
    "mass_aspect",
    "mu_slash",
    "normal_derivative",
    "outgoing_derivative",
    "time_derivative",
    "l2t_linf_norm",
    "theta_field",
    "theta_lq_norm",
    "theta_lq_norm_sorted",
    "blowup_time_from_samples",
    "riccati_blowup_closed_form",
    "transport_coefficients",
]
