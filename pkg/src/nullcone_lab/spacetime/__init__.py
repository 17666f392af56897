from .jet import (
    CurvatureAtPoint,
    FoliationData,
    FrameCurvature,
    MetricJet,
    christoffel,
    coordinate_grad_norm,
    curvature,
    foliation_split,
    frame_curvature,
)
from .providers import (
    ConformalQuadratic,
    ConstantMetric,
    MetricProvider,
    Minkowski,
    PRESETS,
    ScalarBumpMetric,
    StaticLapseMetric,
    TrigMetric,
    WeakSchwarzschild,
    gaussian_bump,
    get_preset,
    rescaled_lapse,
    single_mode,
)

__all__ = [
    "CurvatureAtPoint",
    "FoliationData",
    "FrameCurvature",
    "MetricJet",
    "christoffel",
    "coordinate_grad_norm",
    "curvature",
    "foliation_split",
    "frame_curvature",
    "ConformalQuadratic",
    "ConstantMetric",
    "MetricProvider",
    "Minkowski",
    "PRESETS",
    "ScalarBumpMetric",
    "StaticLapseMetric",
    "TrigMetric",
    "WeakSchwarzschild",
    "gaussian_bump",
    "get_preset",
    "rescaled_lapse",
    "single_mode",
]
