from .axis import AxisCurve, integrate_axis
from .bundle import Cone, ConeSnapshot, launch_cone, propagate_frame, transport_null_lapse
from .directions import DirectionGrid

__all__ = [
    "AxisCurve",
    "integrate_axis",
    "Cone",
    "ConeSnapshot",
    "launch_cone",
    "propagate_frame",
    "transport_null_lapse",
    "DirectionGrid",
]
