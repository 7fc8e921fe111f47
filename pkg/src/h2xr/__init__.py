"""Surfaces in H^2 x R with a canonical principal direction: constructors, geometry engine and residual checks."""

from .errors import GeometryError, NumericalError
from .families import (AngleProfile, CurvePair, FrameState, make_flat, make_from_curve, make_general,
                       make_minimal, make_named_example, make_theorem3, minimal_angle_field, shift_phi)
from .surface import Immersion, sample

__all__ = [
    "AngleProfile", "CurvePair", "FrameState", "GeometryError", "Immersion", "NumericalError",
    "make_flat", "make_from_curve", "make_general", "make_minimal", "make_named_example",
    "make_theorem3", "minimal_angle_field", "sample", "shift_phi",
]
