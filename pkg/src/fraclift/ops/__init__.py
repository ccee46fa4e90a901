"""Cauchy-type and Toeplitz operators on lifted boundaries."""

from .curve import (CircleSpec, CurveError, CurveSampling, IndexReport, OperatorMatrix, SymbolSpec,
                    ToeplitzOperator, cauchy_projection_curve, fourier_projection, fredholm_index,
                    sample_closed_curve, toeplitz_curve, winding_number)
from .quaternion import Quaternion
from .surface import (SurfaceError, SurfaceSampling, cauchy_integral_surface, hardy_projection_surface,
                      icosphere, idempotence_defect, surface_from_mesh)

__all__ = [
    "CircleSpec", "CurveError", "CurveSampling", "IndexReport", "OperatorMatrix", "SymbolSpec",
    "ToeplitzOperator", "cauchy_projection_curve", "fourier_projection", "fredholm_index",
    "sample_closed_curve", "toeplitz_curve", "winding_number", "Quaternion", "SurfaceError",
    "SurfaceSampling", "cauchy_integral_surface", "hardy_projection_surface", "icosphere",
    "idempotence_defect", "surface_from_mesh",
]
