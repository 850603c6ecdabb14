"""Stochastic completion fields: drift-diffusion priors for contour completion."""
from .grid import Field3D, GridSpec, StabilityError, WalkParams, state_index, total_mass
from .propagate import BoundaryMode, StepWeights, propagate, step_conv, step_fd
from .scf import (DegenerateFieldError, Keypoint, KeypointSet, Role, completion_field,
                  marginalized_field, rasterize, sink_field, source_field)
from .trace import TracedPath, VectorField2D, extract_vector_field, sample_vector, trace_path

__all__ = [
    "BoundaryMode", "DegenerateFieldError", "Field3D", "GridSpec", "Keypoint", "KeypointSet",
    "Role", "StabilityError", "StepWeights", "TracedPath", "VectorField2D", "WalkParams",
    "completion_field", "extract_vector_field", "marginalized_field", "propagate", "rasterize",
    "sample_vector", "sink_field", "source_field", "state_index", "step_conv", "step_fd",
    "total_mass", "trace_path",
]
