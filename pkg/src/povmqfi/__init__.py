"""Coherence of quantum states relative to general measurements, quantified
by quantum Fisher information."""

from .coherence import cf_block, cf_direct, cf_embedded, cf_standard, naimark_gap
from .numerics import DEFAULT_TOL, Tolerances
from .qfi import pure_qfi, qfi, qfi_via_z, z_matrix
from .states import (
    BasisMeasurement,
    DensityMatrix,
    Povm,
    ProjectiveMeasurement,
    validate_povm,
    validate_state,
)

__all__ = [
    "BasisMeasurement",
    "DEFAULT_TOL",
    "DensityMatrix",
    "Povm",
    "ProjectiveMeasurement",
    "Tolerances",
    "cf_block",
    "cf_direct",
    "cf_embedded",
    "cf_standard",
    "naimark_gap",
    "pure_qfi",
    "qfi",
    "qfi_via_z",
    "validate_povm",
    "validate_state",
    "z_matrix",
]
