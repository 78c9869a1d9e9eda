"""Multigroup slab-geometry S_N transport solvers."""

from ._core import (
    EigenResult,
    Problem,
    QuadratureSet,
    SlabSNError,
    block_diagonalize,
    fixed_source,
    gauss_legendre,
    power_iteration,
    transport_matrix,
)

__all__ = [
    "EigenResult",
    "Problem",
    "QuadratureSet",
    "SlabSNError",
    "block_diagonalize",
    "fixed_source",
    "gauss_legendre",
    "power_iteration",
    "transport_matrix",
]
