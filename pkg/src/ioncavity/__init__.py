"""Quantum steady states and semiclassical bistability of a trapped ion
dispersively coupled to a pumped optical cavity."""

from .model import SystemParams, SystemOperators, build_operators, lindblad_apply
from .steady import (
    DensityMatrix,
    SpectrumResult,
    arnoldi_dominant,
    dense_oracle,
    propagate_map,
    refine_with_displacement,
)

__all__ = [
    "SystemParams",
    "SystemOperators",
    "build_operators",
    "lindblad_apply",
    "DensityMatrix",
    "SpectrumResult",
    "arnoldi_dominant",
    "dense_oracle",
    "propagate_map",
    "refine_with_displacement",
]

__version__ = "0.1.0"
