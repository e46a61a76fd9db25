"""Volumes of cross-ratio structures on tetrahedra and triangulations.

Submodules: :mod:`dilog` (Bloch-Wigner dilogarithm), :mod:`crstruct`
(structures on one tetrahedron), :mod:`crgeom` (configurations on S^3),
:mod:`pentad` (five-point configurations), :mod:`triangulation`.
"""

from .crgeom import HeisenbergPoint, cross_ratio_structure_of
from .crstruct import CrossRatioStructure, hyperbolic_lift, volume
from .dilog import INFINITY, D, bloch_wigner, lobachevsky
from .errors import DegenerateConfigurationError, DomainError, MoveRefusedError, StructuralError

__all__ = [
    "INFINITY",
    "D",
    "bloch_wigner",
    "lobachevsky",
    "CrossRatioStructure",
    "hyperbolic_lift",
    "volume",
    "HeisenbergPoint",
    "cross_ratio_structure_of",
    "DomainError",
    "DegenerateConfigurationError",
    "MoveRefusedError",
    "StructuralError",
]

__version__ = "0.1.0"
