"""Generalized de Bruijn cycles: windows read through an index set I,
validity searches, finite-field reduced cycles, equal-length trail
decompositions of complete loop-digraphs, and approximate cycles."""

__version__ = "0.1.0"

from .core import (
    AffineClass,
    CoverageReport,
    CycleParams,
    CyclicString,
    DeBruijnDigraph,
    UcycleError,
    VerificationError,
    canonicalize_affine,
    debruijn_digraph,
    verify_cover,
    window,
)
from .search import (
    Atlas,
    BudgetExceeded,
    ValidityCertificate,
    atlas,
    decide_valid,
    two_element_validity,
)

__all__ = [
    "AffineClass",
    "Atlas",
    "BudgetExceeded",
    "CoverageReport",
    "CycleParams",
    "CyclicString",
    "DeBruijnDigraph",
    "UcycleError",
    "ValidityCertificate",
    "VerificationError",
    "atlas",
    "canonicalize_affine",
    "debruijn_digraph",
    "decide_valid",
    "two_element_validity",
    "verify_cover",
    "window",
]
