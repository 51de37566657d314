"""Computational toolkit for polarized real tori.

Subpackages cover exact integer/GF(2) linear algebra, reduction theory on
the SPD cone, the Siegel half-space and disk with their group actions,
real tori and their moduli classification, theta series and automorphic
factors, extension groups via period matrices, degeneration limits,
order-two cohomology predicates, and geodesics of the cone-times-Euclidean
space.  The ``realtori`` CLI exposes everything on JSON payloads.
"""

from . import (
    cohomology,
    degenerations,
    exactlinalg,
    extensions,
    geodesics,
    moduli,
    siegel,
    spdcone,
    theta,
    tori,
)

__version__ = "0.1.0"

__all__ = [
    "cohomology",
    "degenerations",
    "exactlinalg",
    "extensions",
    "geodesics",
    "moduli",
    "siegel",
    "spdcone",
    "theta",
    "tori",
    "__version__",
]
