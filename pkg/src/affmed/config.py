"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    pd: float = 1e-10  # smallest admissible eigenvalue (relative) for PD matrices
    unit: float = 1e-12  # |‖v‖ - 1| for directions
    lin: float = 1e-8  # linear-algebra round trips (whitening, affine maps)
    eq: float = 1e-9  # zero-width slab equality, relative to data scale
    tie: float = 1e-12  # degenerate-scale comparisons in 1D outlyingness


TOL = Tolerances()
