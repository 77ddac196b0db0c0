"""Centralized numeric tolerances.

All geometry runs in float64; every comparison tolerance used by the library
lives in this one record so tests and implementation agree on the numbers.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # rotation matrices derived from a pose must be orthonormal to this level
    pose_orthonormal: float = 1e-12
    # rigid transforms preserve pairwise distances to this level
    isometry: float = 1e-9
    # relative spread of consecutive chord spacings after resampling
    spacing_rel: float = 1e-6
    # junction position gap between concatenated curves, world units
    junction_gap: float = 1e-9
    # junction tangent angle mismatch between concatenated curves, radians
    junction_tangent: float = 1e-6
    # corridor offset points sit at exactly the clearance distance
    offset_exact: float = 1e-9
    # generic degenerate-length cutoff, world units
    degenerate_length: float = 1e-12


TOL = Tolerances()
