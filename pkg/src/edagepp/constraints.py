"""Constraint obstacles: block shortcut chords across the path's concavities.

Concave pockets are found as long convex-hull edges (the waypoints are equally
spaced, so a hull edge much longer than the spacing spans a concavity). Each
pocket gets a chain of random circles marching from the chord into the pocket
until their total diameter covers twice the pocket width; only circles that
keep clearance from the path are kept.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateInput, DegenerateSubspace
from .geom import convex_hull, point_polyline_distance, points_polyline_distance
from .pathgen import PathPolyline

log = logging.getLogger(__name__)

# resampling keeps rejecting forever on unreachable pockets; give up after this
MAX_CONSECUTIVE_REJECTIONS = 100
# pockets shallower than this are collinear runs of the hull, not concavities
MIN_SUBSPACE_WIDTH = 1e-9


@dataclass
class Obstacle:
    radius: float
    center: np.ndarray
    role: Literal["constraint", "filler"] = "filler"

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=np.float64).reshape(2)
        if not self.radius > 0 or not np.isfinite(self.center).all():
            raise DegenerateInput("obstacle needs positive radius and finite center")


@dataclass
class Subspace:
    """A concave pocket: the path section hanging between two hull points."""

    boundary: np.ndarray
    anchor_f: np.ndarray
    anchor_g: np.ndarray
    dir_z: np.ndarray
    dir_n: np.ndarray
    width: float


def subspace_frame(s: Subspace):
    """(chord direction, into-pocket normal, pocket width) for a subspace."""
    return _frame(s.anchor_f, s.anchor_g, s.boundary)


def _frame(anchor_f, anchor_g, boundary):
    z = np.asarray(anchor_f, dtype=float) - np.asarray(anchor_g, dtype=float)
    norm = np.linalg.norm(z)
    if norm <= 0.0:
        raise DegenerateSubspace("subspace anchors coincide")
    dir_z = z / norm
    dir_n = np.array([dir_z[1], -dir_z[0]])
    mid = (np.asarray(anchor_f, dtype=float) + np.asarray(anchor_g, dtype=float)) / 2
    if np.dot(np.mean(boundary, axis=0) - mid, dir_n) < 0:
        dir_n = -dir_n
    width = float(np.abs((boundary - anchor_f) @ dir_n).max())
    return dir_z, dir_n, width


def find_subspaces(path: PathPolyline, gap_threshold: float) -> list[Subspace]:
    """One subspace per hull edge longer than gap_threshold.

    The subspace boundary holds the waypoints strictly between the hull edge's
    endpoints; effectively-collinear hull runs (zero pocket width) are skipped.
    """
    if not gap_threshold > path.spacing:
        raise DegenerateInput("gap_threshold must exceed the waypoint spacing")
    pts = path.points
    try:
        hull = convex_hull(pts)
    except DegenerateInput:
        return []  # straight path: no concavity
    src = hull.source_indices
    out = []
    m = len(src)
    for f in range(m):
        g = (f + 1) % m
        u, v = src[f], src[g]
        if np.linalg.norm(pts[u] - pts[v]) <= gap_threshold:
            continue
        lo, hi = (u, v) if u < v else (v, u)
        boundary = pts[lo + 1:hi]
        if len(boundary) == 0:
            continue
        try:
            dir_z, dir_n, width = _frame(pts[u], pts[v], boundary)
        except DegenerateSubspace:
            continue
        if width <= MIN_SUBSPACE_WIDTH:
            continue
        out.append(Subspace(boundary=boundary.copy(), anchor_f=pts[u].copy(),
                            anchor_g=pts[v].copy(), dir_z=dir_z, dir_n=dir_n,
                            width=width))
    return out


def collision_free(path: PathPolyline, obstacle: Obstacle, c: float) -> bool:
    """True iff the obstacle keeps at least the clearance from the path."""
    return point_polyline_distance(obstacle.center, path.points) >= obstacle.radius + c


def collision_free_many(path: PathPolyline, centers, radii, c: float) -> np.ndarray:
    return points_polyline_distance(centers, path.points) >= np.asarray(radii) + c


def place_constraint_obstacles(path: PathPolyline, c: float,
                               subspaces: list[Subspace],
                               rng: np.random.Generator,
                               max_total: int | None = None) -> list[Obstacle]:
    """March a chain of clearance-respecting circles into each pocket.

    The first circle anchors at the chord midpoint pushed a clearance into the
    pocket; each next circle advances from the last kept one by a random
    fraction of the two radii, with lateral jitter along the chord. A chain
    ends once the kept diameters sum to twice the pocket width; a pocket is
    abandoned (keeping what was placed) after 100 consecutive rejections.
    """
    if not c > 0:
        raise DegenerateInput("clearance must be positive")
    placed: list[Obstacle] = []
    for s in subspaces:
        chord_mid = (s.anchor_f + s.anchor_g) / 2
        chain: list[Obstacle] = []
        diam_sum = 0.0
        rejections = 0
        while diam_sum < 2 * s.width:
            if max_total is not None and len(placed) + len(chain) >= max_total:
                log.warning("constraint obstacle budget %d reached", max_total)
                break
            radius = 2 * s.width * (1.0 - rng.random())      # (0, 2w]
            eps_n = 1.0 - rng.random()                       # (0, 1]
            eps_z = rng.uniform(-1.0, 1.0)
            if not chain:
                t_n = c
                base = chord_mid
            else:
                t_n = eps_n * (radius + chain[-1].radius)
                base = chain[-1].center
            center = base + t_n * s.dir_n + eps_z * radius * s.dir_z
            candidate = Obstacle(radius=radius, center=center, role="constraint")
            if collision_free(path, candidate, c):
                chain.append(candidate)
                diam_sum += 2 * radius
                rejections = 0
            else:
                rejections += 1
                if rejections >= MAX_CONSECUTIVE_REJECTIONS:
                    # routine for pockets shallower than the clearance: no
                    # circle can block them without entering the corridor
                    log.debug("placement stalled in subspace (w=%.2f); skipping",
                              s.width)
                    break
        placed.extend(chain)
    return placed
