"""Shared 2D geometry: poses, hulls, equal-spacing resampling, distance queries.

Everything runs in float64 on plain numpy arrays. Points are accepted as any
(N, 2) array-like (lists of Point2 work), and returned as numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np


from .config import TOL
from .errors import DegenerateInput


class Point2(NamedTuple):
    x: float
    y: float


def as_points(points) -> np.ndarray:
    """Coerce to an (N, 2) float64 array and reject non-finite coordinates."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DegenerateInput(f"expected (N, 2) points, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DegenerateInput("points contain NaN or Inf")
    return arr


def normalize_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    r = math.remainder(angle, math.tau)
    if r <= -math.pi:
        r += math.tau
    return r


@dataclass(frozen=True)
class Pose2:
    """Rigid transform p -> R(angle) @ p + translation."""

    angle: float
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "angle", normalize_angle(float(self.angle)))
        t = np.asarray(self.translation, dtype=np.float64).reshape(2)
        if not np.isfinite(t).all() or not math.isfinite(self.angle):
            raise DegenerateInput("pose has non-finite components")
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "Pose2":
        return cls(0.0, np.zeros(2))

    @property
    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    def inverse(self) -> "Pose2":
        rt = self.rotation.T
        return Pose2(-self.angle, -(rt @ self.translation))

    def compose(self, other: "Pose2") -> "Pose2":
        """Pose applying `other` first, then `self`."""
        return Pose2(self.angle + other.angle,
                     self.rotation @ other.translation + self.translation)


def apply_pose(points, pose: Pose2) -> np.ndarray:
    """Rigid-transform points; pairwise distances are preserved."""
    pts = as_points(points)
    return pts @ pose.rotation.T + pose.translation


def rotate_vectors(vectors, pose: Pose2) -> np.ndarray:
    """Rotate direction vectors by the pose (no translation)."""
    return as_points(vectors) @ pose.rotation.T


@dataclass
class ConvexHull:
    """CCW hull vertices plus the input indices they came from."""

    vertices: np.ndarray
    source_indices: list[int] = field(default_factory=list)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> ConvexHull:
    """Minimal CCW convex hull via monotone chain.

    Collinear points on hull edges are dropped. Raises DegenerateInput for
    fewer than 3 distinct points or an all-collinear input.
    """
    pts = as_points(points)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    # keep the first input index for exact duplicates
    seen = {}
    uniq = []
    for i in order:
        key = (pts[i, 0], pts[i, 1])
        if key not in seen:
            seen[key] = int(i)
            uniq.append(int(i))
    if len(uniq) < 3:
        raise DegenerateInput("convex hull needs at least 3 distinct points")

    def half_hull(indices):
        chain: list[int] = []
        for i in indices:
            while len(chain) >= 2 and _cross(pts[chain[-2]], pts[chain[-1]], pts[i]) <= 0.0:
                chain.pop()
            chain.append(i)
        return chain

    lower = half_hull(uniq)
    upper = half_hull(uniq[::-1])
    hull_idx = lower[:-1] + upper[:-1]
    if len(hull_idx) < 3:
        raise DegenerateInput("all points are collinear")
    return ConvexHull(vertices=pts[hull_idx].copy(), source_indices=hull_idx)


def polyline_length(points) -> float:
    pts = as_points(points)
    if len(pts) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def point_polyline_distance(p, polyline) -> float:
    """Exact minimum distance from a point to a polyline (clamped projections)."""
    return float(points_polyline_distance(as_points(p), polyline)[0])


def points_polyline_distance(points, polyline) -> np.ndarray:
    """Vectorized minimum distance from each query point to the polyline."""
    q = as_points(points)
    pts = as_points(polyline)
    if len(pts) == 0:
        raise DegenerateInput("empty polyline")
    if len(pts) == 1:
        return np.linalg.norm(q - pts[0], axis=1)
    a = pts[:-1]
    v = pts[1:] - a
    vv = np.einsum("ij,ij->i", v, v)
    vv_safe = np.where(vv > 0.0, vv, 1.0)
    # (M, S) projection parameters, clamped to the segments
    w = q[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("msj,sj->ms", w, v) / vv_safe[None, :], 0.0, 1.0)
    t = np.where(vv[None, :] > 0.0, t, 0.0)
    diff = w - t[:, :, None] * v[None, :, :]
    d2 = np.einsum("msj,msj->ms", diff, diff)
    return np.sqrt(d2.min(axis=1))


def segment_circle_distance(a, b, centers) -> np.ndarray:
    """Distance from segment a-b to each center (vectorized over centers)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = as_points(centers)
    v = b - a
    vv = float(v @ v)
    if vv <= 0.0:
        return np.linalg.norm(c - a, axis=1)
    t = np.clip((c - a) @ v / vv, 0.0, 1.0)
    proj = a + t[:, None] * v
    return np.linalg.norm(c - proj, axis=1)


def _clean_dense(points) -> np.ndarray:
    """Drop zero-length segments from a dense polyline."""
    pts = as_points(points)
    if len(pts) < 2:
        raise DegenerateInput("dense polyline needs at least 2 points")
    keep = np.ones(len(pts), dtype=bool)
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    keep[1:] = d > 0.0
    pts = pts[keep]
    if len(pts) < 2:
        raise DegenerateInput("polyline has zero total length")
    return pts


def resample_equal_arclength_param(dense, n: int, max_iters: int = 400,
                                   target_spread: float = 1e-8):
    """Equal-chord resampling that also reports where samples landed.

    Places n points on the dense polyline so that consecutive chord lengths
    are equal, by iterating the chord-equalization fixed point: samples at
    arc positions s are moved to the equal-quantile positions of their own
    cumulative chord length. Returns (points, interval_indices, fractions).
    """
    if n < 2:
        raise DegenerateInput("need n >= 2 resample points")
    pts = _clean_dense(dense)
    seg = np.diff(pts, axis=0)
    seglen = np.linalg.norm(seg, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    total = cum[-1]
    m = len(seglen)
    if n == 2:
        return pts[[0, -1]].copy(), np.array([0, m - 1]), np.array([0.0, 1.0])

    s = np.linspace(0.0, total, n)
    idx = np.zeros(n, dtype=np.int64)
    frac = np.zeros(n)
    p = pts[[0] * n].copy()
    for _ in range(max_iters):
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, m - 1)
        frac = (s - cum[idx]) / seglen[idx]
        p = pts[idx] + frac[:, None] * seg[idx]
        p[0] = pts[0]
        p[-1] = pts[-1]
        chords = np.linalg.norm(np.diff(p, axis=0), axis=1)
        mean = chords.mean()
        if mean <= 0.0:
            break
        if (chords.max() - chords.min()) / mean <= target_spread:
            break
        c = np.concatenate([[0.0], np.cumsum(chords)])
        s = np.interp(np.linspace(0.0, c[-1], n), c, s)
        s[0], s[-1] = 0.0, total
        np.maximum.accumulate(s, out=s)
    frac[0], frac[-1] = 0.0, 1.0
    idx[0], idx[-1] = 0, m - 1
    return p, idx, frac


def resample_equal_arclength(dense, n: int) -> np.ndarray:
    """Resample a dense polyline into n points with equal consecutive spacing.

    Points lie on the input polyline; endpoints are preserved; consecutive
    chord spacings agree to TOL.spacing_rel relative.
    """
    points, _, _ = resample_equal_arclength_param(dense, n)
    return points


def spacing_spread(points) -> float:
    """(max - min) / mean of consecutive chord spacings."""
    pts = as_points(points)
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if len(d) == 0 or d.mean() == 0.0:
        return 0.0
    return float((d.max() - d.min()) / d.mean())
