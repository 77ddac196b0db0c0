"""Clearance corridor construction and rasterization.

The corridor boundary offsets every waypoint by the clearance c along the
path normal on both sides and closes the ends with circular caps. The free
mask is produced by setting free all pixels on the segments between paired
boundary points, supersampled so high-curvature sections leave no pinholes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidClearance, OutOfRaster
from .pathgen import PathPolyline

# sampling step used when stamping segments into the raster, in pixels
SAMPLE_STEP_PX = 0.4


@dataclass(frozen=True)
class WorldToPixel:
    """Affine world -> pixel map: px = x * sx + ox, py = y * sy + oy."""

    sx: float
    sy: float
    ox: float = 0.0
    oy: float = 0.0

    def to_pixels(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        out = np.empty_like(pts)
        out[..., 0] = pts[..., 0] * self.sx + self.ox
        out[..., 1] = pts[..., 1] * self.sy + self.oy
        return out

    def to_world(self, pixels) -> np.ndarray:
        px = np.asarray(pixels, dtype=np.float64)
        out = np.empty_like(px)
        out[..., 0] = (px[..., 0] - self.ox) / self.sx
        out[..., 1] = (px[..., 1] - self.oy) / self.sy
        return out


@dataclass(frozen=True)
class RasterConfig:
    width: int = 224
    height: int = 224
    world_width: float = 64.0
    world_height: float = 64.0

    @property
    def transform(self) -> WorldToPixel:
        return WorldToPixel(self.width / self.world_width,
                            self.height / self.world_height)

    @property
    def pixel_area_world(self) -> float:
        return (self.world_width / self.width) * (self.world_height / self.height)


@dataclass
class RasterMask:
    width: int
    height: int
    bits: np.ndarray  # (height, width) uint8 in {0, 255}
    world_to_pixel: WorldToPixel

    @classmethod
    def blank(cls, cfg: RasterConfig) -> "RasterMask":
        return cls(cfg.width, cfg.height,
                   np.zeros((cfg.height, cfg.width), dtype=np.uint8),
                   cfg.transform)

    @property
    def free_count(self) -> int:
        return int((self.bits == 255).sum())

    def is_subset_of(self, other: "RasterMask") -> bool:
        return bool((other.bits[self.bits == 255] == 255).all())


@dataclass
class CorridorBoundary:
    """Offset boundary of a path's space: upper/lower bands plus end caps.

    center holds the waypoints the boundary was offset from; the pair fill
    needs the start/end points and the exact center line.
    """

    upper: np.ndarray
    lower: np.ndarray
    start_cap: np.ndarray
    end_cap: np.ndarray
    clearance: float
    center: np.ndarray

    def all_points(self) -> np.ndarray:
        return np.vstack([self.upper, self.lower, self.start_cap, self.end_cap])


def calcu_boundary(path: PathPolyline, c: float, cap_samples: int = 16) -> CorridorBoundary:
    """Offset the path by c along both normals and add circular end caps.

    The "upper" side is the +normal side, where the normal is the tangent
    rotated 90 degrees counter-clockwise. Caps sweep the half circle between
    the first (last) upper and lower boundary points, uniformly in angle.
    """
    if not c > 0:
        raise InvalidClearance(f"clearance must be > 0, got {c}")
    t = path.tangents
    normals = np.column_stack([-t[:, 1], t[:, 0]])
    upper = path.points + c * normals
    lower = path.points - c * normals

    beta = np.linspace(0.0, math.pi, cap_samples)

    def cap(center, normal, sweep_sign):
        ang = np.arctan2(normal[1], normal[0]) + sweep_sign * beta
        return center + c * np.column_stack([np.cos(ang), np.sin(ang)])

    start_cap = cap(path.points[0], normals[0], +1.0)
    end_cap = cap(path.points[-1], normals[-1], -1.0)
    return CorridorBoundary(upper=upper, lower=lower, start_cap=start_cap,
                            end_cap=end_cap, clearance=c,
                            center=path.points.copy())


def _check_in_raster(points, cfg: RasterConfig, what: str) -> np.ndarray:
    px = cfg.transform.to_pixels(points)
    ok = ((px[:, 0] >= 0.0) & (px[:, 0] < cfg.width)
          & (px[:, 1] >= 0.0) & (px[:, 1] < cfg.height))
    if not ok.all():
        raise OutOfRaster(f"{what} maps outside the {cfg.width}x{cfg.height} raster")
    return px


def _stamp_segments(bits: np.ndarray, pa: np.ndarray, pb: np.ndarray) -> None:
    """Mark every pixel along each pixel-space segment (sampled densely)."""
    if len(pa) == 0:
        return
    lens = np.linalg.norm(pb - pa, axis=1)
    steps = max(2, int(math.ceil(lens.max() / SAMPLE_STEP_PX)) + 1)
    t = np.linspace(0.0, 1.0, steps)
    pts = pa[:, None, :] + t[None, :, None] * (pb - pa)[:, None, :]
    cols = np.floor(pts[..., 0]).astype(np.intp).ravel()
    rows = np.floor(pts[..., 1]).astype(np.intp).ravel()
    bits[rows, cols] = 255


def _stamp_polyline(bits: np.ndarray, points_px: np.ndarray) -> None:
    _stamp_segments(bits, points_px[:-1], points_px[1:])


def _fill_convex(bits: np.ndarray, poly: np.ndarray) -> None:
    """Set free every pixel whose center lies inside a convex pixel-space polygon."""
    ys = poly[:, 1]
    # half-open coverage: centers on the min edge count, on the max edge don't
    r0 = max(0, int(math.ceil(ys.min() - 0.5)))
    r1 = min(bits.shape[0] - 1, int(math.ceil(ys.max() - 0.5)) - 1)
    if r1 < r0:
        return
    rows = np.arange(r0, r1 + 1)
    yc = rows + 0.5
    k = len(poly)
    xmin = np.full(len(rows), np.inf)
    xmax = np.full(len(rows), -np.inf)
    for i in range(k):
        p = poly[i]
        q = poly[(i + 1) % k]
        dy = q[1] - p[1]
        if dy == 0.0:
            on = yc == p[1]
            if on.any():
                xmin[on] = np.minimum(xmin[on], min(p[0], q[0]))
                xmax[on] = np.maximum(xmax[on], max(p[0], q[0]))
            continue
        t = (yc - p[1]) / dy
        hit = (t >= 0.0) & (t <= 1.0)
        x = p[0] + t * (q[0] - p[0])
        xmin[hit] = np.minimum(xmin[hit], x[hit])
        xmax[hit] = np.maximum(xmax[hit], x[hit])
    valid = np.isfinite(xmin) & np.isfinite(xmax)
    if not valid.any():
        return
    c0 = np.ceil(xmin[valid] - 0.5).astype(np.intp)
    c1 = np.ceil(xmax[valid] - 0.5).astype(np.intp) - 1
    np.clip(c0, 0, bits.shape[1] - 1, out=c0)
    np.clip(c1, 0, bits.shape[1] - 1, out=c1)
    for r, a, b in zip(rows[valid], c0, c1):
        if b >= a:
            bits[r, a:b + 1] = 255


def rasterize_corridor(boundary: CorridorBoundary, cfg: RasterConfig) -> RasterMask:
    """Fill the corridor mask from the paired boundary points.

    The space between consecutive pairs (upper_j, lower_j) is a quad and the
    space between consecutive cap rays is a triangle; a pixel is set free when
    its center is covered. Raises OutOfRaster when the boundary leaves the
    raster.
    """
    up = _check_in_raster(boundary.upper, cfg, "upper boundary")
    lo = _check_in_raster(boundary.lower, cfg, "lower boundary")
    sc = _check_in_raster(boundary.start_cap, cfg, "start cap")
    ec = _check_in_raster(boundary.end_cap, cfg, "end cap")
    ct = _check_in_raster(boundary.center, cfg, "center line")

    mask = RasterMask.blank(cfg)
    bits = mask.bits
    for j in range(len(up) - 1):
        _fill_convex(bits, np.array([up[j], up[j + 1], lo[j + 1], lo[j]]))
    for center, cap_px in ((ct[0], sc), (ct[-1], ec)):
        for j in range(len(cap_px) - 1):
            _fill_convex(bits, np.array([center, cap_px[j], cap_px[j + 1]]))

    # the path itself is interior to the corridor; stamping it keeps the
    # waypoint mask a pixelwise subset of the space mask by construction
    _stamp_polyline(bits, ct)
    return mask


def rasterize_waypoints(path: PathPolyline, cfg: RasterConfig) -> RasterMask:
    """1-pixel-wide mask of the solution polyline."""
    px = _check_in_raster(path.points, cfg, "waypoints")
    mask = RasterMask.blank(cfg)
    _stamp_polyline(mask.bits, px)
    return mask
