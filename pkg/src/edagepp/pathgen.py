"""Random path synthesis from concatenated polynomial curves.

Each curve is the least-squares fit of a random point cloud, sampled at equal
chord spacing; consecutive curves are rotated so tangent directions match at
the junctions and translated so the junctions coincide. The result is an
analytic solution path together with its per-waypoint tangent data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .errors import DegenerateInput, GenerationFailed, SingularFit
from .geom import Pose2, apply_pose

DENSE_PER_CURVE = 1024  # arc-table resolution per curve, >= 512 by design


@dataclass(frozen=True)
class PathGenConfig:
    # low order and a flat, well-sampled fit box keep the curves gentle at
    # world scale; wigglier settings let planners undercut the solutions
    order: int = 2
    curves: int = 3
    points_per_curve: int = 64
    cap_samples: int = 16
    fit_sample_count: int = 24
    fit_box: tuple[float, float] = (24.0, 4.0)
    # concatenated paths are similarity-rescaled to a random length in this
    # range so they always fit the world and costs land in a stable band
    target_length: tuple[float, float] = (28.0, 48.0)
    seed: int = 0
    max_retries: int = 20

    def __post_init__(self):
        if self.order < 1 or self.curves < 1:
            raise DegenerateInput("order and curves must be >= 1")
        if self.points_per_curve < 2 or self.cap_samples < 4:
            raise DegenerateInput("points_per_curve >= 2 and cap_samples >= 4 required")
        if self.fit_sample_count < self.order + 1:
            raise DegenerateInput("fit_sample_count must be at least order + 1")


@dataclass(frozen=True)
class PolySegment:
    """One polynomial curve y(x) over a closed x-domain, ascending coefficients."""

    coeffs: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        object.__setattr__(self, "coeffs", c)
        lo, hi = self.domain
        if not hi > lo:
            raise DegenerateInput("segment domain is degenerate")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def eval(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def deriv(self, x):
        dc = np.polynomial.polynomial.polyder(self.coeffs)
        return np.polynomial.polynomial.polyval(x, dc)


@dataclass
class PathPolyline:
    """Equally spaced waypoints of the concatenated path plus tangent data.

    gradients hold dy/dx in each waypoint's curve-local frame; tangents are
    the rotation-covariant unit tangent vectors in world coordinates.
    """

    points: np.ndarray
    gradients: np.ndarray
    tangents: np.ndarray
    spacing: float
    segment_poses: list[Pose2]
    segment_count: int
    segments: list[PolySegment] = field(default_factory=list)
    segment_index: np.ndarray | None = None
    local_x: np.ndarray | None = None

    @property
    def length(self) -> float:
        return self.spacing * (len(self.points) - 1)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def goal(self) -> np.ndarray:
        return self.points[-1]


def fit_polynomial(xs, ys, order: int) -> np.ndarray:
    """Least-squares fit; raises SingularFit when the system is rank-deficient."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    v = np.vander(xs, order + 1, increasing=True)
    coeffs, _res, rank, _sv = np.linalg.lstsq(v, ys, rcond=None)
    if rank < order + 1:
        raise SingularFit(f"rank {rank} < {order + 1}")
    return coeffs


def random_poly_segment(cfg: PathGenConfig, rng: np.random.Generator) -> PolySegment:
    """Fit a degree-r polynomial to uniform random samples from the fit box."""
    w, h = cfg.fit_box
    for _ in range(10):
        xs = rng.uniform(-w / 2, w / 2, cfg.fit_sample_count)
        ys = rng.uniform(-h / 2, h / 2, cfg.fit_sample_count)
        try:
            coeffs = fit_polynomial(xs, ys, cfg.order)
        except SingularFit:
            continue
        return PolySegment(coeffs=coeffs, domain=(-w / 2, w / 2))
    raise SingularFit("could not fit a non-singular polynomial in 10 draws")


def _equalize_on_curves(segments: list[PolySegment], poses: list[Pose2], n_total: int,
                        max_iters: int = 400, target_spread: float = 1e-8):
    """Place n_total points on the posed curves with equal consecutive chords.

    Points are always evaluated exactly on the polynomial curves; a dense
    chord table only steers the fixed-point iteration. Returns
    (points, seg_idx, local_x, spread).
    """
    l = len(segments)
    d = DENSE_PER_CURVE
    xd = np.empty((l, d))
    dense_world = []
    for i, (seg, pose) in enumerate(zip(segments, poses)):
        xd[i] = np.linspace(seg.domain[0], seg.domain[1], d)
        local = np.column_stack([xd[i], seg.eval(xd[i])])
        world = apply_pose(local, pose)
        dense_world.append(world if i == 0 else world[1:])
    dense = np.vstack(dense_world)
    seglen = np.linalg.norm(np.diff(dense, axis=0), axis=1)
    if not (seglen > 0).all():
        raise DegenerateInput("degenerate dense sampling of curve")
    cum = np.concatenate([[0.0], np.cumsum(seglen)])
    total = cum[-1]
    m = len(seglen)  # == l * (d - 1)

    rot_cos = np.array([math.cos(p.angle) for p in poses])
    rot_sin = np.array([math.sin(p.angle) for p in poses])
    trans = np.array([p.translation for p in poses])

    def locate(s):
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, m - 1)
        u = (s - cum[k]) / seglen[k]
        seg_idx = k // (d - 1)
        j = k % (d - 1)
        xa = xd[seg_idx, j]
        xb = xd[seg_idx, j + 1]
        return seg_idx, xa + u * (xb - xa)

    def eval_world(seg_idx, xloc):
        pts = np.empty((len(xloc), 2))
        for i in range(l):
            mask = seg_idx == i
            if not mask.any():
                continue
            x = xloc[mask]
            y = segments[i].eval(x)
            pts[mask, 0] = rot_cos[i] * x - rot_sin[i] * y + trans[i, 0]
            pts[mask, 1] = rot_sin[i] * x + rot_cos[i] * y + trans[i, 1]
        return pts

    s = np.linspace(0.0, total, n_total)
    spread = math.inf
    seg_idx = np.zeros(n_total, dtype=np.int64)
    xloc = np.zeros(n_total)
    pts = np.zeros((n_total, 2))
    for _ in range(max_iters):
        s[0], s[-1] = 0.0, total
        np.maximum.accumulate(s, out=s)
        seg_idx, xloc = locate(s)
        pts = eval_world(seg_idx, xloc)
        chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        mean = chords.mean()
        if mean <= 0.0:
            raise DegenerateInput("curve collapsed to a point")
        spread = (chords.max() - chords.min()) / mean
        if spread <= target_spread:
            break
        c = np.concatenate([[0.0], np.cumsum(chords)])
        s = np.interp(np.linspace(0.0, c[-1], n_total), c, s)
    return pts, seg_idx, xloc, spread


def sample_segment(seg: PolySegment, n: int):
    """Sample one curve at equal chord spacing.

    Returns (points, gradients): n points exactly on the curve and the
    analytic derivative dy/dx at each of them.
    """
    if n < 2:
        raise DegenerateInput("need n >= 2 samples")
    pts, _idx, xloc, _spread = _equalize_on_curves([seg], [Pose2.identity()], n)
    return pts, seg.deriv(xloc)


def concat_segments(segments: list[PolySegment], cfg: PathGenConfig) -> PathPolyline:
    """Chain curves with tangent-aligned junctions and resample globally.

    Curve i is rotated so its start tangent matches curve i-1's end tangent in
    world coordinates, then translated so its first point lands on curve i-1's
    last point.
    """
    if not segments:
        raise DegenerateInput("need at least one segment")
    poses = [Pose2.identity()]
    prev = segments[0]
    prev_end_local = np.array([prev.domain[1], float(prev.eval(prev.domain[1]))])
    prev_end_world = prev_end_local.copy()
    for i in range(1, len(segments)):
        cur = segments[i]
        grad_end_prev = float(prev.deriv(prev.domain[1]))
        grad_start_cur = float(cur.deriv(cur.domain[0]))
        angle = poses[i - 1].angle + math.atan(grad_end_prev) - math.atan(grad_start_cur)
        rot = Pose2(angle, np.zeros(2)).rotation
        start_local = np.array([cur.domain[0], float(cur.eval(cur.domain[0]))])
        translation = prev_end_world - rot @ start_local
        pose = Pose2(angle, translation)
        poses.append(pose)
        prev = cur
        prev_end_local = np.array([cur.domain[1], float(cur.eval(cur.domain[1]))])
        prev_end_world = apply_pose(prev_end_local, pose)[0]

    n_total = cfg.points_per_curve * len(segments)
    pts, seg_idx, xloc, spread = _equalize_on_curves(segments, poses, n_total)
    gradients = np.empty(n_total)
    tangents = np.empty((n_total, 2))
    for i, seg in enumerate(segments):
        mask = seg_idx == i
        if not mask.any():
            continue
        g = seg.deriv(xloc[mask])
        gradients[mask] = g
        theta = poses[i].angle + np.arctan(g)
        tangents[mask, 0] = np.cos(theta)
        tangents[mask, 1] = np.sin(theta)
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return PathPolyline(points=pts, gradients=gradients, tangents=tangents,
                        spacing=float(chords.mean()), segment_poses=poses,
                        segment_count=len(segments), segments=list(segments),
                        segment_index=seg_idx, local_x=xloc)


def continuity_report(path: PathPolyline):
    """Max junction gap, max junction tangent mismatch (rad), spacing spread."""
    gaps = [0.0]
    tangent_errs = [0.0]
    for i in range(1, path.segment_count):
        prev = path.segments[i - 1]
        cur = path.segments[i]
        prev_pose = path.segment_poses[i - 1]
        cur_pose = path.segment_poses[i]
        p_end = apply_pose([[prev.domain[1], float(prev.eval(prev.domain[1]))]], prev_pose)[0]
        p_start = apply_pose([[cur.domain[0], float(cur.eval(cur.domain[0]))]], cur_pose)[0]
        gaps.append(float(np.linalg.norm(p_end - p_start)))
        a_end = prev_pose.angle + math.atan(float(prev.deriv(prev.domain[1])))
        a_start = cur_pose.angle + math.atan(float(cur.deriv(cur.domain[0])))
        tangent_errs.append(abs(math.remainder(a_end - a_start, math.tau)))
    chords = np.linalg.norm(np.diff(path.points, axis=0), axis=1)
    spread = float((chords.max() - chords.min()) / chords.mean())
    return max(gaps), max(tangent_errs), spread


def generate_path(cfg: PathGenConfig, rng: np.random.Generator) -> PathPolyline:
    """Draw random curves and concatenate them into a valid path.

    Retries with fresh curves when the fit is singular or the equal-spacing
    iteration fails to converge; raises GenerationFailed past the budget.
    """
    last_err = None
    for _ in range(cfg.max_retries):
        target = rng.uniform(*cfg.target_length)
        try:
            segments = [random_poly_segment(cfg, rng) for _ in range(cfg.curves)]
            path = concat_segments(segments, cfg)
        except (SingularFit, DegenerateInput) as err:
            last_err = err
            continue
        _rescale(path, target / path.length)
        gap, tangent_err, spread = continuity_report(path)
        if (gap <= TOL.junction_gap and tangent_err <= TOL.junction_tangent
                and spread <= TOL.spacing_rel):
            return _recenter(path)
        last_err = GenerationFailed(
            f"continuity check failed: gap={gap:.2e} tangent={tangent_err:.2e} "
            f"spread={spread:.2e}")
    raise GenerationFailed(f"no valid path in {cfg.max_retries} attempts: {last_err}")


def _rescale(path: PathPolyline, k: float) -> None:
    """Uniformly scale the path about the origin.

    A similarity transform keeps slopes, so junction alignment and the local
    gradients are unchanged; the polynomial segments are rescaled alongside
    (y = k * f(x / k) is again a polynomial).
    """
    path.points = path.points * k
    path.spacing = path.spacing * k
    path.local_x = path.local_x * k
    path.segment_poses = [Pose2(p.angle, p.translation * k) for p in path.segment_poses]
    powers = None
    scaled = []
    for seg in path.segments:
        if powers is None or len(powers) != len(seg.coeffs):
            powers = np.arange(len(seg.coeffs))
        coeffs = seg.coeffs * k ** (1.0 - powers)
        scaled.append(PolySegment(coeffs=coeffs,
                                  domain=(seg.domain[0] * k, seg.domain[1] * k)))
    path.segments = scaled


def transform_path(path: PathPolyline, pose: Pose2) -> PathPolyline:
    """Rigidly transform a path into a new frame (returns a new PathPolyline)."""
    rot = pose.rotation
    return PathPolyline(
        points=path.points @ rot.T + pose.translation,
        gradients=path.gradients.copy(),
        tangents=path.tangents @ rot.T,
        spacing=path.spacing,
        segment_poses=[pose.compose(p) for p in path.segment_poses],
        segment_count=path.segment_count,
        segments=list(path.segments),
        segment_index=None if path.segment_index is None else path.segment_index.copy(),
        local_x=None if path.local_x is None else path.local_x.copy(),
    )


def _recenter(path: PathPolyline) -> PathPolyline:
    """Translate the path so its bounding-box center sits at the origin."""
    lo = path.points.min(axis=0)
    hi = path.points.max(axis=0)
    shift = (lo + hi) / 2.0
    path.points = path.points - shift
    path.segment_poses = [Pose2(p.angle, p.translation - shift) for p in path.segment_poses]
    return path
