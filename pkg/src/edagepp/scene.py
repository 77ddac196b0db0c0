"""Scene assembly: pose the path in the world, scatter filler obstacles,
rasterize the triplet, and emit problem records.

Per record the canonical path is rigidly posed at a random rotation and
position (retrying until its corridor hull fits the bounds), the constraint
obstacles follow the same pose, random filler circles are kept only when they
respect the clearance, and the problem image is cleared inside the corridor so
rasterization can never blacken the path's space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .constraints import (Obstacle, collision_free_many, find_subspaces,
                          place_constraint_obstacles)
from .corridor import (CorridorBoundary, RasterConfig, RasterMask,
                       calcu_boundary, rasterize_corridor, rasterize_waypoints)
from .errors import GenerationFailed, TimesExceeded
from .geom import ConvexHull, Pose2, apply_pose, convex_hull, polyline_length
from .pathgen import PathGenConfig, PathPolyline, generate_path, transform_path

log = logging.getLogger(__name__)

FREE_COLOR = (255, 255, 255)
OBSTACLE_COLOR = (0, 0, 0)
MARKER_COLOR = (255, 0, 0)


@dataclass(frozen=True)
class GeneratorConfig:
    """Everything that determines a generated dataset."""

    pathgen: PathGenConfig = field(default_factory=PathGenConfig)
    raster: RasterConfig = field(default_factory=RasterConfig)
    clearance: float = 3.0
    filler_radius: tuple[float, float] = (1.0, 6.0)
    marker_side: int = 5
    max_obstacles: int = 50
    paths: int = 250              # n_P
    records_per_path: int = 4     # n_I
    pose_max_tries: int = 100
    path_retries: int = 20
    gap_factor: float = 3.0
    seed: int = 42

    @property
    def bounds(self) -> tuple[float, float]:
        return (self.raster.world_width, self.raster.world_height)


@dataclass
class SceneSpec:
    """A planning problem: bounds, endpoints, obstacles, and provenance pose."""

    bounds: tuple[float, float]
    start: np.ndarray
    goal: np.ndarray
    obstacles: list[Obstacle]
    pose: Pose2
    clearance: float


@dataclass
class ProblemRecord:
    scene: SceneSpec
    problem_image: np.ndarray      # (H, W, 3) uint8
    space_mask: RasterMask
    waypoint_mask: RasterMask
    solution: PathPolyline
    solution_cost: float
    seed: int


def record_seed(global_seed: int, path_index: int, attempt: int, record_index: int) -> int:
    ss = np.random.SeedSequence((global_seed, path_index, attempt, record_index))
    return int(ss.generate_state(1)[0])


def random_pose_in_bounds(hull: ConvexHull, bounds, rng: np.random.Generator,
                          max_tries: int) -> Pose2:
    """Sample poses until every hull vertex lands strictly inside the bounds.

    The hull is rotated about its vertex centroid, which is placed uniformly
    in the bounds; raises TimesExceeded when no try fits.
    """
    verts = hull.vertices
    centroid = verts.mean(axis=0)
    w, h = bounds
    for _ in range(max_tries):
        target = rng.uniform((0.0, 0.0), (w, h))
        angle = rng.uniform(0.0, 2.0 * math.pi)
        pose = Pose2(angle, np.zeros(2))
        pose = Pose2(angle, target - pose.rotation @ centroid)
        posed = apply_pose(verts, pose)
        if (posed[:, 0] > 0.0).all() and (posed[:, 0] < w).all() \
                and (posed[:, 1] > 0.0).all() and (posed[:, 1] < h).all():
            return pose
    raise TimesExceeded(f"no pose fit the bounds in {max_tries} tries")


def scatter_filler_obstacles(posed_path: PathPolyline, c: float, bounds,
                             rng: np.random.Generator, max_total: int,
                             radius_range: tuple[float, float] = (1.0, 6.0)) -> list[Obstacle]:
    """Uniform random circles, keeping only the clearance-respecting ones."""
    if max_total <= 0:
        return []
    w, h = bounds
    centers = rng.uniform((0.0, 0.0), (w, h), size=(max_total, 2))
    radii = rng.uniform(radius_range[0], radius_range[1], size=max_total)
    keep = collision_free_many(posed_path, centers, radii, c)
    return [Obstacle(radius=float(r), center=ctr, role="filler")
            for r, ctr, k in zip(radii, centers, keep) if k]


def _draw_disc(img: np.ndarray, center, radius: float, cfg: RasterConfig, color) -> None:
    tr = cfg.transform
    px, py = tr.to_pixels(np.asarray(center).reshape(1, 2))[0]
    rx = radius * tr.sx
    ry = radius * tr.sy
    c0 = max(0, int(math.floor(px - rx - 1)))
    c1 = min(cfg.width - 1, int(math.ceil(px + rx + 1)))
    r0 = max(0, int(math.floor(py - ry - 1)))
    r1 = min(cfg.height - 1, int(math.ceil(py + ry + 1)))
    if c1 < c0 or r1 < r0:
        return
    cols = np.arange(c0, c1 + 1) + 0.5
    rows = np.arange(r0, r1 + 1) + 0.5
    dx = (cols - px) / tr.sx
    dy = (rows - py) / tr.sy
    inside = dx[None, :] ** 2 + dy[:, None] ** 2 <= radius * radius
    img[r0:r1 + 1, c0:c1 + 1][inside] = color


def _draw_marker(img: np.ndarray, point, cfg: RasterConfig, side: int) -> None:
    px = cfg.transform.to_pixels(np.asarray(point).reshape(1, 2))[0]
    cc, rc = int(px[0]), int(px[1])
    half = side // 2
    r0, r1 = max(0, rc - half), min(cfg.height - 1, rc + half)
    c0, c1 = max(0, cc - half), min(cfg.width - 1, cc + half)
    img[r0:r1 + 1, c0:c1 + 1] = MARKER_COLOR


def encode_problem_image(scene: SceneSpec, cfg: RasterConfig, marker_side: int = 5,
                         space_mask: RasterMask | None = None) -> np.ndarray:
    """RGB problem image: white free space, black obstacle discs, red markers.

    When a space mask is given, obstacle pixels inside the corridor's free
    region are forced back to free before the markers are drawn, so the
    path's space stays obstacle-free in the image.
    """
    img = np.full((cfg.height, cfg.width, 3), 255, dtype=np.uint8)
    for ob in scene.obstacles:
        _draw_disc(img, ob.center, ob.radius, cfg, OBSTACLE_COLOR)
    if space_mask is not None:
        black = (img == 0).all(axis=2)
        img[black & (space_mask.bits == 255)] = FREE_COLOR
    _draw_marker(img, scene.start, cfg, marker_side)
    _draw_marker(img, scene.goal, cfg, marker_side)
    return img


def assemble_scene(path: PathPolyline, boundary: CorridorBoundary,
                   constraint_obs: list[Obstacle], cfg: GeneratorConfig,
                   rng: np.random.Generator, seed: int = 0) -> ProblemRecord:
    """Pose everything into the world and build one problem record."""
    hull = convex_hull(boundary.all_points())
    pose = random_pose_in_bounds(hull, cfg.bounds, rng, cfg.pose_max_tries)

    posed_path = transform_path(path, pose)
    posed_boundary = CorridorBoundary(
        upper=apply_pose(boundary.upper, pose),
        lower=apply_pose(boundary.lower, pose),
        start_cap=apply_pose(boundary.start_cap, pose),
        end_cap=apply_pose(boundary.end_cap, pose),
        clearance=boundary.clearance,
        center=posed_path.points,
    )
    posed_constraint = [Obstacle(radius=o.radius,
                                 center=apply_pose(o.center, pose)[0],
                                 role="constraint")
                        for o in constraint_obs]
    filler = scatter_filler_obstacles(posed_path, cfg.clearance, cfg.bounds, rng,
                                      cfg.max_obstacles - len(posed_constraint),
                                      cfg.filler_radius)
    scene = SceneSpec(bounds=cfg.bounds, start=posed_path.points[0],
                      goal=posed_path.points[-1],
                      obstacles=posed_constraint + filler, pose=pose,
                      clearance=cfg.clearance)
    space_mask = rasterize_corridor(posed_boundary, cfg.raster)
    waypoint_mask = rasterize_waypoints(posed_path, cfg.raster)
    image = encode_problem_image(scene, cfg.raster, cfg.marker_side, space_mask)
    cost = polyline_length(posed_path.points)
    return ProblemRecord(scene=scene, problem_image=image, space_mask=space_mask,
                         waypoint_mask=waypoint_mask, solution=posed_path,
                         solution_cost=cost, seed=seed)


def generate_path_records(cfg: GeneratorConfig, path_index: int) -> list[ProblemRecord]:
    """All records for one path index; regenerates the path when posing fails."""
    last_err = None
    for attempt in range(cfg.path_retries):
        rng_path = np.random.default_rng(
            np.random.SeedSequence((cfg.seed, path_index, attempt)))
        try:
            path = generate_path(cfg.pathgen, rng_path)
            boundary = calcu_boundary(path, cfg.clearance, cfg.pathgen.cap_samples)
            subspaces = find_subspaces(path, cfg.gap_factor * path.spacing)
            constraint = place_constraint_obstacles(path, cfg.clearance, subspaces,
                                                    rng_path, cfg.max_obstacles)
            records = []
            for i in range(cfg.records_per_path):
                rseed = record_seed(cfg.seed, path_index, attempt, i)
                rec_rng = np.random.default_rng(rseed)
                records.append(assemble_scene(path, boundary, constraint, cfg,
                                              rec_rng, seed=rseed))
            return records
        except (TimesExceeded, GenerationFailed) as err:
            last_err = err
            continue
    raise GenerationFailed(
        f"path {path_index} failed after {cfg.path_retries} attempts: {last_err}")
