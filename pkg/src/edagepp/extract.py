"""Waypoint extraction from probability maps, path costs, clearance audits.

Extraction walks the map greedily: from the current pixel it moves to the
8-neighbor with the highest probability, never revisiting a pixel, and stops
once it reaches the goal's 8-neighborhood. Ties break on a fixed scan order
(N, NE, E, SE, S, SW, W, NW), so extraction is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DeadEnd, DegenerateInput, StepLimit
from .scene import SceneSpec

# scan order N, NE, E, SE, S, SW, W, NW in (dx, dy) with y growing downward
NEIGHBOR_OFFSETS = ((0, -1), (1, -1), (1, 0), (1, 1),
                    (0, 1), (-1, 1), (-1, 0), (-1, -1))


@dataclass
class ProbabilityMap:
    values: np.ndarray  # (height, width) floats in [0, 1]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise DegenerateInput("probability map must be 2D")
        if not np.isfinite(v).all() or v.min() < 0.0 or v.max() > 1.0:
            raise DegenerateInput("probabilities must be finite and within [0, 1]")
        self.values = v

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @classmethod
    def from_grayscale(cls, pixels) -> "ProbabilityMap":
        """Interpret an 8-bit grayscale image as probabilities (0-255 -> [0,1])."""
        arr = np.asarray(pixels)
        return cls(values=arr.astype(np.float64) / 255.0)


def extract_waypoints(m: ProbabilityMap, start, goal,
                      max_steps: int | None = None) -> list[tuple[int, int]]:
    """Greedy argmax walk over the probability map, in pixel coordinates.

    Returns the pixel sequence from start to goal. Raises DeadEnd when every
    unvisited neighbor has probability zero and StepLimit past the budget.
    """
    sx, sy = int(start[0]), int(start[1])
    gx, gy = int(goal[0]), int(goal[1])
    h, w = m.values.shape
    for x, y, name in ((sx, sy, "start"), (gx, gy, "goal")):
        if not (0 <= x < w and 0 <= y < h):
            raise DegenerateInput(f"{name} pixel ({x}, {y}) outside the map")
    if max_steps is None:
        max_steps = w * h
    if (sx, sy) == (gx, gy):
        return [(sx, sy)]
    values = m.values
    visited = np.zeros((h, w), dtype=bool)
    visited[sy, sx] = True
    path = [(sx, sy)]
    cx, cy = sx, sy
    for _ in range(max_steps):
        if max(abs(cx - gx), abs(cy - gy)) <= 1:
            if (cx, cy) != (gx, gy):
                path.append((gx, gy))
            return path
        best_p = 0.0
        best = None
        for dx, dy in NEIGHBOR_OFFSETS:
            nx, ny = cx + dx, cy + dy
            if 0 <= nx < w and 0 <= ny < h and not visited[ny, nx]:
                p = values[ny, nx]
                if p > best_p:
                    best_p = p
                    best = (nx, ny)
        if best is None:
            raise DeadEnd(f"no unvisited neighbor with p > 0 at ({cx}, {cy})")
        cx, cy = best
        visited[cy, cx] = True
        path.append(best)
    raise StepLimit(f"no goal within {max_steps} steps")


def path_cost(path) -> float:
    """Euclidean length of a point sequence."""
    pts = np.asarray(path, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if len(pts) == 0:
        raise DegenerateInput("empty path")
    if len(pts) == 1:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


@dataclass
class ClearanceReport:
    min_margin: float
    violations: int


def verify_clearance(path, scene: SceneSpec, c: float,
                     step: float = 0.25) -> ClearanceReport:
    """Audit a world-coordinate path against the scene's obstacles.

    Subsamples every segment at most `step` apart; the margin of a sample is
    its distance to the nearest obstacle surface minus c. Violations count
    samples with negative margin; min_margin is +inf without obstacles.
    """
    pts = np.asarray(path, dtype=np.float64).reshape(-1, 2)
    if len(scene.obstacles) == 0:
        return ClearanceReport(min_margin=math.inf, violations=0)
    if len(pts) == 1:
        samples = pts
    else:
        chunks = [pts[:1]]
        for a, b in zip(pts[:-1], pts[1:]):
            n = max(1, int(math.ceil(np.linalg.norm(b - a) / step)))
            t = np.linspace(0.0, 1.0, n + 1)[1:]
            chunks.append(a + t[:, None] * (b - a))
        samples = np.vstack(chunks)
    centers = np.array([o.center for o in scene.obstacles])
    radii = np.array([o.radius for o in scene.obstacles])
    d = np.linalg.norm(samples[:, None, :] - centers[None, :, :], axis=2)
    margins = (d - radii[None, :] - c).min(axis=1)
    return ClearanceReport(min_margin=float(margins.min()),
                           violations=int((margins < 0.0).sum()))
