import math

import numpy as np

from edagepp.geom import Pose2
from edagepp.pathgen import PathPolyline, PolySegment


def make_straight_path(x0=10.0, y0=32.0, length=30.0, n=64):
    """Horizontal straight path heading +x, built by hand."""
    xs = np.linspace(x0, x0 + length, n)
    points = np.column_stack([xs, np.full(n, y0)])
    tangents = np.tile([1.0, 0.0], (n, 1))
    seg = PolySegment(coeffs=np.array([y0]), domain=(x0, x0 + length))
    return PathPolyline(points=points, gradients=np.zeros(n), tangents=tangents,
                        spacing=length / (n - 1), segment_poses=[Pose2.identity()],
                        segment_count=1, segments=[seg],
                        segment_index=np.zeros(n, dtype=int), local_x=xs.copy())


def path_from_polyline(points):
    """Wrap an equally spaced polyline as a PathPolyline (tangents by finite
    differences); good enough for corridor and constraint fixtures."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    d = np.diff(pts, axis=0)
    t = np.vstack([d[0], (d[:-1] + d[1:]) / 2, d[-1]])
    t = t / np.linalg.norm(t, axis=1, keepdims=True)
    spacing = float(np.linalg.norm(d, axis=1).mean())
    grads = np.where(np.abs(t[:, 0]) > 1e-12, t[:, 1] / np.where(t[:, 0] == 0, 1, t[:, 0]), 0.0)
    return PathPolyline(points=pts, gradients=grads, tangents=t, spacing=spacing,
                        segment_poses=[Pose2.identity()], segment_count=1,
                        segments=[], segment_index=np.zeros(n, dtype=int),
                        local_x=pts[:, 0].copy())


def make_u_path(width=24.0, depth=18.0, step=0.5, cx=32.0, cy=32.0):
    """U-shaped path of three straight legs with uniform spacing.

    Opens upward: down the left leg, across the bottom, up the right leg.
    The opening chord spans `width` at the top.
    """
    left_x = cx - width / 2
    right_x = cx + width / 2
    top_y = cy + depth / 2
    bot_y = cy - depth / 2
    pts = []
    y = top_y
    while y > bot_y + 1e-9:
        pts.append((left_x, y))
        y -= step
    x = left_x
    while x < right_x - 1e-9:
        pts.append((x, bot_y))
        x += step
    y = bot_y
    while y < top_y - 1e-9:
        pts.append((right_x, y))
        y += step
    pts.append((right_x, top_y))
    return path_from_polyline(pts)
