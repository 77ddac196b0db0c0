"""Baseline sampling-based planners and a grid shortest-path oracle.

rrt_star / informed_rrt_star are anytime: the incumbent cost never increases
with more iterations. Collision checks are exact segment-vs-circle tests in
continuous space with obstacles inflated by the clearance. The oracle runs
8-connected Dijkstra on a clearance-inflated occupancy grid and is the
independent reference for near-optimality checks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as csgraph_dijkstra

from .errors import DegenerateInput
from .scene import SceneSpec

# rewire radius is capped at this many step sizes
REWIRE_STEP_FACTOR = 3.0


@dataclass(frozen=True)
class PlannerConfig:
    step_size: float = 2.0
    goal_bias: float = 0.05
    rewire_gamma: float | None = None  # None: 2 * sqrt(1.5 * area / pi)
    max_iterations: int = 10_000
    max_time: float = 10.0
    clearance: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.step_size > 0:
            raise DegenerateInput("step_size must be positive")
        if not 0.0 <= self.goal_bias <= 1.0:
            raise DegenerateInput("goal_bias must be a probability")


@dataclass
class PlannerResult:
    path: np.ndarray | None
    cost: float
    iterations: int
    elapsed: float
    success: bool
    trace: list[float] = field(default_factory=list, repr=False)


def sample_informed(rng: np.random.Generator, start, goal, c_best: float) -> np.ndarray:
    """Uniform sample from the prolate ellipse with foci start/goal and
    transverse diameter c_best."""
    start = np.asarray(start, float)
    goal = np.asarray(goal, float)
    c_min = float(np.linalg.norm(goal - start))
    c_best = max(c_best, c_min * (1.0 + 1e-12))
    center = (start + goal) / 2.0
    ang = math.atan2(goal[1] - start[1], goal[0] - start[0])
    r1 = c_best / 2.0
    r2 = math.sqrt(max(c_best * c_best - c_min * c_min, 0.0)) / 2.0
    r = math.sqrt(rng.random())
    theta = rng.uniform(0.0, 2.0 * math.pi)
    x, y = r * math.cos(theta) * r1, r * math.sin(theta) * r2
    ca, sa = math.cos(ang), math.sin(ang)
    return center + np.array([ca * x - sa * y, sa * x + ca * y])


class _RrtSearch:
    """Incremental RRT* tree; informed=True switches to ellipse sampling once
    a solution exists."""

    def __init__(self, scene: SceneSpec, cfg: PlannerConfig, informed: bool):
        self.scene = scene
        self.cfg = cfg
        self.informed = informed
        self.rng = np.random.default_rng(cfg.seed)
        self.start = np.asarray(scene.start, float)
        self.goal = np.asarray(scene.goal, float)
        self.bounds = scene.bounds
        k = len(scene.obstacles)
        self.centers = np.array([o.center for o in scene.obstacles]).reshape(k, 2)
        self.inflated = np.array([o.radius for o in scene.obstacles]) + cfg.clearance
        self.inflated2 = self.inflated ** 2
        if not self._point_free(self.start) or not self._point_free(self.goal):
            raise DegenerateInput("start or goal lies in clearance-inflated space")
        area = self.bounds[0] * self.bounds[1]
        self.gamma = cfg.rewire_gamma or 2.0 * math.sqrt(1.5 * area / math.pi)
        cap = cfg.max_iterations + 2
        self.pts = np.empty((cap, 2))
        self.cost = np.empty(cap)
        self.parent = np.full(cap, -1, dtype=np.int64)
        self.children: list[list[int]] = [[] for _ in range(cap)]
        self.pts[0] = self.start
        self.cost[0] = 0.0
        self.n = 1
        self.goal_parents: list[int] = []
        self.goal_hop: dict[int, float] = {}
        self.best_cost = math.inf
        self.trace: list[float] = []
        self.iterations = 0

    # collision machinery -------------------------------------------------
    def _point_free(self, p) -> bool:
        if len(self.centers) == 0:
            return True
        d2 = ((self.centers - p) ** 2).sum(axis=1)
        return bool((d2 >= self.inflated2).all())

    def _segment_free(self, a, b) -> bool:
        if len(self.centers) == 0:
            return True
        v = b - a
        vv = float(v @ v)
        if vv == 0.0:
            return self._point_free(a)
        t = np.clip((self.centers - a) @ v / vv, 0.0, 1.0)
        proj = a + t[:, None] * v
        d2 = ((self.centers - proj) ** 2).sum(axis=1)
        return bool((d2 >= self.inflated2).all())

    def _segments_free(self, ends: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Free flags for the segments (ends[m] -> x), vectorized over m and
        obstacles."""
        if len(self.centers) == 0:
            return np.ones(len(ends), dtype=bool)
        v = x - ends                       # (M, 2)
        vv = np.einsum("mj,mj->m", v, v)
        vv_safe = np.where(vv > 0.0, vv, 1.0)
        u = self.centers[None, :, :] - ends[:, None, :]      # (M, K, 2)
        t = np.clip(np.einsum("mkj,mj->mk", u, v) / vv_safe[:, None], 0.0, 1.0)
        diff = u - t[:, :, None] * v[:, None, :]
        d2 = np.einsum("mkj,mkj->mk", diff, diff)
        return (d2 >= self.inflated2[None, :]).all(axis=1)

    # sampling -------------------------------------------------------------
    def _sample(self) -> np.ndarray:
        w, h = self.bounds
        if self.informed and math.isfinite(self.best_cost):
            for _ in range(100):
                s = sample_informed(self.rng, self.start, self.goal, self.best_cost)
                if 0.0 <= s[0] <= w and 0.0 <= s[1] <= h:
                    return s
            return self.rng.uniform((0.0, 0.0), (w, h))
        if self.rng.random() < self.cfg.goal_bias:
            return self.goal.copy()
        return self.rng.uniform((0.0, 0.0), (w, h))

    # tree maintenance -----------------------------------------------------
    def _propagate_cost(self, root: int, delta: float) -> None:
        stack = [root]
        while stack:
            i = stack.pop()
            self.cost[i] += delta
            stack.extend(self.children[i])

    def step(self) -> None:
        self.iterations += 1
        q = self._sample()
        n = self.n
        d2 = ((self.pts[:n] - q) ** 2).sum(axis=1)
        i_near = int(np.argmin(d2))
        dist = math.sqrt(d2[i_near])
        if dist == 0.0:
            self.trace.append(self.best_cost)
            return
        step = self.cfg.step_size
        x = q if dist <= step else self.pts[i_near] + (q - self.pts[i_near]) * (step / dist)
        if not self._point_free(x):
            self.trace.append(self.best_cost)
            return
        r_near = min(self.gamma * math.sqrt(math.log(n + 1) / (n + 1)),
                     REWIRE_STEP_FACTOR * step)
        r_near = max(r_near, step)
        near = np.flatnonzero(((self.pts[:n] - x) ** 2).sum(axis=1) <= r_near * r_near)
        if len(near) == 0:
            near = np.array([i_near])
        ends = self.pts[near]
        free = self._segments_free(ends, x)
        if not free.any():
            self.trace.append(self.best_cost)
            return
        hop = np.linalg.norm(ends - x, axis=1)
        through = np.where(free, self.cost[near] + hop, np.inf)
        k = int(np.argmin(through))
        new_cost = float(through[k])
        if not math.isfinite(new_cost):
            self.trace.append(self.best_cost)
            return
        i_new = self.n
        self.pts[i_new] = x
        self.cost[i_new] = new_cost
        self.parent[i_new] = int(near[k])
        self.children[near[k]].append(i_new)
        self.n += 1

        # rewire neighbors through the new node
        rewire_cost = new_cost + hop
        for m in range(len(near)):
            i = int(near[m])
            if not free[m] or i == near[k]:
                continue
            if rewire_cost[m] < self.cost[i] - 1e-12:
                old_parent = self.parent[i]
                if old_parent >= 0:
                    self.children[old_parent].remove(i)
                self.parent[i] = i_new
                self.children[i_new].append(i)
                self._propagate_cost(i, rewire_cost[m] - self.cost[i])

        # try to connect the new node to the exact goal point
        d_goal = float(np.linalg.norm(x - self.goal))
        if d_goal <= step and (d_goal == 0.0 or self._segment_free(x, self.goal)):
            self.goal_parents.append(i_new)
            self.goal_hop[i_new] = d_goal
        if self.goal_parents:
            gp = np.fromiter(self.goal_parents, dtype=np.int64)
            hops = np.fromiter((self.goal_hop[i] for i in self.goal_parents), dtype=float)
            best = float((self.cost[gp] + hops).min())
            if best < self.best_cost:
                self.best_cost = best
        self.trace.append(self.best_cost)

    def best_path(self) -> np.ndarray | None:
        if not self.goal_parents:
            return None
        gp = np.fromiter(self.goal_parents, dtype=np.int64)
        hops = np.fromiter((self.goal_hop[i] for i in self.goal_parents), dtype=float)
        best = int(gp[np.argmin(self.cost[gp] + hops)])
        chain = [self.goal]
        i = best
        while i >= 0:
            chain.append(self.pts[i].copy())
            i = int(self.parent[i])
        pts = np.array(chain[::-1])
        if np.array_equal(pts[-1], pts[-2]):
            pts = pts[:-1]
        return pts

    def result(self, elapsed: float, success_override: bool | None = None) -> PlannerResult:
        path = self.best_path()
        success = path is not None if success_override is None else success_override
        if not success:
            path = None
        cost = float(np.linalg.norm(np.diff(path, axis=0), axis=1).sum()) \
            if path is not None else math.inf
        return PlannerResult(path=path, cost=cost, iterations=self.iterations,
                             elapsed=elapsed, success=success, trace=list(self.trace))


def _run(search: _RrtSearch, cfg: PlannerConfig,
         stop_cost: float = -math.inf) -> PlannerResult:
    t0 = time.perf_counter()
    elapsed = 0.0
    while search.iterations < cfg.max_iterations:
        search.step()
        elapsed = time.perf_counter() - t0
        if search.best_cost <= stop_cost:
            return search.result(elapsed)
        if elapsed >= cfg.max_time:
            break
    return search.result(time.perf_counter() - t0)


def rrt_star(scene: SceneSpec, cfg: PlannerConfig) -> PlannerResult:
    """Anytime RRT* with rewiring; unsuccessful result when the budget runs
    out before the goal region is reached."""
    return _run(_RrtSearch(scene, cfg, informed=False), cfg)


def informed_rrt_star(scene: SceneSpec, cfg: PlannerConfig) -> PlannerResult:
    """RRT* that samples the prolate ellipse of the incumbent solution."""
    return _run(_RrtSearch(scene, cfg, informed=True), cfg)


_PLANNERS = {
    "rrt-star": False,
    "rrt_star": False,
    "irrt-star": True,
    "irrt_star": True,
    "informed_rrt_star": True,
    "informed-rrt-star": True,
}


def _informed_flag(planner) -> bool:
    if isinstance(planner, str):
        try:
            return _PLANNERS[planner]
        except KeyError:
            raise DegenerateInput(f"unknown planner {planner!r}") from None
    if planner is rrt_star:
        return False
    if planner is informed_rrt_star:
        return True
    raise DegenerateInput(f"unknown planner {planner!r}")


def run_until_cost(planner, scene: SceneSpec, target_cost: float, margin: float,
                   budget: PlannerConfig) -> PlannerResult:
    """Run an anytime planner until its cost reaches target_cost*(1+margin).

    Success means the threshold was met within the budget; on budget
    exhaustion the result is unsuccessful with elapsed set to the time budget.
    """
    search = _RrtSearch(scene, budget, informed=_informed_flag(planner))
    threshold = target_cost * (1.0 + margin)
    t0 = time.perf_counter()
    while search.iterations < budget.max_iterations:
        search.step()
        if search.best_cost <= threshold:
            return search.result(time.perf_counter() - t0)
        if time.perf_counter() - t0 >= budget.max_time:
            break
    return search.result(budget.max_time, success_override=False)


def grid_dijkstra_oracle(scene: SceneSpec, c: float, resolution: int = 128) -> float:
    """8-connected shortest-path cost on the clearance-inflated occupancy
    grid, in world units; infinite when start and goal are disconnected.

    Diagonal moves are blocked when either orthogonal neighbor is blocked, so
    paths cannot cut obstacle corners.
    """
    if resolution < 64:
        raise DegenerateInput("oracle resolution must be at least 64")
    w, h = scene.bounds
    cw, ch = w / resolution, h / resolution
    xs = (np.arange(resolution) + 0.5) * cw
    ys = (np.arange(resolution) + 0.5) * ch
    blocked = np.zeros((resolution, resolution), dtype=bool)
    for ob in scene.obstacles:
        rr = ob.radius + c
        c0 = max(0, int((ob.center[0] - rr) / cw) - 1)
        c1 = min(resolution - 1, int((ob.center[0] + rr) / cw) + 1)
        r0 = max(0, int((ob.center[1] - rr) / ch) - 1)
        r1 = min(resolution - 1, int((ob.center[1] + rr) / ch) + 1)
        if c1 < c0 or r1 < r0:
            continue
        dx = xs[c0:c1 + 1] - ob.center[0]
        dy = ys[r0:r1 + 1] - ob.center[1]
        blocked[r0:r1 + 1, c0:c1 + 1] |= \
            dx[None, :] ** 2 + dy[:, None] ** 2 <= rr * rr

    def cell_of(p):
        col = min(resolution - 1, max(0, int(p[0] / cw)))
        row = min(resolution - 1, max(0, int(p[1] / ch)))
        return row, col

    sr, sc = cell_of(scene.start)
    gr, gc = cell_of(scene.goal)
    if blocked[sr, sc] or blocked[gr, gc]:
        return math.inf

    free = ~blocked
    idx = np.full(free.shape, -1, dtype=np.int64)
    idx[free] = np.arange(int(free.sum()))
    rows_i, cols_i, weights = [], [], []
    moves = [(0, 1, cw), (1, 0, ch), (1, 1, math.hypot(cw, ch)),
             (1, -1, math.hypot(cw, ch))]
    for dr, dc, wgt in moves:
        r_src = slice(max(0, -dr), resolution - max(0, dr))
        c_src = slice(max(0, -dc), resolution - max(0, dc))
        r_dst = slice(max(0, dr), resolution - max(0, -dr))
        c_dst = slice(max(0, dc), resolution - max(0, -dc))
        ok = free[r_src, c_src] & free[r_dst, c_dst]
        if dr != 0 and dc != 0:
            # no corner cutting: both orthogonal neighbors must be free
            ok &= free[r_dst, c_src] & free[r_src, c_dst]
        a = idx[r_src, c_src][ok]
        b = idx[r_dst, c_dst][ok]
        rows_i.append(a)
        cols_i.append(b)
        weights.append(np.full(len(a), wgt))
    nfree = int(free.sum())
    graph = coo_matrix((np.concatenate(weights),
                        (np.concatenate(rows_i), np.concatenate(cols_i))),
                       shape=(nfree, nfree))
    dist = csgraph_dijkstra(graph, directed=False, indices=idx[sr, sc],
                            min_only=False)
    return float(dist[idx[gr, gc]])
