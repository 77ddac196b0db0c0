import math

import numpy as np
import pytest

from edagepp.constraints import Obstacle
from edagepp.errors import DegenerateInput
from edagepp.geom import Pose2, segment_circle_distance
from edagepp.planners import (PlannerConfig, PlannerResult, _RrtSearch,
                              grid_dijkstra_oracle, informed_rrt_star,
                              rrt_star, run_until_cost, sample_informed)
from edagepp.scene import SceneSpec


def empty_scene(start=(5.0, 5.0), goal=(55.0, 55.0)):
    return SceneSpec(bounds=(64.0, 64.0), start=np.array(start), goal=np.array(goal),
                     obstacles=[], pose=Pose2.identity(), clearance=0.0)


def ring_scene():
    goal = np.array([32.0, 32.0])
    obstacles = [Obstacle(radius=3.0,
                          center=goal + 8.0 * np.array([math.cos(a), math.sin(a)]))
                 for a in np.linspace(0, 2 * math.pi, 12, endpoint=False)]
    return SceneSpec(bounds=(64.0, 64.0), start=np.array([5.0, 5.0]), goal=goal,
                     obstacles=obstacles, pose=Pose2.identity(), clearance=0.5)


def scattered_scene(seed=3, k=12):
    rng = np.random.default_rng(seed)
    obstacles = []
    while len(obstacles) < k:
        center = rng.uniform(8, 56, 2)
        if np.linalg.norm(center - [5, 5]) < 6 or np.linalg.norm(center - [58, 58]) < 6:
            continue
        obstacles.append(Obstacle(radius=float(rng.uniform(1.5, 4.0)), center=center))
    return SceneSpec(bounds=(64.0, 64.0), start=np.array([5.0, 5.0]),
                     goal=np.array([58.0, 58.0]), obstacles=obstacles,
                     pose=Pose2.identity(), clearance=1.0)


def path_min_margin(path, scene, c, step=0.25):
    """Minimum distance-to-surface margin over a densely sampled path."""
    if not scene.obstacles:
        return math.inf
    worst = math.inf
    for a, b in zip(path[:-1], path[1:]):
        n = max(2, int(np.linalg.norm(b - a) / step) + 1)
        t = np.linspace(0, 1, n)
        pts = a + t[:, None] * (b - a)
        for ob in scene.obstacles:
            d = np.linalg.norm(pts - ob.center, axis=1) - ob.radius - c
            worst = min(worst, float(d.min()))
    return worst


class TestRrtStar:
    def test_empty_map_near_optimal(self):
        scene = empty_scene()
        opt = math.hypot(50, 50)
        ok = 0
        for seed in range(20):
            cfg = PlannerConfig(max_iterations=5000, max_time=60.0, seed=seed)
            res = rrt_star(scene, cfg)
            assert res.success
            assert res.cost >= opt - 1e-9
            ok += res.cost <= 1.02 * opt
        assert ok >= 19

    def test_enclosed_goal_no_solution(self):
        res = rrt_star(ring_scene(), PlannerConfig(max_iterations=1500, max_time=5.0, seed=0))
        assert not res.success
        assert res.path is None
        assert math.isinf(res.cost)

    def test_trace_monotone(self):
        res = rrt_star(scattered_scene(), PlannerConfig(max_iterations=2000, seed=5,
                                                        clearance=1.0))
        t = np.array(res.trace)
        assert (np.diff(t[np.isfinite(t)]) <= 1e-12).all()

    def test_result_cost_is_path_length(self):
        res = rrt_star(empty_scene(), PlannerConfig(max_iterations=1200, seed=2))
        assert res.success
        assert res.cost == pytest.approx(
            np.linalg.norm(np.diff(res.path, axis=0), axis=1).sum(), abs=1e-9)
        np.testing.assert_allclose(res.path[0], [5, 5])
        np.testing.assert_allclose(res.path[-1], [55, 55])

    def test_paths_respect_clearance(self):
        scene = scattered_scene()
        for seed in range(5):
            res = rrt_star(scene, PlannerConfig(max_iterations=2500, seed=seed,
                                                clearance=scene.clearance))
            if res.success:
                assert path_min_margin(res.path, scene, scene.clearance) >= -1e-9

    def test_tree_validity(self):
        scene = scattered_scene(seed=9)
        cfg = PlannerConfig(max_iterations=800, seed=3, clearance=scene.clearance)
        search = _RrtSearch(scene, cfg, informed=False)
        for _ in range(800):
            search.step()
        assert (search.pts[0] == scene.start).all()
        centers = search.centers
        infl = search.inflated
        for i in range(1, search.n):
            p = search.parent[i]
            assert 0 <= p < search.n
            d = segment_circle_distance(search.pts[p], search.pts[i], centers)
            assert (d >= infl - 1e-9).all()

    def test_start_in_obstacle_rejected(self):
        scene = scattered_scene()
        bad = SceneSpec(bounds=scene.bounds, start=scene.obstacles[0].center,
                        goal=scene.goal, obstacles=scene.obstacles,
                        pose=Pose2.identity(), clearance=1.0)
        with pytest.raises(DegenerateInput):
            rrt_star(bad, PlannerConfig(max_iterations=100, clearance=1.0))


class TestInformed:
    def test_samples_inside_ellipse(self):
        rng = np.random.default_rng(0)
        start, goal = np.array([5.0, 5.0]), np.array([55.0, 55.0])
        c_best = 80.0
        for _ in range(500):
            s = sample_informed(rng, start, goal, c_best)
            assert np.linalg.norm(s - start) + np.linalg.norm(s - goal) <= c_best + 1e-9

    def test_paired_median_not_worse(self):
        scene = empty_scene()
        rrt_costs, inf_costs = [], []
        for seed in range(10):
            cfg = PlannerConfig(max_iterations=1500, max_time=30.0, seed=seed)
            rrt_costs.append(rrt_star(scene, cfg).cost)
            inf_costs.append(informed_rrt_star(scene, cfg).cost)
        assert np.median(inf_costs) <= np.median(rrt_costs) + 1e-9

    def test_infeasible(self):
        res = informed_rrt_star(ring_scene(),
                                PlannerConfig(max_iterations=1200, max_time=5.0, seed=1))
        assert not res.success


class TestOracle:
    def test_empty_diagonal(self):
        scene = empty_scene()
        cost = grid_dijkstra_oracle(scene, 0.0, 128)
        assert cost == pytest.approx(math.hypot(50, 50), rel=1e-9)

    def test_empty_off_axis_within_metric_bound(self):
        scene = empty_scene(start=(5.0, 5.0), goal=(60.0, 20.0))
        cost = grid_dijkstra_oracle(scene, 0.0, 128)
        euclid = math.hypot(55, 15)
        assert euclid - 0.8 <= cost <= 1.09 * euclid

    def test_wall_with_gap(self):
        # vertical wall of circles at x=32 with one gap near y=40
        obstacles = [Obstacle(radius=2.0, center=np.array([32.0, y]))
                     for y in np.arange(2.0, 63.0, 3.5) if abs(y - 40.0) > 6.0]
        scene = SceneSpec(bounds=(64.0, 64.0), start=np.array([10.0, 10.0]),
                          goal=np.array([54.0, 10.0]), obstacles=obstacles,
                          pose=Pose2.identity(), clearance=0.5)
        cost = grid_dijkstra_oracle(scene, 0.5, 128)
        euclid = 44.0
        assert cost >= euclid
        # forced detour through the gap makes it clearly longer
        assert cost > 1.3 * euclid

    def test_disconnected_infinite(self):
        cost = grid_dijkstra_oracle(ring_scene(), 0.5, 128)
        assert math.isinf(cost)

    def test_resolution_monotonicity(self):
        scene = scattered_scene(seed=12)
        for res0, res1 in ((64, 128), (128, 256)):
            c0 = grid_dijkstra_oracle(scene, 1.0, res0)
            c1 = grid_dijkstra_oracle(scene, 1.0, res1)
            diag0 = math.hypot(64 / res0, 64 / res0)
            assert c1 <= c0 + diag0

    def test_oracle_vs_planner_cross_check(self):
        scene = scattered_scene(seed=21)
        oracle = grid_dijkstra_oracle(scene, 1.0, 128)
        res = rrt_star(scene, PlannerConfig(max_iterations=4000, max_time=20.0,
                                            clearance=1.0, seed=4))
        assert res.success
        diag = math.hypot(0.5, 0.5)
        assert oracle <= res.cost + diag + 0.06 * res.cost

    def test_resolution_floor(self):
        with pytest.raises(DegenerateInput):
            grid_dijkstra_oracle(empty_scene(), 0.0, 32)


class TestRunUntilCost:
    def test_huge_margin_returns_first_solution(self):
        scene = empty_scene()
        budget = PlannerConfig(max_iterations=5000, max_time=30.0, seed=0)
        res = run_until_cost("rrt-star", scene, 1.0, 1e9, budget)
        assert res.success
        assert res.iterations < 5000

    def test_unattainable_target(self):
        scene = empty_scene()
        budget = PlannerConfig(max_iterations=400, max_time=0.5, seed=0)
        res = run_until_cost("rrt-star", scene, 30.0, 0.0, budget)  # below Euclid
        assert not res.success
        assert res.path is None
        assert res.elapsed == pytest.approx(budget.max_time)

    def test_reaches_margin(self):
        scene = empty_scene()
        opt = math.hypot(50, 50)
        budget = PlannerConfig(max_iterations=20000, max_time=30.0, seed=3)
        res = run_until_cost("irrt-star", scene, opt, 0.05, budget)
        assert res.success
        assert res.cost <= 1.05 * opt

    def test_unknown_planner(self):
        with pytest.raises(DegenerateInput):
            run_until_cost("a-star", empty_scene(), 1.0, 0.0, PlannerConfig())
