import math

import numpy as np
import pytest

from edagepp.constraints import Obstacle
from edagepp.corridor import RasterConfig, calcu_boundary
from edagepp.errors import TimesExceeded
from edagepp.geom import Pose2, convex_hull, points_polyline_distance
from edagepp.pathgen import PathGenConfig, generate_path
from edagepp.scene import (GeneratorConfig, SceneSpec, assemble_scene,
                           encode_problem_image, generate_path_records,
                           random_pose_in_bounds, scatter_filler_obstacles)

RASTER = RasterConfig()
BOUNDS = (64.0, 64.0)


def tiny_hull():
    return convex_hull([(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)])


class TestRandomPose:
    def test_tiny_hull_smoke(self):
        hull = tiny_hull()
        for seed in range(100):
            rng = np.random.default_rng(seed)
            pose = random_pose_in_bounds(hull, BOUNDS, rng, max_tries=50)
            posed = hull.vertices @ pose.rotation.T + pose.translation
            assert (posed > 0).all() and (posed < 64).all()

    def test_impossible_fit(self):
        hull = convex_hull([(0, 0), (100, 0), (100, 100), (0, 100)])
        with pytest.raises(TimesExceeded):
            random_pose_in_bounds(hull, BOUNDS, np.random.default_rng(0), max_tries=25)

    def test_vertices_strictly_inside(self):
        path = generate_path(PathGenConfig(), np.random.default_rng(2))
        hull = convex_hull(calcu_boundary(path, 3.0).all_points())
        for seed in range(20):
            pose = random_pose_in_bounds(hull, BOUNDS, np.random.default_rng(seed), 200)
            posed = hull.vertices @ pose.rotation.T + pose.translation
            assert (posed > 0).all() and (posed < 64).all()


class TestScatterFiller:
    def setup_method(self):
        path = generate_path(PathGenConfig(), np.random.default_rng(1))
        pose = random_pose_in_bounds(convex_hull(calcu_boundary(path, 3.0).all_points()),
                                     BOUNDS, np.random.default_rng(0), 200)
        from edagepp.pathgen import transform_path
        self.posed = transform_path(path, pose)

    def test_zero_budget(self):
        assert scatter_filler_obstacles(self.posed, 3.0, BOUNDS,
                                        np.random.default_rng(0), 0) == []

    def test_count_and_clearance(self):
        obs = scatter_filler_obstacles(self.posed, 3.0, BOUNDS,
                                       np.random.default_rng(3), 50)
        assert len(obs) <= 50
        assert obs, "some obstacles should survive filtering"
        centers = np.array([o.center for o in obs])
        radii = np.array([o.radius for o in obs])
        d = points_polyline_distance(centers, self.posed.points)
        assert (d >= radii + 3.0).all()
        assert all(o.role == "filler" for o in obs)


class TestEncodeImage:
    def test_empty_scene(self):
        scene = SceneSpec(bounds=BOUNDS, start=np.array([10.0, 10.0]),
                          goal=np.array([50.0, 50.0]), obstacles=[],
                          pose=Pose2.identity(), clearance=3.0)
        img = encode_problem_image(scene, RASTER, marker_side=5)
        red = (img == np.array([255, 0, 0])).all(axis=2)
        assert red.sum() == 2 * 25
        white = (img == 255).all(axis=2)
        assert white.sum() + red.sum() == RASTER.width * RASTER.height

    def test_disc_area(self):
        rho = 5.0
        scene = SceneSpec(bounds=BOUNDS, start=np.array([5.0, 5.0]),
                          goal=np.array([60.0, 60.0]),
                          obstacles=[Obstacle(radius=rho, center=np.array([32.0, 30.0]))],
                          pose=Pose2.identity(), clearance=3.0)
        img = encode_problem_image(scene, RASTER)
        black = (img == 0).all(axis=2).sum()
        expected = math.pi * rho * rho * RASTER.transform.sx * RASTER.transform.sy
        assert black == pytest.approx(expected, rel=0.05)

    def test_marker_count_no_overlap(self):
        scene = SceneSpec(bounds=BOUNDS, start=np.array([12.0, 40.0]),
                          goal=np.array([52.0, 20.0]), obstacles=[],
                          pose=Pose2.identity(), clearance=3.0)
        img = encode_problem_image(scene, RASTER, marker_side=5)
        red = (img == np.array([255, 0, 0])).all(axis=2)
        assert red.sum() == 2 * 25


def build_record(seed, clearance=3.0, max_obstacles=50):
    cfg = GeneratorConfig(clearance=clearance, max_obstacles=max_obstacles, seed=seed)
    from edagepp.constraints import find_subspaces, place_constraint_obstacles
    rng = np.random.default_rng(seed)
    path = generate_path(cfg.pathgen, rng)
    boundary = calcu_boundary(path, clearance, cfg.pathgen.cap_samples)
    subs = find_subspaces(path, cfg.gap_factor * path.spacing)
    cons = place_constraint_obstacles(path, clearance, subs, rng, max_obstacles)
    return assemble_scene(path, boundary, cons, cfg, np.random.default_rng(seed + 1),
                          seed=seed)


class TestAssemble:
    def test_no_obstacles_masks_unchanged(self):
        rec = build_record(0, max_obstacles=0)
        assert rec.scene.obstacles == []
        img = rec.problem_image
        black = (img == 0).all(axis=2)
        assert black.sum() == 0
        # hadamard step had nothing to clear: free mask pixels are white or marker
        free = rec.space_mask.bits == 255
        nonblack = ~black
        assert nonblack[free].all()

    def test_no_obstacle_pixels_in_corridor(self):
        for seed in range(5):
            rec = build_record(seed)
            black = (rec.problem_image == 0).all(axis=2)
            free = rec.space_mask.bits == 255
            assert not (black & free).any()

    def test_mask_chain_and_pose_consistency(self):
        for seed in range(5):
            rec = build_record(seed + 50)
            assert rec.waypoint_mask.is_subset_of(rec.space_mask)
            black = (rec.problem_image == 0).all(axis=2)
            px = RASTER.transform.to_pixels(rec.solution.points)
            rows = np.floor(px[:, 1]).astype(int)
            cols = np.floor(px[:, 0]).astype(int)
            assert not black[rows, cols].any()
            # continuous clearance
            if rec.scene.obstacles:
                centers = np.array([o.center for o in rec.scene.obstacles])
                radii = np.array([o.radius for o in rec.scene.obstacles])
                d = points_polyline_distance(centers, rec.solution.points)
                assert (d - radii >= rec.scene.clearance).all()
            assert len(rec.scene.obstacles) <= 50
            assert rec.solution_cost == pytest.approx(
                np.linalg.norm(np.diff(rec.solution.points, axis=0), axis=1).sum())

    def test_start_goal_clear_of_obstacles(self):
        rec = build_record(7)
        for pt in (rec.scene.start, rec.scene.goal):
            for o in rec.scene.obstacles:
                assert np.linalg.norm(pt - o.center) >= o.radius + rec.scene.clearance


class TestGeneratePathRecords:
    def test_deterministic(self):
        cfg = GeneratorConfig(paths=1, records_per_path=2, seed=11)
        a = generate_path_records(cfg, 0)
        b = generate_path_records(cfg, 0)
        assert len(a) == len(b) == 2
        for ra, rb in zip(a, b):
            assert (ra.problem_image == rb.problem_image).all()
            assert (ra.space_mask.bits == rb.space_mask.bits).all()
            assert (ra.waypoint_mask.bits == rb.waypoint_mask.bits).all()
            assert ra.solution_cost == rb.solution_cost
            assert ra.seed == rb.seed

    def test_batch_valid(self):
        cfg = GeneratorConfig(seed=99)
        recs = generate_path_records(cfg, 3)
        assert len(recs) == cfg.records_per_path
        for rec in recs:
            assert rec.waypoint_mask.is_subset_of(rec.space_mask)
            assert (0 < rec.scene.start).all() and (rec.scene.start < 64).all()
