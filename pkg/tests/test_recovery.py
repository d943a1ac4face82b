import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from src.camera import Intrinsics, IntrinsicsSpec
from src.errors import DegeneratePoints, NoPhysicalSolution
from src.recovery import (
    CalibrationResult,
    nearest_rotation,
    points_from_depths,
    recover_poses,
    result_from_solution,
    select_solution,
)
from src.scene import Observations, Scene, project

from .conftest import ground_truth_result

IDENTITY = Intrinsics(f=1.0, g=1.0, u=0.0, v=0.0, s=0.0)


def test_points_from_depths_scale_rays():
    pixels = np.array([[[0.5, -0.25], [0.0, 0.0]]])
    depths = np.array([[2.0, 3.0]])
    points = points_from_depths(depths, Observations(pixels), IDENTITY)
    np.testing.assert_allclose(points[0], [[1.0, -0.5, 2.0], [0.0, 0.0, 3.0]])


def test_nearest_rotation(rng):
    r = Rotation.from_rotvec([0.3, -0.2, 0.1]).as_matrix()
    noisy = nearest_rotation(r + 1e-3 * rng.normal(size=(3, 3)))
    np.testing.assert_allclose(noisy @ noisy.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(noisy) == pytest.approx(1.0)
    np.testing.assert_allclose(noisy, r, atol=1e-2)
    flipped = nearest_rotation(np.diag([1.0, 1.0, -1.0]))
    assert np.linalg.det(flipped) == pytest.approx(1.0)


def test_ground_truth_depths_recover_the_scene(scene):
    obs = project(scene)
    scale = obs.true_depths[0, 0]
    result = recover_poses(obs.true_depths / scale, obs, scene.intrinsics)
    gt = scene.relative_to_first()
    np.testing.assert_allclose(result.rotations, gt.rotations, atol=1e-9)
    np.testing.assert_allclose(result.centers, gt.centers / scale, atol=1e-9)
    np.testing.assert_allclose(result.points, gt.points / scale, atol=1e-9)
    assert result.depths[0, 0] == pytest.approx(1.0)


def test_single_view_is_the_gauge(scene):
    obs = project(scene)
    single = Observations(obs.pixels[:1, :3])
    result = recover_poses(obs.true_depths[:1, :3], single, scene.intrinsics)
    np.testing.assert_array_equal(result.rotations, np.eye(3)[None])
    np.testing.assert_array_equal(result.centers, np.zeros((1, 3)))


def test_too_few_points(scene):
    obs = project(scene).subset([0, 1, 2])
    with pytest.raises(DegeneratePoints):
        recover_poses(obs.true_depths, obs, scene.intrinsics)


def test_coplanar_points(scene, rng):
    plane = np.column_stack(
        [rng.uniform(-0.5, 0.5, 6), np.zeros(6), rng.uniform(-0.5, 0.5, 6)]
    )
    flat = Scene(plane, scene.rotations, scene.centers, scene.intrinsics, scene.image_size)
    obs = project(flat)
    with pytest.raises(DegeneratePoints):
        recover_poses(obs.true_depths, obs, scene.intrinsics)


def test_degenerate_leading_triple_falls_back(scene):
    points = scene.points.copy()
    points[3] = points[0] + 0.5 * (points[1] - points[0]) + 0.5 * (points[2] - points[0])
    shifted = Scene(points, scene.rotations, scene.centers, scene.intrinsics, scene.image_size)
    obs = project(shifted)
    result = recover_poses(obs.true_depths, obs, scene.intrinsics)
    np.testing.assert_allclose(result.rotations, scene.relative_to_first().rotations, atol=1e-8)


def test_result_from_exact_solution(exact_bundle):
    bundle, instance = exact_bundle("fguv0")
    result = result_from_solution(
        bundle.system,
        instance.solution,
        instance.parameters,
        instance.normalized,
        instance.record,
        solution_index=0,
    )
    np.testing.assert_allclose(
        result.intrinsics.as_tuple(), instance.scene.intrinsics.as_tuple(), rtol=1e-9, atol=1e-9
    )
    gt = instance.scene.relative_to_first()
    np.testing.assert_allclose(result.rotations, gt.rotations, atol=1e-8)
    assert result.solution_index == 0


def test_result_serialization(scene):
    result = ground_truth_result(scene)
    restored = CalibrationResult.from_dict(result.to_dict())
    np.testing.assert_allclose(restored.rotations, result.rotations)
    assert restored.intrinsics == result.intrinsics


def test_selection_prefers_the_consistent_candidate(scene):
    obs = project(scene)
    truth = ground_truth_result(scene)
    tilted = ground_truth_result(scene)
    tilted.rotations = tilted.rotations @ Rotation.from_rotvec([0.0, 0.05, 0.0]).as_matrix()
    behind = ground_truth_result(scene)
    behind.points = -behind.points
    behind.centers = behind.centers + 100.0

    winner = select_solution([tilted, behind, truth], obs)
    assert winner is truth
    assert winner.score == pytest.approx(0.0, abs=1e-8)


def test_selection_without_candidates(scene):
    obs = project(scene)
    with pytest.raises(NoPhysicalSolution):
        select_solution([], obs)
    behind = ground_truth_result(scene)
    behind.points = behind.points + np.array([0.0, 0.0, -1e3])
    with pytest.raises(NoPhysicalSolution):
        select_solution([behind], obs)


def test_selection_skips_candidates_that_break_the_prior(scene):
    obs = project(scene)
    truth = ground_truth_result(scene)
    k = truth.intrinsics
    sheared = ground_truth_result(scene)
    sheared.intrinsics = Intrinsics(f=k.f, g=k.g, u=k.u, v=k.v, s=k.s + 5.0)
    spec = IntrinsicsSpec.parse("fguv0").with_reference(k)
    assert select_solution([sheared, truth], obs, spec) is truth
    with pytest.raises(NoPhysicalSolution):
        select_solution([sheared], obs, spec)


def test_selection_checks_known_focals(scene):
    obs = project(scene)
    truth = ground_truth_result(scene)
    spec = IntrinsicsSpec.parse("11000").with_reference(truth.intrinsics)
    assert select_solution([truth], obs, spec) is truth
    k = truth.intrinsics
    wrong = IntrinsicsSpec.parse("11000").with_reference(
        Intrinsics(f=1.1 * k.f, g=k.g, u=k.u, v=k.v, s=k.s)
    )
    with pytest.raises(NoPhysicalSolution):
        select_solution([truth], obs, wrong)
