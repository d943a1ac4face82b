import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from src.camera import Intrinsics
from src.errors import BehindCamera, SizeMismatch, ZeroCenter, ZeroGroundTruth
from src.metrics import (
    CSV_COLUMNS,
    STATUS_OK,
    angular_errors,
    delta_fg,
    delta_s,
    delta_uv,
    evaluate,
    failure_row,
    read_rows,
    reprojection,
    reprojection_residuals,
    rotation_angle,
    summarize,
    summary_columns,
    triangulate,
    write_rows,
)
from src.scene import project

from .conftest import ground_truth_result

GT = Intrinsics(f=300.0, g=300.0, u=300.0, v=250.0, s=0.0)


def test_intrinsic_deltas():
    est = Intrinsics(f=330.0, g=300.0, u=300.0, v=250.0, s=0.0)
    assert delta_fg(est, GT) == pytest.approx(0.05)
    est = Intrinsics(f=300.0, g=300.0, u=330.0, v=275.0, s=0.0)
    assert delta_uv(est, GT) == pytest.approx(0.10)
    est = Intrinsics(f=300.0, g=300.0, u=300.0, v=250.0, s=300.0)
    assert delta_s(est, GT) == pytest.approx(1.0)


def test_zero_ground_truth():
    zero = Intrinsics(f=300.0, g=300.0, u=0.0, v=250.0, s=0.0)
    with pytest.raises(ZeroGroundTruth):
        delta_uv(GT, zero)
    with pytest.raises(ZeroGroundTruth):
        delta_fg(GT, Intrinsics(f=0.0, g=300.0, u=1.0, v=1.0, s=0.0))


def test_ground_truth_scores_zero(scene):
    obs = project(scene)
    report = evaluate(ground_truth_result(scene), obs, scene)
    assert report.delta_fg == report.delta_uv == report.delta_s == 0.0
    assert report.re < 1e-9
    assert report.re_gt < 1e-9
    assert report.eps_r < 1e-5
    assert report.eps_c < 1e-5
    assert report.skipped == 0


def test_scaled_reconstruction_aligns_to_ground_truth(scene):
    obs = project(scene)
    est = ground_truth_result(scene)
    est.points = 0.25 * est.points
    est.centers = 0.25 * est.centers
    assert reprojection(est, obs) < 1e-9
    assert reprojection(est, obs, scene) < 1e-9


def test_rotation_error_in_degrees(scene):
    est = ground_truth_result(scene)
    turn = Rotation.from_euler("z", 10.0, degrees=True).as_matrix()
    est.rotations = est.rotations.copy()
    est.rotations[1:] = turn @ est.rotations[1:]
    eps_r, eps_c = angular_errors(est, scene)
    assert eps_r == pytest.approx(10.0, abs=1e-9)
    assert eps_c == pytest.approx(0.0, abs=1e-5)


def test_center_direction_ignores_scale(scene):
    est = ground_truth_result(scene)
    est.centers = 2.0 * est.centers
    _, eps_c = angular_errors(est, scene)
    assert eps_c == pytest.approx(0.0, abs=1e-5)


def test_rotation_angle_is_clamped():
    assert rotation_angle(np.eye(3), np.eye(3) * (1 + 1e-15)) == 0.0


def test_zero_center(scene):
    est = ground_truth_result(scene)
    est.centers = np.zeros_like(est.centers)
    with pytest.raises(ZeroCenter):
        angular_errors(est, scene)


def test_one_pixel_perturbation_bounds_the_error(scene, rng):
    obs = project(scene)
    directions = rng.normal(size=obs.pixels.shape)
    directions /= np.linalg.norm(directions, axis=2, keepdims=True)
    moved = obs.with_pixels(obs.pixels + directions)
    assert reprojection(ground_truth_result(scene), moved) == pytest.approx(1.0)


def test_points_behind_are_skipped(scene):
    obs = project(scene)
    est = ground_truth_result(scene)
    est.points = est.points.copy()
    est.points[0] = -est.points[0]
    residuals, valid = reprojection_residuals(est, obs)
    assert not np.all(valid[:, 0])
    assert np.all(np.isnan(residuals[~valid]))
    est.points = -ground_truth_result(scene).points
    with pytest.raises(BehindCamera):
        reprojection(est, obs)


def test_triangulation_recovers_points(scene):
    obs = project(scene)
    est = ground_truth_result(scene)
    np.testing.assert_allclose(triangulate(est, obs), est.points, atol=1e-8)


def test_reprojection_needs_two_views(scene):
    obs = project(scene)
    single = obs.with_pixels(obs.pixels[:1])
    with pytest.raises(SizeMismatch):
        reprojection(ground_truth_result(scene), single)


def _row(seed, sigma, solver, value, status=STATUS_OK):
    row = {"seed": seed, "sigma": sigma, "solver": solver, "status": status}
    row.update({name: value for name in CSV_COLUMNS[3:-1]})
    return row


def test_summary_quartiles_and_failures():
    rows = [_row(k, 0.5, "fguv0", float(k)) for k in range(1, 6)]
    rows.append(failure_row(6, 0.5, "fguv0", "NoPhysicalSolution"))
    rows.append(_row(0, 0.0, "fguv0", 0.0))
    summary = summarize(rows)
    assert [(s["sigma"], s["trials"]) for s in summary] == [(0.0, 1), (0.5, 6)]
    noisy = summary[1]
    assert noisy["failure_rate"] == pytest.approx(1 / 6)
    assert noisy["re_mean"] == pytest.approx(3.0)
    assert noisy["re_median"] == pytest.approx(3.0)
    assert noisy["re_q1"] == pytest.approx(2.0)
    assert noisy["re_q3"] == pytest.approx(4.0)
    assert set(summary_columns()) == set(noisy)


def test_summary_of_all_failures():
    summary = summarize([failure_row(0, 1.0, "ffuv0", "NoHypothesis")])
    assert summary[0]["failure_rate"] == 1.0
    assert math.isnan(summary[0]["delta_fg_mean"])


def test_rows_survive_csv(tmp_path):
    rows = [_row(k, 0.2, "calibrated", 0.1 * k) for k in range(3)]
    path = write_rows(tmp_path / "trials.csv", rows, CSV_COLUMNS)
    again = summarize(read_rows(path))
    assert again[0]["trials"] == 3
    assert again[0]["eps_r_mean"] == pytest.approx(0.1)


focal = st.floats(min_value=50.0, max_value=2000.0)
offset = st.floats(min_value=1.0, max_value=800.0)
camera = st.builds(Intrinsics, f=focal, g=focal, u=offset, v=offset, s=st.floats(-20.0, 20.0))


@given(camera, camera)
def test_deltas_are_non_negative(est, gt):
    assert delta_fg(est, gt) >= 0
    assert delta_uv(est, gt) >= 0
    assert delta_s(est, gt) >= 0
    assert delta_fg(gt, gt) == 0
