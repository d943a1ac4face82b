import numpy as np
import pytest

from src.errors import InvalidInputError, NoHypothesis, NoPhysicalSolution
from src.robust import (
    MsacSettings,
    huber,
    msac_calibrate,
    sample_tracks,
    score_hypothesis,
    track_residuals,
)
from src.scene import SceneConfig, add_noise, generate_scene, project

from .conftest import ground_truth_result


@pytest.fixture
def wide_scene():
    return generate_scene(SceneConfig(num_points=40, num_views=3), seed=11)


@pytest.fixture
def oracle_solver(monkeypatch, wide_scene):
    """Replace the minimal solver by one that always returns the true calibration."""
    calls = []

    def solve(bundle, obs, known=None, settings=None, threads=1):
        calls.append(obs.num_points)
        return [ground_truth_result(wide_scene)]

    monkeypatch.setattr("src.robust.msac.solve_instance", solve)
    return calls


def test_huber_values():
    r = np.array([0.0, 1.0, -2.0, 5.0])
    np.testing.assert_allclose(huber(r, 2.0), [0.0, 0.5, 2.0, 8.0])


@pytest.mark.parametrize(
    "overrides", [{"max_iterations": 0}, {"huber_delta": 0.0}, {"inlier_threshold": -1.0}]
)
def test_invalid_settings(overrides):
    with pytest.raises(InvalidInputError):
        MsacSettings(**overrides)


def test_settings_round_trip():
    settings = MsacSettings(max_iterations=50, seed=9)
    assert MsacSettings.from_dict(settings.to_dict() | {"unused": True}) == settings


def test_samples_are_seeded_and_distinct():
    a = sample_tracks(40, 5, seed=3, iteration=7)
    b = sample_tracks(40, 5, seed=3, iteration=7)
    np.testing.assert_array_equal(a, b)
    assert len(set(a.tolist())) == 5
    assert np.all(np.diff(a) > 0)
    assert not np.array_equal(a, sample_tracks(40, 5, seed=3, iteration=8))


def test_true_hypothesis_fits_every_track(wide_scene):
    obs = project(wide_scene)
    truth = ground_truth_result(wide_scene)
    assert np.max(track_residuals(truth, obs)) < 1e-6
    score, inliers = score_hypothesis(truth, obs, MsacSettings())
    assert score < 1e-9
    assert inliers.all()


def test_outliers_cost_the_cap(wide_scene):
    obs = project(wide_scene)
    pixels = obs.pixels.copy()
    pixels[1, :5] += 80.0
    settings = MsacSettings()
    truth = ground_truth_result(wide_scene)
    score, inliers = score_hypothesis(truth, obs.with_pixels(pixels), settings)
    cap = float(huber(np.array(settings.inlier_threshold), settings.huber_delta))
    assert inliers.sum() == 35
    assert not inliers[:5].any()
    assert score >= 5 * cap
    assert score <= 5 * 3 * cap + 1.0


def test_msac_keeps_the_best_hypothesis(wide_scene, exact_bundle, oracle_solver):
    bundle, _ = exact_bundle("fguv0")
    obs = add_noise(project(wide_scene), 0.3, seed=1)
    result = msac_calibrate(obs, bundle, MsacSettings(max_iterations=6, seed=2))
    assert result.solver_calls == result.iterations == 6
    assert oracle_solver == [5] * 6
    assert result.hypotheses == 6
    assert result.inlier_count == 40
    assert len(result.history) == 6
    assert all(a >= b for a, b in zip(result.history, result.history[1:]))
    assert result.best.score == result.score
    assert len(result.sample) == 5


def test_iteration_callback(wide_scene, exact_bundle, oracle_solver):
    bundle, _ = exact_bundle("fguv0")
    seen = []
    msac_calibrate(
        project(wide_scene), bundle, MsacSettings(max_iterations=3),
        on_iteration=lambda k, best: seen.append(k),
    )
    assert seen == [0, 1, 2]


def test_no_hypothesis(monkeypatch, wide_scene, exact_bundle):
    def fail(*args, **kwargs):
        raise NoPhysicalSolution("nothing real")

    monkeypatch.setattr("src.robust.msac.solve_instance", fail)
    bundle, _ = exact_bundle("fguv0")
    with pytest.raises(NoHypothesis):
        msac_calibrate(project(wide_scene), bundle, MsacSettings(max_iterations=4))


def test_too_few_tracks(wide_scene, exact_bundle):
    bundle, _ = exact_bundle("fguv0")
    with pytest.raises(InvalidInputError):
        msac_calibrate(project(wide_scene).subset([0, 1, 2, 3]), bundle)
    with pytest.raises(InvalidInputError):
        msac_calibrate(project(wide_scene).with_pixels(project(wide_scene).pixels[:2]), bundle)
