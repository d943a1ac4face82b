import numpy as np
import pytest
from scipy import linalg

from src import errors
from src.errors import InvalidInputError
from src.metrics import angular_errors, delta_fg, delta_uv, evaluate, reprojection
from src.monodromy import StartBundle
from src.pipeline import calibrate, data_spec, solve_instance
from src.polysys import synthetic_instance
from src.scene import add_noise
from src.trials import TrialConfig, run_trial, trial_scene

from .conftest import ground_truth_result


@pytest.mark.parametrize("name", ["calibrated", "fguv0"])
def test_noiseless_instance_is_solved_exactly(name, exact_bundle):
    bundle, instance = exact_bundle(name, seed=3)
    scene = instance.scene
    est = calibrate(bundle, instance.observations, known=scene.intrinsics)
    assert delta_fg(est.intrinsics, scene.intrinsics) < 1e-6
    assert delta_uv(est.intrinsics, scene.intrinsics) < 1e-6
    assert reprojection(est, instance.observations) < 1e-6
    eps_r, eps_c = angular_errors(est, scene)
    assert eps_r < 1e-4
    assert eps_c < 1e-4


def test_candidates_are_ranked(exact_bundle):
    bundle, instance = exact_bundle("fguv0")
    candidates = solve_instance(bundle, instance.observations)
    scores = [c.score for c in candidates]
    assert scores == sorted(scores)
    assert all(np.all(c.depths > 0) for c in candidates)


def test_known_values_are_required(exact_bundle):
    bundle, instance = exact_bundle("calibrated")
    with pytest.raises(InvalidInputError):
        solve_instance(bundle, instance.observations)
    with pytest.raises(InvalidInputError):
        data_spec(bundle.system.spec, None)


def test_instance_size_must_match(exact_bundle):
    bundle, instance = exact_bundle("fguv0")
    with pytest.raises(InvalidInputError):
        solve_instance(bundle, instance.observations.subset([0, 1, 2, 3]))


def test_trial_scene_matches_the_bundle_instance(exact_bundle):
    bundle, instance = exact_bundle("fguv0", seed=4)
    scene = trial_scene(bundle, TrialConfig(solver="fguv0"), seed=4)
    np.testing.assert_array_equal(scene.points, instance.scene.points)
    np.testing.assert_array_equal(scene.rotations, instance.scene.rotations)


def test_exact_trial_row(exact_bundle):
    bundle, _ = exact_bundle("fguv0", seed=2)
    row = run_trial(bundle, TrialConfig(solver="fguv0"), seed=2, sigma=0.0)
    assert row["status"] == "ok"
    assert row["delta_fg"] < 1e-6
    assert row["re"] < 1e-6


def test_failed_trial_is_reported(exact_bundle):
    bundle, _ = exact_bundle("fguv0", seed=2)
    row = run_trial(bundle, TrialConfig(solver="fguv0", num_points=3), seed=2, sigma=0.0)
    assert row["status"] == "InvalidInputError"
    assert np.isnan(row["delta_fg"])


def test_noisy_evaluation_is_finite(exact_bundle):
    bundle, instance = exact_bundle("fguv0", seed=5)
    est = calibrate(bundle, instance.observations)
    noisy = add_noise(instance.observations, 0.5, seed=5)
    report = evaluate(est, noisy, instance.scene)
    assert 0.0 < report.re < 5.0
    assert report.skipped == 0


def test_default_camera_trial_keeps_the_shear_prior(monkeypatch, exact_bundle):
    bundle, _ = exact_bundle("fguv0", seed=2)
    config = TrialConfig(solver="fguv0", prior_matched=False)
    scene = trial_scene(bundle, config, seed=2)
    assert scene.intrinsics.s != 0.0
    seen = []

    def solve(bundle, obs, known=None, settings=None, threads=1):
        seen.append(known)
        return ground_truth_result(scene)

    monkeypatch.setattr("src.trials.calibrate", solve)
    row = run_trial(bundle, config, seed=2, sigma=0.0)
    assert row["status"] == "ok"
    assert seen[0].s == 0.0
    assert data_spec(bundle.system.spec, seen[0]).s.value == 0.0


def test_calibrated_default_camera_trial_knows_the_focals(monkeypatch, exact_bundle):
    bundle, _ = exact_bundle("calibrated")
    config = TrialConfig(solver="calibrated", prior_matched=False)
    scene = trial_scene(bundle, config, seed=1)
    seen = []

    def solve(bundle, obs, known=None, settings=None, threads=1):
        seen.append(known)
        return ground_truth_result(scene)

    monkeypatch.setattr("src.trials.calibrate", solve)
    run_trial(bundle, config, seed=1, sigma=0.0)
    k = seen[0]
    assert (k.f, k.g, k.u, k.v) == (
        scene.intrinsics.f, scene.intrinsics.g, scene.intrinsics.u, scene.intrinsics.v
    )
    assert k.s == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_default_camera_trials_are_not_rejected(exact_bundle, seed):
    bundle, _ = exact_bundle("fguv0", seed=2)
    row = run_trial(bundle, TrialConfig(solver="fguv0", prior_matched=False), seed, sigma=0.0)
    assert row["status"] not in {errors.ShearWithoutV.__name__, errors.InvalidInputError.__name__}


def test_degenerate_spheres_keep_the_system_regular(calibrated_system):
    for seed in range(100):
        instance = synthetic_instance(calibrated_system, seed, degenerate=True)
        _, jx, _ = calibrated_system.evaluate_all(instance.solution, instance.parameters)
        assert linalg.svdvals(jx)[-1] > 1e-4


@pytest.mark.slow
def test_degenerate_spheres_are_solved_exactly(calibrated_fibre):
    system, found = calibrated_fibre(0)
    bundle = StartBundle.from_solution_set(system, found)
    for seed in range(100):
        instance = synthetic_instance(system, seed, degenerate=True)
        scene = instance.scene
        est = calibrate(bundle, instance.observations, known=scene.intrinsics)
        assert delta_fg(est.intrinsics, scene.intrinsics) < 1e-6
        assert delta_uv(est.intrinsics, scene.intrinsics) < 1e-6
        assert reprojection(est, instance.observations) < 1e-6
