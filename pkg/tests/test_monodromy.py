import json

import numpy as np
import pytest

from src.errors import InvalidInputError, NotOnVariety
from src.monodromy import (
    MonodromySettings,
    SolutionSet,
    StartBundle,
    dedup,
    filter_physical,
    flip_view_depths,
    load_bundle,
    monodromy_solve,
    reanchor,
    seed_pair,
)
from src.polysys import SLPSystem, parameters, square_root_system, unknowns


def _contains(points: np.ndarray, x: np.ndarray, tol: float = 1e-6) -> bool:
    return bool(np.any(np.max(np.abs(points - x), axis=1) < tol * max(1.0, np.abs(x).max())))


def test_square_root_monodromy():
    settings = MonodromySettings(target=2, seed=1)
    found = monodromy_solve(square_root_system(), ([4.0 + 0j], [2.0 + 0j]), settings)
    assert len(found) == 2
    np.testing.assert_allclose(sorted(found.solutions[:, 0].real), [-2.0, 2.0], atol=1e-10)


def test_quartic_monodromy_finds_all_roots():
    x = unknowns("x")
    p = parameters("p")
    system = SLPSystem([x**4 - p], [x], [p])
    settings = MonodromySettings(target=4, perturbation_scale=2.0, stall_loops=50, seed=3)
    found = monodromy_solve(system, ([16.0 + 0j], [2.0 + 0j]), settings)
    assert len(found) == 4
    for root in [2.0, -2.0, 2j, -2j]:
        assert _contains(found.solutions, np.array([root]))


def test_loop_callback_reports_progress():
    calls = []
    settings = MonodromySettings(target=2, seed=1)
    monodromy_solve(
        square_root_system(), ([4.0 + 0j], [2.0 + 0j]), settings,
        on_loop=lambda loop, known, added: calls.append((loop, known, added)),
    )
    assert calls[-1][1] == 2
    assert [c[0] for c in calls] == list(range(1, len(calls) + 1))


def test_dedup_keeps_first_member():
    points = np.array([[1.0, 2.0], [1.0 + 1e-9, 2.0], [3.0, 4.0], [np.nan, 0.0]], dtype=complex)
    unique = dedup(points)
    assert len(unique) == 2
    np.testing.assert_array_equal(unique.solutions[0], points[0])


def test_merge_counts_new_points():
    solutions = SolutionSet(np.array([1.0]), np.array([[1.0]]))
    added = solutions.merge(np.array([[1.0], [-1.0]]), np.zeros(2), provenance=3)
    assert added == 1
    assert len(solutions) == 2
    assert list(solutions.provenance) == [-1, 3]


def test_canonical_order_is_stable(rng):
    points = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
    a = SolutionSet(np.zeros(1), points).canonical()
    b = SolutionSet(np.zeros(1), points[::-1]).canonical()
    np.testing.assert_array_equal(a.solutions, b.solutions)


def test_flip_view_depths(calibrated_system, exact_bundle):
    _, instance = exact_bundle("calibrated")
    flipped = flip_view_depths(calibrated_system, instance.solution, 2)
    depths = calibrated_system.depths(flipped)
    np.testing.assert_allclose(depths[2], -calibrated_system.depths(instance.solution)[2])
    np.testing.assert_allclose(depths[:2], calibrated_system.depths(instance.solution)[:2])
    with pytest.raises(InvalidInputError):
        flip_view_depths(calibrated_system, instance.solution, 0)


def test_filter_physical_restores_depth_signs(calibrated_system, exact_bundle):
    _, instance = exact_bundle("calibrated")
    x = instance.solution
    complex_point = x + 1e-2j
    candidates = SolutionSet(
        instance.parameters,
        np.vstack([flip_view_depths(calibrated_system, x, 1), complex_point]),
    )
    kept = filter_physical(candidates, calibrated_system)
    assert len(kept) == 1
    np.testing.assert_allclose(kept[0], x.real, atol=1e-9)


def test_filter_physical_of_nothing(calibrated_system):
    empty = SolutionSet(np.zeros(calibrated_system.n_params), np.zeros((0, 11)))
    assert filter_physical(empty, calibrated_system) == []


def test_seed_pair_is_on_the_variety(fguv0_system):
    p0, x0 = seed_pair(fguv0_system, seed=2)
    assert np.max(np.abs(fguv0_system.evaluate(x0, p0))) < 1e-9


def test_bundle_round_trip(tmp_path, exact_bundle):
    bundle, _ = exact_bundle("fguv0")
    path = bundle.save(tmp_path / "fguv0.json")
    loaded = load_bundle(path)
    assert len(loaded) == 1
    assert loaded.meta == {"relaxation": "fguv0"}
    assert loaded.system.unknown_names == bundle.system.unknown_names
    np.testing.assert_allclose(loaded.solutions, bundle.solutions, atol=1e-12)
    np.testing.assert_allclose(loaded.anchor, bundle.anchor)


def test_unreadable_bundle(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(InvalidInputError):
        load_bundle(path)


def test_corrupted_bundle_fails_verification(tmp_path, exact_bundle):
    bundle, _ = exact_bundle("calibrated")
    data = bundle.to_dict()
    data["solutions"][0][3][0] += 0.5
    path = tmp_path / "corrupt.json"
    path.write_text(json.dumps(data))
    with pytest.raises(NotOnVariety):
        load_bundle(path)
    assert len(load_bundle(path, verify=False)) == 1


def test_reanchor_moves_the_fibre():
    system = square_root_system()
    start = SolutionSet(np.array([4.0 + 0j]), np.array([[2.0], [-2.0]], dtype=complex))
    moved = reanchor(system, start, MonodromySettings(seed=2), anchor=[9.0 + 0j])
    assert len(moved) == 2
    np.testing.assert_allclose(sorted(moved.solutions[:, 0].real), [-3.0, 3.0], atol=1e-10)


def test_settings_round_trip():
    settings = MonodromySettings(target=640, stall_loops=3)
    assert MonodromySettings.from_dict(settings.to_dict()) == settings


def test_bundle_from_solution_set_is_canonical(calibrated_system, exact_bundle):
    _, instance = exact_bundle("calibrated")
    other = flip_view_depths(calibrated_system, instance.solution, 1)
    a = StartBundle.from_solution_set(
        calibrated_system, SolutionSet(instance.parameters, np.vstack([instance.solution, other]))
    )
    b = StartBundle.from_solution_set(
        calibrated_system, SolutionSet(instance.parameters, np.vstack([other, instance.solution]))
    )
    np.testing.assert_array_equal(a.solutions, b.solutions)


@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_calibrated_fibre_has_640_solutions(calibrated_fibre, seed):
    system, found = calibrated_fibre(seed)
    assert len(found) == 640
    residuals = np.max(np.abs(system.evaluate(found.solutions, found.parameters)), axis=1)
    assert residuals.max() < 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("view", [1, 2])
def test_depth_flips_split_the_fibre_into_pairs(calibrated_fibre, view):
    system, found = calibrated_fibre(0)
    points = found.solutions
    flipped = np.array([flip_view_depths(system, x, view) for x in points])
    distance = np.max(np.abs(points[:, None, :] - flipped[None, :, :]), axis=2)
    partner = np.argmin(distance, axis=1)
    scale = np.maximum(1.0, np.max(np.abs(points), axis=1))
    assert np.all(distance[np.arange(len(points)), partner] < 1e-6 * scale)
    assert np.all(partner != np.arange(len(points)))
    np.testing.assert_array_equal(partner[partner], np.arange(len(points)))
    pairs = {tuple(sorted(pair)) for pair in enumerate(partner.tolist())}
    assert len(pairs) == 320
