import numpy as np
import pytest

from src.monodromy import MonodromySettings, StartBundle, monodromy_solve, seed_pair
from src.polysys import build_system, synthetic_instance
from src.recovery import CalibrationResult
from src.scene import SceneConfig, generate_scene
from src.taxonomy import shipped


def shipped_system(name: str):
    rel = shipped(name)
    return build_system(rel.selection(), rel.spec, rel.n_points, rel.num_views)


def ground_truth_result(scene) -> CalibrationResult:
    """The scene itself as an estimate, in the frame of camera 1."""
    gt = scene.relative_to_first()
    return CalibrationResult(
        intrinsics=gt.intrinsics,
        rotations=gt.rotations,
        centers=gt.centers,
        points=gt.points,
        depths=gt.camera_points()[:, :, 2],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def scene():
    return generate_scene(SceneConfig(num_points=8, num_views=3), seed=7)


@pytest.fixture
def calibrated_system():
    return shipped_system("calibrated")


@pytest.fixture
def fguv0_system():
    return shipped_system("fguv0")


@pytest.fixture
def exact_bundle():
    """A one-solution bundle anchored at the instance generated from ``seed``."""

    def make(name: str, seed: int = 0):
        system = shipped_system(name)
        instance = synthetic_instance(system, seed)
        bundle = StartBundle(
            system=system,
            anchor=instance.parameters,
            solutions=instance.solution[None, :],
            meta={"relaxation": name},
        )
        return bundle, instance

    return make


@pytest.fixture(scope="session")
def calibrated_fibre():
    """Monodromy over the calibrated relaxation, solved once per seed."""
    cache = {}

    def solve(seed: int = 0):
        if seed not in cache:
            system = shipped_system("calibrated")
            settings = MonodromySettings(stall_loops=10, seed=seed)
            cache[seed] = system, monodromy_solve(system, seed_pair(system, seed), settings)
        return cache[seed]

    return solve
