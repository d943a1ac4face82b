"""Synthetic problem-solution pairs (p0, x0) fabricated from a generated scene."""

import logging
from dataclasses import dataclass

import numpy as np

from src.camera import (
    Intrinsics,
    NormalizationRecord,
    normalize_intrinsics,
    normalize_observations,
    omega_params_of,
)
from src.polysys.depth import DepthSystem
from src.scene import (
    DEFAULT_INTRINSICS,
    Observations,
    Scene,
    SceneConfig,
    generate_degenerate_scene,
    generate_scene,
    project,
)

logger = logging.getLogger(__name__)


def conditioning_for(image_size: tuple[int, int]) -> float:
    return 1.0 / max(image_size)


@dataclass(eq=False)
class SyntheticInstance:
    parameters: np.ndarray
    solution: np.ndarray
    scene: Scene
    observations: Observations
    normalized: Observations
    record: NormalizationRecord
    normalized_intrinsics: Intrinsics

    def residual(self, system: DepthSystem) -> float:
        return float(np.max(np.abs(system.evaluate(self.solution, self.parameters)), initial=0.0))


def synthetic_instance(
    system: DepthSystem,
    seed: int,
    intrinsics: Intrinsics | None = None,
    image_size: tuple[int, int] = (640, 480),
    degenerate: bool = False,
) -> SyntheticInstance:
    """Generate a scene matching the system's priors and read off (p0, x0)."""
    camera = system.spec.prior_intrinsics(intrinsics or DEFAULT_INTRINSICS)
    config = SceneConfig(
        num_points=system.n_points,
        num_views=system.num_views,
        intrinsics=camera,
        image_size=image_size,
    )
    scene = generate_degenerate_scene(config, seed) if degenerate else generate_scene(config, seed)
    obs = project(scene)

    spec = system.spec.with_reference(camera)
    normalized, record = normalize_observations(
        obs,
        spec,
        conditioning=conditioning_for(image_size),
        skew_as_parameter=system.skew_as_parameter,
    )
    k_normalized = normalize_intrinsics(camera, record)
    x0 = system.pack(omega_params_of(k_normalized), obs.true_depths)
    p0 = system.parameters_from(normalized, record).astype(complex)

    instance = SyntheticInstance(
        parameters=p0,
        solution=x0,
        scene=scene,
        observations=obs,
        normalized=normalized,
        record=record,
        normalized_intrinsics=k_normalized,
    )
    logger.debug(f"Synthetic instance seed={seed}: residual {instance.residual(system):.2e}")
    return instance
