"""Synthetic trials: generate a scene, solve it and score the estimate."""

import logging
from dataclasses import asdict, dataclass

from src.camera import Intrinsics
from src.errors import AutocalError
from src.metrics import STATUS_OK, evaluate, failure_row
from src.monodromy import StartBundle
from src.pipeline import calibrate
from src.robust import MsacSettings, msac_calibrate
from src.scene import (
    DEFAULT_INTRINSICS,
    SceneConfig,
    add_noise,
    generate_degenerate_scene,
    generate_scene,
    project,
)
from src.tracker import TrackSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialConfig:
    solver: str
    num_points: int | None = None
    prior_matched: bool = True
    degenerate: bool = False
    image_size: tuple[int, int] = (640, 480)
    msac_iterations: int = 200

    def to_dict(self) -> dict:
        data = asdict(self)
        data["image_size"] = list(self.image_size)
        return data


def trial_scene(bundle: StartBundle, config: TrialConfig, seed: int):
    spec = bundle.system.spec
    camera = DEFAULT_INTRINSICS
    if config.prior_matched:
        camera = spec.prior_intrinsics(camera)
    scene_config = SceneConfig(
        num_points=config.num_points or bundle.n_points,
        num_views=bundle.num_views,
        intrinsics=camera,
        image_size=config.image_size,
    )
    if config.degenerate:
        return generate_degenerate_scene(scene_config, seed)
    return generate_scene(scene_config, seed)


def known_intrinsics(bundle: StartBundle, scene) -> Intrinsics:
    """What the solver may assume about ``scene``'s camera.

    Known f, g, u, v come from the scene; the shear keeps the mask's own
    prior, so a default-camera scene is solved under a mismatched prior.
    """
    return bundle.system.spec.prior_intrinsics(scene.intrinsics)


def run_trial(
    bundle: StartBundle,
    config: TrialConfig,
    seed: int,
    sigma: float,
    track: TrackSettings | None = None,
    threads: int = 1,
) -> dict:
    """One CSV row; failures are reported through the status column."""
    try:
        scene = trial_scene(bundle, config, seed)
        obs = add_noise(project(scene), sigma, seed)
        known = known_intrinsics(bundle, scene)
        if obs.num_points > bundle.n_points:
            settings = MsacSettings(max_iterations=config.msac_iterations, seed=seed)
            est = msac_calibrate(obs, bundle, settings, known, track, threads).best
        else:
            est = calibrate(bundle, obs, known, track, threads)
        report = evaluate(est, obs, scene)
    except AutocalError as e:
        logger.debug(f"Trial seed={seed} sigma={sigma} failed: {e}")
        return failure_row(seed, sigma, config.solver, type(e).__name__)
    return report.csv_row(seed, sigma, config.solver, STATUS_OK)
