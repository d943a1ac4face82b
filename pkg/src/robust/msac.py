"""MSAC around a minimal solver bundle.

Every iteration samples as many tracks as the bundle's problem has points,
solves the minimal instance and scores each physical hypothesis on all
tracks. Residuals are triangulated-and-reprojected pixel errors; their cost
is the Huber loss truncated at the inlier threshold.
"""

import logging
from collections.abc import Callable
from dataclasses import asdict, dataclass, fields

import numpy as np

from src.camera import Intrinsics, build_k
from src.errors import AutocalError, InvalidInputError, NoHypothesis
from src.metrics import project_points, triangulate
from src.monodromy import StartBundle
from src.pipeline import solve_instance
from src.recovery import CalibrationResult
from src.scene import Observations
from src.tracker import TrackSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MsacSettings:
    max_iterations: int = 200
    huber_delta: float = 2.0
    inlier_threshold: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be at least 1")
        if self.huber_delta <= 0 or self.inlier_threshold <= 0:
            raise InvalidInputError("huber_delta and inlier_threshold must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "MsacSettings":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


@dataclass(eq=False)
class MsacResult:
    best: CalibrationResult
    score: float
    inliers: np.ndarray
    sample: np.ndarray
    iterations: int
    solver_calls: int
    hypotheses: int
    history: list[float]

    @property
    def inlier_count(self) -> int:
        return int(np.sum(self.inliers))


def huber(residuals: np.ndarray, delta: float) -> np.ndarray:
    r = np.abs(residuals)
    return np.where(r <= delta, 0.5 * r**2, delta * (r - 0.5 * delta))


def track_residuals(hypothesis: CalibrationResult, obs: Observations) -> np.ndarray:
    """Per-view pixel errors (M, N) of every track; inf where a point is behind a camera."""
    points = triangulate(hypothesis, obs)
    pixels, depths = project_points(
        build_k(hypothesis.intrinsics), hypothesis.rotations, hypothesis.centers, points
    )
    errors = np.linalg.norm(obs.pixels - pixels, axis=2)
    return np.where((depths > 0) & np.isfinite(errors), errors, np.inf)


def score_hypothesis(
    hypothesis: CalibrationResult, obs: Observations, settings: MsacSettings
) -> tuple[float, np.ndarray]:
    """Truncated Huber cost over all tracks and the mask of inlier tracks."""
    errors = track_residuals(hypothesis, obs)
    cap = huber(np.array(settings.inlier_threshold), settings.huber_delta)
    cost = np.minimum(huber(np.where(np.isfinite(errors), errors, 0.0), settings.huber_delta), cap)
    cost = np.where(np.isfinite(errors), cost, cap)
    inliers = np.all(errors < settings.inlier_threshold, axis=0)
    return float(np.sum(cost)), inliers


def sample_tracks(num_tracks: int, size: int, seed: int, iteration: int) -> np.ndarray:
    rng = np.random.default_rng([seed, iteration])
    return np.sort(rng.choice(num_tracks, size=size, replace=False))


def msac_calibrate(
    obs: Observations,
    bundle: StartBundle,
    settings: MsacSettings | None = None,
    known: Intrinsics | None = None,
    track: TrackSettings | None = None,
    threads: int = 1,
    on_iteration: Callable[[int, float], None] | None = None,
) -> MsacResult:
    """Best-scoring calibration over ``settings.max_iterations`` minimal samples."""
    settings = settings or MsacSettings()
    size = bundle.n_points
    if obs.num_views != bundle.num_views:
        raise InvalidInputError(f"bundle needs {bundle.num_views} views, got {obs.num_views}")
    if obs.num_points < size:
        raise InvalidInputError(f"MSAC needs at least {size} tracks, got {obs.num_points}")

    best, best_score, best_inliers, best_sample = None, np.inf, None, None
    history: list[float] = []
    hypotheses = 0
    for iteration in range(settings.max_iterations):
        sample = sample_tracks(obs.num_points, size, settings.seed, iteration)
        try:
            candidates = solve_instance(bundle, obs.subset(sample), known, track, threads)
        except AutocalError as e:
            logger.debug(f"Iteration {iteration}: {e}")
            candidates = []
        for candidate in candidates:
            hypotheses += 1
            score, inliers = score_hypothesis(candidate, obs, settings)
            if score < best_score:
                best, best_score, best_inliers, best_sample = candidate, score, inliers, sample
        history.append(best_score)
        if on_iteration is not None:
            on_iteration(iteration, best_score)

    if best is None:
        raise NoHypothesis(f"no physical hypothesis in {settings.max_iterations} iterations")
    best.score = best_score
    logger.info(
        f"MSAC: score {best_score:.4g}, {int(np.sum(best_inliers))}/{obs.num_points} inliers "
        f"from {hypotheses} hypotheses"
    )
    return MsacResult(
        best=best,
        score=best_score,
        inliers=best_inliers,
        sample=best_sample,
        iterations=settings.max_iterations,
        solver_calls=settings.max_iterations,
        hypotheses=hypotheses,
        history=history,
    )
