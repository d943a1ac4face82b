"""From depths and intrinsics to cameras and points.

Camera 1 fixes the gauge (R_1 = I, C_1 = 0) and λ_11 = 1 fixes the scale.
Back-projected points X_ip = λ_ip K⁻¹ x_ip are the scene in camera i's frame,
so after centering every cloud at its first point the rotation of camera i
maps three difference vectors of cloud 1 onto those of cloud i.
"""

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import linalg

from src.camera import (
    Intrinsics,
    NormalizationRecord,
    denormalize_intrinsics,
    k_candidates,
    k_inverse,
)
from src.errors import DegeneratePoints
from src.polysys import DepthSystem
from src.scene import Observations

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12


@dataclass(eq=False)
class CalibrationResult:
    intrinsics: Intrinsics
    rotations: np.ndarray
    centers: np.ndarray
    points: np.ndarray
    depths: np.ndarray
    solution_index: int | None = None
    score: float | None = None

    @property
    def num_views(self) -> int:
        return self.rotations.shape[0]

    def to_dict(self) -> dict:
        return {
            "intrinsics": self.intrinsics.to_dict(),
            "rotations": self.rotations.reshape(-1, 9).tolist(),
            "centers": self.centers.tolist(),
            "points": self.points.tolist(),
            "depths": self.depths.tolist(),
            "solution_index": self.solution_index,
            "score": self.score,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationResult":
        return cls(
            intrinsics=Intrinsics.from_dict(data["intrinsics"]),
            rotations=np.array(data["rotations"], dtype=float).reshape(-1, 3, 3),
            centers=np.array(data["centers"], dtype=float),
            points=np.array(data["points"], dtype=float),
            depths=np.array(data["depths"], dtype=float),
            solution_index=data.get("solution_index"),
            score=data.get("score"),
        )


def points_from_depths(depths: np.ndarray, obs: Observations, k: Intrinsics) -> np.ndarray:
    """X_ip = λ_ip K⁻¹ x_ip for every view, shape (M, N, 3)."""
    rays = obs.homogeneous() @ k_inverse(k).T
    return np.asarray(depths, dtype=float)[:, :, None] * rays


def nearest_rotation(matrix: np.ndarray) -> np.ndarray:
    u, _, vt = linalg.svd(matrix)
    if np.linalg.det(u @ vt) < 0:
        u[:, -1] = -u[:, -1]
    return u @ vt


def _rotation_triple(centered: np.ndarray) -> list[int]:
    """Points 2, 3, 4 unless degenerate, else the best-conditioned triple."""
    n_points = centered.shape[1]
    preferred = [1, 2, 3]
    if np.linalg.cond(centered[0, preferred].T) <= MAX_CONDITION:
        return preferred
    best, best_cond = None, np.inf
    for triple in combinations(range(1, n_points), 3):
        cond = np.linalg.cond(centered[0, list(triple)].T)
        if cond < best_cond:
            best, best_cond = list(triple), cond
    if best is None or best_cond > MAX_CONDITION:
        raise DegeneratePoints("the first view's points are coplanar with the first point")
    logger.debug(f"Points 2-4 are degenerate, using points {[p + 1 for p in best]}")
    return best


def recover_poses(
    depths: np.ndarray, obs: Observations, k: Intrinsics, solution_index: int | None = None
) -> CalibrationResult:
    clouds = points_from_depths(depths, obs, k)
    num_views = clouds.shape[0]
    rotations = np.tile(np.eye(3), (num_views, 1, 1))
    centers = np.zeros((num_views, 3))

    if num_views > 1:
        if clouds.shape[1] < 4:
            raise DegeneratePoints("pose recovery needs at least 4 points")
        centered = clouds - clouds[:, :1, :]
        triple = _rotation_triple(centered)
        reference_inv = np.linalg.inv(centered[0, triple].T)
        for i in range(1, num_views):
            rotation = nearest_rotation(centered[i, triple].T @ reference_inv)
            rotations[i] = rotation
            centers[i] = np.mean(clouds[0] - clouds[i] @ rotation, axis=0)

    return CalibrationResult(
        intrinsics=k,
        rotations=rotations,
        centers=centers,
        points=clouds[0],
        depths=np.asarray(depths, dtype=float),
        solution_index=solution_index,
    )


def result_from_solution(
    system: DepthSystem,
    x: np.ndarray,
    p: np.ndarray,
    normalized: Observations,
    record: NormalizationRecord,
    solution_index: int | None = None,
) -> CalibrationResult:
    """Calibration in original pixels from a real solution of the normalized system."""
    omega = system.omega_params(np.real(x), np.real(p))
    k_normalized = k_candidates(omega)[0]
    result = recover_poses(
        system.depths(np.real(x)).real, normalized, k_normalized, solution_index
    )
    # K⁻¹ x is unchanged by normalization, so poses and points carry over
    result.intrinsics = denormalize_intrinsics(k_normalized, record)
    return result
