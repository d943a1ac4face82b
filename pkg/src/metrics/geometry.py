"""Reprojection and pose errors of a calibration result.

Cameras map world points by X_cam = R_i (X − C_i). Estimated results live in
the frame of camera 1 and at the scale λ_11 = 1, so ground truth is moved to
camera 1's frame before it is compared with them.
"""

import logging
from typing import TYPE_CHECKING

import numpy as np

from src.camera import build_k
from src.errors import BehindCamera, DegeneratePoints, SizeMismatch, ZeroCenter
from src.scene import Observations, Scene

if TYPE_CHECKING:
    from src.recovery import CalibrationResult

logger = logging.getLogger(__name__)

CLAMP_TOLERANCE = 1e-12


def project_points(
    k: np.ndarray, rotations: np.ndarray, centers: np.ndarray, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Pixels (M, N, 2) and depths (M, N) of ``points`` in every camera."""
    diff = points[None, :, :] - centers[:, None, :]
    cam = np.einsum("mij,mnj->mni", rotations, diff)
    depths = cam[:, :, 2]
    pix = cam @ k.T
    with np.errstate(divide="ignore", invalid="ignore"):
        pixels = pix[:, :, :2] / pix[:, :, 2:3]
    return pixels, depths


def triangulate(est: "CalibrationResult", obs: Observations) -> np.ndarray:
    """Linear multi-view triangulation of every track, shape (N, 3)."""
    k = build_k(est.intrinsics)
    projections = [
        k @ np.hstack([r, (-r @ c)[:, None]]) for r, c in zip(est.rotations, est.centers)
    ]
    points = np.zeros((obs.num_points, 3))
    for p in range(obs.num_points):
        rows = []
        for i, proj in enumerate(projections):
            x, y = obs.pixels[i, p]
            rows.append(x * proj[2] - proj[0])
            rows.append(y * proj[2] - proj[1])
        _, _, vt = np.linalg.svd(np.array(rows))
        h = vt[-1]
        points[p] = h[:3] / h[3] if h[3] != 0 else np.full(3, np.inf)
    return points


def _scale_to(estimated: np.ndarray, reference: np.ndarray) -> float:
    """Least-squares s minimising ‖s·estimated − reference‖."""
    norm = float(np.sum(estimated * estimated))
    if norm == 0:
        raise DegeneratePoints("the estimated point cloud is all zero")
    return float(np.sum(estimated * reference)) / norm


def reprojection_residuals(
    est: "CalibrationResult", obs: Observations, gt_scene: Scene | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Pixel errors ‖x_ip − x̂_ip‖ for views 2..M and a mask of the points in front.

    View-1 points are reprojected through the estimated poses, or through the
    ground-truth poses after aligning the reconstruction's scale to the
    ground-truth scene when ``gt_scene`` is given.
    """
    if obs.num_views < 2:
        raise SizeMismatch("reprojection needs at least two views")
    if est.points.shape[0] == obs.num_points:
        points = est.points
    else:
        points = triangulate(est, obs)

    k = build_k(est.intrinsics)
    if gt_scene is None:
        rotations, centers = est.rotations, est.centers
    else:
        if gt_scene.num_points != obs.num_points:
            raise SizeMismatch(
                f"ground truth has {gt_scene.num_points} points, observations {obs.num_points}"
            )
        gt = gt_scene.relative_to_first()
        points = _scale_to(points, gt.points) * points
        rotations, centers = gt.rotations, gt.centers

    pixels, depths = project_points(k, rotations[1:], centers[1:], points)
    valid = depths > 0
    residuals = np.linalg.norm(obs.pixels[1:] - pixels, axis=2)
    return np.where(valid, residuals, np.nan), valid


def reprojection(
    est: "CalibrationResult", obs: Observations, gt_scene: Scene | None = None
) -> float:
    """Mean reprojection error over views 2..M; points behind a camera are skipped."""
    residuals, valid = reprojection_residuals(est, obs, gt_scene)
    if not np.any(valid):
        raise BehindCamera("every reprojected point lies behind its camera")
    skipped = int(np.sum(~valid))
    if skipped:
        logger.warning(f"Skipped {skipped} reprojections behind the camera")
    return float(np.mean(residuals[valid]))


def _clamped_degrees(cosine: np.ndarray) -> np.ndarray:
    return np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0)))


def rotation_angle(first: np.ndarray, second: np.ndarray) -> float:
    """Angle in degrees of the relative rotation firstᵀ second."""
    cosine = (np.trace(first.T @ second) - 1.0) / 2.0
    if abs(cosine) > 1.0 + CLAMP_TOLERANCE:
        logger.debug(f"Rotation cosine {cosine!r} outside [-1, 1]")
    return float(_clamped_degrees(cosine))


def angular_errors(est: "CalibrationResult", gt_scene: Scene) -> tuple[float, float]:
    """Mean rotation and center-direction errors in degrees over views 2..M."""
    if est.num_views < 2 or gt_scene.num_views != est.num_views:
        raise SizeMismatch("angular errors need matching views, at least two")
    gt = gt_scene.relative_to_first()
    eps_r, eps_c = [], []
    for i in range(1, est.num_views):
        eps_r.append(rotation_angle(gt.rotations[i], est.rotations[i]))
        norm = np.linalg.norm(gt.centers[i]) * np.linalg.norm(est.centers[i])
        if norm == 0:
            raise ZeroCenter(f"camera {i + 1} center coincides with camera 1")
        eps_c.append(float(_clamped_degrees(gt.centers[i] @ est.centers[i] / norm)))
    return float(np.mean(eps_r)), float(np.mean(eps_c))
