"""Synthetic scenes: points in the unit sphere seen by 2 or 3 cameras.

The reference camera sits 2 units from the sphere center on the y-axis looking
at it; the other cameras are displaced by up to ±0.5 per axis. Every camera is
additionally rotated by uniform per-axis Euler angles, composed X·Y·Z, and
resampled until all points are in front of it and inside the image.
"""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from src.camera import Intrinsics, build_k
from src.errors import BehindCamera, ExhaustedRetries, InvalidInputError
from src.scene.observations import Observations

logger = logging.getLogger(__name__)

DEFAULT_INTRINSICS = Intrinsics(f=330.0, g=310.0, u=300.0, v=250.0, s=10.0)
NOISE_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass
class SceneConfig:
    num_points: int = 100
    num_views: int = 3
    intrinsics: Intrinsics = field(default_factory=lambda: DEFAULT_INTRINSICS)
    image_size: tuple[int, int] = (640, 480)
    camera_distance: float = 2.0
    max_offset: float = 0.5
    min_translation: float = 0.1
    max_angle_deg: float = 45.0
    max_attempts: int = 10_000

    def to_dict(self) -> dict:
        data = asdict(self)
        data["intrinsics"] = self.intrinsics.to_dict()
        data["image_size"] = list(self.image_size)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SceneConfig":
        data = dict(data)
        if "intrinsics" in data:
            data["intrinsics"] = Intrinsics.from_dict(data["intrinsics"])
        if "image_size" in data:
            data["image_size"] = tuple(data["image_size"])
        return cls(**data)


@dataclass(eq=False)
class Scene:
    """Ground truth: X_p (N, 3), R_i (M, 3, 3), C_i (M, 3) and K."""

    points: np.ndarray
    rotations: np.ndarray
    centers: np.ndarray
    intrinsics: Intrinsics
    image_size: tuple[int, int] = (640, 480)

    @property
    def num_views(self) -> int:
        return self.rotations.shape[0]

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    def camera_points(self) -> np.ndarray:
        """R_i (X_p - C_i), shape (M, N, 3)."""
        diff = self.points[None, :, :] - self.centers[:, None, :]
        return np.einsum("mij,mnj->mni", self.rotations, diff)

    def relative_to_first(self) -> "Scene":
        """The same scene in the frame of camera 1 (R_1 = I, C_1 = 0)."""
        r1, c1 = self.rotations[0], self.centers[0]
        return Scene(
            points=(self.points - c1) @ r1.T,
            rotations=self.rotations @ r1.T,
            centers=(self.centers - c1) @ r1.T,
            intrinsics=self.intrinsics,
            image_size=self.image_size,
        )

    def subset(self, points) -> "Scene":
        return Scene(
            points=self.points[list(points)],
            rotations=self.rotations,
            centers=self.centers,
            intrinsics=self.intrinsics,
            image_size=self.image_size,
        )

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "rotations": self.rotations.reshape(-1, 9).tolist(),
            "centers": self.centers.tolist(),
            "intrinsics": self.intrinsics.to_dict(),
            "image_size": list(self.image_size),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scene":
        return cls(
            points=np.array(data["points"], dtype=float),
            rotations=np.array(data["rotations"], dtype=float).reshape(-1, 3, 3),
            centers=np.array(data["centers"], dtype=float),
            intrinsics=Intrinsics.from_dict(data["intrinsics"]),
            image_size=tuple(data.get("image_size", (640, 480))),
        )


def look_at(center: np.ndarray, target: np.ndarray, up: np.ndarray | None = None) -> np.ndarray:
    """World-to-camera rotation whose optical axis (third row) points at ``target``."""
    z = target - center
    z = z / np.linalg.norm(z)
    up = np.array([0.0, 0.0, 1.0]) if up is None else up
    x = np.cross(z, up)
    if np.linalg.norm(x) < 1e-8:
        x = np.cross(z, np.array([1.0, 0.0, 0.0]))
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    return np.vstack([x, y, z])


def sample_unit_ball(rng: np.random.Generator, count: int) -> np.ndarray:
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(0.0, 1.0, size=count) ** (1.0 / 3.0)
    return directions * radii[:, None]


def random_euler(rng: np.random.Generator, max_angle_deg: float) -> np.ndarray:
    angles = rng.uniform(-max_angle_deg, max_angle_deg, size=3)
    return Rotation.from_euler("XYZ", angles, degrees=True).as_matrix()


def _visible(points: np.ndarray, rotation, center, k, image_size) -> bool:
    cam = (points - center) @ rotation.T
    if np.any(cam[:, 2] <= 0):
        return False
    pix = cam @ k.T
    pix = pix[:, :2] / pix[:, 2:3]
    width, height = image_size
    return bool(
        np.all(pix[:, 0] >= 0) and np.all(pix[:, 0] <= width)
        and np.all(pix[:, 1] >= 0) and np.all(pix[:, 1] <= height)
    )


def _check_config(config: SceneConfig) -> None:
    if config.num_points < 4:
        raise InvalidInputError("a scene needs at least 4 points")
    if config.num_views not in (2, 3):
        raise InvalidInputError("scenes have 2 or 3 views")


def generate_scene(config: SceneConfig, seed: int) -> Scene:
    _check_config(config)
    rng = np.random.default_rng(seed)
    k = build_k(config.intrinsics)
    points = sample_unit_ball(rng, config.num_points)
    reference = np.array([0.0, -config.camera_distance, 0.0])
    base = look_at(reference, np.zeros(3))

    rotations, centers = [], []
    attempts = 0
    for view in range(config.num_views):
        while True:
            attempts += 1
            if attempts > config.max_attempts:
                raise ExhaustedRetries(
                    f"no valid camera {view + 1} after {config.max_attempts} attempts"
                )
            if view == 0:
                center = reference
            else:
                offset = rng.uniform(-config.max_offset, config.max_offset, size=3)
                if np.linalg.norm(offset) < config.min_translation:
                    continue
                center = reference + offset
            rotation = random_euler(rng, config.max_angle_deg) @ base
            if _visible(points, rotation, center, k, config.image_size):
                break
        rotations.append(rotation)
        centers.append(center)

    logger.debug(f"Scene seed={seed} generated after {attempts} attempts")
    return Scene(
        points=points,
        rotations=np.array(rotations),
        centers=np.array(centers),
        intrinsics=config.intrinsics,
        image_size=config.image_size,
    )


def generate_degenerate_scene(config: SceneConfig, seed: int) -> Scene:
    """Centers on a sphere about the point cloud, optical axes through its center."""
    _check_config(config)
    rng = np.random.default_rng(seed)
    k = build_k(config.intrinsics)
    points = sample_unit_ball(rng, config.num_points)
    radius = config.camera_distance

    rotations, centers = [], []
    attempts = 0
    for view in range(config.num_views):
        while True:
            attempts += 1
            if attempts > config.max_attempts:
                raise ExhaustedRetries(
                    f"no valid degenerate camera {view + 1} after {config.max_attempts} attempts"
                )
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            center = radius * direction
            if any(np.linalg.norm(center - c) < config.min_translation for c in centers):
                continue
            roll = rng.uniform(-np.pi, np.pi)
            rotation = Rotation.from_euler("Z", roll).as_matrix() @ look_at(center, np.zeros(3))
            if _visible(points, rotation, center, k, config.image_size):
                break
        rotations.append(rotation)
        centers.append(center)

    return Scene(
        points=points,
        rotations=np.array(rotations),
        centers=np.array(centers),
        intrinsics=config.intrinsics,
        image_size=config.image_size,
    )


def project(scene: Scene) -> Observations:
    cam = scene.camera_points()
    depths = cam[:, :, 2]
    if np.any(depths <= 0):
        raise BehindCamera("a point lies behind a camera")
    pix = cam @ build_k(scene.intrinsics).T
    pixels = pix[:, :, :2] / pix[:, :, 2:3]
    return Observations(pixels=pixels, true_depths=depths, image_size=scene.image_size)


def add_noise(obs: Observations, sigma: float, seed: int) -> Observations:
    if sigma < 0:
        raise InvalidInputError("sigma must be non-negative")
    if sigma == 0:
        return obs.with_pixels(obs.pixels.copy(), keep_depths=False)
    rng = np.random.default_rng(seed)
    return obs.with_pixels(obs.pixels + rng.normal(0.0, sigma, size=obs.pixels.shape))
