from dataclasses import dataclass, field

import numpy as np


@dataclass(eq=False)
class Observations:
    """Pixel measurements x_{ip} for M views of N points.

    ``pixels`` has shape (M, N, 2); ``true_depths`` (M, N) is only present for
    noiseless synthetic data.
    """

    pixels: np.ndarray
    true_depths: np.ndarray | None = None
    image_size: tuple[int, int] = (640, 480)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float)
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 2:
            raise ValueError(f"pixels must have shape (M, N, 2), got {self.pixels.shape}")
        if self.true_depths is not None:
            self.true_depths = np.asarray(self.true_depths, dtype=float)

    @property
    def num_views(self) -> int:
        return self.pixels.shape[0]

    @property
    def num_points(self) -> int:
        return self.pixels.shape[1]

    def homogeneous(self) -> np.ndarray:
        ones = np.ones(self.pixels.shape[:2] + (1,))
        return np.concatenate([self.pixels, ones], axis=2)

    def parameters(self) -> np.ndarray:
        """Pixel coordinates flattened view-major, point-minor, (x, y) per point."""
        return self.pixels.reshape(-1).copy()

    def subset(self, points) -> "Observations":
        points = list(points)
        depths = None if self.true_depths is None else self.true_depths[:, points]
        return Observations(
            pixels=self.pixels[:, points],
            true_depths=depths,
            image_size=self.image_size,
            meta=dict(self.meta),
        )

    def with_pixels(self, pixels: np.ndarray, keep_depths: bool = False) -> "Observations":
        return Observations(
            pixels=pixels,
            true_depths=self.true_depths if keep_depths else None,
            image_size=self.image_size,
            meta=dict(self.meta),
        )

    def to_dict(self) -> dict:
        data = {
            "pixels": self.pixels.tolist(),
            "image_size": list(self.image_size),
        }
        if self.true_depths is not None:
            data["depths"] = self.true_depths.tolist()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Observations":
        depths = data.get("depths")
        return cls(
            pixels=np.array(data["pixels"], dtype=float),
            true_depths=None if depths is None else np.array(depths, dtype=float),
            image_size=tuple(data.get("image_size", (640, 480))),
        )

    @classmethod
    def from_tracks(cls, tracks, image_size: tuple[int, int] = (640, 480)) -> "Observations":
        """Tracks file layout: [view][point][x, y]."""
        return cls(pixels=np.array(tracks, dtype=float), image_size=tuple(image_size))
