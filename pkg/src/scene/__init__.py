from .observations import Observations
from .generator import (
    DEFAULT_INTRINSICS,
    NOISE_GRID,
    Scene,
    SceneConfig,
    add_noise,
    generate_degenerate_scene,
    generate_scene,
    look_at,
    project,
)

__all__ = [
    "Observations",
    "DEFAULT_INTRINSICS",
    "NOISE_GRID",
    "Scene",
    "SceneConfig",
    "add_noise",
    "generate_degenerate_scene",
    "generate_scene",
    "look_at",
    "project",
]
