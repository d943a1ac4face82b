from .settings import PathStatus, TrackResult, TrackSettings
from .paths import detour_point, newton_correct, refine_batch, track_all, track_path

__all__ = [
    "PathStatus",
    "TrackResult",
    "TrackSettings",
    "detour_point",
    "newton_correct",
    "refine_batch",
    "track_all",
    "track_path",
]
