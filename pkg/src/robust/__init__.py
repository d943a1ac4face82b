from .msac import (
    MsacResult,
    MsacSettings,
    huber,
    msac_calibrate,
    sample_tracks,
    score_hypothesis,
    track_residuals,
)

__all__ = [
    "MsacResult",
    "MsacSettings",
    "huber",
    "msac_calibrate",
    "sample_tracks",
    "score_hypothesis",
    "track_residuals",
]
