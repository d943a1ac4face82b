from .poses import (
    CalibrationResult,
    nearest_rotation,
    points_from_depths,
    recover_poses,
    result_from_solution,
)
from .selection import select_solution

__all__ = [
    "CalibrationResult",
    "nearest_rotation",
    "points_from_depths",
    "recover_poses",
    "result_from_solution",
    "select_solution",
]
