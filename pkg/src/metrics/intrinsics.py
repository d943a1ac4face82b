"""Relative errors of estimated intrinsics against ground truth."""

from src.camera import Intrinsics
from src.errors import ZeroGroundTruth


def delta_fg(est: Intrinsics, gt: Intrinsics) -> float:
    """½(|f̂ − f|/f + |ĝ − g|/g)."""
    if gt.f == 0 or gt.g == 0:
        raise ZeroGroundTruth("ground-truth focal lengths must be nonzero")
    return 0.5 * (abs(est.f - gt.f) / abs(gt.f) + abs(est.g - gt.g) / abs(gt.g))


def delta_uv(est: Intrinsics, gt: Intrinsics) -> float:
    """½(|û − u|/u + |v̂ − v|/v)."""
    if gt.u == 0 or gt.v == 0:
        raise ZeroGroundTruth("ground-truth principal point coordinates must be nonzero")
    return 0.5 * (abs(est.u - gt.u) / abs(gt.u) + abs(est.v - gt.v) / abs(gt.v))


def delta_s(est: Intrinsics, gt: Intrinsics) -> float:
    """2|ŝ − s|/(f + g)."""
    if gt.f + gt.g == 0:
        raise ZeroGroundTruth("f + g of the ground truth must be nonzero")
    return 2.0 * abs(est.s - gt.s) / abs(gt.f + gt.g)
