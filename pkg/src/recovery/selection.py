import logging

import numpy as np

from src.camera import Intrinsics, IntrinsicsSpec
from src.errors import AutocalError, NoPhysicalSolution
from src.metrics import reprojection
from src.recovery.poses import CalibrationResult
from src.scene import Observations

logger = logging.getLogger(__name__)

PRIOR_RTOL = 1e-6


def _respects(k: Intrinsics, spec: IntrinsicsSpec) -> bool:
    """Whether ``k`` keeps the known values and the square-pixel tie of ``spec``."""
    if spec.g_tied and not np.isclose(k.g, k.f, rtol=PRIOR_RTOL, atol=0.0):
        return False
    for name in ("f", "g", "u", "v"):
        if spec.is_known(name) and not np.isclose(
            getattr(k, name), getattr(spec, name).value, rtol=PRIOR_RTOL, atol=PRIOR_RTOL
        ):
            return False
    if spec.is_known("s"):
        return bool(np.isclose(k.s / k.g, spec.s.value, rtol=0.0, atol=PRIOR_RTOL))
    return True


def select_solution(
    candidates: list[CalibrationResult],
    obs: Observations,
    spec: IntrinsicsSpec | None = None,
) -> CalibrationResult:
    """The candidate with the smallest mean reprojection error.

    Ties go to the candidate whose smallest depth is largest. With ``spec``
    (known values in pixels), candidates that break its priors are skipped.
    The winner's ``score`` is set to its reprojection error.
    """
    if not candidates:
        raise NoPhysicalSolution("no physical candidate to select from")
    ranked = []
    for k, candidate in enumerate(candidates):
        if spec is not None and not _respects(candidate.intrinsics, spec):
            logger.debug(f"Candidate {k} breaks the {spec.code} prior")
            continue
        try:
            error = reprojection(candidate, obs)
        except AutocalError as e:
            logger.debug(f"Candidate {k} not scored: {e}")
            continue
        ranked.append((error, -float(np.min(candidate.depths)), k))
    if not ranked:
        raise NoPhysicalSolution(f"none of {len(candidates)} candidates reprojects")
    error, _, best = min(ranked)
    winner = candidates[best]
    winner.score = error
    logger.debug(f"Selected candidate {best} of {len(candidates)} with Re={error:.3e}")
    return winner
