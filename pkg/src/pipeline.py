"""Online solving: from pixel observations to ranked calibrations.

The bundle's solutions over its complex anchor are tracked to the parameters
of the normalized observations; real solutions with positive focal squares
and depths become candidate calibrations ranked by reprojection error.
"""

import logging

import numpy as np

from src.camera import Intrinsics, IntrinsicsSpec, normalize_observations
from src.errors import AutocalError, InvalidInputError, NoPhysicalSolution
from src.metrics import reprojection
from src.monodromy import SolutionSet, StartBundle, filter_physical
from src.polysys import conditioning_for
from src.recovery import CalibrationResult, result_from_solution, select_solution
from src.scene import Observations
from src.tracker import TrackSettings, track_all

logger = logging.getLogger(__name__)


def data_spec(spec: IntrinsicsSpec, known: Intrinsics | None) -> IntrinsicsSpec:
    """The bundle's mask with known values taken from ``known`` in pixels."""
    if known is not None:
        return spec.with_reference(known)
    needed = [name for name in ("f", "g", "u", "v") if spec.is_known(name)]
    if needed:
        raise InvalidInputError(
            f"spec {spec.code} needs known values for {', '.join(needed)}; pass known intrinsics"
        )
    return spec


def solve_instance(
    bundle: StartBundle,
    obs: Observations,
    known: Intrinsics | None = None,
    settings: TrackSettings | None = None,
    threads: int = 1,
) -> list[CalibrationResult]:
    """Every physical calibration of ``obs``, best reprojection error first."""
    system = bundle.system
    if obs.num_views != system.num_views or obs.num_points != system.n_points:
        raise InvalidInputError(
            f"bundle solves {system.num_views} views of {system.n_points} points, "
            f"got {obs.num_views} of {obs.num_points}"
        )
    spec = data_spec(system.spec, known)
    normalized, record = normalize_observations(
        obs,
        spec,
        conditioning=conditioning_for(obs.image_size),
        skew_as_parameter=system.skew_as_parameter,
    )
    p = system.parameters_from(normalized, record).astype(complex)

    results = track_all(system, bundle.solutions, bundle.anchor, p, settings, threads=threads)
    ends = np.array([r.endpoint for r in results if r.ok]).reshape(-1, system.n_unknowns)
    logger.debug(f"{len(ends)} of {len(results)} paths reached the instance")
    physical = filter_physical(SolutionSet(p, ends), system, p)

    candidates = []
    for k, x in enumerate(physical):
        try:
            candidate = result_from_solution(system, x, p, normalized, record, solution_index=k)
            candidate.score = reprojection(candidate, obs)
        except AutocalError as e:
            logger.debug(f"Physical solution {k} rejected: {e}")
            continue
        candidates.append(candidate)
    if not candidates:
        raise NoPhysicalSolution(f"no physical solution among {len(ends)} tracked paths")

    candidates.sort(key=lambda c: (c.score, -float(np.min(c.depths))))
    logger.info(f"{len(candidates)} physical calibrations, best Re={candidates[0].score:.3e}")
    return candidates


def calibrate(
    bundle: StartBundle,
    obs: Observations,
    known: Intrinsics | None = None,
    settings: TrackSettings | None = None,
    threads: int = 1,
) -> CalibrationResult:
    """The single best calibration of a minimal sample."""
    candidates = solve_instance(bundle, obs, known, settings, threads)
    return select_solution(candidates, obs, data_spec(bundle.system.spec, known))
