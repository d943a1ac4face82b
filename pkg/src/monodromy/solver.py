"""Offline discovery of all solutions over one parameter point.

Starting from one fabricated pair (p0, x0), every known solution is tracked
around a triangle p0 -> q1 -> q2 -> p0 with fresh random complex q1, q2. The
endpoints are new solutions of the same fibre whenever the loop permutes
branches. Loops continue until several in a row add nothing.
"""

import logging
from collections.abc import Callable
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from src.errors import NoProgress, NotOnVariety
from src.monodromy.solutions import DEDUP_TOL, SolutionSet, dedup
from src.polysys import DepthSystem, ParametricSystem, synthetic_instance
from src.tracker import TrackSettings, newton_correct, track_all

logger = logging.getLogger(__name__)

SEED_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MonodromySettings:
    stall_loops: int = 5
    max_loops: int = 500
    target: int | None = None
    dedup_tol: float = DEDUP_TOL
    perturbation_scale: float = 1.0
    reanchor: bool = True
    seed: int = 0
    track: TrackSettings = field(default_factory=TrackSettings)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["track"] = self.track.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "MonodromySettings":
        names = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in names}
        if "track" in values:
            values["track"] = TrackSettings.from_dict(values["track"])
        return cls(**values)


def seed_pair(
    system: DepthSystem, seed: int, degenerate: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """(p0, x0) read off a generated scene that matches the system's priors."""
    instance = synthetic_instance(system, seed, degenerate=degenerate)
    residual = instance.residual(system)
    if residual > SEED_TOLERANCE:
        raise NotOnVariety(f"synthetic seed residual {residual:.3e}")
    return instance.parameters, instance.solution


def random_parameters(p0, scale: float, rng: np.random.Generator) -> np.ndarray:
    """p0 plus a complex Gaussian of relative size ``scale`` per coordinate."""
    p0 = np.asarray(p0, dtype=complex)
    noise = (rng.normal(size=p0.shape) + 1j * rng.normal(size=p0.shape)) / np.sqrt(2)
    return p0 + scale * np.maximum(np.abs(p0), 1.0) * noise


def _loop(system, starts, legs, settings: MonodromySettings, threads, rng):
    points = starts
    residuals = np.zeros(points.shape[0])
    alive = np.arange(points.shape[0])
    for p_a, p_b in legs:
        if points.shape[0] == 0:
            break
        results = track_all(system, points, p_a, p_b, settings.track, threads=threads, rng=rng)
        ok = np.array([r.ok for r in results], dtype=bool)
        points = np.array([r.endpoint for r in results])[ok].reshape(-1, system.n_unknowns)
        residuals = np.array([r.residual for r in results])[ok]
        alive = alive[ok]
    return points, residuals, alive


def monodromy_solve(
    system: ParametricSystem,
    pair: tuple[np.ndarray, np.ndarray],
    settings: MonodromySettings | None = None,
    threads: int = 1,
    on_loop: Callable[[int, int, int], None] | None = None,
) -> SolutionSet:
    """Grow the solution set over ``pair[0]`` by monodromy loops."""
    settings = settings or MonodromySettings()
    rng = np.random.default_rng(settings.seed)
    p0 = np.asarray(pair[0], dtype=complex)
    x0 = newton_correct(
        system, pair[1], p0, settings.track.newton_tol, settings.track.max_newton_iters
    )
    residual = float(np.max(np.abs(system.evaluate(x0, p0)), initial=0.0))
    solutions = SolutionSet(p0, x0[None, :], np.array([residual]), np.array([-1]))

    seed_returned = False
    stall = 0
    for loop in range(1, settings.max_loops + 1):
        q1 = random_parameters(p0, settings.perturbation_scale, rng)
        q2 = random_parameters(p0, settings.perturbation_scale, rng)
        ends, residuals, alive = _loop(
            system, solutions.solutions, [(p0, q1), (q1, q2), (q2, p0)], settings, threads, rng
        )
        seed_returned = seed_returned or bool(np.any(alive == 0))
        added = solutions.merge(ends, residuals, loop, settings.dedup_tol)
        logger.info(
            f"Loop {loop}: {len(ends)} paths returned, {added} new, {len(solutions)} known"
        )
        if on_loop is not None:
            on_loop(loop, len(solutions), added)

        if settings.target is not None and len(solutions) >= settings.target:
            break
        stall = 0 if added else stall + 1
        if stall >= settings.stall_loops:
            if not seed_returned:
                raise NoProgress(f"the seed solution failed to return in {loop} loops")
            break
    return solutions


def reanchor(
    system: ParametricSystem,
    solutions: SolutionSet,
    settings: MonodromySettings | None = None,
    threads: int = 1,
    anchor=None,
) -> SolutionSet:
    """Track the whole set to a fresh random complex anchor p1."""
    settings = settings or MonodromySettings()
    rng = np.random.default_rng([settings.seed, 1])
    p1 = random_parameters(solutions.parameters, settings.perturbation_scale, rng)
    if anchor is not None:
        p1 = np.asarray(anchor, dtype=complex)
    results = track_all(
        system, solutions.solutions, solutions.parameters, p1, settings.track, threads, rng=rng
    )
    ok = np.array([r.ok for r in results], dtype=bool)
    moved = dedup(
        np.array([r.endpoint for r in results]).reshape(-1, system.n_unknowns)[ok],
        settings.dedup_tol,
        residuals=np.array([r.residual for r in results])[ok],
        provenance=solutions.provenance[ok],
        parameters=p1,
    )
    lost = len(solutions) - len(moved)
    if lost:
        logger.warning(f"Re-anchoring lost {lost} of {len(solutions)} solutions")
    logger.info(f"Re-anchored {len(moved)} solutions")
    return moved
