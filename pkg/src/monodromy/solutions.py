"""Solution sets, deduplication and the physical-solution filter."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from src.errors import InvalidInputError
from src.polysys import DepthSystem, ParametricSystem
from src.tracker import refine_batch

logger = logging.getLogger(__name__)

DEDUP_TOL = 1e-6
IMAG_TOL = 1e-6
ZERO_TOL = 1e-8


@dataclass(eq=False)
class SolutionSet:
    parameters: np.ndarray
    solutions: np.ndarray
    residuals: np.ndarray = field(default=None)
    provenance: np.ndarray = field(default=None)

    def __post_init__(self):
        self.parameters = np.asarray(self.parameters, dtype=complex)
        self.solutions = np.asarray(self.solutions, dtype=complex)
        if self.solutions.ndim == 1:
            self.solutions = (
                self.solutions[None, :] if self.solutions.size else self.solutions.reshape(0, 0)
            )
        count = self.solutions.shape[0]
        if self.residuals is None:
            self.residuals = np.zeros(count)
        if self.provenance is None:
            self.provenance = np.full(count, -1, dtype=np.int64)
        self.residuals = np.asarray(self.residuals, dtype=float)
        self.provenance = np.asarray(self.provenance, dtype=np.int64)

    def __len__(self) -> int:
        return self.solutions.shape[0]

    def __iter__(self):
        return iter(self.solutions)

    def merge(self, points, residuals, provenance: int, tol: float = DEDUP_TOL) -> int:
        """Add the points not already present; returns how many were new."""
        points = np.asarray(points, dtype=complex)
        if points.size == 0:
            return 0
        points = points.reshape(-1, points.shape[-1])
        if len(self) == 0:
            self.solutions = self.solutions.reshape(0, points.shape[1])
        before = len(self)
        merged = dedup(
            np.vstack([self.solutions, points]),
            tol,
            residuals=np.concatenate([self.residuals, residuals]),
            provenance=np.concatenate(
                [self.provenance, np.full(points.shape[0], provenance, dtype=np.int64)]
            ),
            parameters=self.parameters,
        )
        self.solutions, self.residuals, self.provenance = (
            merged.solutions,
            merged.residuals,
            merged.provenance,
        )
        return len(self) - before

    def canonical(self) -> "SolutionSet":
        """Solutions sorted by their rounded coordinates, so stored sets are reproducible."""
        if len(self) == 0:
            return self
        rounded = np.round(self.solutions, 8)
        keys = [rounded.imag[:, k] for k in reversed(range(rounded.shape[1]))]
        keys += [rounded.real[:, k] for k in reversed(range(rounded.shape[1]))]
        order = np.lexsort(keys)
        return SolutionSet(
            self.parameters,
            self.solutions[order],
            self.residuals[order],
            self.provenance[order],
        )


def _embed(points: np.ndarray) -> np.ndarray:
    return np.hstack([points.real, points.imag])


def dedup(
    solutions,
    tol: float = DEDUP_TOL,
    residuals=None,
    provenance=None,
    parameters=None,
    system: ParametricSystem | None = None,
) -> SolutionSet:
    """Greedy max-norm clustering; the first member of each cluster is kept.

    Points within ``tol · max(1, ‖x‖∞)`` of a kept point are merged into it.
    With a ``system`` the points are Newton-refined at ``parameters`` first.
    """
    points = np.asarray(solutions, dtype=complex)
    if points.ndim == 1:
        points = points[None, :]
    count = points.shape[0]
    residuals = np.zeros(count) if residuals is None else np.asarray(residuals, dtype=float)
    provenance = (
        np.full(count, -1, dtype=np.int64) if provenance is None else np.asarray(provenance)
    )
    parameters = np.zeros(0, dtype=complex) if parameters is None else parameters
    if count == 0:
        return SolutionSet(parameters, points, residuals, provenance)
    if system is not None:
        points, residuals = refine_batch(system, points, parameters)

    finite = np.all(np.isfinite(points), axis=1)
    tree = cKDTree(_embed(np.where(finite[:, None], points, 0)))
    removed = ~finite
    keep = []
    for i in range(count):
        if removed[i]:
            continue
        keep.append(i)
        radius = tol * max(1.0, float(np.max(np.abs(points[i]))))
        for j in tree.query_ball_point(_embed(points[i : i + 1])[0], radius, p=np.inf):
            if j > i:
                removed[j] = True
    keep = np.array(keep, dtype=np.int64)
    return SolutionSet(parameters, points[keep], residuals[keep], provenance[keep])


def flip_view_depths(system: DepthSystem, x, view: int) -> np.ndarray:
    """Negate every depth of one view (view 0 carries the fixed λ_11 and cannot flip)."""
    if view == 0:
        raise InvalidInputError("the depths of the first view are pinned by λ_11 = 1")
    x = np.array(x, copy=True)
    offset = len(system.omega_unknowns)
    for k, (i, _) in enumerate(system.depth_slots):
        if i == view:
            x[offset + k] = -x[offset + k]
    return x


def filter_physical(
    solution_set: SolutionSet,
    system: DepthSystem,
    p=None,
    imag_tol: float = IMAG_TOL,
    zero_tol: float = ZERO_TOL,
    tol: float = DEDUP_TOL,
) -> list[np.ndarray]:
    """Real candidates with f*, g* > 0 and positive depths, one per depth-sign class."""
    p = solution_set.parameters if p is None else np.asarray(p)
    if len(solution_set) == 0:
        return []
    refined, _ = refine_batch(system, solution_set.solutions, p)
    p_real = np.real(p)

    candidates = []
    for x in refined:
        if not np.all(np.isfinite(x)) or np.max(np.abs(x.imag)) >= imag_tol:
            continue
        x = x.real.copy()
        omega = system.omega_params(x, p_real)
        f_star, g_star = float(np.real(omega.f_star)), float(np.real(omega.g_star))
        depths = system.depths(x).real
        if abs(f_star) < zero_tol or abs(g_star) < zero_tol or np.min(np.abs(depths)) < zero_tol:
            continue
        if f_star <= 0 or g_star <= 0:
            continue
        for view in range(1, system.num_views):
            if np.sum(depths[view] < 0) > depths.shape[1] / 2:
                x = flip_view_depths(system, x, view)
        if np.any(system.depths(x).real <= 0):
            continue
        candidates.append(x)

    if not candidates:
        logger.debug(f"No physical candidates among {len(solution_set)} solutions")
        return []
    unique = dedup(np.array(candidates), tol)
    logger.debug(f"{len(unique)} physical candidates among {len(solution_set)} solutions")
    return [x.real for x in unique.solutions]
