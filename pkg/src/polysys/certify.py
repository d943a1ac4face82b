"""Minimality certificates and the oriented-tetrahedron diagnostic.

A square selection is a minimal relaxation when, at a generic point (p0, x0)
of the incidence variety,

    rank(∂g/∂p | ∂g/∂x) = rank(∂g/∂x) = n.

Ranks are read off singular values thresholded relative to the largest one.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy import linalg

from src.camera import IntrinsicsSpec
from src.errors import NotOnVariety
from src.polysys.depth import DepthSystem, build_system
from src.polysys.synthetic import synthetic_instance
from src.polysys.system import ParametricSystem
from src.taxonomy import Coloring, EquationSelection, coloring_to_selection

logger = logging.getLogger(__name__)

RANK_THRESHOLD = 1e-8
RESIDUAL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CertificateReport:
    rank_full: int
    rank_x: int
    n: int
    min_singular_x: float
    residual: float = 0.0

    @property
    def passed(self) -> bool:
        return self.rank_full == self.rank_x == self.n

    def to_dict(self) -> dict:
        data = asdict(self)
        data["passed"] = self.passed
        return data


def numerical_rank(
    matrix: np.ndarray, threshold: float = RANK_THRESHOLD
) -> tuple[int, np.ndarray]:
    if matrix.size == 0:
        return 0, np.zeros(0)
    singular = linalg.svd(matrix, compute_uv=False)
    if singular[0] == 0:
        return 0, singular
    return int(np.sum(singular > threshold * singular[0])), singular


def rank_report(
    jx: np.ndarray,
    jp: np.ndarray,
    n: int,
    threshold: float = RANK_THRESHOLD,
    residual: float = 0.0,
) -> CertificateReport:
    rank_x, singular_x = numerical_rank(jx, threshold)
    rank_full, _ = numerical_rank(np.hstack([jp, jx]), threshold)
    return CertificateReport(
        rank_full=rank_full,
        rank_x=rank_x,
        n=n,
        min_singular_x=float(singular_x[-1]) if singular_x.size else 0.0,
        residual=residual,
    )


def certify_minimal(
    system: ParametricSystem,
    p0,
    x0,
    threshold: float = RANK_THRESHOLD,
    residual_tol: float = RESIDUAL_TOLERANCE,
) -> CertificateReport:
    f, jx, jp = system.evaluate_all(x0, p0)
    residual = float(np.max(np.abs(f), initial=0.0))
    if residual > residual_tol:
        raise NotOnVariety(
            f"residual {residual:.3e} at the certification point exceeds {residual_tol}"
        )
    report = rank_report(jx, jp, system.n_unknowns, threshold, residual)
    logger.debug(
        f"Certificate: rank_full={report.rank_full} rank_x={report.rank_x} n={report.n} "
        f"sigma_min={report.min_singular_x:.3e}"
    )
    return report


def tetra_det_residual(
    system: DepthSystem, x, p, view_pair: tuple[int, int], points=(0, 1, 2, 3)
) -> complex:
    """det[λ_iq x_iq − λ_i0 x_i0]_q for view i minus the same for view j.

    Both determinants equal det(K) times the oriented volume of the
    tetrahedron on the four points, so they agree on every scene.
    """
    depths = system.depths(x)
    pixels = np.asarray(p, dtype=complex)[: 2 * system.num_views * system.n_points]
    pixels = pixels.reshape(system.num_views, system.n_points, 2)
    homogeneous = np.concatenate([pixels, np.ones(pixels.shape[:2] + (1,))], axis=2)
    scaled = depths[:, :, None] * homogeneous

    first, rest = points[0], list(points[1:4])

    def det(view: int) -> complex:
        return np.linalg.det((scaled[view, rest] - scaled[view, first]).T)

    i, j = view_pair
    return complex(det(i) - det(j))


def certify_colorings(
    spec: IntrinsicsSpec, num_views: int, colorings: list[Coloring], seed: int = 0
) -> list[CertificateReport]:
    """Rank certificate of every coloring at one shared synthetic point."""
    if not colorings:
        return []
    n_points = colorings[0].n_points
    everything = EquationSelection.all_equations(n_points, num_views)
    full = build_system(everything, spec, n_points, num_views, strict=False)
    instance = synthetic_instance(full, seed)
    f, jx, jp = full.evaluate_all(instance.solution, instance.parameters)
    residual = float(np.max(np.abs(f)))
    if residual > RESIDUAL_TOLERANCE:
        raise NotOnVariety(f"synthetic point residual {residual:.3e}")

    row_of = {eq: k for k, eq in enumerate(full.selection.equations)}
    reports = []
    for c in colorings:
        rows = [row_of[eq] for eq in coloring_to_selection(c, num_views).equations]
        reports.append(rank_report(jx[rows], jp[rows], full.n_unknowns, residual=residual))
    logger.info(
        f"Certified {sum(r.passed for r in reports)} of {len(reports)} colorings for {spec.code}"
    )
    return reports


def minimal_classes(
    spec: IntrinsicsSpec, num_views: int, colorings: list[Coloring], seed: int = 0
) -> list[int]:
    """Indices of the colorings whose selections pass the rank certificate."""
    reports = certify_colorings(spec, num_views, colorings, seed)
    return [k for k, report in enumerate(reports) if report.passed]
