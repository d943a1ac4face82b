"""The relaxations used by the shipped solvers.

Dropped equations are written one-based, ``(i, j, p, q)`` for d_{i,j,pq}.
"""

from dataclasses import dataclass

from src.camera import IntrinsicsSpec
from src.errors import InvalidInputError
from src.taxonomy.coloring import Coloring, EquationSelection, coloring_to_selection


@dataclass(frozen=True)
class ShippedRelaxation:
    name: str
    code: str
    num_views: int
    n_points: int
    dropped: tuple[tuple[int, int, int, int], ...]
    expected_solutions: int | None = None

    @property
    def spec(self) -> IntrinsicsSpec:
        return IntrinsicsSpec.parse(self.code)

    def coloring(self) -> Coloring:
        dropped = [((i - 1, j - 1), (p - 1, q - 1)) for i, j, p, q in self.dropped]
        return Coloring.from_dropped(self.n_points, dropped, self.num_views)

    def selection(self) -> EquationSelection:
        return coloring_to_selection(self.coloring(), self.num_views)


SHIPPED = {
    "calibrated": ShippedRelaxation(
        name="calibrated",
        code="11000",
        num_views=3,
        n_points=4,
        dropped=((1, 2, 1, 2),),
        expected_solutions=640,
    ),
    "fguv0": ShippedRelaxation(
        name="fguv0",
        code="fguv0",
        num_views=3,
        n_points=5,
        dropped=((1, 2, 4, 5), (1, 3, 4, 5)),
        expected_solutions=2313,
    ),
    "ffuv0": ShippedRelaxation(
        name="ffuv0",
        code="ffuv0",
        num_views=3,
        n_points=5,
        dropped=((1, 2, 4, 5), (1, 3, 4, 5), (1, 2, 3, 5)),
        expected_solutions=16188,
    ),
    "fguvs": ShippedRelaxation(
        name="fguvs",
        code="fguvs",
        num_views=3,
        n_points=6,
        dropped=(
            (1, 2, 5, 6),
            (1, 3, 5, 6),
            (1, 2, 4, 5),
            (1, 3, 4, 5),
            (1, 2, 4, 6),
            (1, 2, 3, 6),
            (1, 2, 2, 6),
            (1, 3, 3, 4),
        ),
        expected_solutions=2985,
    ),
}


def shipped(name: str) -> ShippedRelaxation:
    try:
        return SHIPPED[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown relaxation {name!r}; choose from {', '.join(SHIPPED)}"
        ) from None
