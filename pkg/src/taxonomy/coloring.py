"""Edge colorings of the complete graph on N points.

A coloring records which depth equations are kept for each point pair:
B keeps both view pairs (1,2) and (1,3), R keeps only (1,2), G keeps only
(1,3) and W keeps neither. Two-view colorings use B and W only.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

from src.errors import InvalidInputError

VIEW_PAIRS = ((0, 1), (0, 2))


class Color(str, Enum):
    B = "B"
    R = "R"
    G = "G"
    W = "W"

    def swapped(self) -> "Color":
        return {Color.R: Color.G, Color.G: Color.R}.get(self, self)


def point_pairs(n_points: int) -> list[tuple[int, int]]:
    return list(combinations(range(n_points), 2))


@dataclass(frozen=True)
class Coloring:
    n_points: int
    colors: tuple[Color, ...]

    def __post_init__(self):
        expected = self.n_points * (self.n_points - 1) // 2
        if len(self.colors) != expected:
            raise InvalidInputError(
                f"coloring on {self.n_points} points needs {expected} colors, "
                f"got {len(self.colors)}"
            )

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return point_pairs(self.n_points)

    def color(self, p: int, q: int) -> Color:
        p, q = min(p, q), max(p, q)
        return self.colors[self.pairs.index((p, q))]

    def items(self):
        return zip(self.pairs, self.colors)

    def count(self, color: Color) -> int:
        return sum(1 for c in self.colors if c is color)

    @property
    def num_views(self) -> int:
        return 3 if any(c in (Color.R, Color.G) for c in self.colors) else 2

    def swap_views(self) -> "Coloring":
        return Coloring(self.n_points, tuple(c.swapped() for c in self.colors))

    def relabel(self, sigma) -> "Coloring":
        """The coloring c ∘ σ⁻¹: pair {σ(p), σ(q)} gets the color of {p, q}."""
        lookup = {}
        for (p, q), c in self.items():
            a, b = sigma[p], sigma[q]
            lookup[(min(a, b), max(a, b))] = c
        return Coloring(self.n_points, tuple(lookup[pair] for pair in self.pairs))

    def equation_count(self, num_views: int = 3) -> int:
        if num_views == 2:
            return sum(1 for c in self.colors if c is not Color.W)
        weights = {Color.B: 2, Color.R: 1, Color.G: 1, Color.W: 0}
        return sum(weights[c] for c in self.colors)

    @classmethod
    def full(cls, n_points: int) -> "Coloring":
        return cls(n_points, tuple(Color.B for _ in point_pairs(n_points)))

    @classmethod
    def from_dropped(cls, n_points: int, dropped, num_views: int = 3) -> "Coloring":
        """Build from dropped equations given as (view_pair, (p, q)) with zero-based indices."""
        pairs = point_pairs(n_points)
        removed = {pair: set() for pair in pairs}
        for view_pair, (p, q) in dropped:
            removed[(min(p, q), max(p, q))].add(tuple(view_pair))
        colors = []
        for pair in pairs:
            gone = removed[pair]
            if num_views == 2:
                colors.append(Color.W if gone else Color.B)
            elif gone >= set(VIEW_PAIRS):
                colors.append(Color.W)
            elif (0, 2) in gone:
                colors.append(Color.R)
            elif (0, 1) in gone:
                colors.append(Color.G)
            else:
                colors.append(Color.B)
        return cls(n_points, tuple(colors))

    def to_json(self) -> list[list[str]]:
        """Pairs with one-based point labels, e.g. [["1", "2", "B"], ...]."""
        return [[str(p + 1), str(q + 1), c.value] for (p, q), c in self.items()]

    @classmethod
    def from_json(cls, data: list) -> "Coloring":
        entries = {(int(p) - 1, int(q) - 1): Color(c) for p, q, c in data}
        n_points = max(max(p, q) for p, q in entries) + 1
        return cls(
            n_points,
            tuple(entries.get(pair, Color.W) for pair in point_pairs(n_points)),
        )

    def __str__(self) -> str:
        return "".join(c.value for c in self.colors)


@dataclass(frozen=True)
class EquationSelection:
    """Kept depth equations d_{i,j,pq} as (view_pair, point_pair), zero-based."""

    equations: tuple[tuple[tuple[int, int], tuple[int, int]], ...]

    def __post_init__(self):
        if len(set(self.equations)) != len(self.equations):
            raise InvalidInputError("selection contains duplicate equations")

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def labels(self) -> list[str]:
        return [f"d_{{{i + 1},{j + 1},{p + 1}{q + 1}}}" for (i, j), (p, q) in self.equations]

    def to_json(self) -> list[list[int]]:
        return [[i, j, p, q] for (i, j), (p, q) in self.equations]

    @classmethod
    def from_json(cls, data: list) -> "EquationSelection":
        return cls(tuple(((i, j), (p, q)) for i, j, p, q in data))

    @classmethod
    def all_equations(cls, n_points: int, num_views: int) -> "EquationSelection":
        return coloring_to_selection(Coloring.full(n_points), num_views)


def coloring_to_selection(c: Coloring, num_views: int = 3) -> EquationSelection:
    equations = []
    for pair, color in c.items():
        if color in (Color.B, Color.R):
            equations.append(((0, 1), pair))
        if num_views == 3 and color in (Color.B, Color.G):
            equations.append(((0, 2), pair))
    return EquationSelection(tuple(equations))
