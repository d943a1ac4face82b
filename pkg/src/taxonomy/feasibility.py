"""Degree-of-freedom accounting for (intrinsics mask, M, N).

With L linear constraints on K, a finite set of solutions needs
L >= 3N + 6M - 2 - 2MN; two views additionally need L >= 3 and any Euclidean
reconstruction needs N >= 4. The depth formulation has n = (5 - L) + MN - 1
unknowns and (M - 1)·C(N, 2) available equations.
"""

from dataclasses import dataclass
from enum import Enum

from scipy.special import comb

from src.camera import IntrinsicsSpec, all_masks
from src.errors import InvalidInputError

MAX_POINTS = 64


class Status(str, Enum):
    MINIMAL = "minimal"
    RELAXABLE = "overconstrained-relaxable"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class FeasibilityRow:
    spec: IntrinsicsSpec
    M: int
    N_min: int | None
    L: int
    n: int | None
    n_avail: int | None
    n_drop: int | None
    raw_colorings: int | None
    status: Status
    classes: int | None = None

    def csv_row(self) -> dict:
        return {
            "spec": self.spec.code,
            "M": self.M,
            "N": "" if self.N_min is None else self.N_min,
            "L": self.L,
            "n": "" if self.n is None else self.n,
            "avail": "" if self.n_avail is None else self.n_avail,
            "drop": "" if self.n_drop is None else self.n_drop,
            "raw": "" if self.raw_colorings is None else self.raw_colorings,
            "classes": "" if self.classes is None else self.classes,
            "status": self.status.value,
        }


CSV_COLUMNS = ("spec", "M", "N", "L", "n", "avail", "drop", "raw", "classes", "status")


def unknown_count(L: int, M: int, N: int) -> int:
    return (5 - L) + M * N - 1


def available_equations(M: int, N: int) -> int:
    return (M - 1) * N * (N - 1) // 2


def lower_bound(M: int, N: int) -> int:
    return 3 * N + 6 * M - 2 - 2 * M * N


def feasibility(spec: IntrinsicsSpec, M: int) -> FeasibilityRow:
    if M not in (2, 3):
        raise InvalidInputError("feasibility is tabulated for 2 or 3 views")
    L = spec.L
    if M == 2 and L < 3:
        return FeasibilityRow(spec, M, None, L, None, None, None, None, Status.INFEASIBLE)

    N = 4
    while lower_bound(M, N) > L:
        N += 1
        if N > MAX_POINTS:
            return FeasibilityRow(spec, M, None, L, None, None, None, None, Status.INFEASIBLE)

    n = unknown_count(L, M, N)
    n_avail = available_equations(M, N)
    n_drop = n_avail - n
    if n_drop < 0:
        return FeasibilityRow(spec, M, N, L, n, n_avail, None, None, Status.INFEASIBLE)

    status = Status.MINIMAL if lower_bound(M, N) == L else Status.RELAXABLE
    raw = int(comb(n_avail, n_drop, exact=True))
    return FeasibilityRow(spec, M, N, L, n, n_avail, n_drop, raw, status)


def feasibility_table() -> list[FeasibilityRow]:
    return [feasibility(spec, M) for spec in all_masks() for M in (2, 3)]
