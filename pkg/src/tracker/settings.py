from dataclasses import asdict, dataclass, fields
from enum import Enum

import numpy as np

from src.errors import InvalidInputError


class PathStatus(str, Enum):
    SUCCESS = "success"
    DIVERGED = "diverged"
    SINGULAR = "singular-endpoint"
    STEP_LIMIT = "step-limit"


@dataclass(frozen=True)
class TrackSettings:
    newton_tol: float = 1e-10
    max_newton_iters: int = 8
    corrector_iters: int = 3
    corrector_tol: float = 1e-8
    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step: float = 0.2
    step_growth: float = 1.5
    growth_after: int = 2
    step_shrink: float = 0.5
    max_steps: int = 10_000
    divergence_bound: float = 1e8
    detour_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.min_step <= self.initial_step <= self.max_step <= 1:
            raise InvalidInputError("need 0 < min_step <= initial_step <= max_step <= 1")
        if self.newton_tol <= 0 or self.corrector_tol <= 0:
            raise InvalidInputError("tolerances must be positive")
        if not 0 < self.step_shrink < 1 or self.step_growth < 1:
            raise InvalidInputError("need 0 < step_shrink < 1 <= step_growth")
        if self.max_newton_iters < 1 or self.corrector_iters < 1 or self.max_steps < 1:
            raise InvalidInputError("iteration limits must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "TrackSettings":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


@dataclass(eq=False)
class TrackResult:
    status: PathStatus
    endpoint: np.ndarray
    residual: float
    steps_taken: int

    @property
    def ok(self) -> bool:
        return self.status is PathStatus.SUCCESS
