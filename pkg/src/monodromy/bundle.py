"""Start-system bundles: a solved fibre persisted for online solving.

Complex numbers are stored as [re, im] pairs. Loading rebuilds the system
from its descriptor and re-verifies every stored solution with one Newton
pass at the anchor.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src import __version__
from src.errors import InvalidInputError, NotOnVariety
from src.monodromy.solutions import SolutionSet
from src.polysys import DepthSystem, system_from_descriptor
from src.tracker import refine_batch

logger = logging.getLogger(__name__)

VERIFY_TOLERANCE = 1e-10


def complex_to_pairs(values: np.ndarray) -> list:
    values = np.asarray(values, dtype=complex)
    return np.stack([values.real, values.imag], axis=-1).tolist()


def pairs_to_complex(data) -> np.ndarray:
    array = np.asarray(data, dtype=float)
    if array.shape[-1] != 2:
        raise InvalidInputError("complex values must be stored as [re, im] pairs")
    return array[..., 0] + 1j * array[..., 1]


@dataclass(eq=False)
class StartBundle:
    system: DepthSystem
    anchor: np.ndarray
    solutions: np.ndarray
    settings: dict = field(default_factory=dict)
    certificate: dict | None = None
    meta: dict = field(default_factory=dict)
    version: str = __version__

    def __len__(self) -> int:
        return self.solutions.shape[0]

    @property
    def n_points(self) -> int:
        return self.system.n_points

    @property
    def num_views(self) -> int:
        return self.system.num_views

    def solution_set(self) -> SolutionSet:
        return SolutionSet(self.anchor, self.solutions)

    @classmethod
    def from_solution_set(
        cls, system: DepthSystem, solutions: SolutionSet, **kwargs
    ) -> "StartBundle":
        ordered = solutions.canonical()
        return cls(system=system, anchor=ordered.parameters, solutions=ordered.solutions, **kwargs)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "system": self.system.descriptor(),
            "anchor": complex_to_pairs(self.anchor),
            "solutions": complex_to_pairs(self.solutions),
            "settings": self.settings,
            "certificate": self.certificate,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StartBundle":
        system = system_from_descriptor(data["system"])
        solutions = pairs_to_complex(data["solutions"]).reshape(-1, system.n_unknowns)
        return cls(
            system=system,
            anchor=pairs_to_complex(data["anchor"]),
            solutions=solutions,
            settings=data.get("settings", {}),
            certificate=data.get("certificate"),
            meta=data.get("meta", {}),
            version=data.get("version", "unknown"),
        )

    def verify(self, tol: float = VERIFY_TOLERANCE) -> np.ndarray:
        """One Newton pass at the anchor; raises if any stored solution drifted."""
        if len(self) == 0:
            return np.zeros(0)
        refined, _ = refine_batch(self.system, self.solutions, self.anchor, tol=0.0, max_iters=1)
        residual = np.max(np.abs(self.system.evaluate(refined, self.anchor)), axis=1)
        bad = int(np.sum(~(residual < tol)))
        if bad:
            raise NotOnVariety(f"{bad} of {len(self)} stored solutions fail verification")
        self.solutions = refined
        return residual

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f)
        logger.info(f"Saved bundle with {len(self)} solutions to {path}")
        return path


def load_bundle(path: Path, verify: bool = True) -> StartBundle:
    path = Path(path)
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read bundle {path}: {e}") from e
    bundle = StartBundle.from_dict(data)
    if bundle.version != __version__:
        logger.warning(f"Bundle {path.name} was written by version {bundle.version}")
    if verify:
        bundle.verify()
    logger.info(
        f"Loaded bundle {path.name}: {len(bundle)} solutions, spec {bundle.system.spec.code}"
    )
    return bundle
