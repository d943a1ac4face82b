"""Normalization of known intrinsics in image coordinates.

K factors as translation(u, v) · shear(s*) · scaling(f, g). Known parts are
removed in the order translate -> unshear -> scale, optionally preceded by an
isotropic conditioning scale, and each removal is recorded as a 3×3 affine map
acting on homogeneous pixels so the composition can be undone exactly.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.camera.intrinsics import Intrinsics, build_k, intrinsics_from_k
from src.camera.spec import IntrinsicsSpec
from src.errors import ShearWithoutV
from src.scene.observations import Observations

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizationStep:
    kind: str
    values: tuple[float, ...]

    def matrix(self) -> np.ndarray:
        a = np.eye(3)
        if self.kind == "condition":
            a[0, 0] = a[1, 1] = self.values[0]
        elif self.kind == "translate":
            a[0, 2], a[1, 2] = -self.values[0], -self.values[1]
        elif self.kind == "unshear":
            a[0, 1] = -self.values[0]
        elif self.kind == "scale":
            a[0, 0], a[1, 1] = self.values
        else:
            raise ValueError(f"unknown normalization step {self.kind!r}")
        return a


@dataclass(frozen=True)
class NormalizationRecord:
    steps: tuple[NormalizationStep, ...] = ()
    skew_parameter: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def matrix(self) -> np.ndarray:
        """Composite map A with x_normalized = A x_original."""
        a = np.eye(3)
        for step in self.steps:
            a = step.matrix() @ a
        return a

    def apply(self, pixels: np.ndarray) -> np.ndarray:
        a = self.matrix()
        return pixels @ a[:2, :2].T + a[:2, 2]

    def invert(self, pixels: np.ndarray) -> np.ndarray:
        a = np.linalg.inv(self.matrix())
        return pixels @ a[:2, :2].T + a[:2, 2]

    def to_dict(self) -> dict:
        return {
            "steps": [{"kind": s.kind, "values": list(s.values)} for s in self.steps],
            "skew_parameter": self.skew_parameter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationRecord":
        return cls(
            steps=tuple(NormalizationStep(s["kind"], tuple(s["values"])) for s in data["steps"]),
            skew_parameter=data.get("skew_parameter"),
        )


def normalize_observations(
    obs: Observations,
    spec: IntrinsicsSpec,
    conditioning: float | None = None,
    skew_as_parameter: bool = False,
) -> tuple[Observations, NormalizationRecord]:
    """Map known intrinsics to f = g = 1, u = v = 0, s = 0.

    With ``skew_as_parameter`` a known nonzero s* whose v is unknown is kept in
    the data and reported as ``record.skew_parameter`` in normalized units.
    """
    steps: list[NormalizationStep] = []
    scale = 1.0
    if conditioning is not None and conditioning != 1.0:
        scale = float(conditioning)
        steps.append(NormalizationStep("condition", (scale,)))

    du = spec.u.value * scale if spec.is_known("u") else 0.0
    dv = spec.v.value * scale if spec.is_known("v") else 0.0
    if du != 0.0 or dv != 0.0:
        steps.append(NormalizationStep("translate", (du, dv)))

    skew_parameter = None
    if spec.is_known("s") and spec.s.value != 0.0:
        if spec.is_known("v"):
            steps.append(NormalizationStep("unshear", (spec.s.value,)))
        elif skew_as_parameter:
            skew_parameter = spec.s.value
        else:
            raise ShearWithoutV("known nonzero skew needs a known v to remove the shear")

    sx = 1.0 / (spec.f.value * scale) if spec.is_known("f") else 1.0
    if spec.is_known("g"):
        sy = 1.0 / (spec.g.value * scale)
    elif spec.g_tied:
        sy = sx
    else:
        sy = 1.0
    if sx != 1.0 or sy != 1.0:
        steps.append(NormalizationStep("scale", (sx, sy)))
    if skew_parameter is not None:
        skew_parameter = skew_parameter * sx / sy

    record = NormalizationRecord(steps=tuple(steps), skew_parameter=skew_parameter)
    if not steps:
        return obs, record

    logger.debug(f"Normalizing {spec.code}: {[s.kind for s in steps]}")
    normalized = Observations(
        pixels=record.apply(obs.pixels),
        true_depths=obs.true_depths,
        image_size=obs.image_size,
        meta=dict(obs.meta),
    )
    return normalized, record


def denormalize_intrinsics(est: Intrinsics, rec: NormalizationRecord) -> Intrinsics:
    if not rec.steps:
        return est
    k = np.linalg.solve(rec.matrix(), build_k(est))
    return intrinsics_from_k(k)


def normalize_intrinsics(intr: Intrinsics, rec: NormalizationRecord) -> Intrinsics:
    """The camera as seen in normalized coordinates (A K)."""
    if not rec.steps:
        return intr
    return intrinsics_from_k(rec.matrix() @ build_k(intr))
