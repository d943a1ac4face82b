"""Knowledge of intrinsics as a five-slot mask over (f, g, u, v, s).

Compact codes follow the usual notation: a letter is unknown, a digit is known
with that (normalized) value and ``f`` in slot g ties g to f. ``fguv0`` has
zero skew, ``ffuv0`` square pixels and zero skew, ``11000`` is calibrated.
A known value in slot s is the shear ratio s* = s/g.
"""

from dataclasses import dataclass
from enum import Enum

from src.camera.intrinsics import Intrinsics
from src.errors import InvalidInputError

SLOT_NAMES = ("f", "g", "u", "v", "s")
NORMALIZED_VALUES = {"f": 1.0, "g": 1.0, "u": 0.0, "v": 0.0, "s": 0.0}


class SlotKind(str, Enum):
    UNKNOWN = "unknown"
    KNOWN = "known"
    TIED = "tied-to-f"


@dataclass(frozen=True)
class Slot:
    kind: SlotKind
    value: float | None = None

    def to_json(self):
        if self.kind is SlotKind.KNOWN:
            return {"known": self.value}
        return self.kind.value

    @classmethod
    def from_json(cls, data) -> "Slot":
        if isinstance(data, dict):
            return cls(SlotKind.KNOWN, float(data["known"]))
        return cls(SlotKind(data))


UNKNOWN = Slot(SlotKind.UNKNOWN)
TIED = Slot(SlotKind.TIED)


def known(value: float) -> Slot:
    return Slot(SlotKind.KNOWN, float(value))


@dataclass(frozen=True)
class IntrinsicsSpec:
    f: Slot = UNKNOWN
    g: Slot = UNKNOWN
    u: Slot = UNKNOWN
    v: Slot = UNKNOWN
    s: Slot = UNKNOWN

    def __post_init__(self):
        for name in SLOT_NAMES:
            if getattr(self, name).kind is SlotKind.TIED and name != "g":
                raise InvalidInputError(f"only slot g may be tied to f, not {name}")

    @property
    def slots(self) -> tuple[Slot, ...]:
        return tuple(getattr(self, name) for name in SLOT_NAMES)

    @property
    def L(self) -> int:
        return sum(1 for slot in self.slots if slot.kind is not SlotKind.UNKNOWN)

    def is_known(self, name: str) -> bool:
        return getattr(self, name).kind is SlotKind.KNOWN

    def is_unknown(self, name: str) -> bool:
        return getattr(self, name).kind is SlotKind.UNKNOWN

    @property
    def g_tied(self) -> bool:
        return self.g.kind is SlotKind.TIED

    @property
    def unknown_omega_params(self) -> tuple[str, ...]:
        """Unknown ω-params in the order (f*, g*, s*, u, v)."""
        names = []
        if self.is_unknown("f"):
            names.append("f_star")
        if self.is_unknown("g"):
            names.append("g_star")
        if self.is_unknown("s"):
            names.append("s_star")
        if self.is_unknown("u"):
            names.append("u")
        if self.is_unknown("v"):
            names.append("v")
        return tuple(names)

    @property
    def code(self) -> str:
        chars = []
        for name, slot in zip(SLOT_NAMES, self.slots):
            if slot.kind is SlotKind.UNKNOWN:
                chars.append(name)
            elif slot.kind is SlotKind.TIED:
                chars.append("f")
            else:
                chars.append(str(int(NORMALIZED_VALUES[name])))
        return "".join(chars)

    @classmethod
    def parse(cls, code: str, reference: Intrinsics | None = None) -> "IntrinsicsSpec":
        """Parse a compact code; known slots take their value from ``reference`` if given."""
        if len(code) != 5:
            raise InvalidInputError(f"intrinsics code must have 5 characters, got {code!r}")
        slots = {}
        for name, char in zip(SLOT_NAMES, code):
            if char == name:
                slots[name] = UNKNOWN
            elif name == "g" and char == "f":
                slots[name] = TIED
            elif char.isdigit():
                if reference is None:
                    slots[name] = known(float(char))
                elif name == "s":
                    slots[name] = known(reference.s / reference.g)
                else:
                    slots[name] = known(getattr(reference, name))
            else:
                raise InvalidInputError(f"invalid character {char!r} for slot {name} in {code!r}")
        return cls(**slots)

    def with_reference(self, reference: Intrinsics) -> "IntrinsicsSpec":
        """Same mask, known values replaced by those of ``reference``."""
        slots = {}
        for name, slot in zip(SLOT_NAMES, self.slots):
            if slot.kind is not SlotKind.KNOWN:
                slots[name] = slot
            elif name == "s":
                slots[name] = known(reference.s / reference.g)
            else:
                slots[name] = known(getattr(reference, name))
        return IntrinsicsSpec(**slots)

    def prior_intrinsics(self, default: Intrinsics) -> Intrinsics:
        """``default`` adjusted to the structural priors: square pixels and known shear ratio.

        Known f, g, u, v keep the default values; normalization maps them to
        their standard values anyway.
        """
        values = default.to_dict()
        if self.g_tied:
            values["g"] = values["f"]
        if self.is_known("s"):
            values["s"] = self.s.value * values["g"]
        return Intrinsics(**values)

    def to_dict(self) -> dict:
        return {"code": self.code, "mask": [slot.to_json() for slot in self.slots]}

    @classmethod
    def from_dict(cls, data: dict) -> "IntrinsicsSpec":
        return cls(**{name: Slot.from_json(m) for name, m in zip(SLOT_NAMES, data["mask"])})


ALL_KNOWN = IntrinsicsSpec.parse("11000")
ALL_UNKNOWN = IntrinsicsSpec.parse("fguvs")


def all_masks() -> list[IntrinsicsSpec]:
    """The 2^5 known/unknown patterns plus the square-pixel ties (g tied to f)."""
    specs = []
    for bits in range(32):
        code = "".join(
            str(int(NORMALIZED_VALUES[name])) if bits >> (4 - i) & 1 else name
            for i, name in enumerate(SLOT_NAMES)
        )
        specs.append(IntrinsicsSpec.parse(code))
        if code[0] == "f" and code[1] == "g":
            specs.append(IntrinsicsSpec.parse("ff" + code[2:]))
    return specs
