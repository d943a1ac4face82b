"""Calibration matrices and the image of the absolute conic.

The IAC ω = K^{-T} K^{-1} is expressed through the change of variables
f* = f², g* = g², s* = s/g, which is invariant under f -> -f and
(g, s) -> (-g, -s). Writing K^{-1} row by row gives

    ω = a aᵀ / f* + b bᵀ / g* + e3 e3ᵀ,
    a = (1, -s*, s* v - u),  b = (0, 1, -v),

so f* g* ω is polynomial in (f*, g*, s*, u, v).
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from src.errors import NegativeSquare, ZeroFocal, ZeroFocalSquare

OMEGA_PARAM_NAMES = ("f_star", "g_star", "s_star", "u", "v")


@dataclass(frozen=True)
class Intrinsics:
    f: float
    g: float
    u: float
    v: float
    s: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Intrinsics":
        return cls(*(float(data[k]) for k in ("f", "g", "u", "v", "s")))

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.f, self.g, self.u, self.v, self.s)


@dataclass(frozen=True)
class OmegaParams:
    f_star: complex | float
    g_star: complex | float
    s_star: complex | float
    u: complex | float
    v: complex | float

    def as_array(self) -> np.ndarray:
        return np.array([self.f_star, self.g_star, self.s_star, self.u, self.v])

    @classmethod
    def from_array(cls, values) -> "OmegaParams":
        return cls(*values)


def _check_focals(f: float, g: float) -> None:
    if f == 0 or g == 0:
        raise ZeroFocal(f"focal lengths must be nonzero, got f={f}, g={g}")


def build_k(intr: Intrinsics) -> np.ndarray:
    _check_focals(intr.f, intr.g)
    return np.array(
        [
            [intr.f, intr.s, intr.u],
            [0.0, intr.g, intr.v],
            [0.0, 0.0, 1.0],
        ]
    )


def intrinsics_from_k(k: np.ndarray) -> Intrinsics:
    """Read (f, g, u, v, s) off an upper-triangular matrix, scaled so K[2,2] = 1."""
    k = np.asarray(k, dtype=float)
    k = k / k[2, 2]
    return Intrinsics(f=k[0, 0], g=k[1, 1], u=k[0, 2], v=k[1, 2], s=k[0, 1])


def k_inverse(intr: Intrinsics) -> np.ndarray:
    _check_focals(intr.f, intr.g)
    f, g, u, v, s = intr.as_tuple()
    return np.array(
        [
            [1.0 / f, -s / (f * g), (s * v - u * g) / (f * g)],
            [0.0, 1.0 / g, -v / g],
            [0.0, 0.0, 1.0],
        ]
    )


def omega_direct(intr: Intrinsics) -> np.ndarray:
    k_inv = k_inverse(intr)
    omega = k_inv.T @ k_inv
    return 0.5 * (omega + omega.T)


def omega_params_of(intr: Intrinsics) -> OmegaParams:
    _check_focals(intr.f, intr.g)
    return OmegaParams(
        f_star=intr.f**2,
        g_star=intr.g**2,
        s_star=intr.s / intr.g,
        u=intr.u,
        v=intr.v,
    )


def omega_from_params(p: OmegaParams) -> np.ndarray:
    if p.f_star == 0 or p.g_star == 0:
        raise ZeroFocalSquare("f* and g* must be nonzero")
    a = np.array([1.0, -p.s_star, p.s_star * p.v - p.u])
    b = np.array([0.0, 1.0, -p.v])
    e3 = np.array([0.0, 0.0, 1.0])
    return np.outer(a, a) / p.f_star + np.outer(b, b) / p.g_star + np.outer(e3, e3)


def cleared_omega(p: OmegaParams) -> np.ndarray:
    """f* g* ω, the denominator-free form used by the depth equations."""
    a = np.array([1.0, -p.s_star, p.s_star * p.v - p.u])
    b = np.array([0.0, 1.0, -p.v])
    out = p.g_star * np.outer(a, a) + p.f_star * np.outer(b, b)
    out[2, 2] = out[2, 2] + p.f_star * p.g_star
    return out


def k_candidates(p: OmegaParams, real: bool = True) -> list[Intrinsics]:
    """The four sign-symmetric cameras with the given ω-params, positive focals first."""
    if real:
        values = [p.f_star, p.g_star, p.s_star, p.u, p.v]
        if any(abs(np.imag(x)) > 0 for x in values):
            raise NegativeSquare("real candidates requested for complex ω-params")
        f_star, g_star, s_star, u, v = (float(np.real(x)) for x in values)
        if f_star <= 0 or g_star <= 0:
            raise NegativeSquare(f"f*={f_star} and g*={g_star} must be positive")
        f, g = math.sqrt(f_star), math.sqrt(g_star)
    else:
        f_star, g_star, s_star, u, v = p.f_star, p.g_star, p.s_star, p.u, p.v
        f, g = np.sqrt(complex(f_star)), np.sqrt(complex(g_star))

    return [
        Intrinsics(f=sf * f, g=sg * g, u=u, v=v, s=s_star * sg * g)
        for sf, sg in ((1, 1), (-1, 1), (1, -1), (-1, -1))
    ]
