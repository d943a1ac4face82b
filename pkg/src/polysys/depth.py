"""The depth-equation systems.

For a view pair (i, j) and a point pair (p, q) the constraint

    d_{i,j,pq} = Q(λ_ip x_ip − λ_iq x_iq) − Q(λ_jp x_jp − λ_jq x_jq)

states that the distance between X_p and X_q is the same in both camera
frames. Q(z) = zᵀ (f* g* ω) z is the cleared quadratic form of the IAC, which
splits as

    Q(z) = g* α² + f* β² + f* g* γ²,
    α = (z1 − u z3) − s* (z2 − v z3),  β = z2 − v z3,  γ = z3,

so residuals and all partial derivatives are evaluated block by block over
the whole batch. Unknowns are the unknown ω-params in the order
(f*, g*, s*, u, v) followed by the depths λ_ip view-major with λ_11 = 1;
parameters are the pixels view-major, point-minor, (x, y) per point, then s*
when the known shear ratio is carried as a parameter.
"""

import numpy as np

from src.camera import IntrinsicsSpec, NormalizationRecord, OmegaParams
from src.errors import InvalidInputError, SizeMismatch
from src.polysys.system import ParametricSystem
from src.scene import Observations
from src.taxonomy import EquationSelection

NORMALIZED_OMEGA = {"f_star": 1.0, "g_star": 1.0, "s_star": 0.0, "u": 0.0, "v": 0.0}


def unknown_count(spec: IntrinsicsSpec, n_points: int, num_views: int) -> int:
    return len(spec.unknown_omega_params) + num_views * n_points - 1


class DepthSystem(ParametricSystem):
    def __init__(
        self,
        selection: EquationSelection,
        spec: IntrinsicsSpec,
        n_points: int,
        num_views: int,
        skew_as_parameter: bool = False,
    ):
        if skew_as_parameter and not spec.is_known("s"):
            raise InvalidInputError("only a known shear ratio can be carried as a parameter")
        self.selection = selection
        self.spec = spec
        self.n_points = n_points
        self.num_views = num_views
        self.skew_as_parameter = skew_as_parameter

        self.omega_unknowns = spec.unknown_omega_params
        self._omega_column = {name: k for k, name in enumerate(self.omega_unknowns)}
        self.depth_slots = tuple(
            (i, p) for i in range(num_views) for p in range(n_points) if (i, p) != (0, 0)
        )
        self.unknown_names = self.omega_unknowns + tuple(
            f"lambda_{i + 1}_{p + 1}" for i, p in self.depth_slots
        )
        names = []
        for i in range(num_views):
            for p in range(n_points):
                names += [f"x_{i + 1}_{p + 1}", f"y_{i + 1}_{p + 1}"]
        if skew_as_parameter:
            names.append("s_star")
        self.parameter_names = tuple(names)

        equations = np.array(
            [(i, j, p, q) for (i, j), (p, q) in selection.equations], dtype=np.int64
        ).reshape(-1, 4)
        self._vi, self._vj, self._pp, self._pq = equations.T
        self._check_indices()

        n_omega = len(self.omega_unknowns)
        column = np.empty((num_views, n_points), dtype=np.int64)
        column[0, 0] = self.n_unknowns
        for k, (i, p) in enumerate(self.depth_slots):
            column[i, p] = n_omega + k
        self._depth_column = column

    def _check_indices(self) -> None:
        if self._vi.size == 0:
            return
        if np.any(self._vi >= self._vj) or np.any(self._pp >= self._pq):
            raise InvalidInputError("equations need i < j and p < q")
        if self._vj.max() >= self.num_views or self._pq.max() >= self.n_points:
            raise InvalidInputError(
                f"selection refers to views or points outside M={self.num_views}, N={self.n_points}"
            )

    @property
    def n_equations(self) -> int:
        return len(self.selection)

    @property
    def is_square(self) -> bool:
        return self.n_equations == self.n_unknowns

    def _omega(self, x: np.ndarray, p: np.ndarray, name: str) -> np.ndarray:
        if name == "s_star" and self.skew_as_parameter:
            return p[:, -1]
        if name == "g_star" and self.spec.g_tied:
            return self._omega(x, p, "f_star")
        if name in self._omega_column:
            return x[:, self._omega_column[name]]
        return np.full(x.shape[0], NORMALIZED_OMEGA[name], dtype=complex)

    def _depths(self, x: np.ndarray) -> np.ndarray:
        lam = np.ones((x.shape[0], self.num_views * self.n_points), dtype=complex)
        lam[:, 1:] = x[:, len(self.omega_unknowns):]
        return lam.reshape(-1, self.num_views, self.n_points)

    def _evaluate(self, x, p, want_jx, want_jp):
        batch = x.shape[0]
        mn = self.num_views * self.n_points
        fs, gs = self._omega(x, p, "f_star"), self._omega(x, p, "g_star")
        ss, us, vs = (self._omega(x, p, name) for name in ("s_star", "u", "v"))

        lam = self._depths(x)
        pix = np.concatenate(
            [p[:, : 2 * mn].reshape(batch, self.num_views, self.n_points, 2),
             np.ones((batch, self.num_views, self.n_points, 1))],
            axis=3,
        )
        vi, vj, pp, pq = self._vi, self._vj, self._pp, self._pq
        zi = lam[:, vi, pp, None] * pix[:, vi, pp] - lam[:, vi, pq, None] * pix[:, vi, pq]
        zj = lam[:, vj, pp, None] * pix[:, vj, pp] - lam[:, vj, pq, None] * pix[:, vj, pq]

        f, g, s, u, v = (a[:, None] for a in (fs, gs, ss, us, vs))

        def blocks(z):
            gamma = z[..., 2]
            beta = z[..., 1] - v * gamma
            alpha = z[..., 0] - u * gamma - s * beta
            return alpha, beta, gamma

        ai, bi, ci = blocks(zi)
        aj, bj, cj = blocks(zj)
        residual = (
            g * (ai**2 - aj**2) + f * (bi**2 - bj**2) + f * g * (ci**2 - cj**2)
        )
        if not (want_jx or want_jp):
            return residual, None, None

        # ∂Q/∂(f*, g*, s*, u, v), differenced between the two views
        d_omega = {
            "f_star": (bi**2 + g * ci**2) - (bj**2 + g * cj**2),
            "g_star": (ai**2 + f * ci**2) - (aj**2 + f * cj**2),
            "s_star": -2 * g * (ai * bi - aj * bj),
            "u": -2 * g * (ai * ci - aj * cj),
            "v": 2 * g * s * (ai * ci - aj * cj) - 2 * f * (bi * ci - bj * cj),
        }
        if self.spec.g_tied:
            d_omega["f_star"] = d_omega["f_star"] + d_omega["g_star"]

        # ∇_z Q = 2 (g* α a + f* β b + f* g* γ e3) with a = (1, -s*, s* v - u), b = (0, 1, -v)
        def gradient(alpha, beta, gamma):
            return 2 * np.stack(
                [
                    g * alpha,
                    -g * s * alpha + f * beta,
                    g * (s * v - u) * alpha - f * v * beta + f * g * gamma,
                ],
                axis=-1,
            )

        grad_i, grad_j = gradient(ai, bi, ci), gradient(aj, bj, cj)
        rows = np.arange(self.n_equations)
        terms = (
            (vi, pp, grad_i, 1.0),
            (vi, pq, grad_i, -1.0),
            (vj, pp, grad_j, -1.0),
            (vj, pq, grad_j, 1.0),
        )

        jx = None
        if want_jx:
            jx = np.zeros((batch, self.n_equations, self.n_unknowns + 1), dtype=complex)
            for name, k in self._omega_column.items():
                jx[:, :, k] = d_omega[name]
            for view, point, grad, sign in terms:
                dz = sign * np.einsum("bek,bek->be", grad, pix[:, view, point])
                jx[:, rows, self._depth_column[view, point]] += dz
            jx = jx[:, :, : self.n_unknowns]

        jp = None
        if want_jp:
            jp = np.zeros((batch, self.n_equations, self.n_params), dtype=complex)
            for view, point, grad, sign in terms:
                scale = sign * lam[:, view, point]
                base = 2 * (view * self.n_points + point)
                jp[:, rows, base] += scale * grad[..., 0]
                jp[:, rows, base + 1] += scale * grad[..., 1]
            if self.skew_as_parameter:
                jp[:, :, -1] = d_omega["s_star"]
        return residual, jx, jp

    def pack(self, omega: OmegaParams, depths: np.ndarray) -> np.ndarray:
        """Unknown vector from ω-params and depths (M, N), rescaled so that λ_11 = 1."""
        depths = np.asarray(depths, dtype=complex)
        if depths.shape != (self.num_views, self.n_points):
            raise InvalidInputError(
                f"depths must have shape ({self.num_views}, {self.n_points}), got {depths.shape}"
            )
        depths = depths / depths[0, 0]
        values = [getattr(omega, name) for name in self.omega_unknowns]
        return np.concatenate([np.asarray(values, dtype=complex), depths.reshape(-1)[1:]])

    def omega_params(self, x, p=None) -> OmegaParams:
        """Full ω-params of a solution, with knowns and ties filled in."""
        xs = np.asarray(x, dtype=complex)[None, :]
        ps = None if p is None else np.asarray(p, dtype=complex)[None, :]
        if self.skew_as_parameter and ps is None:
            raise InvalidInputError("the shear ratio is a parameter; pass p")
        values = [self._omega(xs, ps, name)[0] for name in ("f_star", "g_star", "s_star", "u", "v")]
        return OmegaParams(*values)

    def depths(self, x) -> np.ndarray:
        return self._depths(np.asarray(x, dtype=complex)[None, :])[0]

    def parameters_from(
        self, obs: Observations, record: NormalizationRecord | None = None
    ) -> np.ndarray:
        """Parameter vector of normalized observations."""
        if obs.num_views != self.num_views or obs.num_points != self.n_points:
            raise SizeMismatch(
                f"system expects {self.num_views} views of {self.n_points} points, "
                f"got {obs.num_views} of {obs.num_points}"
            )
        p = obs.parameters()
        if self.skew_as_parameter:
            skew = 0.0 if record is None or record.skew_parameter is None else record.skew_parameter
            p = np.append(p, skew)
        return p

    def descriptor(self) -> dict:
        data = super().descriptor()
        data.update(
            {
                "kind": "depth",
                "spec": self.spec.to_dict(),
                "num_views": self.num_views,
                "n_points": self.n_points,
                "selection": self.selection.to_json(),
                "skew_as_parameter": self.skew_as_parameter,
            }
        )
        return data


def build_system(
    selection: EquationSelection,
    spec: IntrinsicsSpec,
    n_points: int,
    num_views: int,
    skew_as_parameter: bool = False,
    strict: bool = True,
) -> DepthSystem:
    """The cleared depth system for ``selection``; ``strict`` requires it to be square."""
    n = unknown_count(spec, n_points, num_views)
    if strict and len(selection) != n:
        raise SizeMismatch(f"{len(selection)} equations selected, {n} unknowns")
    return DepthSystem(selection, spec, n_points, num_views, skew_as_parameter)


def system_from_descriptor(data: dict) -> DepthSystem:
    if data.get("kind") != "depth":
        raise InvalidInputError(f"cannot rebuild a system of kind {data.get('kind')!r}")
    spec = IntrinsicsSpec.from_dict(data["spec"])
    system = build_system(
        EquationSelection.from_json(data["selection"]),
        spec,
        int(data["n_points"]),
        int(data["num_views"]),
        skew_as_parameter=bool(data.get("skew_as_parameter", False)),
        strict=False,
    )
    if list(system.unknown_names) != list(data["unknowns"]) or list(
        system.parameter_names
    ) != list(data["parameters"]):
        raise InvalidInputError("descriptor ordering does not match this version")
    return system

