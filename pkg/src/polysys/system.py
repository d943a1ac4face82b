"""Parametric polynomial systems g(x; p) = 0 evaluated over batches of points.

Every system takes unknowns x (length n) and parameters p (length m). All
public calls accept either single vectors or 2-D batches (one row per point)
and broadcast a single parameter vector against a batch of unknowns.
"""

from abc import ABC, abstractmethod

import numpy as np

from src.errors import DimensionMismatch


def _as_rows(values, width: int, name: str) -> tuple[np.ndarray, bool]:
    array = np.asarray(values, dtype=complex)
    single = array.ndim == 1
    if single:
        array = array[None, :]
    if array.ndim != 2 or array.shape[1] != width:
        raise DimensionMismatch(f"{name} must have length {width}, got shape {np.shape(values)}")
    return array, single


class ParametricSystem(ABC):
    """Square system of polynomial equations in unknowns x with parameters p."""

    unknown_names: tuple[str, ...] = ()
    parameter_names: tuple[str, ...] = ()

    @property
    def n_unknowns(self) -> int:
        return len(self.unknown_names)

    @property
    def n_params(self) -> int:
        return len(self.parameter_names)

    @property
    @abstractmethod
    def n_equations(self) -> int: ...

    @abstractmethod
    def _evaluate(
        self, x: np.ndarray, p: np.ndarray, want_jx: bool, want_jp: bool
    ) -> tuple[np.ndarray, np.ndarray | None, np.ndarray | None]:
        """Residuals (B, E) and optionally Jacobians (B, E, n), (B, E, m) for row batches."""

    def _batch(self, x, p) -> tuple[np.ndarray, np.ndarray, bool]:
        xs, single_x = _as_rows(x, self.n_unknowns, "x")
        ps, single_p = _as_rows(p, self.n_params, "p")
        if xs.shape[0] != ps.shape[0]:
            if ps.shape[0] == 1:
                ps = np.broadcast_to(ps, (xs.shape[0], ps.shape[1]))
            elif xs.shape[0] == 1:
                xs = np.broadcast_to(xs, (ps.shape[0], xs.shape[1]))
            else:
                raise DimensionMismatch(
                    f"batch sizes differ: {xs.shape[0]} unknown rows, {ps.shape[0]} parameter rows"
                )
        return xs, ps, single_x and single_p

    def evaluate(self, x, p) -> np.ndarray:
        xs, ps, single = self._batch(x, p)
        f, _, _ = self._evaluate(xs, ps, False, False)
        return f[0] if single else f

    def jacobian_x(self, x, p) -> np.ndarray:
        xs, ps, single = self._batch(x, p)
        _, jx, _ = self._evaluate(xs, ps, True, False)
        return jx[0] if single else jx

    def jacobian_p(self, x, p) -> np.ndarray:
        xs, ps, single = self._batch(x, p)
        _, _, jp = self._evaluate(xs, ps, False, True)
        return jp[0] if single else jp

    def evaluate_all(self, x, p, want_jp: bool = True):
        """Residuals with both Jacobians in one pass."""
        xs, ps, single = self._batch(x, p)
        f, jx, jp = self._evaluate(xs, ps, True, want_jp)
        if single:
            return f[0], jx[0], None if jp is None else jp[0]
        return f, jx, jp

    def descriptor(self) -> dict:
        return {
            "kind": type(self).__name__,
            "unknowns": list(self.unknown_names),
            "parameters": list(self.parameter_names),
        }


def finite_difference_jacobians(
    system: ParametricSystem, x, p, step: float = 1e-6
) -> tuple[np.ndarray, np.ndarray]:
    """Central differences of ``system`` at a single point (x, p)."""
    x = np.asarray(x, dtype=complex)
    p = np.asarray(p, dtype=complex)
    jx = np.empty((system.n_equations, x.size), dtype=complex)
    jp = np.empty((system.n_equations, p.size), dtype=complex)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = step
        jx[:, k] = (system.evaluate(x + e, p) - system.evaluate(x - e, p)) / (2 * step)
    for k in range(p.size):
        e = np.zeros_like(p)
        e[k] = step
        jp[:, k] = (system.evaluate(x, p + e) - system.evaluate(x, p - e)) / (2 * step)
    return jx, jp
