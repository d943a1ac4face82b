"""Straight-line programs for small polynomial systems.

Expressions are built with ordinary arithmetic on :class:`Expr` leaves and
compiled into a list of nodes. Evaluation runs the nodes in order over a batch
of points and carries forward-mode derivatives with respect to every unknown
and parameter, so no monomial expansion ever happens.

    x = unknowns("x")
    p = parameters("p")
    system = SLPSystem([x * x - p], [x], [p])
"""

from dataclasses import dataclass

import numpy as np

from src.errors import InvalidInputError
from src.polysys.system import ParametricSystem


class Expr:
    """Node of an arithmetic expression graph."""

    __slots__ = ("op", "args", "value")

    def __init__(self, op: str, args: tuple = (), value=None):
        self.op = op
        self.args = args
        self.value = value

    @staticmethod
    def wrap(other) -> "Expr":
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Expr("const", value=complex(other))
        raise TypeError(f"cannot use {type(other).__name__} in an expression")

    def __add__(self, other):
        return Expr("add", (self, Expr.wrap(other)))

    def __radd__(self, other):
        return Expr("add", (Expr.wrap(other), self))

    def __sub__(self, other):
        return Expr("sub", (self, Expr.wrap(other)))

    def __rsub__(self, other):
        return Expr("sub", (Expr.wrap(other), self))

    def __mul__(self, other):
        return Expr("mul", (self, Expr.wrap(other)))

    def __rmul__(self, other):
        return Expr("mul", (Expr.wrap(other), self))

    def __neg__(self):
        return Expr("neg", (self,))

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            raise InvalidInputError("only non-negative integer powers are supported")
        return Expr("pow", (self,), exponent)

    def __repr__(self) -> str:
        if self.op in ("unknown", "param"):
            return str(self.value)
        if self.op == "const":
            return repr(self.value)
        return f"{self.op}({', '.join(map(repr, self.args))})"


def unknowns(*names: str) -> list[Expr] | Expr:
    leaves = [Expr("unknown", value=name) for name in names]
    return leaves[0] if len(leaves) == 1 else leaves


def parameters(*names: str) -> list[Expr] | Expr:
    leaves = [Expr("param", value=name) for name in names]
    return leaves[0] if len(leaves) == 1 else leaves


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple[int, ...]
    value: complex | int | None = None


def compile_program(outputs: list[Expr], inputs: list[Expr]) -> tuple[list[Node], list[int]]:
    """Topologically ordered nodes; the first ``len(inputs)`` nodes are the inputs."""
    index: dict[int, int] = {}
    nodes: list[Node] = []
    for k, leaf in enumerate(inputs):
        index[id(leaf)] = k
        nodes.append(Node("input", (), k))

    def visit(expr: Expr) -> int:
        key = id(expr)
        if key in index:
            return index[key]
        if expr.op in ("unknown", "param"):
            raise InvalidInputError(f"expression uses undeclared leaf {expr.value!r}")
        args = tuple(visit(arg) for arg in expr.args)
        nodes.append(Node(expr.op, args, expr.value))
        index[key] = len(nodes) - 1
        return index[key]

    out = [visit(expr) for expr in outputs]
    return nodes, out


def run_program(nodes: list[Node], outputs: list[int], inputs: np.ndarray, want_grad: bool):
    """Values (B, E) and gradients (B, E, I) of the outputs at a (B, I) input batch."""
    batch, width = inputs.shape
    values: list[np.ndarray] = []
    grads: list[np.ndarray | None] = []
    for node in nodes:
        if node.op == "input":
            values.append(inputs[:, node.value])
            if want_grad:
                g = np.zeros((batch, width), dtype=complex)
                g[:, node.value] = 1.0
                grads.append(g)
            continue
        if node.op == "const":
            values.append(np.full(batch, node.value, dtype=complex))
            if want_grad:
                grads.append(None)
            continue

        a = values[node.args[0]]
        ga = grads[node.args[0]] if want_grad else None
        if node.op in ("add", "sub", "mul"):
            b = values[node.args[1]]
            gb = grads[node.args[1]] if want_grad else None
        if node.op == "add":
            values.append(a + b)
            grad = _combine(ga, gb, 1.0, 1.0)
        elif node.op == "sub":
            values.append(a - b)
            grad = _combine(ga, gb, 1.0, -1.0)
        elif node.op == "mul":
            values.append(a * b)
            grad = _combine(ga, gb, b[:, None], a[:, None])
        elif node.op == "neg":
            values.append(-a)
            grad = None if ga is None else -ga
        elif node.op == "pow":
            k = node.value
            values.append(a**k)
            grad = None if ga is None or k == 0 else (k * a ** (k - 1))[:, None] * ga
        else:
            raise InvalidInputError(f"unknown node {node.op!r}")
        if want_grad:
            grads.append(grad)

    f = np.stack([values[k] for k in outputs], axis=1)
    if not want_grad:
        return f, None
    jac = np.zeros((batch, len(outputs), width), dtype=complex)
    for e, k in enumerate(outputs):
        if grads[k] is not None:
            jac[:, e, :] = grads[k]
    return f, jac


def _combine(ga, gb, wa, wb):
    if ga is None and gb is None:
        return None
    if ga is None:
        return wb * gb
    if gb is None:
        return wa * ga
    return wa * ga + wb * gb


class SLPSystem(ParametricSystem):
    """A parametric system given by expression outputs over declared leaves."""

    def __init__(
        self, equations: list[Expr], unknown_leaves: list[Expr], parameter_leaves: list[Expr]
    ):
        if len(equations) != len(unknown_leaves):
            raise InvalidInputError(
                f"{len(equations)} equations in {len(unknown_leaves)} unknowns is not square"
            )
        self.unknown_names = tuple(str(leaf.value) for leaf in unknown_leaves)
        self.parameter_names = tuple(str(leaf.value) for leaf in parameter_leaves)
        self.equations = tuple(equations)
        self._nodes, self._outputs = compile_program(
            list(equations), list(unknown_leaves) + list(parameter_leaves)
        )

    @property
    def n_equations(self) -> int:
        return len(self._outputs)

    def _evaluate(self, x, p, want_jx, want_jp):
        inputs = np.concatenate([x, p], axis=1)
        f, jac = run_program(self._nodes, self._outputs, inputs, want_jx or want_jp)
        n = self.n_unknowns
        jx = jac[:, :, :n] if want_jx else None
        jp = jac[:, :, n:] if want_jp else None
        return f, jx, jp

    def descriptor(self) -> dict:
        data = super().descriptor()
        data["equations"] = [repr(e) for e in self.equations]
        return data


def square_root_system() -> SLPSystem:
    """x² − p: two solutions ±√p, the smallest monodromy example."""
    x = unknowns("x")
    p = parameters("p")
    return SLPSystem([x * x - p], [x], [p])
