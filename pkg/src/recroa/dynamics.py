"""Autonomous vector fields f: R^d -> R^d.

Built-in systems and user-supplied expression systems share one compiled
representation (a stack program per coordinate), so both evaluate through
the same kernels. Fields are immutable and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import backend, expr
from .expr import BinOp, Expr, Neg, Num, ParseError, Pow, Var

__all__ = ["VectorField", "paper2d", "linear", "parse_system", "eval_field", "field_from_config"]


@dataclass(frozen=True, eq=False)
class VectorField:
    """Right-hand side of an autonomous ODE, one expression per coordinate."""

    dimension: int
    kind: str  # "paper2d", "linear", or "parsed"
    exprs: tuple[Expr, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension != len(self.exprs):
            raise ValueError("one expression required per coordinate")
        object.__setattr__(self, "_program", expr.compile_program(self.exprs))

    @property
    def program(self) -> expr.Program:
        return self._program

    def texts(self) -> list[str]:
        """Coordinate expressions as parseable strings."""
        return [expr.to_text(e) for e in self.exprs]

    def __call__(self, state) -> np.ndarray:
        return eval_field(self, state)


def eval_field(field_: VectorField, state) -> np.ndarray:
    """Evaluate f(state). Non-finite results are returned as-is; callers
    treat them as a divergence signal."""
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (field_.dimension,):
        raise ValueError(f"state must have shape ({field_.dimension},), got {state.shape}")
    p = field_.program
    out = backend.kernels().eval_batch(p.code, p.iarg, p.farg, p.starts, p.stack_size, state[None, :])
    return out[0]


def paper2d() -> VectorField:
    """Planar benchmark system with a stable focus at the origin and
    saddle points at (±sqrt(3), 0):

        dx1/dt = x2
        dx2/dt = -x1 + x1^3/3 - x2
    """
    f1 = Var(2)
    f2 = BinOp("-", BinOp("+", Neg(Var(1)), BinOp("/", Pow(Var(1), 3), Num(3.0))), Var(2))
    return VectorField(dimension=2, kind="paper2d", exprs=(f1, f2))


def linear(rate: float = 1.0, dimension: int = 2) -> VectorField:
    """Globally stable linear system f(x) = -rate * x."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    exprs = tuple(Neg(BinOp("*", Num(float(rate)), Var(i + 1))) for i in range(dimension))
    return VectorField(dimension=dimension, kind="linear", exprs=exprs, params={"rate": float(rate)})


def parse_system(texts: list[str]) -> VectorField:
    """Build a field from one expression string per coordinate.

    Raises ParseError on bad syntax, or on references to variables beyond
    the system dimension (which is the number of strings supplied).
    """
    if not texts:
        raise ValueError("at least one coordinate expression required")
    d = len(texts)
    nodes = []
    for i, text in enumerate(texts):
        try:
            node = expr.parse(text)
        except ParseError as e:
            raise ParseError(f"coordinate {i + 1}: {e.message}", e.position) from None
        hi = expr.max_var_index(node)
        if hi > d:
            raise ParseError(
                f"coordinate {i + 1} references x{hi} but the system has dimension {d}", 0
            )
        nodes.append(node)
    return VectorField(dimension=d, kind="parsed", exprs=tuple(nodes))


_BUILTINS = ("paper2d", "linear", "parsed")


def field_from_config(system: str, params: dict | None = None) -> VectorField:
    """Construct a field from its config-file identifier."""
    params = dict(params or {})
    if system == "paper2d":
        return paper2d()
    if system == "linear":
        return linear(rate=float(params.get("rate", 1.0)), dimension=int(params.get("dimension", 2)))
    if system == "parsed":
        texts = params.get("expressions")
        if not texts:
            raise ValueError("parsed system requires 'expressions', one string per coordinate")
        return parse_system([str(t) for t in texts])
    raise ValueError(f"unknown system {system!r}; expected one of {_BUILTINS}")
