"""Expression-program compiler and kernel selection.

Expressions are flattened to a postfix program (int64 code + double
constant pool) executed by a small stack machine.  At import time the
compiled Cython kernel is preferred; the pure-Python twin is the
fallback.  Both share one semantics contract (see evalcore_py), so a
program evaluates bit-identically on either backend.

Programs own a scratch stack and are therefore not safe to share
across threads; compile one program per worker.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from . import evalcore_py
from .errors import InputError
from .exprs import Add, Const, Div, Dot, Expr, Mul, Square, Var

try:  # pragma: no cover - depends on whether the extension built
    from . import _evalcore  # type: ignore[attr-defined]

    _run = _evalcore.run_program
    _BACKEND = "compiled"
except ImportError:  # pragma: no cover
    _run = evalcore_py.run_program
    _BACKEND = "python"

OP_CONST = evalcore_py.OP_CONST
OP_VAR = evalcore_py.OP_VAR
OP_ADD = evalcore_py.OP_ADD
OP_MUL = evalcore_py.OP_MUL
OP_DIV = evalcore_py.OP_DIV
OP_SQUARE = evalcore_py.OP_SQUARE
OP_DOT = evalcore_py.OP_DOT


def backend_name() -> str:
    """Which kernel evaluates programs: "compiled" or "python"."""
    return _BACKEND


@dataclass
class Program:
    """A compiled expression: flat code, constant pool, scratch stack."""

    code: array
    consts: array
    stack: array
    nvars: int
    #: staging buffer so callers can pass any float sequence; the kernels
    #: take typed buffers only
    values_buf: array = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.values_buf is None:
            self.values_buf = array("d", bytes(8 * self.nvars))

    def run(self, values) -> tuple[bool, float]:
        """Evaluate at a float vector ordered by the compiling var_index."""
        buf = self.values_buf
        for i in range(self.nvars):
            buf[i] = values[i]
        return _run(self.code, self.consts, buf, self.stack)


def compile_expr(expr: Expr, var_index: dict[str, int]) -> Program:
    """Flatten an expression tree into a Program.

    ``var_index`` maps variable names to positions in the value vector
    passed to run(); every program sharing an index map can share value
    vectors.
    """
    code: list[int] = []
    consts: list[float] = []

    def intern(value: float) -> int:
        consts.append(value)
        return len(consts) - 1

    def emit(node: Expr) -> int:
        """Append postfix code; returns the subtree's max stack depth."""
        if isinstance(node, Const):
            code.extend((OP_CONST, intern(float(node.value))))
            return 1
        if isinstance(node, Var):
            try:
                code.extend((OP_VAR, var_index[node.name]))
            except KeyError:
                raise InputError(f"unbound variable {node.name!r}") from None
            return 1
        if isinstance(node, (Add, Mul)):
            depth = 0
            for pos, arg in enumerate(node.args):
                depth = max(depth, pos + emit(arg))
            code.extend((OP_ADD if isinstance(node, Add) else OP_MUL, len(node.args)))
            return depth
        if isinstance(node, Div):
            d = emit(node.num)
            d = max(d, 1 + emit(node.den))
            code.append(OP_DIV)
            return d
        if isinstance(node, Square):
            d = emit(node.arg)
            code.append(OP_SQUARE)
            return d
        if isinstance(node, Dot):
            pairs = []
            for coeff, name in zip(node.coeffs, node.names):
                try:
                    pairs.extend((intern(float(coeff)), var_index[name]))
                except KeyError:
                    raise InputError(f"unbound variable {name!r}") from None
            code.extend((OP_DOT, len(node.names)))
            code.extend(pairs)
            return 1
        raise InputError(f"unknown node {node!r}")

    depth = max(emit(expr), 1)
    return Program(
        code=array("q", code),
        consts=array("d", consts or [0.0]),
        stack=array("d", [0.0] * depth),
        nvars=len(var_index),
    )
