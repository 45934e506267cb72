"""Evaluable real-valued functions on a time scale.

A ScaleFunction is backed either by an expression program (an AST compiled to
a little postfix opcode sequence the kernel executes) or by an arbitrary
Python callable.  Tabulated functions — knot/value pairs with linear
interpolation across dense segments — compile to a program too, so integrals
of tabulations and of pointwise algebra over them stay on the fast path.

Pointwise algebra (f*g, f**p, abs(f), ...) combines programs when it can and
falls back to callable composition otherwise.  Functions are immutable and
safe to share across threads.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernel
from ._opcodes import (
    OP_ABS,
    OP_ADD,
    OP_CONST,
    OP_COS,
    OP_DIV,
    OP_EXP,
    OP_LN,
    OP_MUL,
    OP_NEG,
    OP_POW,
    OP_SIN,
    OP_SQRT,
    OP_SUB,
    OP_TAB,
    OP_X,
    STACK_CAP,
    STATUS_OK,
    STATUS_TAB_GAP,
)
from .errors import EvalDomainError, TabulationGapError
from .expr import Binary, Const, Expr, Unary, Var, parse, to_text

__all__ = ["Program", "ScaleFunction"]

_UNARY_CODE = {"neg": OP_NEG, "exp": OP_EXP, "ln": OP_LN, "sin": OP_SIN,
               "cos": OP_COS, "abs": OP_ABS, "sqrt": OP_SQRT}
_BINARY_CODE = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "^": OP_POW}


class Program:
    """A compiled pointwise function: postfix opcodes plus constant and
    tabulation pools, in both numpy and plain-list form (one per backend)."""

    __slots__ = ("ops", "args", "consts", "tab_off", "tab_x", "tab_y",
                 "stack_need", "arrays", "lists")

    def __init__(self, ops: list[int], args: list[int], consts: list[float],
                 tab_off: list[int], tab_x: list[float], tab_y: list[float]):
        need = 0
        depth = 0
        for op in ops:
            if op in (OP_CONST, OP_X, OP_TAB):
                depth += 1
                need = max(need, depth)
            elif op in (OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW):
                depth -= 1
        if need > STACK_CAP:
            raise ValueError(f"expression too deep for the kernel (needs {need} slots)")
        self.ops = ops
        self.args = args
        self.consts = consts
        self.tab_off = tab_off
        self.tab_x = tab_x
        self.tab_y = tab_y
        self.stack_need = need
        self.lists = (ops, args, consts, tab_off, tab_x, tab_y)
        self.arrays = (
            np.asarray(ops, dtype=np.intc),
            np.asarray(args, dtype=np.intc),
            np.asarray(consts, dtype=np.float64),
            np.asarray(tab_off, dtype=np.intc),
            np.asarray(tab_x, dtype=np.float64),
            np.asarray(tab_y, dtype=np.float64),
        )

    @property
    def n_tabs(self) -> int:
        return len(self.tab_off) - 1

    @classmethod
    def from_ast(cls, ast: Expr) -> "Program":
        ops: list[int] = []
        args: list[int] = []
        consts: list[float] = []

        def emit(node: Expr):
            if isinstance(node, Const):
                args.append(len(consts))
                consts.append(float(node.value))
                ops.append(OP_CONST)
            elif isinstance(node, Var):
                ops.append(OP_X)
                args.append(0)
            elif isinstance(node, Unary):
                emit(node.arg)
                ops.append(_UNARY_CODE[node.op])
                args.append(0)
            elif isinstance(node, Binary):
                emit(node.left)
                emit(node.right)
                ops.append(_BINARY_CODE[node.op])
                args.append(0)
            else:
                raise TypeError(f"not an expression node: {node!r}")

        emit(ast)
        return cls(ops, args, consts, [0], [], [])

    @classmethod
    def from_table(cls, xs: Sequence[float], ys: Sequence[float]) -> "Program":
        return cls([OP_TAB], [0], [], [0, len(xs)], [float(v) for v in xs],
                   [float(v) for v in ys])

    @classmethod
    def constant(cls, c: float) -> "Program":
        return cls([OP_CONST], [0], [float(c)], [0], [], [])

    def shifted(self, const_off: int, tab_off_idx: int) -> tuple[list[int], list[int]]:
        """Opcode/arg lists with constant and table indices displaced, for
        concatenation into a combined program."""
        args = []
        for op, a in zip(self.ops, self.args):
            if op == OP_CONST:
                args.append(a + const_off)
            elif op == OP_TAB:
                args.append(a + tab_off_idx)
            else:
                args.append(a)
        return list(self.ops), args

    @staticmethod
    def combine(op_code: int, pa: "Program", pb: "Program") -> "Program":
        ops_a, args_a = pa.shifted(0, 0)
        ops_b, args_b = pb.shifted(len(pa.consts), pa.n_tabs)
        ops = ops_a + ops_b + [op_code]
        args = args_a + args_b + [0]
        consts = pa.consts + pb.consts
        base = len(pa.tab_x)
        tab_off = pa.tab_off + [o + base for o in pb.tab_off[1:]]
        return Program(ops, args, consts, tab_off,
                       pa.tab_x + pb.tab_x, pa.tab_y + pb.tab_y)

    @staticmethod
    def apply_unary(op_code: int, p: "Program") -> "Program":
        return Program(p.ops + [op_code], p.args + [0], p.consts,
                       p.tab_off, p.tab_x, p.tab_y)


def _map_status(status: int, what: str, t: float):
    if status == STATUS_TAB_GAP:
        raise TabulationGapError(f"{what} has no tabulated value at t={t}")
    raise EvalDomainError(f"{what} is not finite at t={t}")


_PY_BINOPS: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": math.pow,
}


class ScaleFunction:
    """An evaluable function of one real variable for use on time scales."""

    __slots__ = ("program", "func", "ast", "text", "knots", "segment_evaluator",
                 "domain_hint", "_table")

    def __init__(self, *, program: Program | None = None,
                 func: Callable[[float], float] | None = None,
                 ast: Expr | None = None, text: str | None = None,
                 knots: tuple[float, ...] = (),
                 segment_evaluator: Callable[[float, float, float], float] | None = None,
                 domain_hint=None, table: tuple | None = None):
        if program is None and func is None:
            raise ValueError("a ScaleFunction needs a program or a callable")
        self.program = program
        self.func = func
        self.ast = ast
        self.text = text
        self.knots = tuple(sorted(set(knots)))
        self.segment_evaluator = segment_evaluator
        self.domain_hint = domain_hint
        self._table = table

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_expression(cls, source: str | Expr, domain_hint=None) -> "ScaleFunction":
        if isinstance(source, str):
            ast = parse(source)
            text = source.strip()
        else:
            ast = source
            text = to_text(source)
        return cls(program=Program.from_ast(ast), ast=ast, text=text,
                   domain_hint=domain_hint)

    @classmethod
    def from_table(cls, points: Sequence[float], values: Sequence[float],
                   domain_hint=None) -> "ScaleFunction":
        """Tabulation with linear interpolation between consecutive knots."""
        xs = [float(p) for p in points]
        ys = [float(v) for v in values]
        if len(xs) != len(ys):
            raise ValueError("points and values must have equal length")
        if not xs:
            raise ValueError("a tabulation needs at least one knot")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("tabulation knots must be strictly increasing")
        return cls(program=Program.from_table(xs, ys), knots=tuple(xs),
                   text=f"table[{len(xs)}]", domain_hint=domain_hint,
                   table=(tuple(xs), tuple(ys)))

    @classmethod
    def from_callable(cls, fn: Callable[[float], float], *, knots: Iterable[float] = (),
                      text: str | None = None,
                      segment_evaluator=None, domain_hint=None) -> "ScaleFunction":
        return cls(func=fn, knots=tuple(knots), text=text,
                   segment_evaluator=segment_evaluator, domain_hint=domain_hint)

    @classmethod
    def constant(cls, c: float) -> "ScaleFunction":
        return cls(program=Program.constant(c), ast=Const(float(c)), text=repr(float(c)))

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, t: float) -> float:
        if self.program is not None:
            v, status = kernel.eval_program(self.program, t)
            if status != STATUS_OK:
                _map_status(status, self.describe(), t)
            return v
        try:
            v = float(self.func(t))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise EvalDomainError(f"{self.describe()} failed at t={t}: {exc}") from exc
        if not math.isfinite(v):
            raise EvalDomainError(f"{self.describe()} is not finite at t={t}")
        return v

    __call__ = evaluate

    def evaluate_many(self, ts: Sequence[float]) -> list[float]:
        if self.program is not None:
            vals, status = kernel.eval_program_many(self.program, ts)
            if status != STATUS_OK:
                _map_status(status, self.describe(), float("nan"))
            return vals.tolist() if hasattr(vals, "tolist") else list(vals)
        return [self.evaluate(t) for t in ts]

    def dense_eval(self, t: float, lo: float, hi: float) -> float:
        """Value used when integrating across the dense segment [lo, hi]: the
        rd-limit version when a segment evaluator is installed (derivative
        maps, sigma compositions), the plain value otherwise."""
        if self.segment_evaluator is not None:
            return self.segment_evaluator(t, lo, hi)
        return self.evaluate(t)

    def _dense_fn(self) -> Callable[[float, float, float], float]:
        if self.segment_evaluator is not None:
            return self.segment_evaluator
        return lambda t, lo, hi: self.evaluate(t)

    def forward_smooth_reach(self, t: float, limit: float) -> float:
        """Largest forward step from t that avoids crossing a knot, capped at
        limit - t.  Used to keep one-sided difference quotients on a single
        smooth piece of a tabulation."""
        reach = limit - t
        for k in self.knots:
            if k > t + 1e-12 * (1.0 + abs(t)):
                reach = min(reach, k - t)
                break
        return reach

    def backward_smooth_reach(self, t: float, limit: float) -> float:
        reach = t - limit
        for k in reversed(self.knots):
            if k < t - 1e-12 * (1.0 + abs(t)):
                reach = min(reach, t - k)
                break
        return reach

    # -- algebra -------------------------------------------------------------

    def _coerce(self, other) -> "ScaleFunction":
        if isinstance(other, ScaleFunction):
            return other
        return ScaleFunction.constant(float(other))

    def _binary(self, op: str, other) -> "ScaleFunction":
        other = self._coerce(other)
        knots = self.knots + other.knots
        se = None
        if self.segment_evaluator is not None or other.segment_evaluator is not None:
            fa, fb = self._dense_fn(), other._dense_fn()
            pyop = _PY_BINOPS[op]
            se = lambda t, lo, hi: pyop(fa(t, lo, hi), fb(t, lo, hi))
        text = None
        if self.text and other.text:
            text = f"({self.text}){op}({other.text})"
        if self.program is not None and other.program is not None:
            prog = Program.combine(_BINARY_CODE[op], self.program, other.program)
            return ScaleFunction(program=prog, text=text, knots=knots,
                                 segment_evaluator=se)
        ea, eb = self.evaluate, other.evaluate
        pyop = _PY_BINOPS[op]
        return ScaleFunction(func=lambda t: pyop(ea(t), eb(t)), text=text,
                             knots=knots, segment_evaluator=se)

    def _unary(self, op: str) -> "ScaleFunction":
        se = None
        if self.segment_evaluator is not None:
            fa = self.segment_evaluator
            pyop = {"neg": lambda v: -v, "abs": abs, "exp": math.exp,
                    "ln": math.log, "sin": math.sin, "cos": math.cos,
                    "sqrt": math.sqrt}[op]
            se = lambda t, lo, hi: pyop(fa(t, lo, hi))
        text = f"{op}({self.text})" if self.text else None
        if self.program is not None:
            prog = Program.apply_unary(_UNARY_CODE[op], self.program)
            return ScaleFunction(program=prog, text=text, knots=self.knots,
                                 segment_evaluator=se)
        ea = self.evaluate
        pyop = {"neg": lambda v: -v, "abs": abs, "exp": math.exp, "ln": math.log,
                "sin": math.sin, "cos": math.cos, "sqrt": math.sqrt}[op]
        return ScaleFunction(func=lambda t: pyop(ea(t)), text=text,
                             knots=self.knots, segment_evaluator=se)

    def __add__(self, other):
        return self._binary("+", other)

    def __radd__(self, other):
        return self._coerce(other)._binary("+", self)

    def __sub__(self, other):
        return self._binary("-", other)

    def __rsub__(self, other):
        return self._coerce(other)._binary("-", self)

    def __mul__(self, other):
        return self._binary("*", other)

    def __rmul__(self, other):
        return self._coerce(other)._binary("*", self)

    def __truediv__(self, other):
        return self._binary("/", other)

    def __rtruediv__(self, other):
        return self._coerce(other)._binary("/", self)

    def __pow__(self, exponent: float):
        return self._binary("^", float(exponent))

    def __neg__(self):
        return self._unary("neg")

    def __abs__(self):
        return self._unary("abs")

    def scaled(self, c: float) -> "ScaleFunction":
        """c * f, staying serializable for expression- and table-backed
        functions (plain algebra would drop the replayable form)."""
        if self._table is not None:
            xs, ys = self._table
            return ScaleFunction.from_table(xs, [c * v for v in ys])
        if self.ast is not None:
            from .expr import Binary, Const
            return ScaleFunction.from_expression(
                Binary("*", Const(float(c)), self.ast))
        return self._coerce(c)._binary("*", self)

    # -- description / serialization -----------------------------------------

    def describe(self) -> str:
        if self.text:
            return self.text
        return "<function>"

    def to_json_obj(self) -> dict:
        """Replayable form; only expression- and table-backed functions have one."""
        if self.ast is not None:
            return {"expr": self.text or to_text(self.ast)}
        if self._table is not None:
            xs, ys = self._table
            return {"table": {"points": list(xs), "values": list(ys)}}
        raise ValueError(f"{self.describe()} is not serializable")

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ScaleFunction":
        if "expr" in obj:
            return cls.from_expression(obj["expr"])
        if "table" in obj:
            return cls.from_table(obj["table"]["points"], obj["table"]["values"])
        raise ValueError(f"not a function object: {obj!r}")

    def __repr__(self):
        return f"ScaleFunction({self.describe()})"
