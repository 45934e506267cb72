"""Arithmetic expressions in one variable: parsing, printing, differentiation.

The grammar is the usual one: ``^`` binds tightest and is right-associative,
then unary minus, then ``*``/``/``, then ``+``/``-``.  Function calls are
``exp``, ``ln``, ``sin``, ``cos``, ``abs``, ``sqrt``.  Parsing is total: every
input yields either an AST or a :class:`ParseError` carrying the byte offset
and the token kinds acceptable at that position.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import EvalDomainError, NotDifferentiableError, ParseError

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Unary",
    "Binary",
    "FUNCTIONS",
    "parse",
    "to_text",
    "diff",
    "eval_ast",
    "substitute",
]

FUNCTIONS = ("exp", "ln", "sin", "cos", "abs", "sqrt")

MAX_PARSE_DEPTH = 150


class Expr:
    """Base AST node."""

    __slots__ = ()


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    """The free variable x."""


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "neg" or a FUNCTIONS name
    arg: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # + - * / ^
    left: Expr
    right: Expr


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_OPERATORS = "+-*/^()"


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | one of _OPERATORS | "end"
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(_Token("number", m.group(), i))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        if c in _OPERATORS:
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i,
                         frozenset({"number", "'x'", "function", "operator", "'('"}))
    tokens.append(_Token("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser (recursive descent, one token of lookahead)
# ---------------------------------------------------------------------------

_ATOM_EXPECTED = frozenset({"number", "'x'", "function", "'('", "'-'"})


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _enter(self, offset: int):
        self.depth += 1
        if self.depth > MAX_PARSE_DEPTH:
            raise ParseError("expression too deeply nested", offset)

    def expr(self) -> Expr:
        self._enter(self.peek().offset)
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            node = Binary(op, node, self.term())
        self.depth -= 1
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind in ("*", "/"):
            op = self.advance().kind
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            off = self.advance().offset
            self._enter(off)
            node = Unary("neg", self.unary())
            self.depth -= 1
            return node
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self.peek().kind == "^":
            self.advance()
            node = Binary("^", node, self.unary())
        return node

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"number literal {tok.text!r} overflows binary64",
                                 tok.offset, frozenset({"number"}))
            return Const(value)
        if tok.kind == "ident":
            self.advance()
            if tok.text == "x":
                return Var()
            if tok.text in FUNCTIONS:
                opener = self.peek()
                if opener.kind != "(":
                    raise ParseError(f"function {tok.text!r} needs an argument list",
                                     opener.offset, frozenset({"'('"}))
                self.advance()
                arg = self.expr()
                closer = self.peek()
                if closer.kind != ")":
                    raise ParseError("unbalanced parenthesis", closer.offset, frozenset({"')'"}))
                self.advance()
                return Unary(tok.text, arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.offset,
                             frozenset({"'x'"} | {f"'{f}'" for f in FUNCTIONS}))
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            closer = self.peek()
            if closer.kind != ")":
                raise ParseError("unbalanced parenthesis", closer.offset, frozenset({"')'"}))
            self.advance()
            return node
        raise ParseError(f"unexpected token {tok.text or '<end>'!r}", tok.offset, _ATOM_EXPECTED)


def parse(text: str) -> Expr:
    """Parse an expression in x; raises ParseError with an offset otherwise."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0, _ATOM_EXPECTED)
    parser = _Parser(_tokenize(text))
    node = parser.expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"trailing input {trailing.text!r}", trailing.offset,
                         frozenset({"operator", "<end>"}))
    return node


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    return 5


def to_text(node: Expr) -> str:
    """Render an AST so that parsing the text reproduces it structurally.

    (Negative constants have no literal form; they render through unary
    minus, i.e. the equivalent neg(|c|) shape.)
    """
    if isinstance(node, Const):
        v = node.value
        if v < 0 or (v == 0 and math.copysign(1.0, v) < 0):
            return "-" + repr(-v)
        return repr(v)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = to_text(node.arg)
            if _prec(node.arg) < _PREC["neg"]:
                inner = f"({inner})"
            return "-" + inner
        return f"{node.op}({to_text(node.arg)})"
    assert isinstance(node, Binary)
    op = node.op
    lp, rp = _prec(node.left), _prec(node.right)
    left = to_text(node.left)
    right = to_text(node.right)
    if op == "^":
        # right-associative: parenthesize an exponent-shaped left child
        if lp <= _PREC[op]:
            left = f"({left})"
        if rp < _PREC[op]:
            right = f"({right})"
    else:
        if lp < _PREC[op]:
            left = f"({left})"
        if rp <= _PREC[op]:
            right = f"({right})"
    return f"{left}{op}{right}"


# ---------------------------------------------------------------------------
# Reference evaluation (the ScaleFunction/kernel path is the fast one; this
# tree walk exists for cross-checks and tooling)
# ---------------------------------------------------------------------------

def eval_ast(node: Expr, x: float) -> float:
    try:
        v = _eval(node, x)
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise EvalDomainError(f"evaluation failed at x={x}: {exc}") from exc
    if not math.isfinite(v):
        raise EvalDomainError(f"nonfinite value at x={x}")
    return v


def _eval(node: Expr, x: float) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        v = _eval(node.arg, x)
        if node.op == "neg":
            return -v
        if node.op == "exp":
            return math.exp(v)
        if node.op == "ln":
            return math.log(v)
        if node.op == "sin":
            return math.sin(v)
        if node.op == "cos":
            return math.cos(v)
        if node.op == "abs":
            return abs(v)
        if node.op == "sqrt":
            return math.sqrt(v)
        raise ValueError(f"unknown unary op {node.op!r}")
    assert isinstance(node, Binary)
    a = _eval(node.left, x)
    b = _eval(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    if node.op == "^":
        return math.pow(a, b)
    raise ValueError(f"unknown binary op {node.op!r}")


def substitute(node: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of the variable with another expression."""
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Const):
        return node
    if isinstance(node, Unary):
        return Unary(node.op, substitute(node.arg, replacement))
    assert isinstance(node, Binary)
    return Binary(node.op, substitute(node.left, replacement),
                  substitute(node.right, replacement))


# ---------------------------------------------------------------------------
# Symbolic differentiation
# ---------------------------------------------------------------------------

def _const(v: float) -> Const:
    return Const(float(v))


def _is_const(node: Expr, v: float | None = None) -> bool:
    return isinstance(node, Const) and (v is None or node.value == v)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and math.isfinite(a.value + b.value):
        return _const(a.value + b.value)
    return Binary("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const) and math.isfinite(a.value - b.value):
        return _const(a.value - b.value)
    return Binary("-", a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and math.isfinite(a.value * b.value):
        return _const(a.value * b.value)
    return Binary("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        q = a.value / b.value
        if math.isfinite(q):
            return _const(q)
    return Binary("/", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return _const(1.0)
    return Binary("^", a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return _const(-a.value)
    return Unary("neg", a)


def diff(node: Expr) -> Expr:
    """Symbolic derivative with respect to x (abs is rejected)."""
    if isinstance(node, Const):
        return _const(0.0)
    if isinstance(node, Var):
        return _const(1.0)
    if isinstance(node, Unary):
        if node.op == "abs":
            raise NotDifferentiableError("abs(...) is not differentiable")
        du = diff(node.arg)
        u = node.arg
        if node.op == "neg":
            return _neg(du)
        if node.op == "exp":
            return _mul(Unary("exp", u), du)
        if node.op == "ln":
            return _div(du, u)
        if node.op == "sin":
            return _mul(Unary("cos", u), du)
        if node.op == "cos":
            return _mul(_neg(Unary("sin", u)), du)
        if node.op == "sqrt":
            return _div(du, _mul(_const(2.0), Unary("sqrt", u)))
        raise NotDifferentiableError(f"unknown unary op {node.op!r}")
    assert isinstance(node, Binary)
    u, v = node.left, node.right
    if node.op == "+":
        return _add(diff(u), diff(v))
    if node.op == "-":
        return _sub(diff(u), diff(v))
    if node.op == "*":
        return _add(_mul(diff(u), v), _mul(u, diff(v)))
    if node.op == "/":
        return _div(_sub(_mul(diff(u), v), _mul(u, diff(v))), _pow(v, _const(2.0)))
    if node.op == "^":
        if isinstance(v, Const):
            return _mul(_mul(v, _pow(u, _const(v.value - 1.0))), diff(u))
        if isinstance(u, Const):
            return _mul(_mul(node, _const(math.log(u.value))), diff(v)) if u.value > 0 else \
                _mul(_mul(node, Unary("ln", u)), diff(v))
        # general u^v: u^v * (v' * ln(u) + v * u'/u)
        return _mul(node, _add(_mul(diff(v), Unary("ln", u)),
                               _mul(v, _div(diff(u), u))))
    raise NotDifferentiableError(f"unknown binary op {node.op!r}")
