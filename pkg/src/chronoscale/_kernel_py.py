"""Pure-Python kernel: expression-program evaluation and adaptive Simpson.

This is the fallback selected when the compiled extension is unavailable (or
forced via CHRONOSCALE_PURE_PYTHON=1).  It mirrors the compiled kernel
operation for operation — same arithmetic order, same IEEE conventions
(domain problems surface as nonfinite values, never exceptions) — so the two
backends agree to the last bits libm allows.
"""

from __future__ import annotations

import math
from bisect import bisect_right

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
    STATUS_DOMAIN,
    STATUS_NO_CONVERGENCE,
    STATUS_OK,
    STATUS_TAB_GAP,
)

BACKEND = "python"

_NAN = float("nan")
_INF = float("inf")


def _c_div(a: float, b: float) -> float:
    """IEEE division (C semantics): x/0 is +-inf, 0/0 is nan."""
    if b != 0.0:
        return a / b
    if a == 0.0 or math.isnan(a):
        return _NAN
    return math.copysign(_INF, a) * math.copysign(1.0, b)


def _c_pow(a: float, b: float) -> float:
    """C pow semantics: nonreal/overflow results become nan/inf, no raising."""
    try:
        return math.pow(a, b)
    except OverflowError:
        return _INF
    except ValueError:
        if a == 0.0 and b < 0.0:
            return _INF
        return _NAN


def _c_log(a: float) -> float:
    if a > 0.0:
        return math.log(a)
    if a == 0.0:
        return -_INF
    return _NAN


def _c_sqrt(a: float) -> float:
    if a >= 0.0:
        return math.sqrt(a)
    return _NAN


def _c_exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError:
        return _INF


def _tab_interp(tab_x, tab_y, lo: int, hi: int, x: float):
    """Linear interpolation over knots tab_x[lo:hi]; exact at knots.

    Returns (value, status)."""
    n = hi - lo
    first = tab_x[lo]
    last = tab_x[hi - 1]
    slack = 1e-12 * (1.0 + max(abs(first), abs(last)))
    if x < first - slack or x > last + slack:
        return _NAN, STATUS_TAB_GAP
    if x <= first:
        return tab_y[lo], STATUS_OK
    if x >= last:
        return tab_y[hi - 1], STATUS_OK
    j = bisect_right(tab_x, x, lo, hi) - 1
    j = min(max(j, lo), lo + n - 2)
    if tab_x[j] == x:
        return tab_y[j], STATUS_OK
    if tab_x[j + 1] == x:
        return tab_y[j + 1], STATUS_OK
    t = (x - tab_x[j]) / (tab_x[j + 1] - tab_x[j])
    return tab_y[j] + t * (tab_y[j + 1] - tab_y[j]), STATUS_OK


def eval_program(ops, args, consts, tab_off, tab_x, tab_y, x: float):
    """Run one expression program at x.  Returns (value, status)."""
    stack = [0.0] * 8
    cap = 8
    sp = 0
    for i in range(len(ops)):
        op = ops[i]
        if op == OP_CONST:
            if sp == cap:
                stack.extend([0.0] * cap)
                cap *= 2
            stack[sp] = consts[args[i]]
            sp += 1
        elif op == OP_X:
            if sp == cap:
                stack.extend([0.0] * cap)
                cap *= 2
            stack[sp] = x
            sp += 1
        elif op == OP_TAB:
            if sp == cap:
                stack.extend([0.0] * cap)
                cap *= 2
            k = args[i]
            v, status = _tab_interp(tab_x, tab_y, tab_off[k], tab_off[k + 1], x)
            if status != STATUS_OK:
                return _NAN, status
            stack[sp] = v
            sp += 1
        elif op == OP_ADD:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] + stack[sp]
        elif op == OP_SUB:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] - stack[sp]
        elif op == OP_MUL:
            sp -= 1
            stack[sp - 1] = stack[sp - 1] * stack[sp]
        elif op == OP_DIV:
            sp -= 1
            stack[sp - 1] = _c_div(stack[sp - 1], stack[sp])
        elif op == OP_POW:
            sp -= 1
            stack[sp - 1] = _c_pow(stack[sp - 1], stack[sp])
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_EXP:
            stack[sp - 1] = _c_exp(stack[sp - 1])
        elif op == OP_LN:
            stack[sp - 1] = _c_log(stack[sp - 1])
        elif op == OP_SIN:
            stack[sp - 1] = math.sin(stack[sp - 1])
        elif op == OP_COS:
            stack[sp - 1] = math.cos(stack[sp - 1])
        elif op == OP_ABS:
            stack[sp - 1] = abs(stack[sp - 1])
        elif op == OP_SQRT:
            stack[sp - 1] = _c_sqrt(stack[sp - 1])
        else:
            return _NAN, STATUS_DOMAIN
    v = stack[0]
    if not math.isfinite(v):
        return v, STATUS_DOMAIN
    return v, STATUS_OK


def eval_program_many(ops, args, consts, tab_off, tab_x, tab_y, xs):
    """Evaluate at each point of xs.  Returns (list of values, status);
    stops at the first failing point."""
    out = [0.0] * len(xs)
    for i, x in enumerate(xs):
        v, status = eval_program(ops, args, consts, tab_off, tab_x, tab_y, x)
        if status != STATUS_OK:
            return out, status
        out[i] = v
    return out, STATUS_OK


def simpson_program(ops, args, consts, tab_off, tab_x, tab_y,
                    a: float, b: float, tol_abs: float, tol_rel: float, max_depth: int):
    """Adaptive Simpson over an expression program.  Returns (value, err, status)."""

    def f(x):
        return eval_program(ops, args, consts, tab_off, tab_x, tab_y, x)

    return _simpson(f, a, b, tol_abs, tol_rel, max_depth)


def simpson_callable(func, a: float, b: float, tol_abs: float, tol_rel: float, max_depth: int):
    """Adaptive Simpson over a Python callable.  Exceptions propagate; a
    nonfinite sample reports STATUS_DOMAIN."""

    def f(x):
        v = func(x)
        if not math.isfinite(v):
            return v, STATUS_DOMAIN
        return v, STATUS_OK

    return _simpson(f, a, b, tol_abs, tol_rel, max_depth)


def _simpson(f, a, b, tol_abs, tol_rel, max_depth):
    if a == b:
        return 0.0, 0.0, STATUS_OK
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0
    fa, st = f(a)
    if st != STATUS_OK:
        return _NAN, _INF, st
    fb, st = f(b)
    if st != STATUS_OK:
        return _NAN, _INF, st
    m = 0.5 * (a + b)
    fm, st = f(m)
    if st != STATUS_OK:
        return _NAN, _INF, st
    s_whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    val, err, status = _simpson_rec(f, a, fa, m, fm, b, fb, s_whole,
                                    tol_abs, tol_rel, 0, max_depth)
    return sign * val, err, status


def _simpson_rec(f, a, fa, m, fm, b, fb, s_whole, budget, rel, depth, max_depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, st = f(lm)
    if st != STATUS_OK:
        return _NAN, _INF, st
    frm, st = f(rm)
    if st != STATUS_OK:
        return _NAN, _INF, st
    s_left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    s_right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    s2 = s_left + s_right
    err = abs(s2 - s_whole) / 15.0
    tol_here = budget
    if rel * abs(s2) > tol_here:
        tol_here = rel * abs(s2)
    if err <= tol_here:
        return s2 + (s2 - s_whole) / 15.0, err, STATUS_OK
    if depth >= max_depth:
        return s2 + (s2 - s_whole) / 15.0, err, STATUS_NO_CONVERGENCE
    vl, el, st_l = _simpson_rec(f, a, fa, lm, flm, m, fm, s_left,
                                0.5 * budget, rel, depth + 1, max_depth)
    if st_l == STATUS_DOMAIN or st_l == STATUS_TAB_GAP:
        return vl, el, st_l
    vr, er, st_r = _simpson_rec(f, m, fm, rm, frm, b, fb, s_right,
                                0.5 * budget, rel, depth + 1, max_depth)
    if st_r == STATUS_DOMAIN or st_r == STATUS_TAB_GAP:
        return vr, er, st_r
    status = STATUS_OK
    if st_l != STATUS_OK or st_r != STATUS_OK:
        status = STATUS_NO_CONVERGENCE
    return vl + vr, el + er, status
