# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: expression-program evaluation and adaptive Simpson.

Mirrors _kernel_py operation for operation; the pure-Python module is the
reference for semantics (IEEE conventions, acceptance tests), this one is the
fast path for the hot loops.
"""

from libc.math cimport exp, log, sin, cos, fabs, sqrt, pow, isfinite, NAN, INFINITY

import numpy as np

from . import _opcodes as _oc

BACKEND = "compiled"

cdef int OP_CONST = _oc.OP_CONST
cdef int OP_X = _oc.OP_X
cdef int OP_ADD = _oc.OP_ADD
cdef int OP_SUB = _oc.OP_SUB
cdef int OP_MUL = _oc.OP_MUL
cdef int OP_DIV = _oc.OP_DIV
cdef int OP_POW = _oc.OP_POW
cdef int OP_NEG = _oc.OP_NEG
cdef int OP_EXP = _oc.OP_EXP
cdef int OP_LN = _oc.OP_LN
cdef int OP_SIN = _oc.OP_SIN
cdef int OP_COS = _oc.OP_COS
cdef int OP_ABS = _oc.OP_ABS
cdef int OP_SQRT = _oc.OP_SQRT
cdef int OP_TAB = _oc.OP_TAB

cdef int ST_OK = _oc.STATUS_OK
cdef int ST_NOCONV = _oc.STATUS_NO_CONVERGENCE
cdef int ST_DOMAIN = _oc.STATUS_DOMAIN
cdef int ST_TABGAP = _oc.STATUS_TAB_GAP


cdef double _tab_interp(double[:] tab_x, double[:] tab_y, int lo, int hi,
                        double x, int* status) noexcept nogil:
    cdef int n = hi - lo
    cdef double first = tab_x[lo]
    cdef double last = tab_x[hi - 1]
    cdef double af = fabs(first)
    cdef double al = fabs(last)
    cdef double slack = 1e-12 * (1.0 + (af if af > al else al))
    cdef int lo_i, hi_i, mid, j
    cdef double t
    if x < first - slack or x > last + slack:
        status[0] = ST_TABGAP
        return NAN
    if x <= first:
        return tab_y[lo]
    if x >= last:
        return tab_y[hi - 1]
    lo_i = lo
    hi_i = hi
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if x < tab_x[mid]:
            hi_i = mid
        else:
            lo_i = mid + 1
    j = lo_i - 1
    if j < lo:
        j = lo
    if j > lo + n - 2:
        j = lo + n - 2
    if tab_x[j] == x:
        return tab_y[j]
    if tab_x[j + 1] == x:
        return tab_y[j + 1]
    t = (x - tab_x[j]) / (tab_x[j + 1] - tab_x[j])
    return tab_y[j] + t * (tab_y[j + 1] - tab_y[j])


cdef double _eval(int[:] ops, int[:] args, double[:] consts,
                  int[:] tab_off, double[:] tab_x, double[:] tab_y,
                  double x, int* status) noexcept nogil:
    cdef double stack[256]
    cdef int sp = 0
    cdef int i, op, k
    cdef int n = ops.shape[0]
    cdef double v
    for i in range(n):
        op = ops[i]
        if op == OP_CONST:
            stack[sp] = consts[args[i]]
            sp += 1
        elif op == OP_X:
            stack[sp] = x
            sp += 1
        elif op == OP_TAB:
            k = args[i]
            v = _tab_interp(tab_x, tab_y, tab_off[k], tab_off[k + 1], x, status)
            if status[0] != ST_OK:
                return NAN
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
            stack[sp - 1] = stack[sp - 1] / stack[sp]
        elif op == OP_POW:
            sp -= 1
            stack[sp - 1] = pow(stack[sp - 1], stack[sp])
        elif op == OP_NEG:
            stack[sp - 1] = -stack[sp - 1]
        elif op == OP_EXP:
            stack[sp - 1] = exp(stack[sp - 1])
        elif op == OP_LN:
            stack[sp - 1] = log(stack[sp - 1])
        elif op == OP_SIN:
            stack[sp - 1] = sin(stack[sp - 1])
        elif op == OP_COS:
            stack[sp - 1] = cos(stack[sp - 1])
        elif op == OP_ABS:
            stack[sp - 1] = fabs(stack[sp - 1])
        elif op == OP_SQRT:
            stack[sp - 1] = sqrt(stack[sp - 1])
        else:
            status[0] = ST_DOMAIN
            return NAN
    v = stack[0]
    if not isfinite(v):
        status[0] = ST_DOMAIN
    return v


def eval_program(ops, args, consts, tab_off, tab_x, tab_y, double x):
    cdef int status = ST_OK
    cdef double v = _eval(ops, args, consts, tab_off, tab_x, tab_y, x, &status)
    return v, status


def eval_program_many(ops, args, consts, tab_off, tab_x, tab_y, xs):
    cdef double[:] xv = np.ascontiguousarray(xs, dtype=np.float64)
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[:] ov = out
    cdef int[:] ops_v = ops
    cdef int[:] args_v = args
    cdef double[:] consts_v = consts
    cdef int[:] off_v = tab_off
    cdef double[:] tx_v = tab_x
    cdef double[:] ty_v = tab_y
    cdef int status = ST_OK
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _eval(ops_v, args_v, consts_v, off_v, tx_v, ty_v, xv[i], &status)
        if status != ST_OK:
            return out, status
    return out, status


cdef double _srec(int[:] ops, int[:] args, double[:] consts,
                  int[:] tab_off, double[:] tab_x, double[:] tab_y,
                  double a, double fa, double m, double fm, double b, double fb,
                  double s_whole, double budget, double rel, int depth, int max_depth,
                  double* err_out, int* status) noexcept nogil:
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm, frm, s_left, s_right, s2, err, tol_here
    cdef double vl, vr, el, er
    cdef int st_l, st_r
    flm = _eval(ops, args, consts, tab_off, tab_x, tab_y, lm, status)
    if status[0] != ST_OK:
        err_out[0] = INFINITY
        return NAN
    frm = _eval(ops, args, consts, tab_off, tab_x, tab_y, rm, status)
    if status[0] != ST_OK:
        err_out[0] = INFINITY
        return NAN
    s_left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    s_right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    s2 = s_left + s_right
    err = fabs(s2 - s_whole) / 15.0
    tol_here = budget
    if rel * fabs(s2) > tol_here:
        tol_here = rel * fabs(s2)
    if err <= tol_here:
        err_out[0] = err
        return s2 + (s2 - s_whole) / 15.0
    if depth >= max_depth:
        err_out[0] = err
        status[0] = ST_NOCONV
        return s2 + (s2 - s_whole) / 15.0
    st_l = ST_OK
    vl = _srec(ops, args, consts, tab_off, tab_x, tab_y,
               a, fa, lm, flm, m, fm, s_left, 0.5 * budget, rel,
               depth + 1, max_depth, &el, &st_l)
    if st_l == ST_DOMAIN or st_l == ST_TABGAP:
        status[0] = st_l
        err_out[0] = el
        return vl
    st_r = ST_OK
    vr = _srec(ops, args, consts, tab_off, tab_x, tab_y,
               m, fm, rm, frm, b, fb, s_right, 0.5 * budget, rel,
               depth + 1, max_depth, &er, &st_r)
    if st_r == ST_DOMAIN or st_r == ST_TABGAP:
        status[0] = st_r
        err_out[0] = er
        return vr
    if st_l != ST_OK or st_r != ST_OK:
        status[0] = ST_NOCONV
    err_out[0] = el + er
    return vl + vr


def simpson_program(ops, args, consts, tab_off, tab_x, tab_y,
                    double a, double b, double tol_abs, double tol_rel, int max_depth):
    cdef int[:] ops_v = ops
    cdef int[:] args_v = args
    cdef double[:] consts_v = consts
    cdef int[:] off_v = tab_off
    cdef double[:] tx_v = tab_x
    cdef double[:] ty_v = tab_y
    cdef int status = ST_OK
    cdef double sign = 1.0
    cdef double fa, fb, fm, m, s_whole, err, val
    if a == b:
        return 0.0, 0.0, ST_OK
    if a > b:
        a, b = b, a
        sign = -1.0
    fa = _eval(ops_v, args_v, consts_v, off_v, tx_v, ty_v, a, &status)
    if status != ST_OK:
        return NAN, INFINITY, status
    fb = _eval(ops_v, args_v, consts_v, off_v, tx_v, ty_v, b, &status)
    if status != ST_OK:
        return NAN, INFINITY, status
    m = 0.5 * (a + b)
    fm = _eval(ops_v, args_v, consts_v, off_v, tx_v, ty_v, m, &status)
    if status != ST_OK:
        return NAN, INFINITY, status
    s_whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    err = 0.0
    val = _srec(ops_v, args_v, consts_v, off_v, tx_v, ty_v,
                a, fa, m, fm, b, fb, s_whole, tol_abs, tol_rel, 0, max_depth,
                &err, &status)
    return sign * val, err, status
