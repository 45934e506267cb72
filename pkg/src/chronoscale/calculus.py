"""Delta calculus on bounded time scales.

Delta derivatives are exact forward quotients at right-scattered points and
Richardson-extrapolated one-sided difference quotients (staying inside the
containing dense segment) at right-dense points.  The Cauchy delta integral is
realized as the sum of scattered contributions mu(t) f(t) over [a, b) plus
adaptive-Simpson integrals over the maximal dense sub-segments.

Also here: the structural identity checks (fundamental theorem, integration
by parts, product/quotient rules, chain rule, substitution) and the
monotonicity verifier they share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import kernel
from ._opcodes import STATUS_DOMAIN, STATUS_NO_CONVERGENCE, STATUS_TAB_GAP
from .errors import (
    BadIntervalError,
    BadSubstitutionError,
    EvalDomainError,
    NoConvergenceError,
    NotInScaleError,
    OutsideKappaDomainError,
    QuotientUndefinedError,
    TabulationGapError,
)
from .expr import substitute
from .functions import ScaleFunction
from .scales import Segment, TimeScale, canonicalize

__all__ = [
    "DEFAULT_TOL",
    "MAX_QUAD_DEPTH",
    "DeltaResult",
    "IntegralResult",
    "ResidualReport",
    "MonotonicityReport",
    "compose_sigma",
    "derivative_map",
    "sigma_function",
    "delta_derivative",
    "second_delta_derivative",
    "sigma_delta",
    "delta_integral",
    "chain_rule_derivative",
    "substitution_check",
    "fundamental_theorem_check",
    "parts_check",
    "product_quotient_check",
    "verify_nondecreasing",
    "default_grid",
]

DEFAULT_TOL = 1e-9
MAX_QUAD_DEPTH = 40
_RICHARDSON_LEVELS = 4


@dataclass(frozen=True)
class DeltaResult:
    """A delta-derivative value with its computation route and error bound."""

    value: float
    method: str  # "exact_scattered" | "numeric_dense"
    err_estimate: float


@dataclass(frozen=True)
class IntegralResult:
    """A delta-integral value split into scattered and dense contributions.

    err_estimate bounds only the quadrature error of the continuous part.
    """

    value: float
    discrete_part: float
    continuous_part: float
    err_estimate: float


@dataclass(frozen=True)
class ResidualReport:
    """|lhs - rhs| of an identity, with the magnitude scale used to judge it."""

    residual: float
    scale: float
    parts: dict = field(default_factory=dict)

    def __float__(self) -> float:
        return self.residual

    def within(self, tol: float, factor: float = 10.0) -> bool:
        return self.residual <= factor * tol * self.scale


@dataclass(frozen=True)
class MonotonicityReport:
    """Joint derivative-sign and sample-sequence monotonicity check."""

    nondecreasing: bool
    derivative_ok: bool
    sequence_ok: bool
    min_derivative: float
    min_increment: float
    worst_derivative_point: float | None
    worst_increment_point: float | None

    def __bool__(self) -> bool:
        return self.nondecreasing


def default_grid(T: TimeScale, grid_step: float | None = None,
                 per_segment: int = 64) -> list[float]:
    """Sampling grid: every scattered point plus per-segment dense samples
    (or scale_points(grid_step) when a step is given)."""
    if grid_step is not None:
        return T.scale_points(grid_step)
    pts: list[float] = []
    for seg in T.segments:
        if seg.degenerate:
            pts.append(seg.lo)
            continue
        span = seg.hi - seg.lo
        for k in range(per_segment):
            pts.append(seg.lo + span * (k / per_segment))
        pts.append(seg.hi)
    out: list[float] = []
    for p in pts:
        if not out or p != out[-1]:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# Derivatives
# ---------------------------------------------------------------------------

def _one_sided_table(f: ScaleFunction, t: float, direction: float,
                     reach: float, h0_scale: float):
    """Richardson table over one-sided quotients; steps stay within reach.

    Returns (value, residual, smallest step)."""
    h0 = min(reach, h0_scale * (1.0 + abs(t)))
    if h0 <= 0.0:
        raise NoConvergenceError(f"no room for difference quotients at t={t}")
    f0 = f.evaluate(t)
    rows: list[list[float]] = []
    h = h0
    for k in range(_RICHARDSON_LEVELS + 1):
        s = t + direction * h
        d = (f.evaluate(s) - f0) / (direction * h)
        row = [d]
        for j in range(1, k + 1):
            w = 2.0 ** j
            row.append((w * row[j - 1] - rows[k - 1][j - 1]) / (w - 1.0))
        rows.append(row)
        h *= 0.5
    value = rows[-1][-1]
    residual = abs(rows[-1][-1] - rows[-2][-2])
    return value, residual, 2.0 * h


def _one_sided_derivative(f: ScaleFunction, t: float, direction: float,
                          reach: float, tol: float, h0_scale: float,
                          input_noise: float = 0.0):
    """One-sided quotient with acceptance: the extrapolation residual must
    fall below tol (plus the unavoidable amplification of any noise carried by
    the function values themselves).  When truncation at the initial step
    dominates — large high-order derivatives — the table is retried with
    smaller steps before giving up."""
    best_residual = math.inf
    scale = h0_scale
    for _ in range(3):
        value, residual, h_min = _one_sided_table(f, t, direction, reach, scale)
        allowance = tol * (1.0 + abs(value)) + 8.0 * input_noise / h_min
        if math.isfinite(value) and residual <= allowance:
            return value, residual
        best_residual = min(best_residual, residual)
        scale /= 8.0
    raise NoConvergenceError(
        f"difference quotients did not settle at t={t} "
        f"(residual {best_residual:.3e} vs tol {tol:.1e}); the function may not "
        "be delta-differentiable there, or tol is too tight")


def _dense_direction(f: ScaleFunction, t: float, lo: float, hi: float):
    """Pick the quotient direction and admissible step reach at a right-dense
    point.  Steps are clipped to half the distance to the segment end (the
    endpoint value of an rd-continuous function may differ from its limit)
    and to the function's next knot so quotients sample one smooth piece."""
    guard = 1e-9 * (1.0 + abs(t))
    if hi - t > guard:
        cap = 0.5 * (hi - t)
        reach = min(f.forward_smooth_reach(t, hi), cap)
        if reach <= guard:
            reach = cap
        return 1.0, reach
    if t - lo > guard:
        cap = 0.5 * (t - lo)
        reach = min(f.backward_smooth_reach(t, lo), cap)
        if reach <= guard:
            reach = cap
        return -1.0, reach
    raise NoConvergenceError(f"segment around t={t} is too small for quotients")


def _dense_derivative(f: ScaleFunction, t: float, lo: float, hi: float,
                      tol: float, h0_scale: float = 1e-3,
                      input_noise: float = 0.0):
    """Derivative at a right-dense point using only points of [lo, hi]."""
    direction, reach = _dense_direction(f, t, lo, hi)
    return _one_sided_derivative(f, t, direction, reach, tol, h0_scale, input_noise)


def _delta_derivative_impl(f: ScaleFunction, T: TimeScale, t: float, tol: float,
                           h0_scale: float) -> DeltaResult:
    if not T.contains(t):
        raise NotInScaleError(f"{t} is not a point of the scale")
    if t == T.max:
        if T.rho(t) < t:
            raise OutsideKappaDomainError(
                f"t={t} is a left-scattered maximum, outside the derivative domain")
        if T.segments[-1].degenerate:
            raise OutsideKappaDomainError(
                f"t={t} is an isolated point with no scale neighborhood")
    st = T.sigma(t)
    if st > t:
        mu = st - t
        value = (f.evaluate(st) - f.evaluate(t)) / mu
        return DeltaResult(value=value, method="exact_scattered", err_estimate=0.0)
    idx = next(i for i, seg in enumerate(T.segments)
               if seg.lo <= t <= seg.hi)
    seg = T.segments[idx]
    value, residual = _dense_derivative(f, t, seg.lo, seg.hi, tol, h0_scale)
    return DeltaResult(value=value, method="numeric_dense", err_estimate=residual)


def delta_derivative(f: ScaleFunction, T: TimeScale, t: float,
                     tol: float = DEFAULT_TOL) -> DeltaResult:
    """Delta derivative of f at t.

    Right-scattered t: the exact quotient (f(sigma(t)) - f(t)) / mu(t).
    Right-dense t: one-sided difference quotients from within the containing
    dense segment, Richardson-extrapolated; raises NoConvergenceError when the
    extrapolation residual exceeds tol (signalling non-differentiability or an
    over-tight tolerance), OutsideKappaDomainError at a left-scattered max.
    """
    return _delta_derivative_impl(f, T, t, tol, h0_scale=1e-3)


def derivative_map(f: ScaleFunction, T: TimeScale,
                   tol: float = DEFAULT_TOL) -> ScaleFunction:
    """The map s -> delta_derivative(f, T, s).value as a ScaleFunction.

    Its dense-segment evaluator takes the derivative from within the clipped
    segment (the rd-limit version), so it integrates correctly across pieces.
    """

    def at(s: float) -> float:
        return _delta_derivative_impl(f, T, s, tol, 1e-3).value

    def dense(s: float, lo: float, hi: float) -> float:
        return _dense_derivative(f, s, lo, hi, tol)[0]

    return ScaleFunction.from_callable(
        at, knots=f.knots, text=f"delta[{f.describe()}]", segment_evaluator=dense)


def sigma_function(T: TimeScale) -> ScaleFunction:
    """The forward jump operator as a ScaleFunction on T."""
    return ScaleFunction.from_callable(
        T.sigma, text="sigma",
        knots=tuple(s.hi for s in T.segments),
        segment_evaluator=lambda t, lo, hi: t)


def compose_sigma(f: ScaleFunction, T: TimeScale) -> ScaleFunction:
    """f composed with the forward jump operator of T.

    On dense segments sigma is the identity except at the right endpoint, so
    the dense-integration view of the composition is f itself (the rd-limit).
    """
    se = f._dense_fn()
    return ScaleFunction.from_callable(
        lambda t: f.evaluate(T.sigma(t)),
        knots=f.knots, text=f"({f.describe()}) o sigma", segment_evaluator=se)


def second_delta_derivative(f: ScaleFunction, T: TimeScale, t: float,
                            tol: float = DEFAULT_TOL) -> DeltaResult:
    """Delta derivative applied to the delta-derivative map of f.

    The outer extrapolation uses coarser initial steps and a noise-aware
    acceptance: the inner values carry their own small residuals, which a
    difference quotient amplifies by 1/h.
    """
    if not T.contains(t):
        raise NotInScaleError(f"{t} is not a point of the scale")
    if t == T.max and (T.rho(t) < t or T.segments[-1].degenerate):
        raise OutsideKappaDomainError(
            f"t={t} has no forward neighborhood for a second derivative")
    inner_errs: list[float] = []

    def m(s: float) -> float:
        r = _delta_derivative_impl(f, T, s, tol, 1e-3)
        inner_errs.append(r.err_estimate)
        return r.value

    st = T.sigma(t)
    if st > t:
        mu = st - t
        v1, v0 = m(st), m(t)
        value = (v1 - v0) / mu
        exact = all(e == 0.0 for e in inner_errs)
        return DeltaResult(value=value,
                           method="exact_scattered" if exact else "numeric_dense",
                           err_estimate=math.fsum(inner_errs) / mu)
    seg = next(s for s in T.segments if s.lo <= t <= s.hi)
    map_fn = ScaleFunction.from_callable(m, knots=f.knots)
    direction, reach = _dense_direction(map_fn, t, seg.lo, seg.hi)
    value, residual, h_min = _one_sided_table(map_fn, t, direction, reach, 1e-2)
    noise = max(max(inner_errs, default=0.0), 1e-15 * (1.0 + abs(value)))
    allowance = tol * (1.0 + abs(value)) + 8.0 * noise / h_min
    if not math.isfinite(value) or residual > allowance:
        raise NoConvergenceError(
            f"second-derivative quotients did not settle at t={t} "
            f"(residual {residual:.3e})")
    return DeltaResult(value=value, method="numeric_dense", err_estimate=residual)


def sigma_delta(T: TimeScale, t: float, tol: float = DEFAULT_TOL) -> DeltaResult:
    """Delta derivative of the forward jump operator at t.

    At a right-scattered t this is the exact quotient mu(sigma(t))/mu(t) even
    where sigma is discontinuous from the left (the scattered formula); dense
    interior points give 1.
    """
    return delta_derivative(sigma_function(T), T, t, tol)


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------

def _integrate_piece(f: ScaleFunction, u: float, v: float, seg_lo: float,
                     seg_hi: float, tol: float) -> tuple[float, float]:
    if f.program is not None and f.segment_evaluator is None:
        val, err, status = kernel.simpson_program(f.program, u, v, tol, tol,
                                                  MAX_QUAD_DEPTH)
    else:
        dense = f._dense_fn()
        val, err, status = kernel.simpson_callable(
            lambda s: dense(s, seg_lo, seg_hi), u, v, tol, tol, MAX_QUAD_DEPTH)
    if status == STATUS_NO_CONVERGENCE:
        raise NoConvergenceError(
            f"quadrature of {f.describe()} over [{u}, {v}] did not reach tol={tol:.1e}")
    if status == STATUS_DOMAIN:
        raise EvalDomainError(f"{f.describe()} is not finite inside [{u}, {v}]")
    if status == STATUS_TAB_GAP:
        raise TabulationGapError(f"{f.describe()} has no tabulated value inside [{u}, {v}]")
    return val, err


def delta_integral(f: ScaleFunction, T: TimeScale, a: float, b: float,
                   tol: float = DEFAULT_TOL) -> IntegralResult:
    """Cauchy delta integral of f over [a, b] in T (a, b scale points, a <= b).

    Every right-scattered t in [a, b) contributes mu(t) f(t); each maximal
    dense sub-segment contributes an adaptive-Simpson integral (split at the
    function's knots), with f assumed rd-continuous there.
    """
    if not T.contains(a):
        raise NotInScaleError(f"integration endpoint {a} is not in the scale")
    if not T.contains(b):
        raise NotInScaleError(f"integration endpoint {b} is not in the scale")
    if a > b:
        raise BadIntervalError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return IntegralResult(0.0, 0.0, 0.0, 0.0)
    R = T.restrict(a, b)
    discrete_terms = []
    for i in range(len(R.segments) - 1):
        t = R.segments[i].hi
        mu = R.segments[i + 1].lo - t
        discrete_terms.append(mu * f.evaluate(t))
    discrete = math.fsum(discrete_terms)
    cont_terms = []
    err_terms = []
    for seg in R.segments:
        if seg.degenerate:
            continue
        cuts = [seg.lo]
        for k in f.knots:
            if seg.lo < k < seg.hi:
                cuts.append(k)
        cuts.append(seg.hi)
        for u, v in zip(cuts, cuts[1:]):
            val, err = _integrate_piece(f, u, v, seg.lo, seg.hi, tol)
            cont_terms.append(val)
            err_terms.append(err)
    continuous = math.fsum(cont_terms)
    return IntegralResult(value=discrete + continuous, discrete_part=discrete,
                          continuous_part=continuous,
                          err_estimate=math.fsum(err_terms))


# ---------------------------------------------------------------------------
# Structural identities
# ---------------------------------------------------------------------------

def chain_rule_derivative(fprime: ScaleFunction, g: ScaleFunction, T: TimeScale,
                          t: float, tol: float = DEFAULT_TOL) -> DeltaResult:
    """(f o g)^delta(t) via the averaged classical derivative of the outer map:
    g^delta(t) * integral over h in [0,1] of fprime(g(t) + h mu(t) g^delta(t)).
    """
    gd = delta_derivative(g, T, t, tol)
    gt = g.evaluate(t)
    c = T.mu(t) * gd.value
    if c == 0.0:
        inner_val, inner_err = fprime.evaluate(gt), 0.0
    else:
        if fprime.ast is not None:
            from .expr import Binary, Const, Var
            arg = Binary("+", Const(gt), Binary("*", Const(c), Var()))
            inner = ScaleFunction.from_expression(substitute(fprime.ast, arg))
            inner_val, inner_err = _integrate_piece(inner, 0.0, 1.0, 0.0, 1.0, tol)
        else:
            fn = ScaleFunction.from_callable(lambda h: fprime.evaluate(gt + h * c))
            inner_val, inner_err = _integrate_piece(fn, 0.0, 1.0, 0.0, 1.0, tol)
    value = gd.value * inner_val
    err = abs(gd.value) * inner_err + abs(inner_val) * gd.err_estimate
    return DeltaResult(value=value, method="numeric_dense", err_estimate=err)


def fundamental_theorem_check(f: ScaleFunction, T: TimeScale, b: float, c: float,
                              tol: float = DEFAULT_TOL) -> ResidualReport:
    """|integral of f^delta over [b, c] minus (f(c) - f(b))|."""
    dm = derivative_map(f, T, tol)
    integ = delta_integral(dm, T, b, c, tol=0.1 * tol)
    boundary = f.evaluate(c) - f.evaluate(b)
    residual = abs(integ.value - boundary)
    scale = 1.0 + abs(integ.value) + abs(boundary)
    return ResidualReport(residual, scale,
                          {"integral": integ.value, "boundary": boundary})


def parts_check(f: ScaleFunction, g: ScaleFunction, T: TimeScale, b: float,
                c: float, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Integration-by-parts residual
    |int f g^delta - [f g] + int f^delta (g o sigma)| over [b, c]."""
    gd = derivative_map(g, T, tol)
    fd = derivative_map(f, T, tol)
    gs = compose_sigma(g, T)
    i1 = delta_integral(f * gd, T, b, c, tol=0.1 * tol)
    i2 = delta_integral(fd * gs, T, b, c, tol=0.1 * tol)
    boundary = f.evaluate(c) * g.evaluate(c) - f.evaluate(b) * g.evaluate(b)
    residual = abs(i1.value - boundary + i2.value)
    scale = 1.0 + abs(i1.value) + abs(i2.value) + abs(boundary)
    return ResidualReport(residual, scale,
                          {"int_f_gdelta": i1.value, "boundary": boundary,
                           "int_fdelta_gsigma": i2.value})


def product_quotient_check(f: ScaleFunction, g: ScaleFunction, T: TimeScale,
                           t: float, tol: float = DEFAULT_TOL
                           ) -> tuple[ResidualReport, ResidualReport]:
    """Residuals of the product and quotient rules at t."""
    fd = delta_derivative(f, T, t, tol).value
    gd = delta_derivative(g, T, t, tol).value
    st = T.sigma(t)
    ft, gt = f.evaluate(t), g.evaluate(t)
    fs, gs = f.evaluate(st), g.evaluate(st)
    prod_lhs = delta_derivative(f * g, T, t, tol).value
    prod_rhs = fd * gt + fs * gd
    res_prod = ResidualReport(abs(prod_lhs - prod_rhs),
                              1.0 + abs(prod_lhs) + abs(prod_rhs),
                              {"lhs": prod_lhs, "rhs": prod_rhs})
    if gt * gs == 0.0:
        raise QuotientUndefinedError(f"g * (g o sigma) vanishes at t={t}")
    quot_lhs = delta_derivative(f / g, T, t, tol).value
    quot_rhs = (fd * gt - ft * gd) / (gt * gs)
    res_quot = ResidualReport(abs(quot_lhs - quot_rhs),
                              1.0 + abs(quot_lhs) + abs(quot_rhs),
                              {"lhs": quot_lhs, "rhs": quot_rhs})
    return res_prod, res_quot


def substitution_check(v: ScaleFunction, omega: ScaleFunction, T: TimeScale,
                       t: float, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Residual of (omega o v)^delta = (omega~delta o v) v^delta at t, where
    omega~delta is the derivative on the image scale v(T)."""
    pts = default_grid(T)
    vals = [v.evaluate(p) for p in pts]
    for (p1, w1), (p2, w2) in zip(zip(pts, vals), zip(pts[1:], vals[1:])):
        if w2 <= w1:
            raise BadSubstitutionError(
                f"inner map is not strictly increasing between {p1} and {p2}")
    image = canonicalize([Segment(v.evaluate(s.lo), v.evaluate(s.hi))
                          for s in T.segments])
    if v.ast is not None and omega.ast is not None:
        composed = ScaleFunction.from_expression(substitute(omega.ast, v.ast))
    else:
        composed = ScaleFunction.from_callable(
            lambda s: omega.evaluate(v.evaluate(s)),
            text=f"({omega.describe()}) o ({v.describe()})")
    lhs = delta_derivative(composed, T, t, tol).value
    vd = delta_derivative(v, T, t, tol).value
    wtd = delta_derivative(omega, image, v.evaluate(t), tol).value
    rhs = wtd * vd
    return ResidualReport(abs(lhs - rhs), 1.0 + abs(lhs) + abs(rhs),
                          {"lhs": lhs, "rhs": rhs})


def verify_nondecreasing(f: ScaleFunction, T: TimeScale, a: float, b: float,
                         grid_step: float | None = None, tol: float = DEFAULT_TOL,
                         fdelta: ScaleFunction | None = None) -> MonotonicityReport:
    """Check that f is non-decreasing on [a, b]: f^delta >= -tol at every grid
    sample (the final point, whose derivative would look beyond b, is covered
    by the sequence check) and f(t_{i+1}) >= f(t_i) - tol along the samples.

    ``fdelta`` optionally supplies the derivative map (used by the proof
    witnesses, whose derivatives are known in closed form).
    """
    R = T.restrict(a, b)
    pts = default_grid(R, grid_step)
    min_d = math.inf
    worst_d = None
    for t in pts[:-1]:
        if fdelta is not None:
            d = fdelta.evaluate(t)
        elif R.sigma(t) > t:
            mu = R.sigma(t) - t
            d = (f.evaluate(R.sigma(t)) - f.evaluate(t)) / mu
        else:
            seg = next(s for s in R.segments if s.lo <= t <= s.hi)
            d = _dense_derivative(f, t, seg.lo, seg.hi, tol)[0]
        if d < min_d:
            min_d, worst_d = d, t
    vals = [f.evaluate(t) for t in pts]
    min_inc = math.inf
    worst_inc = None
    for t, v1, v2 in zip(pts, vals, vals[1:]):
        if v2 - v1 < min_inc:
            min_inc, worst_inc = v2 - v1, t
    if len(pts) < 2:
        min_inc = 0.0
    derivative_ok = min_d >= -tol
    sequence_ok = min_inc >= -tol
    return MonotonicityReport(
        nondecreasing=derivative_ok and sequence_ok,
        derivative_ok=derivative_ok, sequence_ok=sequence_ok,
        min_derivative=min_d if math.isfinite(min_d) else 0.0,
        min_increment=min_inc if math.isfinite(min_inc) else 0.0,
        worst_derivative_point=worst_d, worst_increment_point=worst_inc)
