"""Hypothesis-gated verdicts for integral inequalities on time scales.

Every check samples its hypotheses on a grid (every scattered point plus 64
samples per dense segment by default), computes both sides of the inequality
with quadrature two orders tighter than the verdict tolerance, and reports an
oriented slack (lhs - rhs, nonnegative when the inequality holds).  When any
hypothesis fails the verdict is *not applicable* — never a counterexample.
Pointwise hypotheses on dense segments are a sampled semi-decision and are
reported as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .calculus import (
    DEFAULT_TOL,
    MonotonicityReport,
    compose_sigma,
    default_grid,
    delta_derivative,
    delta_integral,
    verify_nondecreasing,
)
from .errors import BadIntervalError, NoConvergenceError, NotInScaleError
from .functions import ScaleFunction
from .scales import TimeScale

__all__ = [
    "ExponentPair",
    "BoundsPair",
    "HypothesisReport",
    "InequalityVerdict",
    "WitnessReport",
    "THEOREM_IDS",
    "check_holder",
    "check_ratio_holder",
    "check_bounded_ratio",
    "check_power_bounded",
    "check_qi",
    "check_akkouchi_ts",
    "akkouchi_witness",
    "check_pm_bound",
    "check_yin_qi_strict",
    "yin_qi_witness",
]

THEOREM_IDS = ("holder", "ratio_holder", "bounded_ratio", "power_bounded",
               "qi", "akkouchi", "pm_bound", "yin_qi")


@dataclass(frozen=True)
class ExponentPair:
    """Conjugate exponents: 1/p + 1/q = 1, with p > 1 (then q > 1) or
    p < 0 (then 0 < q < 1)."""

    p: float
    q: float

    def __post_init__(self):
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-12:
            raise ValueError(f"exponents are not conjugate: 1/{self.p} + 1/{self.q} != 1")
        if not (self.p > 1.0 or self.p < 0.0):
            raise ValueError(f"inadmissible exponent p={self.p}; need p > 1 or p < 0")

    @classmethod
    def conjugate(cls, p: float) -> "ExponentPair":
        if p == 1.0 or p == 0.0:
            raise ValueError(f"p={p} has no conjugate exponent")
        return cls(p, p / (p - 1.0))


@dataclass(frozen=True)
class BoundsPair:
    """Positive bracket 0 < m <= M for a pointwise ratio."""

    m: float
    M: float

    def __post_init__(self):
        if not (0.0 < self.m <= self.M < math.inf):
            raise ValueError(f"need 0 < m <= M < inf, got m={self.m}, M={self.M}")


@dataclass(frozen=True)
class HypothesisReport:
    name: str
    satisfied: bool
    margin: float  # signed; >= 0 means comfortably satisfied
    witness_point: float | None = None

    def to_obj(self) -> dict:
        return {"name": self.name, "satisfied": self.satisfied,
                "margin": self.margin, "witness_point": self.witness_point}


@dataclass(frozen=True)
class InequalityVerdict:
    theorem: str
    hypotheses: list[HypothesisReport]
    lhs: float | None
    rhs: float | None
    slack: float | None
    holds: bool | None  # None when not applicable
    strict_required: bool
    tol: float
    scale_digest: str
    function_text: str | None = None
    g_text: str | None = None
    p: float | None = None
    q: float | None = None
    m: float | None = None
    M: float | None = None
    bounds_estimated: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return all(h.satisfied for h in self.hypotheses)

    @property
    def is_violation(self) -> bool:
        return self.applicable and self.holds is False

    def to_obj(self) -> dict:
        obj = {
            "theorem": self.theorem,
            "hypotheses": [h.to_obj() for h in self.hypotheses],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "applicable": self.applicable,
            "strict_required": self.strict_required,
            "tol": self.tol,
            "scale_digest": self.scale_digest,
            "function_text": self.function_text,
            "p": self.p,
            "q": self.q,
            "m": self.m,
            "M": self.M,
            "bounds_estimated": self.bounds_estimated,
        }
        if self.g_text is not None:
            obj["g_text"] = self.g_text
        obj.update(self.extras)
        return obj


@dataclass(frozen=True)
class WitnessReport:
    """Diagnostic exposure of a proof's monotone-auxiliary-function mechanism."""

    name: str
    checks: list[HypothesisReport]
    monotonicity: MonotonicityReport | None
    passed: bool

    def __bool__(self) -> bool:
        return self.passed

    def to_obj(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "checks": [c.to_obj() for c in self.checks]}


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _validate_interval(T: TimeScale, a: float, b: float):
    if not T.contains(a):
        raise NotInScaleError(f"a={a} is not in the scale")
    if not T.contains(b):
        raise NotInScaleError(f"b={b} is not in the scale")
    if not a < b:
        raise BadIntervalError(f"need a < b, got a={a}, b={b}")


def _grid(T: TimeScale, a: float, b: float, grid_step: float | None) -> list[float]:
    return default_grid(T.restrict(a, b), grid_step)


def _integral(f: ScaleFunction, T: TimeScale, a: float, b: float, tol: float) -> float:
    # quadrature two orders tighter than the verdict band, so several
    # integrals per side cannot eat the tolerance
    return delta_integral(f, T, a, b, tol=tol * 1e-2).value


def _hyp(name: str, margin: float, tol: float,
         witness: float | None = None) -> HypothesisReport:
    return HypothesisReport(name=name, satisfied=margin >= -tol,
                            margin=margin, witness_point=witness)


def _min_sample(f: ScaleFunction, pts: list[float]) -> tuple[float, float]:
    vals = f.evaluate_many(pts)
    i = min(range(len(vals)), key=vals.__getitem__)
    return vals[i], pts[i]


def _positivity(f: ScaleFunction, pts: list[float], label: str,
                tol: float) -> HypothesisReport:
    v, w = _min_sample(f, pts)
    return _hyp(f"{label} positive on [a,b]", v, tol, w)


def _bounds_report(ratio_vals: list[float], pts: list[float],
                   bounds: BoundsPair | None, label: str, tol: float):
    """Verify or estimate 0 < m <= ratio <= M on the grid.

    Returns (m, M, report, estimated)."""
    rmin = min(ratio_vals)
    rmax = max(ratio_vals)
    if bounds is not None:
        low = min(zip(ratio_vals, pts))
        high = max(zip(ratio_vals, pts))
        margin_low = rmin - bounds.m
        margin_high = bounds.M - rmax
        if margin_low <= margin_high:
            margin, witness = margin_low, low[1]
        else:
            margin, witness = margin_high, high[1]
        rep = _hyp(f"{label} within [m, M]", margin, tol, witness)
        return bounds.m, bounds.M, rep, False
    if rmin <= 0.0:
        rep = _hyp(f"{label} within [m, M] (estimated)", rmin, tol,
                   pts[ratio_vals.index(rmin)])
        return rmin, rmax, rep, True
    m = rmin * (1.0 - 1e-9)
    M = rmax * (1.0 + 1e-9)
    rep = _hyp(f"{label} within [m, M] (estimated)", 0.0, tol, None)
    return m, M, rep, True


def _sigma_delta_fast(T: TimeScale, t: float) -> float:
    """sigma^delta: 1 at right-dense points, mu(sigma(t))/mu(t) at scattered."""
    st = T.sigma(t)
    if st == t:
        return 1.0
    return (T.sigma(st) - st) / (st - t)


def _sigma_junctions(T: TimeScale, a: float, b: float) -> list[float]:
    """Interior points where sigma is not delta-differentiable: the right
    endpoint of a dense segment followed by a gap (left-dense, right-scattered)."""
    return [seg.hi for seg in T.segments
            if not seg.degenerate and a < seg.hi < b and T.sigma(seg.hi) > seg.hi]


def _derivative_samples(f: ScaleFunction, T: TimeScale, pts: list[float],
                        tol: float):
    """delta-derivative values at sample points; raises NoConvergenceError
    where f fails to differentiate."""
    return [(t, delta_derivative(f, T, t, tol).value) for t in pts]


# ---------------------------------------------------------------------------
# Lemma-level checks
# ---------------------------------------------------------------------------

def check_holder(f: ScaleFunction, g: ScaleFunction, pq: ExponentPair,
                 T: TimeScale, a: float, b: float,
                 tol: float = DEFAULT_TOL, grid_step: float | None = None
                 ) -> InequalityVerdict:
    """Hölder: int |f g| <= [int |f|^p]^{1/p} [int |g|^q]^{1/q} for p > 1."""
    _validate_interval(T, a, b)
    if pq.p <= 1.0:
        raise ValueError("the Hölder inequality needs p > 1")
    A = _integral(abs(f) ** pq.p, T, a, b, tol)
    B = _integral(abs(g) ** pq.q, T, a, b, tol)
    C = _integral(abs(f * g), T, a, b, tol)
    lhs = A ** (1.0 / pq.p) * B ** (1.0 / pq.q)
    return _finish("holder", [], lhs, C, T, tol, f=f, g=g, p=pq.p, q=pq.q)


def check_ratio_holder(f: ScaleFunction, g: ScaleFunction, pq: ExponentPair,
                       T: TimeScale, a: float, b: float,
                       tol: float = DEFAULT_TOL, grid_step: float | None = None
                       ) -> InequalityVerdict:
    """int f^p / g^{p/q} >= [int f]^p / [int g]^{p/q} for positive f, g and
    p > 1 or p < 0; equality exactly at proportional pairs f = a g."""
    _validate_interval(T, a, b)
    pts = _grid(T, a, b, grid_step)
    hyps = [_positivity(f, pts, "f", tol), _positivity(g, pts, "g", tol)]
    if not all(h.satisfied for h in hyps):
        return _finish("ratio_holder", hyps, None, None, T, tol,
                       f=f, g=g, p=pq.p, q=pq.q)
    p, q = pq.p, pq.q
    lhs = _integral((f ** p) / (g ** (p / q)), T, a, b, tol)
    If = _integral(f, T, a, b, tol)
    Ig = _integral(g, T, a, b, tol)
    rhs = (If ** p) / (Ig ** (p / q))
    verdict = _finish("ratio_holder", hyps, lhs, rhs, T, tol,
                      f=f, g=g, p=p, q=q)
    scale = 1.0 + abs(lhs) + abs(rhs)
    near = abs(lhs - rhs) <= tol * scale
    extras = {"near_equality": near}
    if near:
        ratios = [fv / gv for fv, gv in
                  zip(f.evaluate_many(pts), g.evaluate_many(pts))]
        spread = max(ratios) - min(ratios)
        extras["proportional"] = spread <= 1e-6 * (1.0 + abs(max(ratios)))
    else:
        extras["proportional"] = None
    return _with_extras(verdict, extras)


def check_bounded_ratio(f: ScaleFunction, g: ScaleFunction, pq: ExponentPair,
                        T: TimeScale, a: float, b: float,
                        bounds: BoundsPair | None = None,
                        tol: float = DEFAULT_TOL, grid_step: float | None = None
                        ) -> InequalityVerdict:
    """[int f]^{1/p} [int g]^{1/q} <= (M/m)^{1/pq} int f^{1/p} g^{1/q} when
    0 < m <= f/g <= M and p > 1 (verdict sides oriented large-side-first)."""
    _validate_interval(T, a, b)
    if pq.p <= 1.0:
        raise ValueError("this bound needs p > 1")
    pts = _grid(T, a, b, grid_step)
    hyps = [_positivity(f, pts, "f", tol), _positivity(g, pts, "g", tol)]
    if not all(h.satisfied for h in hyps):
        return _finish("bounded_ratio", hyps, None, None, T, tol,
                       f=f, g=g, p=pq.p, q=pq.q)
    ratios = [fv / gv for fv, gv in zip(f.evaluate_many(pts), g.evaluate_many(pts))]
    m, M, rep, estimated = _bounds_report(ratios, pts, bounds, "f/g", tol)
    hyps.append(rep)
    if not rep.satisfied:
        return _finish("bounded_ratio", hyps, None, None, T, tol, f=f, g=g,
                       p=pq.p, q=pq.q, m=m, M=M, bounds_estimated=estimated)
    p, q = pq.p, pq.q
    lhs = (M / m) ** (1.0 / (p * q)) * _integral((f ** (1.0 / p)) * (g ** (1.0 / q)),
                                                 T, a, b, tol)
    rhs = _integral(f, T, a, b, tol) ** (1.0 / p) * _integral(g, T, a, b, tol) ** (1.0 / q)
    return _finish("bounded_ratio", hyps, lhs, rhs, T, tol, f=f, g=g,
                   p=p, q=q, m=m, M=M, bounds_estimated=estimated)


def check_power_bounded(f: ScaleFunction, g: ScaleFunction, pq: ExponentPair,
                        T: TimeScale, a: float, b: float,
                        bounds: BoundsPair | None = None,
                        tol: float = DEFAULT_TOL, grid_step: float | None = None
                        ) -> InequalityVerdict:
    """[int f^p]^{1/p} [int g^q]^{1/q} <= (M/m)^{1/pq} int f g when
    0 < m <= f^p/g^q <= M and p > 1."""
    _validate_interval(T, a, b)
    if pq.p <= 1.0:
        raise ValueError("this bound needs p > 1")
    pts = _grid(T, a, b, grid_step)
    hyps = [_positivity(f, pts, "f", tol), _positivity(g, pts, "g", tol)]
    if not all(h.satisfied for h in hyps):
        return _finish("power_bounded", hyps, None, None, T, tol,
                       f=f, g=g, p=pq.p, q=pq.q)
    p, q = pq.p, pq.q
    ratio_fn = (f ** p) / (g ** q)
    ratios = ratio_fn.evaluate_many(pts)
    m, M, rep, estimated = _bounds_report(list(ratios), pts, bounds, "f^p/g^q", tol)
    hyps.append(rep)
    if not rep.satisfied:
        return _finish("power_bounded", hyps, None, None, T, tol, f=f, g=g,
                       p=p, q=q, m=m, M=M, bounds_estimated=estimated)
    lhs = (M / m) ** (1.0 / (p * q)) * _integral(f * g, T, a, b, tol)
    rhs = _integral(f ** p, T, a, b, tol) ** (1.0 / p) * \
        _integral(g ** q, T, a, b, tol) ** (1.0 / q)
    return _finish("power_bounded", hyps, lhs, rhs, T, tol, f=f, g=g,
                   p=p, q=q, m=m, M=M, bounds_estimated=estimated)


# ---------------------------------------------------------------------------
# Theorem-level checks
# ---------------------------------------------------------------------------

def check_qi(f: ScaleFunction, p: float, T: TimeScale, a: float, b: float,
             tol: float = DEFAULT_TOL, grid_step: float | None = None
             ) -> InequalityVerdict:
    """Qi-type bound int f^p >= [int f]^{p-1}, gated on the hypothesis
    int f >= (b-a)^{p-1}; p > 1 or p < 0."""
    _validate_interval(T, a, b)
    if not (p > 1.0 or p < 0.0):
        raise ValueError(f"need p > 1 or p < 0, got p={p}")
    pts = _grid(T, a, b, grid_step)
    pos = _positivity(f, pts, "f", tol)
    if not pos.satisfied:
        return _finish("qi", [pos], None, None, T, tol, f=f, p=p)
    If = _integral(f, T, a, b, tol)
    gate = _hyp("int f >= (b-a)^(p-1)", If - (b - a) ** (p - 1.0), tol)
    hyps = [pos, gate]
    lhs = _integral(f ** p, T, a, b, tol)
    rhs = If ** (p - 1.0)
    return _finish("qi", hyps, lhs, rhs, T, tol, f=f, p=p)


def _akkouchi_hypotheses(f: ScaleFunction, p: float, T: TimeScale, a: float,
                         b: float, tol: float, grid_step: float | None):
    pts = _grid(T, a, b, grid_step)
    interior = [t for t in pts if a < t < b]
    hyps = [_positivity(f, pts, "f", tol)]
    sig_vals = [T.sigma(t) for t in pts]
    i = min(range(len(sig_vals)), key=sig_vals.__getitem__)
    hyps.append(_hyp("sigma positive on [a,b]", sig_vals[i], tol, pts[i]))
    hyps.append(_hyp("f(a) >= mu(a)", f.evaluate(a) - T.mu(a), tol, a))
    junctions = _sigma_junctions(T, a, b)
    if junctions:
        hyps.append(HypothesisReport("sigma delta-differentiable on (a,b)",
                                     False, -1.0, junctions[0]))
    else:
        hyps.append(HypothesisReport("sigma delta-differentiable on (a,b)",
                                     True, 0.0, None))
    try:
        slope_margin = math.inf
        witness = None
        for t in interior:
            fd = delta_derivative(f, T, t, tol).value
            margin = fd - 1.0 - _sigma_delta_fast(T, t)
            if margin < slope_margin:
                slope_margin, witness = margin, t
        if interior:
            hyps.append(_hyp("f^delta >= 1 + sigma^delta on (a,b)",
                             slope_margin, tol, witness))
    except NoConvergenceError:
        hyps.append(HypothesisReport("f delta-differentiable on (a,b)",
                                     False, -1.0, None))
    return hyps


def check_akkouchi_ts(f: ScaleFunction, p: float, T: TimeScale, a: float,
                      b: float, tol: float = DEFAULT_TOL,
                      grid_step: float | None = None) -> InequalityVerdict:
    """int f^{p+2} >= [int f]^{p+1} / (b-a)^{p-1} for p >= 1, gated on
    f, sigma positive, f(a) >= mu(a), and f^delta >= 1 + sigma^delta on (a,b)."""
    _validate_interval(T, a, b)
    if p < 1.0:
        raise ValueError(f"need p >= 1, got p={p}")
    hyps = _akkouchi_hypotheses(f, p, T, a, b, tol, grid_step)
    if not hyps[0].satisfied:  # f positive failed: powers may leave the reals
        return _finish("akkouchi", hyps, None, None, T, tol, f=f, p=p)
    lhs = _integral(f ** (p + 2.0), T, a, b, tol)
    rhs = _integral(f, T, a, b, tol) ** (p + 1.0) / (b - a) ** (p - 1.0)
    return _finish("akkouchi", hyps, lhs, rhs, T, tol, f=f, p=p)


def akkouchi_witness(f: ScaleFunction, p: float, T: TimeScale, a: float,
                     b: float, tol: float = DEFAULT_TOL,
                     grid_step: float | None = None) -> WitnessReport:
    """The proof mechanism behind the p >= 1 bound: the auxiliary
    F(x) = int_a^x f - (x-a)^2 vanishes at a, has F^delta(a) = f(a) - mu(a),
    F^deltadelta = f^delta - 1 - sigma^delta, and is non-decreasing when the
    hypotheses hold."""
    _validate_interval(T, a, b)
    checks = []
    cache: dict[float, float] = {}

    def F(x: float) -> float:
        if x not in cache:
            cache[x] = delta_integral(f, T, a, x, tol=tol * 1e-2).value - (x - a) ** 2
        return cache[x]

    fdelta = ScaleFunction.from_callable(
        lambda x: f.evaluate(x) - (x - a) - (T.sigma(x) - a),
        knots=f.knots, text="F^delta")
    checks.append(_hyp("F(a) = 0", -abs(F(a)), tol, a))
    checks.append(_hyp("F^delta(a) = f(a) - mu(a) >= 0",
                       f.evaluate(a) - T.mu(a), tol, a))
    pts = _grid(T, a, b, grid_step)
    interior = [t for t in pts if a < t < b]
    margin, witness = math.inf, None
    for t in interior:
        fd = delta_derivative(f, T, t, tol).value
        v = fd - 1.0 - _sigma_delta_fast(T, t)
        if v < margin:
            margin, witness = v, t
    if interior:
        checks.append(_hyp("F^deltadelta >= 0 on (a,b)", margin, tol, witness))
    mono = verify_nondecreasing(
        ScaleFunction.from_callable(F, knots=f.knots, text="F"),
        T, a, b, grid_step=grid_step, tol=max(tol, 1e-8), fdelta=fdelta)
    checks.append(HypothesisReport("F nondecreasing on [a,b]", bool(mono),
                                   mono.min_increment,
                                   mono.worst_increment_point))
    return WitnessReport("akkouchi_witness", checks, mono,
                         passed=all(c.satisfied for c in checks))


def check_pm_bound(f: ScaleFunction, pq: ExponentPair, T: TimeScale, a: float,
                   b: float, bounds: BoundsPair | None = None,
                   tol: float = DEFAULT_TOL, grid_step: float | None = None
                   ) -> InequalityVerdict:
    """[int f^p]^{1/p} <= (b-a)^{-(p+1)/q} (M/m)^{2/pq} [int f^{1/p}]^p when
    0 < m <= f^p <= M and p > 1."""
    _validate_interval(T, a, b)
    if pq.p <= 1.0:
        raise ValueError("this bound needs p > 1")
    pts = _grid(T, a, b, grid_step)
    hyps = [_positivity(f, pts, "f", tol)]
    if not hyps[0].satisfied:
        return _finish("pm_bound", hyps, None, None, T, tol, f=f, p=pq.p, q=pq.q)
    p, q = pq.p, pq.q
    powers = (f ** p).evaluate_many(pts)
    m, M, rep, estimated = _bounds_report(list(powers), pts, bounds, "f^p", tol)
    hyps.append(rep)
    if not rep.satisfied:
        return _finish("pm_bound", hyps, None, None, T, tol, f=f,
                       p=p, q=q, m=m, M=M, bounds_estimated=estimated)
    lhs = (b - a) ** (-(p + 1.0) / q) * (M / m) ** (2.0 / (p * q)) * \
        _integral(f ** (1.0 / p), T, a, b, tol) ** p
    rhs = _integral(f ** p, T, a, b, tol) ** (1.0 / p)
    return _finish("pm_bound", hyps, lhs, rhs, T, tol, f=f,
                   p=p, q=q, m=m, M=M, bounds_estimated=estimated)


def check_yin_qi_strict(f: ScaleFunction, p: float, T: TimeScale, a: float,
                        b: float, tol: float = DEFAULT_TOL,
                        grid_step: float | None = None) -> InequalityVerdict:
    """Strict bound [int f]^p > 2^{1-p} p int f^{2p-1} for p > 1, gated on
    f(a) = 0 and 0 < f^delta < 1 on (a,b)."""
    _validate_interval(T, a, b)
    if p <= 1.0:
        raise ValueError(f"need p > 1, got p={p}")
    pts = _grid(T, a, b, grid_step)
    interior = [t for t in pts if a < t < b]
    hyps = [_hyp("f(a) = 0", -abs(f.evaluate(a)), tol, a)]
    # With no scale point strictly inside [a, b] both sides degenerate to
    # zero (the integral sees only f(a) = 0): strictness is unattainable,
    # so such instances are out of the theorem's reach.
    hyps.append(HypothesisReport("(a,b) contains scale points", bool(interior),
                                 0.0 if interior else -1.0, None))
    try:
        margin, witness = math.inf, None
        for t in interior:
            fd = delta_derivative(f, T, t, tol).value
            v = min(fd, 1.0 - fd)
            if v < margin:
                margin, witness = v, t
        if interior:
            # strict clause: the margin is the sampled distance to the open
            # boundary minus a strictness pad, so f^delta = 1 exactly fails
            hyps.append(_hyp("0 < f^delta < 1 on (a,b)", margin - 2.0 * tol,
                             tol, witness))
    except NoConvergenceError:
        hyps.append(HypothesisReport("f delta-differentiable on (a,b)",
                                     False, -1.0, None))
    if not all(h.satisfied for h in hyps):
        return _finish("yin_qi", hyps, None, None, T, tol, f=f, p=p, strict=True)
    lhs = _integral(f, T, a, b, tol) ** p
    rhs = 2.0 ** (1.0 - p) * p * _integral(f ** (2.0 * p - 1.0), T, a, b, tol)
    return _finish("yin_qi", hyps, lhs, rhs, T, tol, f=f, p=p, strict=True)


def yin_qi_witness(f: ScaleFunction, T: TimeScale, a: float, b: float,
                   tol: float = DEFAULT_TOL, grid_step: float | None = None
                   ) -> WitnessReport:
    """The strict bound's mechanism: G(x) = int_a^x f - f(x)^2/2 vanishes at a,
    has G^delta = f - (f + f o sigma) f^delta / 2 > 0, and stays positive."""
    _validate_interval(T, a, b)
    checks = []
    cache: dict[float, float] = {}

    def G(x: float) -> float:
        if x not in cache:
            cache[x] = delta_integral(f, T, a, x, tol=tol * 1e-2).value \
                - 0.5 * f.evaluate(x) ** 2
        return cache[x]

    checks.append(_hyp("G(a) = 0", -abs(G(a)), tol, a))
    fs = compose_sigma(f, T)
    pts = _grid(T, a, b, grid_step)
    interior = [t for t in pts if a < t < b]
    margin, witness = math.inf, None
    for t in interior:
        fd = delta_derivative(f, T, t, tol).value
        gd = f.evaluate(t) - 0.5 * (f.evaluate(t) + fs.evaluate(t)) * fd
        if gd < margin:
            margin, witness = gd, t
    # strict clauses carry a strictness pad so that an exact zero fails
    if interior:
        checks.append(_hyp("G^delta > 0 on (a,b)", margin - 2.0 * tol, tol, witness))
    tail = [t for t in pts if t > a]
    gmin, gwit = math.inf, None
    for t in tail:
        v = G(t)
        if v < gmin:
            gmin, gwit = v, t
    if tail:
        checks.append(_hyp("G > 0 on (a,b]", gmin - 2.0 * tol, tol, gwit))
    return WitnessReport("yin_qi_witness", checks, None,
                         passed=all(c.satisfied for c in checks))


# ---------------------------------------------------------------------------
# Verdict assembly
# ---------------------------------------------------------------------------

def _finish(theorem: str, hyps: list[HypothesisReport], lhs: float | None,
            rhs: float | None, T: TimeScale, tol: float, *,
            f: ScaleFunction | None = None, g: ScaleFunction | None = None,
            p: float | None = None, q: float | None = None,
            m: float | None = None, M: float | None = None,
            bounds_estimated: bool = False, strict: bool = False
            ) -> InequalityVerdict:
    slack = None
    holds = None
    applicable = all(h.satisfied for h in hyps)
    if lhs is not None and rhs is not None:
        slack = lhs - rhs
        if applicable:
            scale = 1.0 + abs(lhs) + abs(rhs)
            holds = slack > tol * scale if strict else slack >= -tol * scale
    return InequalityVerdict(
        theorem=theorem, hypotheses=hyps, lhs=lhs, rhs=rhs, slack=slack,
        holds=holds, strict_required=strict, tol=tol, scale_digest=T.digest(),
        function_text=f.describe() if f is not None else None,
        g_text=g.describe() if g is not None else None,
        p=p, q=q, m=m, M=M, bounds_estimated=bounds_estimated)


def _with_extras(v: InequalityVerdict, extras: dict) -> InequalityVerdict:
    merged = dict(v.extras)
    merged.update(extras)
    return InequalityVerdict(
        theorem=v.theorem, hypotheses=v.hypotheses, lhs=v.lhs, rhs=v.rhs,
        slack=v.slack, holds=v.holds, strict_required=v.strict_required,
        tol=v.tol, scale_digest=v.scale_digest, function_text=v.function_text,
        g_text=v.g_text, p=v.p, q=v.q, m=v.m, M=v.M,
        bounds_estimated=v.bounds_estimated, extras=merged)
