"""Randomized scales, hypothesis-admissible functions, and campaigns.

Everything is deterministic in (seed, trial index): each trial derives its
own numpy Generator from that pair, so reports are reproducible and
independent of execution order.  Campaign trials that cannot satisfy a
theorem's hypotheses are skipped and counted, never reported as violations;
an apparent violation is retried at ten-times-tighter tolerance before it is
recorded, with a self-contained replay object.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .calculus import DEFAULT_TOL, default_grid, delta_integral
from .errors import ChronoscaleError
from .expr import Binary, Const, Unary, Var
from .functions import ScaleFunction
from .inequalities import (
    BoundsPair,
    ExponentPair,
    InequalityVerdict,
    THEOREM_IDS,
    _sigma_delta_fast,
    _sigma_junctions,
    check_akkouchi_ts,
    check_bounded_ratio,
    check_holder,
    check_pm_bound,
    check_power_bounded,
    check_qi,
    check_ratio_holder,
    check_yin_qi_strict,
)
from .scales import TimeScale, canonicalize, scale_from_obj

__all__ = ["GenConfig", "CampaignReport", "SkipTrial", "gen_scale",
           "gen_admissible", "run_check", "run_campaign",
           "serialize_instance", "replay_instance"]

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class GenConfig:
    """Knobs for the random generators; all draws derive from (seed, index)."""

    seed: int = 0
    n_segments: tuple[int, int] = (1, 5)
    dense_fraction: float = 0.45
    domain_span: float = 3.0
    function_family: str = "auto"  # polynomial | exp_mix | cumulative_construction | auto
    p_range: tuple[float, float] = (1.2, 4.0)

    def __post_init__(self):
        if self.n_segments[0] < 1 or self.n_segments[1] < self.n_segments[0]:
            raise ValueError(f"bad segment count range {self.n_segments}")
        if not 0.0 <= self.dense_fraction <= 1.0:
            raise ValueError("dense_fraction must be a probability")
        if self.domain_span <= 0:
            raise ValueError("domain_span must be positive")
        if self.p_range[1] < self.p_range[0]:
            raise ValueError(f"empty p_range {self.p_range}")

    def to_obj(self) -> dict:
        obj = asdict(self)
        obj["n_segments"] = list(self.n_segments)
        obj["p_range"] = list(self.p_range)
        return obj


class SkipTrial(ChronoscaleError):
    """An admissible instance cannot be constructed on this scale."""


def _rng(cfg: GenConfig, index: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed & _SEED_MASK, int(index), stream])


# ---------------------------------------------------------------------------
# Scale generation
# ---------------------------------------------------------------------------

def gen_scale(cfg: GenConfig, index: int) -> TimeScale:
    """A random bounded scale mixing dense segments with arithmetic and
    geometric clusters of isolated points; strictly positive so positivity
    hypotheses are satisfiable by construction."""
    rng = _rng(cfg, index, 0)
    n = int(rng.integers(cfg.n_segments[0], cfg.n_segments[1] + 1))
    unit = cfg.domain_span / n
    x = 0.5 + float(rng.uniform(0.0, 1.0))
    segs: list[tuple[float, float]] = []
    for _ in range(n):
        if rng.random() < cfg.dense_fraction:
            w = unit * float(rng.uniform(0.35, 0.9))
            segs.append((x, x + w))
            x += w
        elif rng.random() < 0.5:
            k = int(rng.integers(2, 8))
            step = unit * float(rng.uniform(0.06, 0.18))
            for j in range(k):
                segs.append((x + j * step, x + j * step))
            x += (k - 1) * step
        else:
            k = int(rng.integers(2, 7))
            ratio = float(rng.uniform(1.3, 1.9))
            gap = unit * float(rng.uniform(0.05, 0.12))
            segs.append((x, x))
            for _ in range(k - 1):
                x += gap
                segs.append((x, x))
                gap *= ratio
        x += unit * float(rng.uniform(0.15, 0.45))
    return canonicalize(segs)


# ---------------------------------------------------------------------------
# Admissible-function generation
# ---------------------------------------------------------------------------

def _positive_ast(rng: np.random.Generator, family: str):
    if family == "auto":
        family = "polynomial" if rng.random() < 0.5 else "exp_mix"
    xv = Var()
    if family == "polynomial":
        c0 = float(rng.uniform(0.3, 2.0))
        c1 = float(rng.uniform(0.0, 1.2))
        c2 = float(rng.uniform(0.0, 0.6))
        return Binary("+", Binary("+", Const(c0), Binary("*", Const(c1), xv)),
                      Binary("*", Const(c2), Binary("^", xv, Const(2.0))))
    if family == "exp_mix":
        amp = float(rng.uniform(0.3, 1.2))
        rate = float(rng.uniform(-0.6, 0.6))
        off = float(rng.uniform(0.1, 1.0))
        return Binary("+", Binary("*", Const(amp),
                                  Unary("exp", Binary("*", Const(rate), xv))),
                      Const(off))
    raise ValueError(f"unknown function family {family!r}")


def _positive_function(rng: np.random.Generator, family: str,
                       T: TimeScale) -> ScaleFunction:
    if family == "cumulative_construction":
        start = float(rng.uniform(0.3, 1.5))

        def slope(t0: float, r: np.random.Generator) -> float:
            return float(r.uniform(0.1, 1.2))

        return _cumulative_table(T, rng, start, slope)
    return ScaleFunction.from_expression(_positive_ast(rng, family))


def _draw_p(rng: np.random.Generator, cfg: GenConfig, low: float,
            allow_negative: bool = False) -> float:
    if allow_negative and rng.random() < 0.2:
        return -float(rng.uniform(0.5, 3.0))
    lo = max(cfg.p_range[0], low)
    hi = max(cfg.p_range[1], lo + 1e-9)
    return float(rng.uniform(lo, hi))


def _cumulative_table(T: TimeScale, rng: np.random.Generator, start: float,
                      slope_at) -> ScaleFunction:
    """Tabulation built by integrating a per-piece slope field left to right."""
    knots = default_grid(T, None, per_segment=48)
    vals = [start]
    for t0, t1 in zip(knots, knots[1:]):
        vals.append(vals[-1] + slope_at(t0, rng) * (t1 - t0))
    return ScaleFunction.from_table(knots, vals)


def gen_admissible(theorem_id: str, T: TimeScale, cfg: GenConfig,
                   index: int) -> tuple[ScaleFunction, dict]:
    """A function (plus parameters) satisfying the theorem's hypotheses by
    construction on T; raises SkipTrial when the scale itself rules the
    hypotheses out."""
    if theorem_id not in THEOREM_IDS:
        raise ValueError(f"unknown theorem id {theorem_id!r}")
    rng = _rng(cfg, index, 1)
    a, b = T.min, T.max
    fam = cfg.function_family

    if theorem_id == "holder":
        f = _positive_function(rng, fam, T)
        g = _positive_function(rng, fam, T)
        pq = ExponentPair.conjugate(_draw_p(rng, cfg, 1.1))
        return f, {"g": g, "pq": pq}

    if theorem_id == "ratio_holder":
        f = _positive_function(rng, fam, T)
        g = _positive_function(rng, fam, T)
        pq = ExponentPair.conjugate(_draw_p(rng, cfg, 1.1, allow_negative=True))
        return f, {"g": g, "pq": pq}

    if theorem_id in ("bounded_ratio", "power_bounded"):
        f = _positive_function(rng, fam, T)
        g = _positive_function(rng, fam, T)
        pq = ExponentPair.conjugate(_draw_p(rng, cfg, 1.1))
        return f, {"g": g, "pq": pq, "bounds": None}

    if theorem_id == "pm_bound":
        f = _positive_function(rng, fam, T)
        pq = ExponentPair.conjugate(_draw_p(rng, cfg, 1.1))
        return f, {"pq": pq, "bounds": None}

    if theorem_id == "qi":
        p = _draw_p(rng, cfg, 1.1, allow_negative=True)
        base = _positive_function(rng, fam, T)
        total = delta_integral(base, T, a, b, tol=1e-11).value
        slack_u = float(rng.uniform(0.02, 1.0))
        f = base.scaled((b - a) ** (p - 1.0) * (1.0 + slack_u) / total)
        return f, {"p": p}

    if theorem_id == "akkouchi":
        junctions = _sigma_junctions(T, a, b)
        if junctions:
            raise SkipTrial(
                f"sigma is not delta-differentiable at {junctions[0]} in (a,b)")
        p = float(rng.uniform(1.0, max(cfg.p_range[1], 1.0)))
        start = T.mu(a) + float(rng.uniform(0.05, 1.0))

        def slope(t0: float, r: np.random.Generator) -> float:
            base = _sigma_delta_fast(T, t0) if T.sigma(t0) > t0 else 1.0
            return 1.0 + base + float(r.uniform(0.0, 0.8))

        f = _cumulative_table(T, rng, start, slope)
        return f, {"p": p}

    if theorem_id == "yin_qi":
        if not any(a < t < b for t in default_grid(T)):
            raise SkipTrial("no scale point strictly inside (a,b); the strict "
                            "bound degenerates to 0 > 0")
        p = float(rng.uniform(max(cfg.p_range[0], 1.2), max(cfg.p_range[1], 1.3)))

        def slope(t0: float, r: np.random.Generator) -> float:
            return float(r.uniform(0.05, 0.95))

        f = _cumulative_table(T, rng, 0.0, slope)
        return f, {"p": p}

    raise ValueError(f"unhandled theorem id {theorem_id!r}")


# ---------------------------------------------------------------------------
# Check dispatch and instance replay
# ---------------------------------------------------------------------------

def run_check(theorem_id: str, T: TimeScale, a: float, b: float,
              f: ScaleFunction, params: dict, tol: float = DEFAULT_TOL,
              grid_step: float | None = None) -> InequalityVerdict:
    if theorem_id == "holder":
        return check_holder(f, params["g"], params["pq"], T, a, b, tol, grid_step)
    if theorem_id == "ratio_holder":
        return check_ratio_holder(f, params["g"], params["pq"], T, a, b, tol, grid_step)
    if theorem_id == "bounded_ratio":
        return check_bounded_ratio(f, params["g"], params["pq"], T, a, b,
                                   params.get("bounds"), tol, grid_step)
    if theorem_id == "power_bounded":
        return check_power_bounded(f, params["g"], params["pq"], T, a, b,
                                   params.get("bounds"), tol, grid_step)
    if theorem_id == "qi":
        return check_qi(f, params["p"], T, a, b, tol, grid_step)
    if theorem_id == "akkouchi":
        return check_akkouchi_ts(f, params["p"], T, a, b, tol, grid_step)
    if theorem_id == "pm_bound":
        return check_pm_bound(f, params["pq"], T, a, b, params.get("bounds"),
                              tol, grid_step)
    if theorem_id == "yin_qi":
        return check_yin_qi_strict(f, params["p"], T, a, b, tol, grid_step)
    raise ValueError(f"unknown theorem id {theorem_id!r}")


def _params_obj(params: dict) -> dict:
    obj: dict = {}
    if "pq" in params:
        obj["p"], obj["q"] = params["pq"].p, params["pq"].q
    if "p" in params:
        obj["p"] = params["p"]
    if params.get("g") is not None:
        obj["g"] = params["g"].to_json_obj()
    if params.get("bounds") is not None:
        obj["bounds"] = [params["bounds"].m, params["bounds"].M]
    return obj


def serialize_instance(theorem_id: str, T: TimeScale, a: float, b: float,
                       f: ScaleFunction, params: dict, seed: int,
                       index: int) -> dict:
    """A self-contained replay object for one checked instance."""
    return {"theorem": theorem_id, "scale": T.to_obj(), "a": a, "b": b,
            "f": f.to_json_obj(), "params": _params_obj(params),
            "seed": seed, "trial_index": index}


def replay_instance(obj: dict, tol: float = DEFAULT_TOL) -> InequalityVerdict:
    """Re-run the check encoded by a serialized instance."""
    T = scale_from_obj(obj["scale"])
    f = ScaleFunction.from_json_obj(obj["f"])
    raw = obj.get("params", {})
    params: dict = {}
    theorem = obj["theorem"]
    if theorem in ("holder", "ratio_holder", "bounded_ratio", "power_bounded",
                   "pm_bound"):
        params["pq"] = ExponentPair(raw["p"], raw["q"])
    else:
        params["p"] = raw["p"]
    if "g" in raw:
        params["g"] = ScaleFunction.from_json_obj(raw["g"])
    if "bounds" in raw:
        params["bounds"] = BoundsPair(*raw["bounds"])
    return run_check(theorem, T, obj["a"], obj["b"], f, params, tol)


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------

@dataclass
class CampaignReport:
    theorem_id: str
    trials: int
    applicable: int
    holds: int
    violations: int
    hypothesis_failures: int
    errors: int
    recovered_by_recheck: int
    min_slack: float | None
    min_slack_instance: dict | None
    violation_instances: list[dict] = field(default_factory=list)
    error_messages: list[dict] = field(default_factory=list)
    seed: int = 0
    config: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "trials": self.trials,
            "applicable": self.applicable,
            "holds": self.holds,
            "violations": self.violations,
            "hypothesis_failures": self.hypothesis_failures,
            "errors": self.errors,
            "recovered_by_recheck": self.recovered_by_recheck,
            "min_slack": self.min_slack,
            "min_slack_instance": self.min_slack_instance,
            "violation_instances": self.violation_instances,
            "error_messages": self.error_messages,
            "seed": self.seed,
            "config": self.config,
        }


def run_campaign(theorem_id: str, cfg: GenConfig, trials: int,
                 tol: float = DEFAULT_TOL) -> CampaignReport:
    """Run (gen_scale, gen_admissible, check) trials and tally the verdicts.

    Per-trial failures are recorded, not raised.  A trial whose verdict fails
    is re-checked at 10x tighter tolerance before being recorded as a
    violation, to separate quadrature noise from substance.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    applicable = holds = violations = hyp_failures = errors = recovered = 0
    min_slack = None
    min_slack_instance = None
    violation_instances: list[dict] = []
    error_messages: list[dict] = []
    for i in range(trials):
        T = gen_scale(cfg, i)
        a, b = T.min, T.max
        try:
            f, params = gen_admissible(theorem_id, T, cfg, i)
        except SkipTrial:
            hyp_failures += 1
            continue
        try:
            verdict = run_check(theorem_id, T, a, b, f, params, tol)
        except ChronoscaleError as exc:
            errors += 1
            error_messages.append({"trial": i, "error": str(exc)})
            continue
        if not verdict.applicable:
            hyp_failures += 1
            continue
        applicable += 1
        ok = bool(verdict.holds)
        slack = verdict.slack
        if not ok:
            try:
                retry = run_check(theorem_id, T, a, b, f, params, tol * 0.1)
                if retry.applicable and retry.holds:
                    ok = True
                    recovered += 1
                    slack = retry.slack
            except ChronoscaleError:
                pass
        if ok:
            holds += 1
        else:
            violations += 1
            violation_instances.append(
                serialize_instance(theorem_id, T, a, b, f, params, cfg.seed, i))
        if slack is not None and (min_slack is None or slack < min_slack):
            min_slack = slack
            min_slack_instance = serialize_instance(theorem_id, T, a, b, f,
                                                    params, cfg.seed, i)
    return CampaignReport(
        theorem_id=theorem_id, trials=trials, applicable=applicable,
        holds=holds, violations=violations, hypothesis_failures=hyp_failures,
        errors=errors, recovered_by_recheck=recovered, min_slack=min_slack,
        min_slack_instance=min_slack_instance,
        violation_instances=violation_instances, error_messages=error_messages,
        seed=cfg.seed, config=cfg.to_obj())
