"""Command-line front end.

Subcommands: ``eval`` (derivatives/integrals/chain rule at a point or over an
interval), ``check`` (one inequality, one instance), ``falsify`` (randomized
campaign), ``identities`` (residual sweeps of the structural identities).
Reports are JSON (default) or CSV, on stdout or ``--out``.

Exit codes: 0 holds/completed, 1 usage or input error, 2 hypotheses failed
(not applicable), 3 violation found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__
from .calculus import (
    chain_rule_derivative,
    default_grid,
    delta_derivative,
    delta_integral,
    fundamental_theorem_check,
    parts_check,
    product_quotient_check,
    second_delta_derivative,
    sigma_delta,
    substitution_check,
)
from .errors import ChronoscaleError, ScaleSpecError
from .expr import diff, parse as parse_expr
from .functions import ScaleFunction
from .inequalities import (
    BoundsPair,
    ExponentPair,
    THEOREM_IDS,
    akkouchi_witness,
    yin_qi_witness,
)
from .scales import (
    TimeScale,
    canonicalize,
    geometric,
    interval,
    lattice,
    load_scale_file,
)
from .search import GenConfig, run_campaign, run_check

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_APPLICABLE = 2
EXIT_VIOLATION = 3

ENV_SEED = "CHRONOSCALE_SEED"


def parse_scale_arg(text: str) -> TimeScale:
    """Shorthand scales: interval:a..b, lattice:a..b:step, geometric:q:min..max,
    file:<path>."""
    if text.startswith("file:"):
        return load_scale_file(text[5:])
    kind, sep, rest = text.partition(":")
    if not sep:
        raise ScaleSpecError(f"unrecognized scale shorthand {text!r}")
    try:
        if kind == "interval":
            a, b = rest.split("..")
            return interval(float(a), float(b))
        if kind == "lattice":
            span, _, step = rest.rpartition(":")
            a, b = span.split("..")
            return lattice(float(a), float(b), float(step))
        if kind == "geometric":
            q, _, span = rest.partition(":")
            lo, hi = span.split("..")
            return geometric(float(q), float(lo), float(hi))
    except (ValueError, TypeError) as exc:
        raise ScaleSpecError(f"could not parse scale shorthand {text!r}: {exc}") from exc
    raise ScaleSpecError(f"unknown scale kind {kind!r} in {text!r}")


def _combined_scale(specs: list[str]) -> TimeScale:
    if not specs:
        raise ScaleSpecError("at least one --scale is required")
    segs = []
    for spec in specs:
        segs.extend(parse_scale_arg(spec).segments)
    return canonicalize(segs)


@dataclass
class RunSpec:
    """A resolved invocation: everything run() needs, already validated."""

    command: str
    scale: TimeScale | None = None
    theorem: str | None = None
    op: str | None = None
    f_text: str | None = None
    g_text: str | None = None
    fprime_text: str | None = None
    v_text: str | None = None
    a: float | None = None
    b: float | None = None
    t: float | None = None
    p: float | None = None
    q: float | None = None
    m: float | None = None
    M: float | None = None
    tol: float = 1e-9
    grid_step: float | None = None
    seed: int = 0
    trials: int = 500
    witness: bool = False
    config: GenConfig | None = None
    out: str | None = None
    format: str = "json"
    extra: dict = field(default_factory=dict)


def _require(cond: bool, message: str):
    if not cond:
        raise ChronoscaleError(message)


def _function(text: str | None, what: str) -> ScaleFunction:
    _require(text is not None, f"--{what} is required for this operation")
    return ScaleFunction.from_expression(text)


def _interval_defaults(spec: RunSpec) -> tuple[float, float]:
    T = spec.scale
    a = spec.a if spec.a is not None else T.min
    b = spec.b if spec.b is not None else T.max
    return a, b


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------

def _run_eval(spec: RunSpec) -> tuple[int, dict]:
    T = spec.scale
    op = spec.op or "integral"
    if op == "integral":
        a, b = _interval_defaults(spec)
        f = _function(spec.f_text, "f")
        r = delta_integral(f, T, a, b, tol=spec.tol)
        return EXIT_OK, {"op": op, "a": a, "b": b, "value": r.value,
                         "discrete_part": r.discrete_part,
                         "continuous_part": r.continuous_part,
                         "err_estimate": r.err_estimate}
    _require(spec.t is not None, "--t is required for pointwise operations")
    if op == "derivative":
        f = _function(spec.f_text, "f")
        r = delta_derivative(f, T, spec.t, tol=spec.tol)
    elif op == "second-derivative":
        f = _function(spec.f_text, "f")
        r = second_delta_derivative(f, T, spec.t, tol=spec.tol)
    elif op == "sigma-delta":
        r = sigma_delta(T, spec.t, tol=spec.tol)
    elif op == "chain-rule":
        g = _function(spec.g_text, "g")
        if spec.fprime_text is not None:
            fprime = ScaleFunction.from_expression(spec.fprime_text)
        else:
            outer = parse_expr(_function(spec.f_text, "f").text)
            fprime = ScaleFunction.from_expression(diff(outer))
        r = chain_rule_derivative(fprime, g, T, spec.t, tol=spec.tol)
    else:
        raise ChronoscaleError(f"unknown eval op {op!r}")
    return EXIT_OK, {"op": op, "t": spec.t, "value": r.value,
                     "method": r.method, "err_estimate": r.err_estimate}


def _run_check(spec: RunSpec) -> tuple[int, dict]:
    T = spec.scale
    a, b = _interval_defaults(spec)
    _require(spec.theorem in THEOREM_IDS,
             f"--theorem must be one of {', '.join(THEOREM_IDS)}")
    _require(spec.p is not None, "--p is required")
    f = _function(spec.f_text, "f")
    params: dict = {}
    if spec.theorem in ("holder", "ratio_holder", "bounded_ratio",
                        "power_bounded", "pm_bound"):
        pq = ExponentPair(spec.p, spec.q) if spec.q is not None \
            else ExponentPair.conjugate(spec.p)
        params["pq"] = pq
    else:
        params["p"] = spec.p
    if spec.theorem in ("holder", "ratio_holder", "bounded_ratio", "power_bounded"):
        params["g"] = _function(spec.g_text, "g")
    if spec.theorem in ("bounded_ratio", "power_bounded", "pm_bound"):
        if spec.m is not None or spec.M is not None:
            _require(spec.m is not None and spec.M is not None,
                     "--m and --M must be given together")
            params["bounds"] = BoundsPair(spec.m, spec.M)
        else:
            params["bounds"] = None
    verdict = run_check(spec.theorem, T, a, b, f, params,
                        tol=spec.tol, grid_step=spec.grid_step)
    result = verdict.to_obj()
    result["a"], result["b"] = a, b
    if spec.witness:
        if spec.theorem == "akkouchi":
            result["witness"] = akkouchi_witness(f, spec.p, T, a, b, spec.tol,
                                                 spec.grid_step).to_obj()
        elif spec.theorem == "yin_qi":
            result["witness"] = yin_qi_witness(f, T, a, b, spec.tol,
                                               spec.grid_step).to_obj()
    if not verdict.applicable:
        return EXIT_NOT_APPLICABLE, result
    return (EXIT_OK if verdict.holds else EXIT_VIOLATION), result


def _run_falsify(spec: RunSpec) -> tuple[int, dict]:
    _require(spec.theorem in THEOREM_IDS,
             f"--theorem must be one of {', '.join(THEOREM_IDS)}")
    cfg = spec.config or GenConfig(seed=spec.seed)
    report = run_campaign(spec.theorem, cfg, spec.trials, tol=spec.tol)
    code = EXIT_VIOLATION if report.violations else EXIT_OK
    return code, report.to_obj()


def _run_identities(spec: RunSpec) -> tuple[int, dict]:
    T = spec.scale
    a, b = _interval_defaults(spec)
    f = _function(spec.f_text, "f")
    which = spec.op or "all"
    rows = []

    def row(identity, residual_report, samples):
        bound = 10.0 * spec.tol * residual_report.scale
        rows.append({"identity": identity, "residual": residual_report.residual,
                     "bound": bound, "samples": samples,
                     "ok": residual_report.residual <= bound})

    pts = [t for t in default_grid(T.restrict(a, b), spec.grid_step)
           if not (t == T.max and T.rho(t) < t)]
    if which in ("all", "ftc"):
        row("ftc", fundamental_theorem_check(f, T, a, b, spec.tol), 1)
    if which in ("all", "parts") and spec.g_text is not None:
        g = _function(spec.g_text, "g")
        row("parts", parts_check(f, g, T, a, b, spec.tol), 1)
    if which in ("all", "product", "quotient") and spec.g_text is not None:
        g = _function(spec.g_text, "g")
        worst_p = worst_q = None
        for t in pts:
            rp, rq = product_quotient_check(f, g, T, t, spec.tol)
            if worst_p is None or rp.residual / rp.scale > worst_p.residual / worst_p.scale:
                worst_p = rp
            if worst_q is None or rq.residual / rq.scale > worst_q.residual / worst_q.scale:
                worst_q = rq
        if worst_p is not None and which in ("all", "product"):
            row("product", worst_p, len(pts))
        if worst_q is not None and which in ("all", "quotient"):
            row("quotient", worst_q, len(pts))
    if which in ("all", "substitution") and spec.v_text is not None:
        v = _function(spec.v_text, "v")
        worst = None
        for t in pts:
            r = substitution_check(v, f, T, t, spec.tol)
            if worst is None or r.residual / r.scale > worst.residual / worst.scale:
                worst = r
        if worst is not None:
            row("substitution", worst, len(pts))
    _require(bool(rows), "nothing to sweep: supply --g and/or --v, or pick an --op")
    ok = all(r["ok"] for r in rows)
    return (EXIT_OK if ok else EXIT_VIOLATION), {"a": a, "b": b, "tol": spec.tol,
                                                 "identities": rows, "ok": ok}


def run(spec: RunSpec) -> tuple[int, dict]:
    """Dispatch a RunSpec; returns (exit_code, result object)."""
    if spec.command == "eval":
        return _run_eval(spec)
    if spec.command == "check":
        return _run_check(spec)
    if spec.command == "falsify":
        return _run_falsify(spec)
    if spec.command == "identities":
        return _run_identities(spec)
    raise ChronoscaleError(f"unknown command {spec.command!r}")


# ---------------------------------------------------------------------------
# Argument parsing and report writing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chronoscale",
        description="Numerical delta calculus and inequality verification on time scales")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scale=True):
        if scale:
            p.add_argument("--scale", action="append", default=[],
                           help="interval:a..b | lattice:a..b:step | "
                                "geometric:q:min..max | file:path (repeatable; union)")
        p.add_argument("--f", dest="f_text", help="expression in x")
        p.add_argument("--g", dest="g_text", help="second expression in x")
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--grid-step", type=float, default=None)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    pe = sub.add_parser("eval", help="evaluate a derivative/integral/chain rule")
    common(pe)
    pe.add_argument("--op", choices=("derivative", "second-derivative",
                                     "sigma-delta", "integral", "chain-rule"),
                    default="integral")
    pe.add_argument("--t", type=float, help="evaluation point")
    pe.add_argument("--fprime", dest="fprime_text",
                    help="classical derivative of the outer map (chain rule); "
                         "derived symbolically from --f when omitted")

    pc = sub.add_parser("check", help="check one inequality instance")
    common(pc)
    pc.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    pc.add_argument("--p", type=float, required=True)
    pc.add_argument("--q", type=float)
    pc.add_argument("--m", type=float, help="lower ratio bound")
    pc.add_argument("--M", type=float, help="upper ratio bound")
    pc.add_argument("--witness", action="store_true",
                    help="include the proof-witness diagnostic")

    pf = sub.add_parser("falsify", help="randomized falsification campaign")
    common(pf, scale=False)
    pf.add_argument("--theorem", required=True, choices=THEOREM_IDS)
    pf.add_argument("--trials", type=int, default=500)
    pf.add_argument("--seed", type=int, default=None,
                    help=f"defaults to ${ENV_SEED} or 0")
    pf.add_argument("--n-segments", default=None, metavar="LO:HI")
    pf.add_argument("--dense-fraction", type=float, default=None)
    pf.add_argument("--domain-span", type=float, default=None)
    pf.add_argument("--family", default=None,
                    choices=("auto", "polynomial", "exp_mix",
                             "cumulative_construction"))
    pf.add_argument("--p-range", default=None, metavar="LO:HI")

    pi = sub.add_parser("identities", help="residual sweeps of the calculus identities")
    common(pi)
    pi.add_argument("--op", choices=("all", "ftc", "parts", "product",
                                     "quotient", "substitution"), default="all")
    pi.add_argument("--v", dest="v_text",
                    help="strictly increasing substitution map (expression in x)")
    return ap


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ChronoscaleError(f"${ENV_SEED} is not an integer: {env!r}") from exc
    return 0


def _parse_pair(text: str, caster, flag: str) -> tuple:
    try:
        lo, hi = text.split(":")
        return caster(lo), caster(hi)
    except ValueError as exc:
        raise ChronoscaleError(f"{flag} expects LO:HI, got {text!r}") from exc


def build_runspec(args: argparse.Namespace) -> RunSpec:
    spec = RunSpec(command=args.command)
    for name in ("f_text", "g_text", "a", "b", "tol", "grid_step", "out"):
        if hasattr(args, name):
            setattr(spec, name, getattr(args, name))
    spec.format = getattr(args, "format", "json")
    if getattr(args, "scale", None):
        spec.scale = _combined_scale(args.scale)
    elif hasattr(args, "scale") and args.command != "falsify":
        raise ChronoscaleError("at least one --scale is required")
    for name in ("theorem", "op", "t", "p", "q", "m", "M", "witness",
                 "fprime_text", "v_text", "trials"):
        if hasattr(args, name):
            setattr(spec, name, getattr(args, name))
    if args.command == "falsify":
        spec.seed = _resolve_seed(args.seed)
        kwargs: dict = {"seed": spec.seed}
        if args.n_segments is not None:
            kwargs["n_segments"] = _parse_pair(args.n_segments, int, "--n-segments")
        if args.dense_fraction is not None:
            kwargs["dense_fraction"] = args.dense_fraction
        if args.domain_span is not None:
            kwargs["domain_span"] = args.domain_span
        if args.family is not None:
            kwargs["function_family"] = args.family
        if args.p_range is not None:
            kwargs["p_range"] = _parse_pair(args.p_range, float, "--p-range")
        spec.config = GenConfig(**kwargs)
    return spec


def _clean(value):
    """Drop non-finite floats (JSON has no spelling for them)."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _flatten(obj: dict, prefix: str = "", out: dict | None = None) -> dict:
    if out is None:
        out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            _flatten(v, key + ".", out)
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(v)
        else:
            out[key] = v
    return out


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    result = report.get("result", {})
    rows = result.get("identities") if isinstance(result, dict) else None
    if not isinstance(rows, list):
        rows = [result if isinstance(result, dict) else {"value": result}]
    flat_rows = [_flatten(_clean(r)) for r in rows]
    cols = sorted({k for r in flat_rows for k in r})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols)
    writer.writeheader()
    for r in flat_rows:
        writer.writerow(r)
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        spec = build_runspec(args)
        code, result = run(spec)
    except (ChronoscaleError, ValueError, OSError) as exc:
        print(f"chronoscale: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "tool_version": __version__,
        "seed": getattr(spec, "seed", None) if args.command == "falsify" else None,
        "argv": argv,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "exit_code": code,
        "result": result,
    }
    text = render_report(report, spec.format)
    if spec.out:
        with open(spec.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
