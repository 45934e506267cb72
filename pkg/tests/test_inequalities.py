"""Inequality verdicts: worked instances frozen from exact finite-sum oracles,
hypothesis gating, equality detection, and witness diagnostics."""

import math

import pytest

from chronoscale import (
    BoundsPair,
    ExponentPair,
    ScaleFunction,
    akkouchi_witness,
    canonicalize,
    check_akkouchi_ts,
    check_bounded_ratio,
    check_holder,
    check_pm_bound,
    check_power_bounded,
    check_qi,
    check_ratio_holder,
    check_yin_qi_strict,
    interval,
    lattice,
    yin_qi_witness,
)
from conftest import lattice_integral_oracle, random_positive_function

E = ScaleFunction.from_expression
PQ2 = ExponentPair.conjugate(2.0)


class TestExponentPair:
    def test_conjugate(self):
        assert ExponentPair.conjugate(2.0) == ExponentPair(2.0, 2.0)
        pq = ExponentPair.conjugate(3.0)
        assert pq.q == pytest.approx(1.5)

    def test_negative_branch(self):
        pq = ExponentPair.conjugate(-2.0)
        assert 0 < pq.q < 1
        assert 1 / pq.p + 1 / pq.q == pytest.approx(1.0)

    def test_rejects_inadmissible(self):
        with pytest.raises(ValueError):
            ExponentPair(0.5, -1.0)
        with pytest.raises(ValueError):
            ExponentPair(2.0, 3.0)
        with pytest.raises(ValueError):
            ExponentPair.conjugate(1.0)

    def test_bounds_pair(self):
        with pytest.raises(ValueError):
            BoundsPair(2.0, 1.0)
        with pytest.raises(ValueError):
            BoundsPair(0.0, 1.0)


class TestHolder:
    def test_equality_on_constants(self):
        v = check_holder(E("1"), E("1"), PQ2, interval(0, 1), 0, 1)
        assert v.lhs == pytest.approx(1.0, abs=1e-10)
        assert v.rhs == pytest.approx(1.0, abs=1e-10)
        assert v.holds

    def test_proportional_near_equality(self):
        # |f|^p = c |g|^q with p = q = 2: f = sqrt(2) g
        g = E("x+0.5")
        f = E("1.4142135623730951*(x+0.5)")
        v = check_holder(f, g, PQ2, interval(0, 1), 0, 1)
        assert abs(v.slack) <= v.tol * (1 + abs(v.lhs) + abs(v.rhs))

    def test_lattice_worked_instance(self):
        # oracle: lhs = sqrt(1+4+9)*sqrt(3), rhs = 1+2+3
        T = lattice(0, 3, 1)
        v = check_holder(E("x+1"), E("1"), PQ2, T, 0, 3)
        assert v.lhs == pytest.approx(math.sqrt(14) * math.sqrt(3), rel=1e-12)
        assert v.rhs == pytest.approx(6.0, rel=1e-12)
        assert v.slack == pytest.approx(math.sqrt(42) - 6, rel=1e-10)

    def test_positive_slack_scaling_invariance(self, rng):
        T = canonicalize([(0.5, 1.5), (2, 2), (2.5, 3)])
        for _ in range(10):
            f = random_positive_function(rng)
            g = random_positive_function(rng)
            c = float(rng.uniform(0.1, 10.0))
            v1 = check_holder(f, g, PQ2, T, T.min, T.max)
            cf = ScaleFunction.from_expression(f"{c}*({f.text})")
            v2 = check_holder(cf, g, PQ2, T, T.min, T.max)
            assert v2.slack / c == pytest.approx(v1.slack, rel=1e-6, abs=1e-9)

    def test_requires_p_above_one(self):
        with pytest.raises(ValueError):
            check_holder(E("1"), E("1"), ExponentPair.conjugate(-2.0),
                         interval(0, 1), 0, 1)


class TestRatioHolder:
    def test_lattice_worked_instance(self):
        T = lattice(0, 2, 1)
        v = check_ratio_holder(E("x+1"), E("1"), PQ2, T, 0, 2)
        assert v.lhs == pytest.approx(5.0, rel=1e-12)
        assert v.rhs == pytest.approx(4.5, rel=1e-12)
        assert v.holds

    def test_equality_iff_proportional(self):
        v = check_ratio_holder(E("3*(x+1)"), E("x+1"), PQ2, interval(0, 1), 0, 1)
        assert abs(v.slack) <= v.tol * (1 + abs(v.lhs) + abs(v.rhs))
        assert v.extras["near_equality"] is True
        assert v.extras["proportional"] is True

    def test_equality_randomized(self, rng):
        from chronoscale.search import GenConfig, gen_scale

        cfg = GenConfig(seed=17)
        for i in range(12):
            T = gen_scale(cfg, i)
            g = random_positive_function(rng)
            aconst = float(rng.uniform(0.2, 5.0))
            f = ScaleFunction.from_expression(f"{aconst}*({g.text})")
            p = float(rng.uniform(1.3, 3.5))
            v = check_ratio_holder(f, g, ExponentPair.conjugate(p), T, T.min, T.max)
            assert abs(v.slack) <= v.tol * (1 + abs(v.lhs) + abs(v.rhs))

    def test_negative_p_branch(self):
        T = lattice(0, 2, 1)
        v = check_ratio_holder(E("x+1"), E("2"), ExponentPair.conjugate(-2.0), T, 0, 2)
        assert v.applicable
        assert v.holds

    def test_g_equal_one_specialization(self):
        # reduces to int f^p >= [int f]^p / (b-a)^(p/q)
        T = lattice(0, 2, 1)
        v = check_ratio_holder(E("x+1"), E("1"), PQ2, T, 0, 2)
        If = lattice_integral_oracle([0, 1, 2], lambda t: t + 1, 0, 2)
        assert v.rhs == pytest.approx(If ** 2 / 2.0, rel=1e-12)

    def test_gate_on_nonpositive(self):
        v = check_ratio_holder(E("x-10"), E("1"), PQ2, interval(0, 1), 0, 1)
        assert not v.applicable
        assert v.holds is None
        assert v.lhs is None


class TestBoundedRatio:
    def test_equal_functions_equality(self):
        v = check_bounded_ratio(E("x+1"), E("x+1"), PQ2, interval(0, 1), 0, 1,
                                bounds=BoundsPair(1, 1))
        assert v.slack == pytest.approx(0.0, abs=1e-9)
        assert v.holds

    def test_lattice_worked_instance(self):
        # [a,b) oracle on {0,1}: all integrals see only t=0
        v = check_bounded_ratio(E("x+1"), E("1"), PQ2, lattice(0, 1, 1), 0, 1,
                                bounds=BoundsPair(1, 2))
        assert v.lhs == pytest.approx(2 ** 0.25, rel=1e-12)
        assert v.rhs == pytest.approx(1.0, rel=1e-12)
        assert v.slack == pytest.approx(2 ** 0.25 - 1, rel=1e-10)

    def test_estimated_bounds_flagged(self):
        v = check_bounded_ratio(E("x+1"), E("1"), PQ2, interval(0, 1), 0, 1)
        assert v.bounds_estimated
        assert v.m is not None and v.M is not None
        assert any("estimated" in h.name for h in v.hypotheses)
        assert v.holds

    def test_bounds_violation_gates(self):
        v = check_bounded_ratio(E("x+1"), E("1"), PQ2, interval(0, 1), 0, 1,
                                bounds=BoundsPair(1.0, 1.5))
        assert not v.applicable
        assert v.holds is None


class TestPowerBounded:
    def test_constants_equality(self):
        v = check_power_bounded(E("1"), E("1"), PQ2, interval(0, 1), 0, 1,
                                bounds=BoundsPair(1, 1))
        assert v.slack == pytest.approx(0.0, abs=1e-9)

    def test_lattice_worked_instance(self):
        v = check_power_bounded(E("x+1"), E("1"), PQ2, lattice(0, 1, 1), 0, 1,
                                bounds=BoundsPair(1, 4))
        assert v.lhs == pytest.approx(math.sqrt(2), rel=1e-12)
        assert v.rhs == pytest.approx(1.0, rel=1e-12)
        assert v.slack == pytest.approx(math.sqrt(2) - 1, rel=1e-10)

    def test_dense_reduction_holds(self):
        v = check_power_bounded(E("x+1"), E("2+sin(x)"), PQ2, interval(0, 1), 0, 1)
        assert v.holds


class TestQi:
    def test_unit_equality(self):
        v = check_qi(E("1"), 2.0, interval(0, 1), 0, 1)
        assert v.lhs == pytest.approx(1.0, abs=1e-9)
        assert v.rhs == pytest.approx(1.0, abs=1e-9)
        gate = [h for h in v.hypotheses if "int f" in h.name][0]
        assert gate.margin == pytest.approx(0.0, abs=1e-9)
        assert v.holds

    def test_lattice_worked_instance(self):
        v = check_qi(E("2*x+1"), 2.0, lattice(0, 3, 1), 0, 3)
        assert v.lhs == pytest.approx(35.0, rel=1e-12)
        assert v.rhs == pytest.approx(9.0, rel=1e-12)
        assert v.slack == pytest.approx(26.0, rel=1e-12)

    def test_gate_fires_without_mass(self):
        v = check_qi(E("0.01"), 3.0, interval(0, 2), 0, 2)
        assert not v.applicable
        assert v.holds is None
        assert v.slack is not None  # sides still reported for diagnosis

    def test_negative_p(self):
        T = interval(1, 2)
        v = check_qi(E("2+x"), -2.0, T, 1, 2)
        assert v.applicable
        assert v.holds

    def test_p_validation(self):
        with pytest.raises(ValueError):
            check_qi(E("1"), 0.5, interval(0, 1), 0, 1)


class TestAkkouchi:
    def test_worked_instance(self):
        v = check_akkouchi_ts(E("2*x+1"), 1.0, lattice(0, 3, 1), 0, 3)
        assert v.lhs == pytest.approx(153.0, rel=1e-12)
        assert v.rhs == pytest.approx(81.0, rel=1e-12)
        assert v.holds
        assert all(h.margin >= 0 for h in v.hypotheses)

    def test_dense_reduction(self):
        # f' = 2 >= 1 + sigma' = 2 and f(a) = 1 > mu(a) = 0 on the continuum
        v = check_akkouchi_ts(E("2*x+1"), 2.0, interval(0, 1), 0, 1)
        assert v.applicable
        assert v.holds

    def test_hypothesis_gate_fires(self):
        v = check_akkouchi_ts(E("0.0001*x"), 1.0, lattice(0, 3, 1), 0, 3)
        assert not v.applicable
        assert v.holds is None

    def test_junction_reported(self):
        T = canonicalize([(0, 1), (2, 3)])
        v = check_akkouchi_ts(E("3*x+2"), 1.0, T, 0, 3)
        rep = [h for h in v.hypotheses if "delta-differentiable" in h.name][0]
        assert not rep.satisfied
        assert rep.witness_point == 1.0
        assert v.holds is None

    def test_witness_mechanism(self):
        w = akkouchi_witness(E("2*x+1"), 1.0, lattice(0, 3, 1), 0, 3)
        assert w.passed
        names = [c.name for c in w.checks]
        assert any("F(a)" in n for n in names)
        assert any("nondecreasing" in n for n in names)

    def test_witness_flags_bad_instance(self):
        # f = 0 violates f(a) >= mu(a) on a lattice: F^delta(a) < 0
        w = akkouchi_witness(E("0"), 1.0, lattice(0, 3, 1), 0, 3)
        fa = [c for c in w.checks if "F^delta(a)" in c.name][0]
        assert fa.margin < 0
        assert not w.passed

    def test_witness_boundary_margins(self):
        # dense scale, f = 2(x-a) with f(a) = 0 = mu(a): every margin sits at 0
        w = akkouchi_witness(E("2*x"), 2.0, interval(0, 1), 0, 1)
        fa = [c for c in w.checks if "F^delta(a)" in c.name][0]
        assert fa.margin == pytest.approx(0.0, abs=1e-9)
        fdd = [c for c in w.checks if "F^deltadelta" in c.name][0]
        assert fdd.margin == pytest.approx(0.0, abs=1e-7)
        assert w.passed


class TestPmBound:
    def test_constant_equality(self):
        v = check_pm_bound(E("1"), PQ2, interval(0, 1), 0, 1, bounds=BoundsPair(1, 1))
        assert v.lhs == pytest.approx(1.0, abs=1e-9)
        assert v.rhs == pytest.approx(1.0, abs=1e-9)

    def test_lattice_worked_instance(self):
        v = check_pm_bound(E("x+1"), PQ2, lattice(0, 1, 1), 0, 1, bounds=BoundsPair(1, 4))
        assert v.lhs == pytest.approx(2.0, rel=1e-12)
        assert v.rhs == pytest.approx(1.0, rel=1e-12)
        assert v.slack == pytest.approx(1.0, rel=1e-12)

    def test_intermediate_inequalities(self):
        """The two g = 1 specializations that chain into the bound."""
        T = canonicalize([(0.5, 1.0), (1.5, 1.5), (2.0, 2.5)])
        a, b = T.min, T.max
        f = E("x+0.5")
        p = 2.0
        pts = [t for t in T.scale_points(0.01)]
        fp = [f.evaluate(t) ** p for t in pts]
        m, M = min(fp), max(fp)
        one = E("1")
        # power-bounded route with g = 1: bounds on f^p / 1
        v1 = check_power_bounded(f, one, PQ2, T, a, b, bounds=BoundsPair(m, M))
        assert v1.holds
        # bounded-ratio route with g = 1 applied to f: bounds on f/1 = (f^p)^(1/p)
        v2 = check_bounded_ratio(f, one, PQ2, T, a, b,
                                 bounds=BoundsPair(m ** (1 / p), M ** (1 / p)))
        assert v2.holds

    def test_supplied_bounds_violated(self):
        v = check_pm_bound(E("x+1"), PQ2, interval(0, 1), 0, 1, bounds=BoundsPair(1, 2))
        assert not v.applicable


class TestYinQi:
    def test_closed_form_instance(self):
        v = check_yin_qi_strict(E("x/2"), 2.0, interval(0, 1), 0, 1)
        assert v.lhs == pytest.approx(1 / 16, abs=1e-8)
        assert v.rhs == pytest.approx(1 / 32, abs=1e-8)
        assert v.slack == pytest.approx(1 / 32, abs=1e-8)
        assert v.strict_required
        assert v.holds

    def test_derivative_boundary_gates(self):
        v = check_yin_qi_strict(E("x"), 2.0, interval(0, 1), 0, 1)
        assert not v.applicable
        assert v.holds is None

    def test_nonzero_start_gates(self):
        v = check_yin_qi_strict(E("x/2+1"), 2.0, interval(0, 1), 0, 1)
        assert not v.applicable

    def test_two_point_scale_not_applicable(self):
        T = canonicalize([(0, 0), (1, 1)])
        tab = ScaleFunction.from_table([0.0, 1.0], [0.0, 0.5])
        v = check_yin_qi_strict(tab, 2.0, T, 0, 1)
        assert not v.applicable

    def test_witness_closed_form(self):
        w = yin_qi_witness(E("x/2"), interval(0, 1), 0, 1)
        assert w.passed
        gpos = [c for c in w.checks if c.name.startswith("G > 0")][0]
        assert gpos.margin > 0

    def test_witness_degenerate_zero_function(self):
        # f = 0 (violates f^delta > 0): G = 0 identically, so G > 0 fails
        w = yin_qi_witness(E("0"), interval(0, 1), 0, 1)
        assert not w.passed

    def test_witness_dense_cumulative(self):
        # On a dense scale the mechanism is sound: G' = f(1 - f') > 0.
        T = interval(0, 2)
        w = yin_qi_witness(E("0.4*x"), T, 0, 2)
        assert w.passed

    def test_witness_exposes_lattice_gap(self):
        """On scattered scales the auxiliary function G genuinely dips below
        zero right after a (frozen from the exact finite-sum oracle:
        G(sigma(a)) = mu(a) f(a) - f(sigma(a))^2/2 = -1/8 here), even though
        the theorem itself holds.  The witness must report that honestly."""
        T = lattice(0, 4, 1)
        tab = ScaleFunction.from_table([0, 1, 2, 3, 4], [0.0, 0.5, 1.0, 1.5, 2.0])
        w = yin_qi_witness(tab, T, 0, 4)
        gpos = [c for c in w.checks if c.name.startswith("G > 0")][0]
        assert gpos.margin == pytest.approx(-0.125, abs=1e-8)
        assert gpos.witness_point == 1.0
        assert not w.passed
        # ... while the strict inequality itself still holds with real slack
        v = check_yin_qi_strict(tab, 2.0, T, 0, 4)
        assert v.holds
        assert v.lhs == pytest.approx(9.0, rel=1e-12)
        assert v.rhs == pytest.approx(4.5, rel=1e-12)


class TestReductionConsistency:
    """On purely dense scales the verdict sides must match an independent
    classical-quadrature recomputation."""

    def test_dense_sides_match_reference(self, rng):
        from conftest import reference_quad

        for _ in range(6):
            f = random_positive_function(rng)
            a, b = 0.25, 1.75
            T = interval(a, b)
            p = float(rng.uniform(1.5, 3.0))
            v = check_qi(f, p, T, a, b)
            lhs_ref = reference_quad(lambda x: f.evaluate(x) ** p, a, b)
            rhs_ref = reference_quad(f.evaluate, a, b) ** (p - 1.0)
            assert v.lhs == pytest.approx(lhs_ref, rel=1e-6)
            assert v.rhs == pytest.approx(rhs_ref, rel=1e-6)

    def test_pure_lattice_sides_match_oracle(self, rng):
        from conftest import random_lattice

        for _ in range(8):
            T, pts = random_lattice(rng)
            f = random_positive_function(rng)
            p = 2.0
            v = check_qi(f, p, T, T.min, T.max)
            lhs_ref = lattice_integral_oracle(pts, lambda t: f.evaluate(t) ** p,
                                              T.min, T.max)
            rhs_ref = lattice_integral_oracle(pts, f.evaluate, T.min, T.max) ** (p - 1)
            assert v.lhs == pytest.approx(lhs_ref, rel=1e-12)
            assert v.rhs == pytest.approx(rhs_ref, rel=1e-12)


class TestMonotoneWitnessPairing:
    """Whenever the p+2 bound holds with strictly positive hypothesis
    margins, its auxiliary function F must come out non-decreasing."""

    def test_akkouchi_pairing_randomized(self):
        from chronoscale.search import GenConfig, SkipTrial, gen_admissible, gen_scale

        cfg = GenConfig(seed=99)
        paired = 0
        i = 0
        while paired < 10 and i < 80:
            T = gen_scale(cfg, i)
            try:
                f, params = gen_admissible("akkouchi", T, cfg, i)
            except SkipTrial:
                i += 1
                continue
            v = check_akkouchi_ts(f, params["p"], T, T.min, T.max)
            i += 1
            if not (v.applicable and v.holds):
                continue
            w = akkouchi_witness(f, params["p"], T, T.min, T.max)
            mono = [c for c in w.checks if "nondecreasing" in c.name][0]
            assert mono.satisfied, (i, mono.to_obj())
            paired += 1
        assert paired >= 10

    def test_yin_qi_pairing_on_dense_scales(self):
        # the strict bound's mechanism is sound on the continuum
        for slope in (0.1, 0.5, 0.9):
            T = interval(0.5, 2.0)
            f = E(f"{slope}*(x-0.5)")
            v = check_yin_qi_strict(f, 2.0, T, 0.5, 2.0)
            assert v.holds
            w = yin_qi_witness(f, T, 0.5, 2.0)
            assert w.passed


class TestRefutation:
    """The falsifier's genuine finding: the strict bound
    [int f]^p > 2^(1-p) p int f^(2p-1) fails on scales with scattered points
    near a, for every reading of its hypotheses.

    Minimal counterexample, exact arithmetic: T = {0, 1, 2}, f = (0, 19/20,
    29/20) (slopes 0.95 and 0.5, both in (0,1); f(a) = 0), p = 3/2.  The
    [a,b) integral sees only f(0) = 0 and f(1), so
    lhs = 0.95^1.5 = 0.92595 < rhs = 2^(-1/2) * 1.5 * 0.95^2 = 0.95725.
    The continuum version is sound; the failure needs the first atoms to
    carry the mass while f is still near zero."""

    def test_exact_counterexample(self):
        T = canonicalize([(0, 0), (1, 1), (2, 2)])
        f = ScaleFunction.from_table([0.0, 1.0, 2.0], [0.0, 0.95, 1.45])
        v = check_yin_qi_strict(f, 1.5, T, 0, 2)
        assert v.applicable, [h.to_obj() for h in v.hypotheses]
        assert v.lhs == pytest.approx(0.95 ** 1.5, rel=1e-12)
        assert v.rhs == pytest.approx(2 ** -0.5 * 1.5 * 0.95 ** 2, rel=1e-12)
        assert v.holds is False
        assert v.is_violation

    def test_counterexample_survives_tighter_tolerance(self):
        # the triage recheck: pure finite sums, so 10x tighter changes nothing
        T = canonicalize([(0, 0), (1, 1), (2, 2)])
        f = ScaleFunction.from_table([0.0, 1.0, 2.0], [0.0, 0.95, 1.45])
        v = check_yin_qi_strict(f, 1.5, T, 0, 2, tol=1e-10)
        assert v.is_violation

    def test_same_shape_holds_for_larger_p(self):
        T = canonicalize([(0, 0), (1, 1), (2, 2)])
        f = ScaleFunction.from_table([0.0, 1.0, 2.0], [0.0, 0.95, 1.45])
        v = check_yin_qi_strict(f, 3.0, T, 0, 2)
        assert v.holds is True

    def test_dense_counterpart_is_sound(self):
        # the same slopes on a continuum satisfy the bound comfortably
        v = check_yin_qi_strict(E("0.95*x"), 1.5, interval(0, 2), 0, 2)
        assert v.holds is True


def test_verdict_serialization_roundtrip():
    import json

    v = check_akkouchi_ts(E("2*x+1"), 1.0, lattice(0, 3, 1), 0, 3)
    obj = v.to_obj()
    text = json.dumps(obj, sort_keys=True)
    back = json.loads(text)
    assert back["lhs"] == 153.0
    assert back["rhs"] == 81.0
    assert back["applicable"] is True
    assert back["holds"] is True
    assert len(back["hypotheses"]) == 5
