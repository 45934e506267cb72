"""Structural identities: fundamental theorem, parts, product/quotient,
chain rule, substitution — worked instances plus randomized mixed scales."""

import pytest

from chronoscale import (
    BadSubstitutionError,
    QuotientUndefinedError,
    ScaleFunction,
    canonicalize,
    chain_rule_derivative,
    delta_derivative,
    fundamental_theorem_check,
    interval,
    lattice,
    parts_check,
    product_quotient_check,
    substitution_check,
)
from chronoscale.calculus import default_grid
from chronoscale.expr import parse, substitute
from chronoscale.search import GenConfig, gen_scale
from conftest import random_smooth_function

E = ScaleFunction.from_expression
TOL = 1e-9


def _kappa_points(T, a, b):
    return [t for t in default_grid(T.restrict(a, b), 0.37)
            if not (t == T.max and T.rho(t) < t)]


class TestFundamentalTheorem:
    def test_constant(self):
        assert fundamental_theorem_check(E("5"), interval(0, 1), 0, 1).residual \
            <= 10 * TOL

    def test_lattice_telescopes_exactly(self):
        r = fundamental_theorem_check(E("x^2"), lattice(0, 3, 1), 0, 3)
        assert r.residual == 0.0
        assert r.parts["boundary"] == 9.0

    def test_dense_classical(self):
        r = fundamental_theorem_check(E("x^2"), interval(0, 1), 0, 1)
        assert r.within(TOL)


class TestParts:
    def test_constant_f_reduces_to_ftc(self):
        r = parts_check(E("1"), E("x^2+1"), interval(0, 1), 0, 1)
        assert r.within(TOL)

    def test_lattice_abel_summation(self):
        r = parts_check(E("x"), E("x"), lattice(0, 3, 1), 0, 3)
        assert r.residual <= 1e-12 * r.scale

    def test_dense_polynomials(self):
        r = parts_check(E("x^2"), E("x^3-x"), interval(0, 1), 0, 1)
        assert r.within(TOL)


class TestProductQuotient:
    def test_constant_g(self):
        rp, rq = product_quotient_check(E("x^2"), E("1"), interval(0, 1), 0.5)
        assert rp.within(TOL) and rq.within(TOL)

    def test_lattice_by_hand(self):
        rp, rq = product_quotient_check(E("x"), E("x+1"), lattice(0, 3, 1), 1.0)
        assert rp.residual <= 1e-12 * rp.scale
        assert rq.residual <= 1e-12 * rq.scale

    def test_dense_classical(self):
        rp, rq = product_quotient_check(E("exp(x)"), E("2+sin(x)"), interval(0, 2), 1.3)
        assert rp.within(TOL) and rq.within(TOL)

    def test_quotient_undefined(self):
        with pytest.raises(QuotientUndefinedError):
            product_quotient_check(E("1"), E("x"), interval(0, 1), 0.0)


class TestChainRule:
    def test_dense_reduces_to_classical(self):
        r = chain_rule_derivative(E("2*x"), E("x^2"), interval(0, 2), 1.0)
        # (g^2)' at 1 with g = x^2: 2*g(1)*g'(1) = 2*1*2 = 4
        assert r.value == pytest.approx(4.0, abs=1e-7)

    def test_identity_outer(self):
        T = canonicalize([(0, 0), (1, 1), (2.5, 2.5)])
        g = E("x^2")
        r = chain_rule_derivative(E("1"), g, T, 1.0)
        assert r.value == pytest.approx(delta_derivative(g, T, 1.0).value, abs=1e-9)

    def test_lattice_square_outer(self):
        T = lattice(0, 3, 1)
        r = chain_rule_derivative(E("2*x"), E("x"), T, 0.0)
        assert r.value == pytest.approx(1.0, abs=1e-12)

    def test_agrees_with_composed_derivative(self, rng):
        cfg = GenConfig(seed=11)
        outer_texts = ["x^2", "x^3+x", "exp(x/4)"]
        for i in range(12):
            T = gen_scale(cfg, i)
            outer = parse(outer_texts[i % len(outer_texts)])
            g = random_smooth_function(rng)
            composed = ScaleFunction.from_expression(substitute(outer, g.ast))
            from chronoscale.expr import diff
            fprime = ScaleFunction.from_expression(diff(outer))
            pts = _kappa_points(T, T.min, T.max)
            t = pts[int(rng.integers(0, len(pts)))]
            lhs = chain_rule_derivative(fprime, g, T, t, TOL)
            rhs = delta_derivative(composed, T, t, TOL)
            scale = 1 + abs(lhs.value) + abs(rhs.value)
            assert abs(lhs.value - rhs.value) <= 10 * TOL * scale


class TestSubstitution:
    def test_identity_map(self):
        r = substitution_check(E("x"), E("x^2"), interval(0, 1), 0.5)
        assert r.within(TOL)

    def test_affine_on_lattice(self):
        r = substitution_check(E("2*x"), E("x^2"), lattice(0, 3, 1), 1.0)
        assert r.within(TOL)

    def test_smooth_on_dense(self):
        r = substitution_check(E("exp(x)"), E("x^2+x"), interval(0, 1), 0.3)
        assert r.within(TOL)

    def test_decreasing_map_rejected(self):
        with pytest.raises(BadSubstitutionError):
            substitution_check(E("-x"), E("x"), interval(0, 1), 0.5)


class TestRandomizedMixedScales:
    """Spec-level property: residuals stay below 10*tol*(1+scale) on random
    mixed scales (the acceptance suite runs the full-width version)."""

    def test_residual_suite(self, rng):
        cfg = GenConfig(seed=2026)
        increasing = ["0.5*x+1", "2*x", "exp(x/3)", "x^3+x"]
        for i in range(15):
            T = gen_scale(cfg, i)
            a, b = T.min, T.max
            f = random_smooth_function(rng)
            g = random_smooth_function(rng)
            assert fundamental_theorem_check(f, T, a, b, TOL).within(TOL)
            assert parts_check(f, g, T, a, b, TOL).within(TOL)
            pts = _kappa_points(T, a, b)
            t = pts[int(rng.integers(0, len(pts)))]
            tq = next((s for s in pts
                       if abs(g.evaluate(s) * g.evaluate(T.sigma(s))) > 1e-3), None)
            assert tq is not None
            rp, rq = product_quotient_check(f, g, T, tq, TOL)
            assert rp.within(TOL)
            assert rq.within(TOL)
            v = E(increasing[i % len(increasing)])
            assert substitution_check(v, f, T, t, TOL).within(TOL)
