"""Backend parity: the compiled kernel and the pure-Python fallback must agree."""

import math
import random

import pytest

from chronoscale import ScaleFunction, kernel


requires_compiled = pytest.mark.skipif(
    "compiled" not in kernel.available_backends(),
    reason="compiled kernel not built")


def _corpus():
    fns = [
        ScaleFunction.from_expression("x^2+3*x"),
        ScaleFunction.from_expression("exp(x/3)*(1+x^2)"),
        ScaleFunction.from_expression("sin(x)+cos(2*x)"),
        ScaleFunction.from_expression("sqrt(1+x^2)/(2+sin(x))"),
        ScaleFunction.from_expression("abs(x-0.5)^1.5"),
        ScaleFunction.from_table([0.0, 0.2, 0.55, 1.0], [1.0, 0.5, 2.0, 1.5]),
    ]
    fns.append((abs(fns[0]) ** 1.3) * (fns[5] + 0.25))
    return fns


@requires_compiled
def test_eval_parity():
    rng = random.Random(5)
    xs = [rng.uniform(0.0, 1.0) for _ in range(200)]
    for f in _corpus():
        kernel.use_backend("compiled")
        fast = [f.evaluate(x) for x in xs]
        kernel.use_backend("python")
        slow = [f.evaluate(x) for x in xs]
        kernel.use_backend("compiled")
        for a, b in zip(fast, slow):
            assert a == pytest.approx(b, rel=1e-14, abs=1e-300)


@requires_compiled
def test_eval_many_parity():
    xs = [i / 97 for i in range(98)]
    for f in _corpus():
        kernel.use_backend("compiled")
        fast = f.evaluate_many(xs)
        kernel.use_backend("python")
        slow = f.evaluate_many(xs)
        kernel.use_backend("compiled")
        assert fast == pytest.approx(slow, rel=1e-14)


@requires_compiled
def test_simpson_parity():
    for f in _corpus():
        kernel.use_backend("compiled")
        v1, e1, s1 = kernel.simpson_program(f.program, 0.0, 1.0, 1e-10, 1e-10, 40)
        kernel.use_backend("python")
        v2, e2, s2 = kernel.simpson_program(f.program, 0.0, 1.0, 1e-10, 1e-10, 40)
        kernel.use_backend("compiled")
        assert s1 == s2
        assert v1 == pytest.approx(v2, rel=1e-13)


@requires_compiled
def test_domain_status_parity():
    bad = ScaleFunction.from_expression("ln(x-2)")
    for backend in ("compiled", "python"):
        kernel.use_backend(backend)
        val, status = kernel.eval_program(bad.program, 0.5)
        assert status == kernel.STATUS_DOMAIN
    kernel.use_backend("compiled")


def test_simpson_callable_smoke():
    val, err, status = kernel.simpson_callable(math.exp, 0.0, 1.0, 1e-10, 1e-10, 40)
    assert status == kernel.STATUS_OK
    assert val == pytest.approx(math.e - 1.0, abs=1e-9)


def test_simpson_exact_for_cubics():
    f = ScaleFunction.from_expression("x^3-2*x^2+x")
    val, err, status = kernel.simpson_program(f.program, 0.0, 2.0, 1e-12, 1e-12, 40)
    assert status == kernel.STATUS_OK
    assert val == pytest.approx(4.0 - 16.0 / 3 + 2.0, abs=1e-12)


def test_backend_env_and_switch():
    active = kernel.BACKEND
    assert active in ("compiled", "python")
    assert kernel.use_backend("python") == "python"
    assert kernel.BACKEND == "python"
    if "compiled" in kernel.available_backends():
        assert kernel.use_backend("compiled") == "compiled"
    with pytest.raises(ValueError):
        kernel.use_backend("fortran")
