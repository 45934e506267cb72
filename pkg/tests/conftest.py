"""Shared test helpers: independent oracles and random-instance builders.

The oracles here are deliberately primitive (explicit finite sums over the
point list, forward quotients, reference quadrature) so they check the
engine's structured implementation from the outside.
"""

import math

import numpy as np
import pytest

from chronoscale import ScaleFunction, canonicalize
from chronoscale.calculus import default_grid


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------

def lattice_integral_oracle(points, f, a, b):
    """Exact finite sum over the isolated points of [a, b): mu(t) * f(t)."""
    pts = sorted(points)
    terms = []
    for t, nxt in zip(pts, pts[1:]):
        if a <= t < b:
            terms.append((nxt - t) * f(t))
    return math.fsum(terms)


def forward_quotient_oracle(points, f, t):
    """Exact forward-difference quotient at an isolated point."""
    pts = sorted(points)
    i = pts.index(t)
    nxt = pts[i + 1]
    return (f(nxt) - f(t)) / (nxt - t)


def reference_quad(f, a, b):
    """Classical adaptive quadrature (scipy) as an independent dense oracle."""
    from scipy.integrate import quad

    val, _ = quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=400)
    return val


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def random_lattice(rng: np.random.Generator):
    """A pure-lattice scale: either arithmetic or irregular isolated points."""
    if rng.random() < 0.5:
        start = float(rng.uniform(0.2, 2.0))
        step = float(rng.uniform(0.05, 0.6))
        count = int(rng.integers(3, 40))
        pts = [start + k * step for k in range(count)]
    else:
        count = int(rng.integers(3, 40))
        raw = np.sort(rng.uniform(0.2, 6.0, size=count))
        pts = [float(raw[0])]
        for v in raw[1:]:
            if v - pts[-1] > 1e-3:
                pts.append(float(v))
        if len(pts) < 2:
            pts.append(pts[-1] + 1.0)
    return canonicalize([(p, p) for p in pts]), pts


def random_smooth_function(rng: np.random.Generator) -> ScaleFunction:
    """A smooth, everywhere-defined test function (polynomial or exp mix)."""
    kind = rng.integers(0, 3)
    c0 = float(rng.uniform(-1.0, 2.0))
    c1 = float(rng.uniform(-1.0, 1.0))
    c2 = float(rng.uniform(-0.5, 0.5))
    if kind == 0:
        text = f"{c0}+{c1}*x+{c2}*x^2"
    elif kind == 1:
        rate = float(rng.uniform(-0.5, 0.5))
        text = f"{abs(c0) + 0.2}*exp({rate}*x)+{c1}*x"
    else:
        text = f"{c0}+{c1}*x+{abs(c2)}*sin(x)"
    return ScaleFunction.from_expression(text)


def random_positive_function(rng: np.random.Generator) -> ScaleFunction:
    c0 = float(rng.uniform(0.3, 2.0))
    c1 = float(rng.uniform(0.0, 1.0))
    if rng.random() < 0.5:
        text = f"{c0}+{c1}*x^2"
    else:
        rate = float(rng.uniform(-0.4, 0.4))
        text = f"{c0}*exp({rate}*x)+{c1}"
    return ScaleFunction.from_expression(text)


def interior_points(T, a, b):
    return [t for t in default_grid(T.restrict(a, b)) if a < t < b]


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
