"""Backend selection for the hot kernels.

At import time the compiled extension (`chronoscale._kernel`, built from
Cython) is preferred; the pure-Python twin (`chronoscale._kernel_py`) is the
fallback.  Set CHRONOSCALE_PURE_PYTHON=1 to force the fallback — useful for
debugging and for the benchmark that compares both.

The generic-callable Simpson driver always runs the shared Python
implementation: its cost is dominated by the callable itself, and a single
code path keeps both backends numerically identical there.
"""

from __future__ import annotations

import os

from . import _kernel_py
from ._opcodes import (  # re-exported for callers
    STATUS_DOMAIN,
    STATUS_NO_CONVERGENCE,
    STATUS_OK,
    STATUS_TAB_GAP,
)

__all__ = [
    "BACKEND",
    "use_backend",
    "available_backends",
    "eval_program",
    "eval_program_many",
    "simpson_program",
    "simpson_callable",
    "STATUS_OK",
    "STATUS_NO_CONVERGENCE",
    "STATUS_DOMAIN",
    "STATUS_TAB_GAP",
]

_compiled = None
if os.environ.get("CHRONOSCALE_PURE_PYTHON") != "1":
    try:
        from . import _kernel as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

_impl = _compiled if _compiled is not None else _kernel_py
BACKEND = _impl.BACKEND


def available_backends() -> list[str]:
    out = ["python"]
    if _compiled is not None:
        out.insert(0, "compiled")
    return out


def use_backend(name: str) -> str:
    """Switch backends at runtime ("compiled" or "python").

    Mainly for benchmarks and backend-parity tests; returns the active name.
    """
    global _impl, BACKEND
    if name == "python":
        _impl = _kernel_py
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        _impl = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = _impl.BACKEND
    return BACKEND


def eval_program(program, x: float):
    """Evaluate a Program at x.  Returns (value, status)."""
    if _impl is _kernel_py:
        o, a, c, toff, tx, ty = program.lists
    else:
        o, a, c, toff, tx, ty = program.arrays
    return _impl.eval_program(o, a, c, toff, tx, ty, x)


def eval_program_many(program, xs):
    """Evaluate a Program at every point of xs.  Returns (values, status)."""
    if _impl is _kernel_py:
        o, a, c, toff, tx, ty = program.lists
        xs = list(xs)
    else:
        o, a, c, toff, tx, ty = program.arrays
    return _impl.eval_program_many(o, a, c, toff, tx, ty, xs)


def simpson_program(program, a: float, b: float, tol_abs: float, tol_rel: float,
                    max_depth: int):
    """Adaptive Simpson of a Program over [a, b].  Returns (value, err, status)."""
    if _impl is _kernel_py:
        o, g, c, toff, tx, ty = program.lists
    else:
        o, g, c, toff, tx, ty = program.arrays
    return _impl.simpson_program(o, g, c, toff, tx, ty, a, b, tol_abs, tol_rel, max_depth)


def simpson_callable(func, a: float, b: float, tol_abs: float, tol_rel: float,
                     max_depth: int):
    """Adaptive Simpson of a Python callable over [a, b]."""
    return _kernel_py.simpson_callable(func, a, b, tol_abs, tol_rel, max_depth)
