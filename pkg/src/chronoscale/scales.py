"""Bounded time scales: finite unions of disjoint closed real segments.

A time scale here is canonical: segments are sorted, separated by positive
gaps, and a degenerate segment (lo == hi) encodes an isolated point.  The
structural operators sigma/rho/mu and point classification follow the usual
forward/backward jump definitions, with the bounded-scale convention that
sigma(max) = max and rho(min) = min.
"""

from __future__ import annotations

import hashlib
import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BadIntervalError,
    EmptyScaleError,
    NotInScaleError,
    ScaleSpecError,
)

__all__ = [
    "Segment",
    "TimeScale",
    "PointClass",
    "canonicalize",
    "interval",
    "lattice",
    "geometric",
    "scale_from_obj",
    "load_scale_file",
]


@dataclass(frozen=True)
class Segment:
    """Closed segment [lo, hi]; lo == hi encodes an isolated point."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise BadIntervalError(f"segment endpoints must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise BadIntervalError(f"segment endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class PointClass:
    """Classification of a scale point.

    ``right``/``left`` are "scattered" or "dense".  At the extremes (where the
    jump operators return the point itself by convention) the side with no
    further scale reflects isolation: the max is right-scattered exactly when
    it is an isolated point, mirrored at the min.
    """

    right: str
    left: str
    is_min: bool
    is_max: bool

    @property
    def right_scattered(self) -> bool:
        return self.right == "scattered"

    @property
    def left_scattered(self) -> bool:
        return self.left == "scattered"

    @property
    def right_dense(self) -> bool:
        return self.right == "dense"

    @property
    def left_dense(self) -> bool:
        return self.left == "dense"


class TimeScale:
    """Canonical bounded time scale.

    Immutable after construction; all queries are pure.  Use
    :func:`canonicalize` (or the ``interval``/``lattice``/``geometric``
    helpers) rather than calling the constructor with raw segments.
    """

    __slots__ = ("segments", "_los", "_his")

    def __init__(self, segments: Sequence[Segment]):
        segments = tuple(segments)
        if not segments:
            raise EmptyScaleError("a time scale needs at least one segment")
        for a, b in zip(segments, segments[1:]):
            if not a.hi < b.lo:
                raise BadIntervalError(
                    f"segments not strictly ordered with positive gaps: [{a.lo},{a.hi}] then [{b.lo},{b.hi}]"
                )
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "_los", [s.lo for s in segments])
        object.__setattr__(self, "_his", [s.hi for s in segments])

    def __setattr__(self, name, value):
        raise AttributeError("TimeScale is immutable")

    def __repr__(self):
        body = ", ".join(f"[{s.lo}, {s.hi}]" for s in self.segments)
        return f"TimeScale({body})"

    def __eq__(self, other):
        return isinstance(other, TimeScale) and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    @property
    def min(self) -> float:
        return self.segments[0].lo

    @property
    def max(self) -> float:
        return self.segments[-1].hi

    def _segment_index(self, t: float) -> int | None:
        """Index of the segment containing t, or None."""
        i = bisect_right(self._los, t) - 1
        if i >= 0 and t <= self._his[i]:
            return i
        return None

    def contains(self, t: float) -> bool:
        return self._segment_index(t) is not None

    def _require(self, t: float) -> int:
        i = self._segment_index(t)
        if i is None:
            raise NotInScaleError(f"{t} is not a point of {self}")
        return i

    def sigma(self, t: float) -> float:
        """Forward jump: inf of the scale points strictly greater than t
        (t itself at the maximum)."""
        i = self._require(t)
        if t < self._his[i]:
            return t
        if i + 1 < len(self.segments):
            return self._los[i + 1]
        return t

    def rho(self, t: float) -> float:
        """Backward jump: sup of the scale points strictly less than t
        (t itself at the minimum)."""
        i = self._require(t)
        if t > self._los[i]:
            return t
        if i > 0:
            return self._his[i - 1]
        return t

    def mu(self, t: float) -> float:
        """Graininess sigma(t) - t; zero exactly at right-dense points."""
        return self.sigma(t) - t

    def classify(self, t: float) -> PointClass:
        i = self._require(t)
        seg = self.segments[i]
        is_min = t == self.min
        is_max = t == self.max
        if is_max:
            right = "scattered" if seg.degenerate else "dense"
        else:
            right = "scattered" if self.sigma(t) > t else "dense"
        if is_min:
            left = "scattered" if seg.degenerate else "dense"
        else:
            left = "scattered" if self.rho(t) < t else "dense"
        return PointClass(right=right, left=left, is_min=is_min, is_max=is_max)

    def restrict(self, a: float, b: float) -> "TimeScale":
        """The canonical scale equal to this one intersected with [a, b]."""
        if not self.contains(a):
            raise NotInScaleError(f"left endpoint {a} is not in the scale")
        if not self.contains(b):
            raise NotInScaleError(f"right endpoint {b} is not in the scale")
        if a >= b:
            raise BadIntervalError(f"need a < b, got a={a}, b={b}")
        out = []
        for seg in self.segments:
            lo = max(seg.lo, a)
            hi = min(seg.hi, b)
            if lo <= hi:
                out.append(Segment(lo, hi))
        return TimeScale(out)

    def scale_points(self, max_dense_step: float) -> list[float]:
        """All scattered points plus a per-segment grid no coarser than
        ``max_dense_step``; sorted and including every segment endpoint."""
        if max_dense_step <= 0:
            raise BadIntervalError("max_dense_step must be positive")
        pts: list[float] = []
        for seg in self.segments:
            if seg.degenerate:
                pts.append(seg.lo)
                continue
            span = seg.hi - seg.lo
            n = max(1, math.ceil(span / max_dense_step))
            for k in range(n):
                pts.append(seg.lo + span * (k / n))
            pts.append(seg.hi)
        # Exact duplicates only; distinct endpoints survive canonicalization.
        out = []
        for p in pts:
            if not out or p != out[-1]:
                out.append(p)
        return out

    def digest(self) -> str:
        """Short stable identifier for reports."""
        payload = json.dumps([[s.lo, s.hi] for s in self.segments])
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def to_obj(self) -> dict:
        return {"segments": [[s.lo, s.hi] for s in self.segments]}


def canonicalize(raw: Iterable[Segment | tuple[float, float]], snap_tol: float = 0.0) -> TimeScale:
    """Sort, merge overlapping/adjacent segments, and build a TimeScale.

    Segments whose gap is at most ``snap_tol`` are merged by union, which lets
    lattices assembled from computed (slightly noisy) endpoints collapse
    instead of producing spurious near-duplicate points.  The result does not
    depend on input order, and canonicalize is idempotent.
    """
    segs = [s if isinstance(s, Segment) else Segment(float(s[0]), float(s[1])) for s in raw]
    if not segs:
        raise EmptyScaleError("cannot canonicalize an empty segment list")
    segs.sort(key=lambda s: (s.lo, s.hi))
    merged = [segs[0]]
    for seg in segs[1:]:
        last = merged[-1]
        if seg.lo - last.hi <= snap_tol:
            merged[-1] = Segment(last.lo, max(last.hi, seg.hi))
        else:
            merged.append(seg)
    return TimeScale(merged)


def interval(a: float, b: float) -> TimeScale:
    """Single dense segment [a, b] (the continuum desk model)."""
    return TimeScale([Segment(float(a), float(b))])


def lattice(start: float, stop: float, step: float) -> TimeScale:
    """Arithmetic lattice start, start+step, ... up to stop (inclusive)."""
    if step <= 0:
        raise ScaleSpecError(f"lattice step must be positive, got {step}")
    if stop < start:
        raise ScaleSpecError(f"lattice needs start <= stop, got {start}..{stop}")
    pts = []
    k = 0
    slack = 1e-9 * step
    while True:
        t = start + k * step
        if t > stop + slack:
            break
        pts.append(min(t, stop))
        k += 1
    return canonicalize([(p, p) for p in pts])


def geometric(q: float, lo: float, hi: float) -> TimeScale:
    """Geometric points lo, lo*q, lo*q^2, ... up to hi (inclusive)."""
    if q <= 1:
        raise ScaleSpecError(f"geometric ratio must exceed 1, got {q}")
    if lo <= 0:
        raise ScaleSpecError(f"geometric scale needs a positive minimum, got {lo}")
    if hi < lo:
        raise ScaleSpecError(f"geometric scale needs min <= max, got {lo}..{hi}")
    pts = []
    t = lo
    slack = 1e-9 * hi
    while t <= hi + slack:
        pts.append(min(t, hi))
        t *= q
    return canonicalize([(p, p) for p in pts])


def scale_from_obj(obj: dict, snap_tol: float = 0.0) -> TimeScale:
    """Build a scale from its JSON object form.

    Accepted shapes: {"segments": [[lo,hi],...]}, {"interval": [a,b]},
    {"lattice": {"start","stop","step"}}, {"geometric": {"q","min","max"}},
    and {"union": [...]} of any of the above.
    """
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ScaleSpecError(f"scale object must have exactly one key, got {obj!r}")
    key, val = next(iter(obj.items()))
    try:
        if key == "segments":
            return canonicalize([(float(lo), float(hi)) for lo, hi in val], snap_tol)
        if key == "interval":
            a, b = val
            return interval(float(a), float(b))
        if key == "lattice":
            return lattice(float(val["start"]), float(val["stop"]), float(val["step"]))
        if key == "geometric":
            return geometric(float(val["q"]), float(val["min"]), float(val["max"]))
        if key == "union":
            segs: list[Segment] = []
            for sub in val:
                segs.extend(scale_from_obj(sub, snap_tol).segments)
            return canonicalize(segs, snap_tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScaleSpecError(f"malformed scale object {obj!r}: {exc}") from exc
    raise ScaleSpecError(f"unknown scale constructor {key!r}")


def load_scale_file(path: str, snap_tol: float = 0.0) -> TimeScale:
    with open(path, "r", encoding="utf-8") as fh:
        return scale_from_obj(json.load(fh), snap_tol)
