"""Fuzzy defect fractions and their alpha-cuts.

Fuzzy numbers here are only ever consumed through ``cut(nu)``; membership
functions are never evaluated pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence, Union

from .errors import DomainError

# absorbs float residue in vertex ordering checks
_ORDER_EPS = 1e-15


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise DomainError(f"interval bounds out of order: [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def shift(self, delta: float) -> "Interval":
        return Interval(self.lo + delta, self.hi + delta)

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)


class FuzzyNumber(Protocol):
    def cut(self, nu: float) -> Interval: ...

    @property
    def modal(self) -> float: ...


def _check_nu(nu: float) -> None:
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"cut level nu={nu} outside [0, 1]")


def _check_points(points: Sequence[float], name: str) -> tuple[float, ...]:
    pts = tuple(float(x) for x in points)
    for x in pts:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"{name} vertex {x} outside [0, 1]")
    for a, b in zip(pts, pts[1:]):
        if a > b + _ORDER_EPS:
            raise DomainError(f"{name} vertices must be non-decreasing, got {pts}")
    return pts


@dataclass(frozen=True)
class TriangularFuzzy:
    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        _check_points((self.p1, self.p2, self.p3), "triangular")

    @classmethod
    def crisp(cls, x: float) -> "TriangularFuzzy":
        return cls(x, x, x)

    @property
    def points(self) -> tuple[float, float, float]:
        return (self.p1, self.p2, self.p3)

    @property
    def modal(self) -> float:
        return self.p2

    def cut(self, nu: float) -> Interval:
        return alpha_cut_triangular(self, nu)


@dataclass(frozen=True)
class PentagonalFuzzy:
    x1: float
    x2: float
    x3: float
    x4: float
    x5: float

    def __post_init__(self):
        _check_points(self.points, "pentagonal")

    @property
    def points(self) -> tuple[float, float, float, float, float]:
        return (self.x1, self.x2, self.x3, self.x4, self.x5)

    @property
    def modal(self) -> float:
        return self.x3

    def cut(self, nu: float) -> Interval:
        return alpha_cut_pentagonal(self, nu)


def alpha_cut_triangular(t: TriangularFuzzy, nu: float) -> Interval:
    _check_nu(nu)
    if nu == 1.0:
        return Interval(t.p2, t.p2)
    lo = t.p1 + (t.p2 - t.p1) * nu
    hi = t.p3 - (t.p3 - t.p2) * nu
    # rounding can cross the endpoints when the spread is ~1ulp
    return Interval(min(lo, hi), max(lo, hi))


def alpha_cut_pentagonal(t: PentagonalFuzzy, nu: float) -> Interval:
    """Piecewise-linear cut with knots (x2, x4) at nu=0.5 and core x3 at nu=1."""
    _check_nu(nu)
    if nu == 1.0:
        return Interval(t.x3, t.x3)
    if nu <= 0.5:
        s = 2.0 * nu
        lo = t.x1 + s * (t.x2 - t.x1)
        hi = t.x5 - s * (t.x5 - t.x4)
    else:
        s = 2.0 * nu - 1.0
        lo = t.x2 + s * (t.x3 - t.x2)
        hi = t.x4 - s * (t.x4 - t.x3)
    return Interval(min(lo, hi), max(lo, hi))


def theta_shift(base: TriangularFuzzy, theta: float) -> TriangularFuzzy:
    """Translate ``base`` so its left vertex sits at ``theta``, keeping its spread.

    With offsets b_j = a_j - a_1 the result is (theta, b2 + theta, b3 + theta);
    theta must lie in [0, 1 - b3] so the support stays inside [0, 1].
    """
    b2 = base.p2 - base.p1
    b3 = base.p3 - base.p1
    if not 0.0 <= theta <= 1.0 - b3 + _ORDER_EPS:
        raise DomainError(f"theta={theta} outside [0, {1.0 - b3:.6g}]")
    return TriangularFuzzy(theta, min(b2 + theta, 1.0), min(b3 + theta, 1.0))


Fuzzy = Union[TriangularFuzzy, PentagonalFuzzy]


def fuzzy_to_json(f: Fuzzy) -> dict:
    kind = "triangular" if isinstance(f, TriangularFuzzy) else "pentagonal"
    return {"kind": kind, "points": list(f.points)}


def fuzzy_from_json(obj) -> Fuzzy:
    """Parse ``{"kind": ..., "points": [...]}``; a bare number is read as a crisp triangular value."""
    if isinstance(obj, (int, float)):
        return TriangularFuzzy.crisp(float(obj))
    if isinstance(obj, (list, tuple)):
        obj = {"kind": "triangular" if len(obj) == 3 else "pentagonal", "points": obj}
    try:
        kind = obj["kind"]
        points = obj["points"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed fuzzy number: {obj!r}") from exc
    if kind == "triangular":
        if len(points) != 3:
            raise DomainError("triangular fuzzy number needs 3 points")
        return TriangularFuzzy(*points)
    if kind == "pentagonal":
        if len(points) != 5:
            raise DomainError("pentagonal fuzzy number needs 5 points")
        return PentagonalFuzzy(*points)
    raise DomainError(f"unknown fuzzy kind {kind!r}")
