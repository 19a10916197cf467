"""Fuzzy performance measures: acceptance-probability cuts, ATI cuts, inspection errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConsistencyError, DomainError
from .fuzzy import FuzzyNumber, Interval, TriangularFuzzy
from .kernels import DistModel, PlanParams, pa_gmds

GRID_POINTS = 1024
REFINE_TOL = 1e-8
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class InspectionErrors:
    """Misclassification rates: delta1 flags a good item as defective, delta2 passes a defective one."""

    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        for name in ("delta1", "delta2"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DomainError(f"{name}={v} outside [0, 1)")
        if self.delta1 + self.delta2 >= 1.0:
            raise DomainError("delta1 + delta2 must be < 1 for inspection to be informative")

    def apparent(self, p: float) -> float:
        """Fraction of items classified defective when the true fraction is p."""
        return p * (1.0 - self.delta2) + (1.0 - p) * self.delta1


def golden_min(f: Callable[[float], float], a: float, b: float, tol: float = REFINE_TOL) -> tuple[float, float]:
    """Golden-section search for a local minimum of f on [a, b]; returns (x, f(x))."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def extremize(f: Callable[[float], float], cut: Interval, grid: int = GRID_POINTS) -> Interval:
    """[min f, max f] over a closed interval.

    A uniform grid (endpoints included) locates the best cells and a
    golden-section pass refines inside the neighbouring cells. No monotonicity
    is assumed.
    """
    if cut.width == 0.0:
        v = f(cut.lo)
        return Interval(v, v)
    xs = np.linspace(cut.lo, cut.hi, grid)
    ys = np.array([f(float(x)) for x in xs])
    lo_val, hi_val = float(ys.min()), float(ys.max())

    i = int(ys.argmin())
    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, grid - 1)])
    _, v = golden_min(f, a, b)
    lo_val = min(lo_val, v)

    j = int(ys.argmax())
    a, b = float(xs[max(j - 1, 0)]), float(xs[min(j + 1, grid - 1)])
    _, v = golden_min(lambda x: -f(x), a, b)
    hi_val = max(hi_val, -v)

    if not (math.isfinite(lo_val) and math.isfinite(hi_val)):
        raise ConsistencyError(f"non-finite extremum on [{cut.lo}, {cut.hi}]")
    return Interval(lo_val, hi_val)


def pa_band(p_fuzzy: FuzzyNumber, nu: float, plan: PlanParams, model: DistModel | str = DistModel.BINOMIAL) -> Interval:
    """Cut at level ``nu`` of the fuzzy acceptance probability.

    The constraint p + q = 1 pins q to 1 - p, so the cut is the range of the
    crisp acceptance probability over p in the cut of ``p_fuzzy``.
    """
    model = DistModel.parse(model)
    cut = p_fuzzy.cut(nu)
    return extremize(lambda p: pa_gmds(p, plan, model), cut)


def ati_from_pa(pa: Interval, n: int, lot_size: int) -> Interval:
    """Map an acceptance-probability interval to average total inspection.

    ATI = n + (1 - Pa)(N - n) decreases in Pa, so the endpoints swap.
    """
    if lot_size < n:
        raise DomainError(f"lot size N={lot_size} smaller than sample size n={n}")
    span = lot_size - n
    return Interval(n + (1.0 - pa.hi) * span, n + (1.0 - pa.lo) * span)


def ati_band(p_fuzzy: FuzzyNumber, nu: float, plan: PlanParams, model: DistModel | str, lot_size: int) -> Interval:
    if lot_size < plan.n:
        raise DomainError(f"lot size N={lot_size} smaller than sample size n={plan.n}")
    return ati_from_pa(pa_band(p_fuzzy, nu, plan, model), plan.n, lot_size)


def apply_inspection_errors(p_fuzzy: TriangularFuzzy, e: InspectionErrors) -> TriangularFuzzy:
    """Apparent fuzzy defect fraction p(1 - delta2) + (1 - p) delta1, vertex by vertex.

    The map is affine with slope 1 - delta1 - delta2 > 0, so vertex order and
    cut endpoints carry over unchanged.
    """
    return TriangularFuzzy(*(e.apparent(x) for x in p_fuzzy.points))


def pa_band_with_errors(
    p_fuzzy: TriangularFuzzy,
    e: InspectionErrors,
    nu: float,
    plan: PlanParams,
    model: DistModel | str = DistModel.BINOMIAL,
) -> Interval:
    return pa_band(apply_inspection_errors(p_fuzzy, e), nu, plan, model)
