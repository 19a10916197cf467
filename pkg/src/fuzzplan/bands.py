"""Operating-characteristic band sweeps over the translation parameter theta."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DomainError
from .fuzzy import Interval, TriangularFuzzy, theta_shift
from .fuzzyprob import InspectionErrors, apply_inspection_errors, pa_band
from .kernels import DistModel, PlanParams

DEFAULT_THETAS = tuple(round(0.01 * i, 10) for i in range(11))
DEFAULT_NUS = (0.0, 0.3, 0.7, 1.0)


@dataclass(frozen=True)
class FocBandPoint:
    theta: float
    nu: float
    p_cut: Interval
    pa_cut: Interval
    with_errors: bool = False

    def row(self) -> dict:
        return {
            "theta": self.theta,
            "nu": self.nu,
            "p_lo": self.p_cut.lo,
            "p_hi": self.p_cut.hi,
            "pa_lo": self.pa_cut.lo,
            "pa_hi": self.pa_cut.hi,
            "with_errors": self.with_errors,
        }


def _cell(args) -> FocBandPoint:
    number, theta, nu, plan, model, with_errors = args
    return FocBandPoint(theta, nu, number.cut(nu), pa_band(number, nu, plan, model), with_errors)


def foc_band(
    base: TriangularFuzzy,
    plan: PlanParams,
    model: DistModel | str = DistModel.BINOMIAL,
    nu_levels: Sequence[float] = DEFAULT_NUS,
    theta_grid: Sequence[float] = DEFAULT_THETAS,
    errors: Optional[InspectionErrors] = None,
    jobs: int = 1,
) -> list[FocBandPoint]:
    """One band point per (theta, nu), theta-major.

    With ``errors`` the apparent fuzzy fraction is computed first and the
    theta family is built by translating that number, so p_cut is the cut of
    the shifted apparent fraction and pa_cut is evaluated on it directly.
    """
    model = DistModel.parse(model)
    source = apply_inspection_errors(base, errors) if errors is not None else base
    upper = 1.0 - (source.p3 - source.p1)
    cells = []
    for theta in theta_grid:
        try:
            shifted = theta_shift(source, theta)
        except DomainError:
            raise DomainError(f"theta={theta} outside [0, {upper:.6g}]") from None
        for nu in nu_levels:
            if not 0.0 <= nu <= 1.0:
                raise DomainError(f"nu={nu} outside [0, 1]")
            cells.append((shifted, float(theta), float(nu), plan, model, errors is not None))
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(c) for c in cells]
