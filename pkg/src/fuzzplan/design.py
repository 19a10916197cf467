"""Two-point plan design: smallest sample satisfying producer and consumer constraints.

For each family the configuration space (everything except the sample size)
is enumerated in tie-break order and, per configuration, the smallest n
meeting the consumer constraint is found by bisection.  Acceptance
probability is non-increasing in n for every family here, so once the
consumer constraint holds the producer constraint can only get worse with
larger n and the smallest such n is the only candidate.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from .errors import DomainError
from .fuzzy import Fuzzy, Interval, TriangularFuzzy
from .fuzzyprob import pa_band
from .kernels import (
    DistModel,
    DspParams,
    PlanParams,
    SspParams,
    asn_dsp,
    pa_dsp,
    pa_gmds,
    pa_ssp,
)

Risk = Union[float, TriangularFuzzy]


@dataclass(frozen=True)
class OCRequirement:
    aql: Fuzzy
    lql: Fuzzy
    alpha: Risk = 0.05
    beta: Risk = 0.10
    nu: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.nu <= 1.0:
            raise DomainError(f"design level nu={self.nu} outside [0, 1]")
        if not self.aql.modal < self.lql.modal:
            raise DomainError(f"AQL ({self.aql.modal}) must be below LQL ({self.lql.modal})")
        for name in ("alpha", "beta"):
            cut = _risk_cut(getattr(self, name), 0.0)
            if not (0.0 < cut.lo and cut.hi < 1.0):
                raise DomainError(f"{name} must lie in (0, 1)")

    @classmethod
    def crisp(cls, aql: float, lql: float, alpha: float = 0.05, beta: float = 0.10) -> "OCRequirement":
        return cls(TriangularFuzzy.crisp(aql), TriangularFuzzy.crisp(lql), alpha, beta, 1.0)


@dataclass(frozen=True)
class SearchLimits:
    """Search box. ``k_max=None`` lets k range over 1..m."""

    n_max: int = 10000
    m_max: int = 10
    c2_max: int = 10
    k_max: Optional[int] = None

    def __post_init__(self):
        for name in ("n_max", "m_max", "c2_max"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")
        if self.k_max is not None and self.k_max < 1:
            raise DomainError("k_max must be >= 1")


@dataclass
class DesignResult:
    family: str
    feasible: bool
    plan: Optional[object] = None
    asn: Optional[float] = None
    asn_lower_problem: Optional[float] = None
    asn_upper_problem: Optional[float] = None
    plan_lower_problem: Optional[object] = None
    plan_upper_problem: Optional[object] = None
    binding: Optional[str] = None
    problem: Optional[str] = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def plan_dict(p):
            return None if p is None else dict(vars(p))

        return {
            "family": self.family,
            "feasible": self.feasible,
            "plan": plan_dict(self.plan),
            "asn": self.asn,
            "asn_lower_problem": self.asn_lower_problem,
            "asn_upper_problem": self.asn_upper_problem,
            "binding": self.binding,
            "problem": self.problem,
        }


def _risk_cut(risk: Risk, nu: float) -> Interval:
    if isinstance(risk, (int, float)):
        return Interval(float(risk), float(risk))
    return risk.cut(nu)


@dataclass(frozen=True)
class _Targets:
    """Constraint data for one of the two fuzzy problems."""

    side: str  # "lower" evaluates the band minimum, "upper" the maximum
    aql_cut: Interval
    lql_cut: Interval
    accept_at_least: float
    accept_at_most: float

    def point(self, cut: Interval) -> float:
        # acceptance probability is non-increasing in p: min at the right end
        return cut.hi if self.side == "lower" else cut.lo


def _targets(req: OCRequirement) -> dict[str, _Targets]:
    a = _risk_cut(req.alpha, req.nu)
    b = _risk_cut(req.beta, req.nu)
    aql, lql = req.aql.cut(req.nu), req.lql.cut(req.nu)
    return {
        "lower": _Targets("lower", aql, lql, 1.0 - a.lo, b.lo),
        "upper": _Targets("upper", aql, lql, 1.0 - a.hi, b.hi),
    }


def _is_nonincreasing(vals: Iterable[float]) -> bool:
    vals = list(vals)
    return all(x >= y - 1e-15 for x, y in zip(vals, vals[1:]))


def _smallest_n(
    ok: Callable[[int], bool], value: Callable[[int], float], lo: int, hi: int
) -> Optional[int]:
    """Smallest n in [lo, hi] with ok(n); bisection if ``value`` probes monotone, else a scan."""
    if lo > hi:
        return None
    mid = (lo + hi) // 2
    if _is_nonincreasing((value(lo), value(mid), value(hi))):
        if not ok(hi):
            return None
        while lo < hi:
            m = (lo + hi) // 2
            if ok(m):
                hi = m
            else:
                lo = m + 1
        return lo
    for n in range(lo, hi + 1):
        if ok(n):
            return n
    return None


# configuration spaces, each yielded in tie-break order after n


def _gmds_configs(limits: SearchLimits, k_equals_m: bool, ms: Iterable[int]):
    for m in ms:
        ks = [m] if k_equals_m else range(1, min(m, limits.k_max or m) + 1)
        for k in ks:
            for c2 in range(1, limits.c2_max + 1):
                for c1 in range(c2):
                    yield (m, k, c1, c2)


def _make_gmds(cfg, n):
    m, k, c1, c2 = cfg
    return PlanParams(n, m, k, c1, c2)


def _search_min_n(configs, make, pa, targets: _Targets, model, n_lo_of, n_max: int):
    """Lexicographic-min (n, config) over configs; returns (n, cfg, saw_lql_ok)."""
    best = None
    saw_lql = False
    p_aql = targets.point(targets.aql_cut)
    p_lql = targets.point(targets.lql_cut)
    for cfg in configs:
        hi = n_max if best is None else best[0] - 1
        lo = n_lo_of(cfg)
        if lo > hi:
            continue

        def lql_val(n, cfg=cfg):
            return pa(p_lql, make(cfg, n), model)

        n = _smallest_n(lambda n: lql_val(n) <= targets.accept_at_most, lql_val, lo, hi)
        if n is None:
            continue
        saw_lql = True
        if pa(p_aql, make(cfg, n), model) >= targets.accept_at_least:
            best = (n, cfg)
    return best, saw_lql


def _gmds_worker(args):
    ms, limits, k_equals_m, targets, model = args
    lo_of = (lambda cfg: cfg[3]) if model is DistModel.BINOMIAL else (lambda cfg: 1)
    return _search_min_n(
        _gmds_configs(limits, k_equals_m, ms), _make_gmds, pa_gmds, targets, model, lo_of, limits.n_max
    )


def _solve_gmds(targets: _Targets, model: DistModel, limits: SearchLimits, k_equals_m: bool, jobs: int):
    ms = list(range(1, limits.m_max + 1))
    if jobs > 1 and len(ms) > 1:
        chunks = [ms[i::jobs] for i in range(jobs) if ms[i::jobs]]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(_gmds_worker, [(c, limits, k_equals_m, targets, model) for c in chunks]))
        found = [p[0] for p in parts if p[0] is not None]
        best = min(found, key=lambda b: (b[0],) + b[1][0:2] + (b[1][3], b[1][2])) if found else None
        return best, any(p[1] for p in parts)
    return _gmds_worker((ms, limits, k_equals_m, targets, model))


def _finish(family: str, req: OCRequirement, solved: dict, to_plan) -> DesignResult:
    """Combine the two fuzzy problems; the larger-ASN one is the recommendation."""
    lower, upper = solved["lower"], solved["upper"]
    res = DesignResult(family=family, feasible=False)
    if lower[0] is not None:
        res.asn_lower_problem, res.plan_lower_problem = lower[0], to_plan(lower)
    if upper[0] is not None:
        res.asn_upper_problem, res.plan_upper_problem = upper[0], to_plan(upper)
    if lower[0] is None or upper[0] is None:
        missing = lower if lower[0] is None else upper
        res.binding = "aql" if missing[1] else "lql"
        return res
    res.feasible = True
    if res.asn_upper_problem > res.asn_lower_problem:
        res.problem, res.plan, res.asn = "upper", res.plan_upper_problem, res.asn_upper_problem
    else:
        res.problem, res.plan, res.asn = "lower", res.plan_lower_problem, res.asn_lower_problem
    return res


def _both_problems(req: OCRequirement, solve):
    t = _targets(req)
    lower = solve(t["lower"])
    lo, up = t["lower"], t["upper"]
    same = (
        lo.point(lo.aql_cut) == up.point(up.aql_cut)
        and lo.point(lo.lql_cut) == up.point(up.lql_cut)
        and (lo.accept_at_least, lo.accept_at_most) == (up.accept_at_least, up.accept_at_most)
    )
    # degenerate cuts (always the case at nu = 1): both problems coincide
    upper = lower if same else solve(up)
    return {"lower": lower, "upper": upper}


def design_gmds(
    req: OCRequirement,
    model: DistModel | str = DistModel.BINOMIAL,
    limits: SearchLimits = SearchLimits(),
    jobs: int = 1,
    _k_equals_m: bool = False,
) -> DesignResult:
    model = DistModel.parse(model)

    def solve(t):
        best, saw = _solve_gmds(t, model, limits, _k_equals_m, jobs)
        return (None, saw, None) if best is None else (best[0], saw, best[1])

    def to_plan(s):
        m, k, c1, c2 = s[2]
        return PlanParams(s[0], m, k, c1, c2)

    family = "mds" if _k_equals_m else "gmds"
    return _finish(family, req, _both_problems(req, solve), to_plan)


def design_mds(req, model=DistModel.BINOMIAL, limits: SearchLimits = SearchLimits(), jobs: int = 1) -> DesignResult:
    """GMDS search restricted to k = m (every one of the m previous lots must be clean)."""
    return design_gmds(req, model, limits, jobs, _k_equals_m=True)


def design_ssp(req, model=DistModel.BINOMIAL, limits: SearchLimits = SearchLimits()) -> DesignResult:
    model = DistModel.parse(model)

    def solve(t):
        best, saw = _search_min_n(
            ((c,) for c in range(0, limits.c2_max + 1)),
            lambda cfg, n: SspParams(n, cfg[0]),
            pa_ssp,
            t,
            model,
            lambda cfg: max(1, cfg[0]),
            limits.n_max,
        )
        return (None, saw, None) if best is None else (best[0], saw, best[1])

    return _finish("ssp", req, _both_problems(req, solve), lambda s: SspParams(s[0], s[2][0]))


def _largest_n(ok: Callable[[int], bool], lo: int, hi: int) -> Optional[int]:
    """Largest n in [lo, hi] with ok(n), ok assumed to switch from True to False once."""
    if lo > hi or not ok(lo):
        return None
    while lo < hi:
        m = (lo + hi + 1) // 2
        if ok(m):
            lo = m
        else:
            hi = m - 1
    return lo


def design_dsp(req, model=DistModel.BINOMIAL, limits: SearchLimits = SearchLimits()) -> DesignResult:
    """Double sampling with n1 = n2, minimizing the ASN at the modal AQL.

    Within one (c1, c2) the feasible sample sizes form a run [n_lql, n_aql];
    every n in that run is scanned while it can still beat the best ASN.
    """
    model = DistModel.parse(model)
    p_modal = req.aql.modal

    def solve(t: _Targets):
        p_aql, p_lql = t.point(t.aql_cut), t.point(t.lql_cut)
        best = None  # (asn, n, c2, c1)
        saw = False
        for c2 in range(1, limits.c2_max + 1):
            for c1 in range(c2):
                lo = c2 if model is DistModel.BINOMIAL else 1
                hi = limits.n_max if best is None else min(limits.n_max, math.floor(best[0]))
                if lo > hi:
                    continue

                def lql_val(n, c1=c1, c2=c2):
                    return pa_dsp(p_lql, DspParams(n, n, c1, c2), model)

                n_min = _smallest_n(lambda n: lql_val(n) <= t.accept_at_most, lql_val, lo, hi)
                if n_min is None:
                    continue
                saw = True
                n_top = _largest_n(
                    lambda n: pa_dsp(p_aql, DspParams(n, n, c1, c2), model) >= t.accept_at_least, n_min, hi
                )
                if n_top is None:
                    continue
                for n in range(n_min, n_top + 1):
                    if best is not None and n > best[0]:
                        break
                    a = asn_dsp(p_modal, DspParams(n, n, c1, c2), model)
                    key = (a, n, c2, c1)
                    if best is None or key < best:
                        best = key
        if best is None:
            return (None, saw, None)
        return (best[0], saw, best)

    def to_plan(s):
        _, n, c2, c1 = s[2]
        return DspParams(n, n, c1, c2)

    return _finish("dsp", req, _both_problems(req, solve), to_plan)


def compare_asn(
    req: OCRequirement,
    model: DistModel | str = DistModel.BINOMIAL,
    limits: SearchLimits = SearchLimits(),
    gmds_limits: Optional[SearchLimits] = None,
    jobs: int = 1,
) -> dict[str, DesignResult]:
    """Designs for every family under one requirement.

    ``gmds_limits`` overrides the search box for the GMDS family only (used to
    restrict k); by default all families share ``limits``.
    """
    model = DistModel.parse(model)
    return {
        "ssp": design_ssp(req, model, limits),
        "dsp": design_dsp(req, model, limits),
        "mds": design_mds(req, model, limits, jobs),
        "gmds": design_gmds(req, model, gmds_limits or limits, jobs),
    }


def verify_design(req: OCRequirement, result: DesignResult, model, tol: float = 1e-9) -> bool:
    """Re-check a GMDS/MDS design through the full band optimizer."""
    if not result.feasible:
        return False
    model = DistModel.parse(model)
    t = _targets(req)[result.problem]
    aql = pa_band(req.aql, req.nu, result.plan, model)
    lql = pa_band(req.lql, req.nu, result.plan, model)
    pick = (lambda iv: iv.lo) if t.side == "lower" else (lambda iv: iv.hi)
    return pick(aql) >= t.accept_at_least - tol and pick(lql) <= t.accept_at_most + tol
