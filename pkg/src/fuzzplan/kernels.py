"""Crisp acceptance-probability kernels for single, double, MDS and GMDS plans."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ConsistencyError, DomainError

# exp() of anything below this underflows to a subnormal / zero
_LOG_UNDERFLOW = -700.0
# residue allowed outside [0, 1] before it counts as a bug
_CLAMP_TOL = 1e-12


class DistModel(str, enum.Enum):
    BINOMIAL = "binomial"
    POISSON = "poisson"

    @classmethod
    def parse(cls, value) -> "DistModel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown distribution model {value!r}") from None


@dataclass(frozen=True)
class PlanParams:
    """A GMDS plan: sample n, look back over m lots, need k clean ones, accept numbers c1 < c2."""

    n: int
    m: int
    k: int
    c1: int
    c2: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise DomainError(f"n and m must be positive: {self}")
        if not 1 <= self.k <= self.m:
            raise DomainError(f"need 1 <= k <= m: {self}")
        if not 0 <= self.c1 < self.c2:
            raise DomainError(f"need 0 <= c1 < c2: {self}")

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.n, self.m, self.k, self.c1, self.c2)


@dataclass(frozen=True)
class SspParams:
    n: int
    c: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.c <= self.n:
            raise DomainError(f"need n >= 1 and 0 <= c <= n: {self}")


@dataclass(frozen=True)
class DspParams:
    """Double sampling: accept on d1 <= c1, reject on d1 > c2, else decide on d1 + d2 <= c2."""

    n1: int
    n2: int
    c1: int
    c2: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise DomainError(f"sample sizes must be positive: {self}")
        if not 0 <= self.c1 < self.c2:
            raise DomainError(f"need 0 <= c1 < c2: {self}")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"defect fraction p={p} outside [0, 1]")


def _clamp(x: float) -> float:
    if x < -_CLAMP_TOL or x > 1.0 + _CLAMP_TOL:
        raise ConsistencyError(f"probability {x!r} outside [0, 1]")
    return min(max(x, 0.0), 1.0)


# stirlerr(k) = log(k!) - log(sqrt(2 pi k) (k/e)^k); small k straight from lgamma
_STIRLERR_SMALL = [0.0] + [
    math.lgamma(k + 1.0) - (k + 0.5) * math.log(k) + k - 0.5 * math.log(2.0 * math.pi) for k in range(1, 16)
]


def _stirlerr(k: int) -> float:
    if k <= 15:
        return _STIRLERR_SMALL[k]
    kk = float(k) * k
    s0, s1, s2, s3, s4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188
    if k > 500:
        return (s0 - s1 / kk) / k
    if k > 80:
        return (s0 - (s1 - s2 / kk) / kk) / k
    if k > 35:
        return (s0 - (s1 - (s2 - s3 / kk) / kk) / kk) / k
    return (s0 - (s1 - (s2 - (s3 - s4 / kk) / kk) / kk) / kk) / k


def _bd0(x: float, mean: float) -> float:
    """x log(x / mean) + mean - x, evaluated without cancellation near x = mean."""
    if abs(x - mean) < 0.1 * (x + mean):
        v = (x - mean) / (x + mean)
        s = (x - mean) * v
        ej = 2.0 * x * v
        v *= v
        j = 1
        while True:
            ej *= v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / mean) + mean - x


def point_pmf(d: int, n: int, p: float, model: DistModel) -> float:
    """P(d) via the saddle-point form (Loader 2000); accurate to a few ulps in relative terms."""
    if model is DistModel.BINOMIAL:
        q = 1.0 - p
        if d < 0 or d > n:
            return 0.0
        if p == 0.0:
            return 1.0 if d == 0 else 0.0
        if q == 0.0:
            return 1.0 if d == n else 0.0
        if d == 0:
            return math.exp(n * math.log1p(-p))
        if d == n:
            return math.exp(n * math.log(p))
        lc = _stirlerr(n) - _stirlerr(d) - _stirlerr(n - d) - _bd0(d, n * p) - _bd0(n - d, n * q)
        lf = math.log(2.0 * math.pi) + math.log(d) + math.log1p(-d / n)
        return math.exp(lc - 0.5 * lf)
    lam = n * p
    if d < 0:
        return 0.0
    if lam == 0.0:
        return 1.0 if d == 0 else 0.0
    if d == 0:
        return math.exp(-lam)
    return math.exp(-_stirlerr(d) - _bd0(d, lam)) / math.sqrt(2.0 * math.pi * d)


# relative size below which recurrence tails are dropped
_NEGLIGIBLE = 1e-20
# the zero-anchored recurrence is used up to this many steps
_LINEAR_STEPS = 400


def pmf_terms(c: int, n: int, p: float, model: DistModel) -> list[float]:
    """Point probabilities P(d = 0..c).

    Short ranges run the ratio recurrence t[d+1] = t[d] r(d) up from d = 0.
    When t[0] underflows or the range is long, the recurrence is anchored at
    the mode (or at c, if smaller) with a saddle-point seed and run outwards,
    dropping terms once they are negligible.
    """
    _check_p(p)
    model = DistModel.parse(model)
    if c < 0:
        return []
    if model is DistModel.BINOMIAL:
        if p == 0.0 or p == 1.0:
            hit = 0 if p == 0.0 else n
            return [1.0 if d == hit else 0.0 for d in range(c + 1)]
        top = min(c, n)
        odds = p / (1.0 - p)

        def ratio(d):
            return (n - d) / (d + 1) * odds

        log_first = n * math.log1p(-p)
        mode = min(int((n + 1) * p), n)
    else:
        lam = n * p
        if lam == 0.0:
            return [1.0] + [0.0] * c
        top = c

        def ratio(d):
            return lam / (d + 1)

        log_first = -lam
        mode = int(lam)
    terms = [0.0] * (c + 1)
    if log_first > _LOG_UNDERFLOW and top <= _LINEAR_STEPS:
        t = math.exp(log_first)
        terms[0] = t
        for d in range(top):
            t *= ratio(d)
            terms[d + 1] = t
        return terms
    anchor = min(top, mode)
    seed = point_pmf(anchor, n, p, model)
    terms[anchor] = seed
    t = seed
    for d in range(anchor, 0, -1):
        t /= ratio(d - 1)
        terms[d - 1] = t
        if t < _NEGLIGIBLE * seed:
            break
    t = seed
    for d in range(anchor, top):
        t *= ratio(d)
        terms[d + 1] = t
        if t < _NEGLIGIBLE * seed:
            break
    return terms


def tail_cdf(c: int, n: int, p: float, model: DistModel | str = DistModel.BINOMIAL) -> float:
    """P(d <= c) for d ~ Binomial(n, p) or Poisson(n p)."""
    _check_p(p)
    model = DistModel.parse(model)
    if c < 0:
        return 0.0
    if model is DistModel.BINOMIAL and c >= n:
        return 1.0
    return _clamp(math.fsum(pmf_terms(c, n, p, model)))


def _cdf_pair(c1: int, c2: int, n: int, p: float, model: DistModel) -> tuple[float, float]:
    """(P(d <= c1), P(d <= c2)) from one pass over the pmf terms."""
    if model is DistModel.BINOMIAL and c2 >= n:
        return tail_cdf(c1, n, p, model), 1.0
    terms = pmf_terms(c2, n, p, model)
    return _clamp(math.fsum(terms[: c1 + 1])), _clamp(math.fsum(terms))


def at_least_k_of_m(q: float, m: int, k: int) -> float:
    """P(at least k successes in m independent trials of probability q)."""
    if k <= 0:
        return 1.0
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return 1.0
    return _clamp(math.fsum(math.comb(m, j) * q**j * (1.0 - q) ** (m - j) for j in range(k, m + 1)))


def pa_gmds(p: float, plan: PlanParams, model: DistModel | str = DistModel.BINOMIAL) -> float:
    """Lot acceptance probability of a GMDS plan at defect fraction ``p``.

    P(d <= c1) + P(c1 < d <= c2) * P(at least k of the m previous lots had d <= c1).

    Writing W for the look-back factor, this equals (1 - W) F(c1) + W F(c2):
    a convex combination of two CDFs with the weight on the larger one
    decreasing in p, so the result is non-increasing in p.
    """
    _check_p(p)
    model = DistModel.parse(model)
    f1, f2 = _cdf_pair(plan.c1, plan.c2, plan.n, p, model)
    w = at_least_k_of_m(f1, plan.m, plan.k)
    return _clamp(f1 + max(f2 - f1, 0.0) * w)


def pa_mds(p: float, plan: PlanParams, model: DistModel | str = DistModel.BINOMIAL) -> float:
    """Classical MDS acceptance: every one of the m previous lots must have been clean."""
    _check_p(p)
    model = DistModel.parse(model)
    f1, f2 = _cdf_pair(plan.c1, plan.c2, plan.n, p, model)
    return _clamp(f1 + max(f2 - f1, 0.0) * f1**plan.m)


def pa_ssp(p: float, ssp: SspParams, model: DistModel | str = DistModel.BINOMIAL) -> float:
    return tail_cdf(ssp.c, ssp.n, p, model)


def pa_dsp(p: float, dsp: DspParams, model: DistModel | str = DistModel.BINOMIAL) -> float:
    model = DistModel.parse(model)
    _check_p(p)
    first = pmf_terms(dsp.c2, dsp.n1, p, model)
    total = math.fsum(first[: dsp.c1 + 1])
    for d1 in range(dsp.c1 + 1, dsp.c2 + 1):
        if first[d1] > 0.0:
            total += first[d1] * tail_cdf(dsp.c2 - d1, dsp.n2, p, model)
    return _clamp(total)


def asn_dsp(p: float, dsp: DspParams, model: DistModel | str = DistModel.BINOMIAL) -> float:
    """Expected items inspected: n1 plus n2 whenever the first sample is inconclusive."""
    model = DistModel.parse(model)
    f1, f2 = _cdf_pair(dsp.c1, dsp.c2, dsp.n1, p, model)
    return dsp.n1 + dsp.n2 * max(f2 - f1, 0.0)
