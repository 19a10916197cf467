"""Monte Carlo lot stream run through the GMDS operating procedure.

Each lot draws a defective count d.  The lot is accepted when d <= c1,
rejected when d > c2, and otherwise accepted only if at least k of the m
preceding lots had d <= c1.  Because that condition looks only at the
preceding counts, the whole stream is evaluated with array operations.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .fuzzyprob import InspectionErrors
from .kernels import DistModel, PlanParams

CHUNK = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    p: float
    plan: PlanParams
    model: DistModel = DistModel.BINOMIAL
    lots: int = 1_000_000
    warmup: int = 100
    seed: int = 0
    errors: Optional[InspectionErrors] = None

    def __post_init__(self):
        object.__setattr__(self, "model", DistModel.parse(self.model))
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p={self.p} outside [0, 1]")
        if self.warmup < self.plan.m:
            raise DomainError(f"warmup ({self.warmup}) must be at least m ({self.plan.m})")
        if self.lots <= self.warmup:
            raise DomainError(f"lots ({self.lots}) must exceed warmup ({self.warmup})")


@dataclass(frozen=True)
class SimResult:
    accept_rate: float
    stderr: float
    lots_counted: int

    def to_dict(self) -> dict:
        return {"accept_rate": self.accept_rate, "stderr": self.stderr, "lots_counted": self.lots_counted}


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    # Philox is counter-based; keying by (seed, chunk) makes chunks independent of scheduling
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & (2**64 - 1), index])))


def _draw_chunk(args) -> np.ndarray:
    cfg, index, size = args
    rng = _chunk_rng(cfg.seed, index)
    n, p = cfg.plan.n, cfg.p
    e = cfg.errors
    if cfg.model is DistModel.POISSON:
        rate = e.apparent(p) if e is not None else p
        return rng.poisson(n * rate, size)
    true = rng.binomial(n, p, size)
    if e is None:
        return true
    # item-level misclassification: defectives slip through, good items get flagged
    caught = rng.binomial(true, 1.0 - e.delta2)
    flagged = rng.binomial(n - true, e.delta1)
    return caught + flagged


def draw_defectives(cfg: SimConfig, jobs: int = 1) -> np.ndarray:
    """Observed defective counts for every lot in the stream."""
    tasks = []
    for i, start in enumerate(range(0, cfg.lots, CHUNK)):
        tasks.append((cfg, i, min(CHUNK, cfg.lots - start)))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_draw_chunk, tasks))
    else:
        parts = [_draw_chunk(t) for t in tasks]
    return np.concatenate(parts)


def decide(d: np.ndarray, plan: PlanParams) -> tuple[np.ndarray, np.ndarray]:
    """Per-lot (accepted, clean predecessors among the previous m) for a count stream.

    The history starts with m clean lots; callers discard a warmup of at least m lots.
    """
    clean = d <= plan.c1
    history = np.concatenate([np.ones(plan.m, dtype=np.int64), clean.astype(np.int64)])
    cs = np.concatenate([[0], np.cumsum(history)])
    prev = cs[plan.m : plan.m + d.size] - cs[: d.size]
    accepted = clean | ((d <= plan.c2) & (prev >= plan.k))
    return accepted, prev


def simulate_gmds(cfg: SimConfig, jobs: int = 1) -> SimResult:
    d = draw_defectives(cfg, jobs)
    accepted, _ = decide(d, cfg.plan)
    kept = accepted[cfg.warmup :]
    count = int(kept.size)
    r = float(np.count_nonzero(kept)) / count
    return SimResult(r, math.sqrt(r * (1.0 - r) / count), count)


def trace(cfg: SimConfig, limit: Optional[int] = None, jobs: int = 1) -> list[dict]:
    """Per-lot rows for debugging: lot index, d, clean predecessors, decision."""
    d = draw_defectives(cfg, jobs)
    accepted, prev = decide(d, cfg.plan)
    stop = d.size if limit is None else min(limit, d.size)
    return [
        {"lot": i, "d": int(d[i]), "clean_prev": int(prev[i]), "accepted": bool(accepted[i]), "counted": i >= cfg.warmup}
        for i in range(stop)
    ]
