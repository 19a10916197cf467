import random

import pytest

from fuzzplan.design import (
    OCRequirement,
    SearchLimits,
    _smallest_n,
    compare_asn,
    design_dsp,
    design_gmds,
    design_mds,
    design_ssp,
    verify_design,
)
from fuzzplan.errors import DomainError
from fuzzplan.fuzzy import TriangularFuzzy
from fuzzplan.kernels import DistModel, DspParams, PlanParams, asn_dsp, pa_dsp, pa_gmds, pa_ssp, SspParams

B, P = DistModel.BINOMIAL, DistModel.POISSON
K1 = SearchLimits(k_max=1)


@pytest.mark.parametrize(
    "model, aql, lql, expect",
    [
        (B, 0.005, 0.10, (24, 1, 1, 0, 1)),
        (B, 0.010, 0.040, (87, 5, 1, 0, 3)),
        (P, 0.05, 0.15, (35, 6, 1, 1, 4)),
    ],
)
def test_published_designs_with_single_clean_lot(model, aql, lql, expect):
    res = design_gmds(OCRequirement.crisp(aql, lql), model, K1)
    assert res.feasible
    assert (res.plan.n, res.plan.m, res.plan.k, res.plan.c1, res.plan.c2) == expect
    assert res.asn == expect[0]
    assert verify_design(OCRequirement.crisp(aql, lql), res, model)


def test_searching_all_k_can_beat_single_k():
    req = OCRequirement.crisp(0.001, 0.01)
    full = design_gmds(req, B)
    restricted = design_gmds(req, B, K1)
    assert full.asn <= restricted.asn
    assert full.asn < 261 == restricted.asn
    assert verify_design(req, full, B)


@pytest.mark.parametrize("aql, lql, n", [(0.001, 0.010, 531), (0.010, 0.050, 132)])
def test_ssp_published(aql, lql, n):
    res = design_ssp(OCRequirement.crisp(aql, lql), B)
    assert res.plan.n == n


def _ssp_oracle(aql, lql, alpha, beta, model, n_max=100, c_max=5):
    for n in range(1, n_max + 1):
        for c in range(0, min(c_max, n) + 1):
            plan = SspParams(n, c)
            if pa_ssp(aql, plan, model) >= 1 - alpha and pa_ssp(lql, plan, model) <= beta:
                return n, c
    return None


@pytest.mark.parametrize("model", [B, P])
@pytest.mark.parametrize("aql, lql", [(0.01, 0.3), (0.02, 0.1), (0.05, 0.4)])
def test_ssp_matches_exhaustive_search(model, aql, lql):
    req = OCRequirement.crisp(aql, lql, 0.5, 0.5)
    res = design_ssp(req, model, SearchLimits(n_max=100, c2_max=5))
    want = _ssp_oracle(aql, lql, 0.5, 0.5, model)
    assert (res.plan.n, res.plan.c) == want


@pytest.mark.parametrize("aql, lql, asn", [(0.001, 0.010, 388), (0.010, 0.050, 87)])
def test_mds_published(aql, lql, asn):
    res = design_mds(OCRequirement.crisp(aql, lql), B)
    assert res.asn == asn
    assert res.plan.k == res.plan.m


@pytest.mark.parametrize("aql, lql", [(0.001, 0.015), (0.005, 0.05), (0.02, 0.08)])
def test_mds_plans_have_k_equal_m(aql, lql):
    res = design_mds(OCRequirement.crisp(aql, lql), P)
    assert res.feasible and res.plan.k == res.plan.m


@pytest.mark.parametrize("model", [B, P])
@pytest.mark.parametrize("aql, lql", [(0.001, 0.010), (0.005, 0.03), (0.02, 0.08)])
def test_gmds_never_worse_than_mds(model, aql, lql):
    req = OCRequirement.crisp(aql, lql)
    assert design_gmds(req, model).asn <= design_mds(req, model).asn


def test_dsp_published_best_effort():
    res = design_dsp(OCRequirement.crisp(0.001, 0.010), B)
    assert res.asn == pytest.approx(363.55, abs=2)


def _dsp_oracle(req, model, n_max, c2_max):
    best = None
    for c2 in range(1, c2_max + 1):
        for c1 in range(c2):
            for n in range(1, n_max + 1):
                plan = DspParams(n, n, c1, c2)
                ok = pa_dsp(req.aql.modal, plan, model) >= 1 - req.alpha and pa_dsp(req.lql.modal, plan, model) <= req.beta
                if ok:
                    key = (asn_dsp(req.aql.modal, plan, model), n, c2, c1)
                    best = key if best is None else min(best, key)
    return best


@pytest.mark.parametrize("model", [B, P])
@pytest.mark.parametrize("aql, lql", [(0.01, 0.15), (0.02, 0.2), (0.005, 0.1)])
def test_dsp_matches_exhaustive_search(model, aql, lql):
    req = OCRequirement.crisp(aql, lql)
    res = design_dsp(req, model, SearchLimits(n_max=60, c2_max=4))
    want = _dsp_oracle(req, model, 60, 4)
    assert want is not None
    assert (res.asn, res.plan.n1, res.plan.c2, res.plan.c1) == pytest.approx(want, abs=1e-12)


def test_dsp_zero_aql_reports_first_sample():
    # at p = 0 no lot reaches a second sample, so the ASN is n1
    req = OCRequirement(TriangularFuzzy.crisp(0.0), TriangularFuzzy.crisp(0.05))
    res = design_dsp(req, B)
    assert res.feasible and res.asn == res.plan.n1


def test_bisection_agrees_with_linear_scan():
    rng = random.Random(7)
    for _ in range(20):
        model = rng.choice([B, P])
        m = rng.randint(1, 8)
        c2 = rng.randint(1, 6)
        k, c1 = rng.randint(1, m), rng.randint(0, c2 - 1)
        p = rng.uniform(0.01, 0.2)
        target = rng.uniform(0.05, 0.5)
        lo = c2 if model is B else 1

        def value(n):
            return pa_gmds(p, PlanParams(n, m, k, c1, c2), model)

        def ok(n):
            return value(n) <= target

        scan = next((n for n in range(lo, 2001) if ok(n)), None)
        assert _smallest_n(ok, value, lo, 2000) == scan


def test_scan_fallback_on_non_monotone_values():
    # the probe (1, 3, 5) sees a rise, forcing the scan
    vals = {1: 0.9, 2: 0.1, 3: 0.95, 4: 0.05, 5: 0.2}
    assert _smallest_n(lambda n: vals[n] <= 0.15, vals.__getitem__, 1, 5) == 2


def test_core_level_problems_coincide():
    res = design_gmds(OCRequirement.crisp(0.01, 0.05), P, K1)
    assert res.asn_lower_problem == res.asn_upper_problem
    assert res.plan_lower_problem == res.plan_upper_problem


def test_fuzzy_design_recommends_conservative_problem():
    req = OCRequirement(
        TriangularFuzzy(0.008, 0.01, 0.012),
        TriangularFuzzy(0.045, 0.05, 0.055),
        TriangularFuzzy(0.04, 0.05, 0.06),
        TriangularFuzzy(0.08, 0.10, 0.12),
        nu=0.0,
    )
    res = design_gmds(req, B, K1)
    assert res.feasible
    assert res.asn == max(res.asn_lower_problem, res.asn_upper_problem)
    assert res.asn_lower_problem != res.asn_upper_problem
    assert verify_design(req, res, B)


@pytest.mark.parametrize("model", [B, P])
@pytest.mark.parametrize("aql, lql", [(0.002, 0.02), (0.01, 0.04), (0.03, 0.09)])
def test_designs_round_trip_through_band(model, aql, lql):
    req = OCRequirement.crisp(aql, lql)
    for fn in (design_gmds, design_mds):
        assert verify_design(req, fn(req, model), model)


def test_infeasible_names_lql_when_sample_cap_too_small():
    res = design_gmds(OCRequirement.crisp(0.001, 0.01), B, SearchLimits(n_max=5))
    assert not res.feasible and res.binding == "lql" and res.plan is None


def test_infeasible_names_aql_when_points_too_close():
    res = design_ssp(OCRequirement.crisp(0.09, 0.10), B, SearchLimits(n_max=50, c2_max=3))
    assert not res.feasible and res.binding == "aql"


def test_lql_below_aql_rejected():
    with pytest.raises(DomainError):
        OCRequirement.crisp(0.05, 0.01)


@pytest.mark.parametrize("risk", [0.0, 1.0, 1.5])
def test_risk_outside_unit_interval_rejected(risk):
    with pytest.raises(DomainError):
        OCRequirement.crisp(0.01, 0.05, alpha=risk)


def test_limits_validated():
    with pytest.raises(DomainError):
        SearchLimits(n_max=0)


def test_compare_row_shape():
    row = compare_asn(OCRequirement.crisp(0.010, 0.050), B, SearchLimits(c2_max=25), SearchLimits(k_max=1))
    assert set(row) == {"ssp", "dsp", "mds", "gmds"}
    assert row["ssp"].asn == 132
    assert row["mds"].asn == 87
    assert row["gmds"].asn <= row["mds"].asn


def test_parallel_search_matches_serial():
    req = OCRequirement.crisp(0.005, 0.03)
    assert design_gmds(req, B, jobs=1).plan == design_gmds(req, B, jobs=3).plan
