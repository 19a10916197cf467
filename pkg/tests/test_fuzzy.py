import json

import pytest
from hypothesis import given, strategies as st

from fuzzplan.errors import DomainError
from fuzzplan.fuzzy import (
    Interval,
    PentagonalFuzzy,
    TriangularFuzzy,
    alpha_cut_pentagonal,
    alpha_cut_triangular,
    fuzzy_from_json,
    fuzzy_to_json,
    theta_shift,
)

unit = st.floats(0.0, 1.0, allow_nan=False)
levels = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def triangulars(draw):
    return TriangularFuzzy(*sorted(draw(st.lists(unit, min_size=3, max_size=3))))


@st.composite
def pentagonals(draw):
    return PentagonalFuzzy(*sorted(draw(st.lists(unit, min_size=5, max_size=5))))


@pytest.mark.parametrize(
    "nu, lo, hi",
    [(0.0, 0.01, 0.03), (1.0, 0.02, 0.02), (0.3, 0.013, 0.027)],
)
def test_triangular_cut_examples(nu, lo, hi):
    cut = alpha_cut_triangular(TriangularFuzzy(0.01, 0.02, 0.03), nu)
    assert cut.lo == pytest.approx(lo, abs=1e-15)
    assert cut.hi == pytest.approx(hi, abs=1e-15)


@pytest.mark.parametrize("nu, lo, hi", [(0.0, 0.02, 0.08), (0.5, 0.03, 0.07), (1.0, 0.05, 0.05)])
def test_pentagonal_cut_knots(nu, lo, hi):
    cut = alpha_cut_pentagonal(PentagonalFuzzy(0.02, 0.03, 0.05, 0.07, 0.08), nu)
    assert (cut.lo, cut.hi) == pytest.approx((lo, hi), abs=1e-15)


@pytest.mark.parametrize("nu", [-0.1, 1.01])
def test_cut_level_out_of_range(nu):
    with pytest.raises(DomainError):
        TriangularFuzzy(0.1, 0.2, 0.3).cut(nu)
    with pytest.raises(DomainError):
        PentagonalFuzzy(0.1, 0.2, 0.3, 0.4, 0.5).cut(nu)


@pytest.mark.parametrize("pts", [(0.2, 0.1, 0.3), (-0.1, 0.1, 0.2), (0.1, 0.2, 1.2)])
def test_construction_rejects_bad_vertices(pts):
    with pytest.raises(DomainError):
        TriangularFuzzy(*pts)


@pytest.mark.parametrize(
    "theta, expected",
    [(0.0, (0.0, 0.01, 0.02)), (0.01, (0.01, 0.02, 0.03)), (0.05, (0.05, 0.06, 0.07))],
)
def test_theta_shift_examples(theta, expected):
    got = theta_shift(TriangularFuzzy(0.02, 0.03, 0.04), theta)
    assert got.points == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("theta", [-0.01, 0.99])
def test_theta_shift_range(theta):
    with pytest.raises(DomainError):
        theta_shift(TriangularFuzzy(0.02, 0.03, 0.04), theta)


@given(triangulars(), levels, levels)
def test_triangular_nested(t, a, b):
    a, b = min(a, b), max(a, b)
    assert t.cut(a).contains(t.cut(b), tol=1e-15)


@given(pentagonals(), levels, levels)
def test_pentagonal_nested(t, a, b):
    a, b = min(a, b), max(a, b)
    assert t.cut(a).contains(t.cut(b), tol=1e-15)


@given(st.one_of(triangulars(), pentagonals()))
def test_core_is_a_point(t):
    core = t.cut(1.0)
    assert core.width == 0.0
    assert core.lo == pytest.approx(t.modal, abs=1e-15)


@given(triangulars(), levels)
def test_triangular_cut_is_linear(t, nu):
    cut = t.cut(nu)
    assert cut.lo == pytest.approx(t.p1 + (t.p2 - t.p1) * nu, abs=1e-15)
    assert cut.hi == pytest.approx(t.p3 - (t.p3 - t.p2) * nu, abs=1e-15)


@given(triangulars(), levels, st.floats(0.0, 1.0))
def test_shift_commutes_with_cut(t, nu, frac):
    spread = t.p3 - t.p1
    theta = frac * (1.0 - spread)
    shifted = theta_shift(t, theta).cut(nu)
    moved = t.cut(nu).shift(theta - t.p1)
    assert shifted.lo == pytest.approx(moved.lo, abs=1e-12)
    assert shifted.hi == pytest.approx(moved.hi, abs=1e-12)


def test_crisp_number_cuts_to_a_point():
    c = TriangularFuzzy.crisp(0.04)
    for nu in (0.0, 0.5, 1.0):
        assert c.cut(nu) == Interval(0.04, 0.04)


@given(st.one_of(triangulars(), pentagonals()))
def test_json_round_trip(t):
    assert fuzzy_from_json(json.loads(json.dumps(fuzzy_to_json(t)))) == t


def test_json_rejects_unknown_kind():
    with pytest.raises(DomainError):
        fuzzy_from_json({"kind": "gaussian", "points": [0.1]})
    with pytest.raises(DomainError):
        fuzzy_from_json({"kind": "triangular", "points": [0.1, 0.2]})
