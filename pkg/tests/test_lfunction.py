from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kloosterman import charsum as cs
from kloosterman import lfunction as lf
from kloosterman.finite_field import make_field


def ext_sums(q, n, R):
    return lf.sheaf_power_sums(cs.SheafSpec(make_field(q), n), R, "exterior")


def test_series_examples():
    assert lf.series_exp(lf.PowerSums((-1,) * 5)) == [1, -1, 0, 0, 0, 0]
    s = lf.PowerSums(tuple(-(3**r) + 9**r for r in range(1, 4)))
    assert lf.series_exp(s) == [1, 6, 54, 486]
    assert lf.series_exp(lf.PowerSums((0, 0, 0))) == [1, 0, 0, 0]


def test_series_integrality_check():
    with pytest.raises(ArithmeticError):
        lf.series_exp(lf.PowerSums((1, 0)))  # exp(X) has c_2 = 1/2
    assert lf.series_exp(lf.PowerSums((1, 0)), check_integral=False)[2] == Fraction(1, 2)


def test_verify_candidate_examples():
    assert lf.verify_candidate(ext_sums(3, 2, 6), lf.RationalFunctionQ.from_factors([(3, 1), (9, -1)]))
    assert lf.verify_candidate(ext_sums(3, 3, 6), lf.RationalFunctionQ.from_factors([(3, 1)]))
    bad = lf.verify_candidate(ext_sums(3, 2, 6), lf.RationalFunctionQ.from_factors([(9, 1)]))
    assert not bad and bad.first_failure == 1


def test_verify_needs_factors():
    with pytest.raises(ValueError, match="unfactored"):
        lf.verify_candidate(lf.PowerSums((-1,)), lf.RationalFunctionQ((1, -1)))


def test_discover_examples():
    L = lf.discover_lfunction(ext_sums(3, 4, 8), 3)
    assert L == lf.RationalFunctionQ.from_factors([(3, 1), (27, 1), (81, -1)])
    assert lf.discover_lfunction(lf.PowerSums((-1,) * 6), 2) == lf.kl_L()
    tensor = lf.sheaf_power_sums(cs.SheafSpec(make_field(3), 2), 8, "tensor")
    assert lf.discover_lfunction(tensor, 3).factors == ((1, 1), (3, 1), (9, -1))


def test_discover_refuses_without_margin():
    with pytest.raises(ValueError):
        lf.discover_lfunction(ext_sums(3, 4, 5), 3)  # R too small for max_deg
    # a degree-3 recurrence cannot be certified from 8 terms with max_deg 1
    with pytest.raises(ValueError, match="no recurrence"):
        lf.discover_lfunction(ext_sums(3, 4, 8), 1)


def test_swan_from_L():
    assert lf.swan_from_L(lf.predicted_exterior_L(2, 3), True) == 0
    assert lf.swan_from_L(lf.predicted_exterior_L(3, 3), True) == 1
    assert lf.swan_from_L(lf.kl_L(), True) == 1
    with pytest.raises(ValueError):
        lf.swan_from_L(lf.kl_L(), False)


def test_predictions():
    assert lf.predicted_exterior_L(4, 3) == lf.RationalFunctionQ.from_factors([(3, 1), (27, 1), (81, -1)])
    assert lf.predicted_exterior_L(3, 7).factors == ((7, 1),)
    assert lf.predicted_exterior_L(2, 5).factors == ((5, 1), (25, -1))
    assert lf.predicted_exterior_L(1, 5) == lf.RationalFunctionQ.one()
    assert [lf.predicted_swan(n) for n in range(1, 8)] == [0, 0, 1, 1, 2, 2, 3]


def test_json_round_trip():
    L = lf.predicted_exterior_L(4, 3)
    data = L.to_json()
    assert data["factors"] == [[3, 1], [27, 1], [81, -1]]
    assert lf.RationalFunctionQ.from_json(data) == L
    assert lf.RationalFunctionQ.from_json(data).factors == L.factors


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-9, 9).filter(bool), st.sampled_from([-1, 1, 2])), max_size=3))
def test_power_sums_of_factored_and_expanded_agree(factors):
    L = lf.RationalFunctionQ.from_factors(factors)
    bare = lf.RationalFunctionQ(L.num, L.den)
    assert L.power_sums(6) == bare.power_sums(6)
    series = lf.series_exp(lf.PowerSums(tuple(L.power_sums(6)) or (0,)))
    assert [int(c) for c in series] == L.series(6)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.sampled_from([2, 3, 4, 5, 7]))
def test_discovery_is_identity_on_predictions(n, q):
    L = lf.predicted_exterior_L(n, q)
    max_deg = lf.default_max_deg(n)
    s = lf.PowerSums(tuple(L.power_sums(lf.default_R(max_deg))))
    found = lf.discover_lfunction(s, max_deg)
    assert found == L and found.factors == L.factors


def test_kummer_discovery_has_cyclotomic_coefficients():
    F5 = make_field(5)
    s = lf.sheaf_power_sums(cs.SheafSpec(F5, 3, (1, 1, 1)), 5, "exterior")
    assert not s.is_rational
    L = lf.discover_lfunction(s, 1)
    assert L.factors is None and not L.is_integral
    assert lf.swan_from_L(L, True) == 1
    assert lf.RationalFunctionQ.from_json(L.to_json()) == L
