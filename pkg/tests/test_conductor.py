from fractions import Fraction

import pytest

from kloosterman.conductor import conductor_report, cross_check


def test_examples():
    rep = conductor_report(2, 3, 1)
    assert (rep.artin_ad, rep.gamma_log_q) == (12, 6)
    rep = conductor_report(3, 5, 2)
    assert (rep.artin_ad, rep.gamma_log_q) == (24, 12)


def test_inconsistent_swan_rejected():
    with pytest.raises(ValueError):
        conductor_report(2, 3, 0)


def test_even_characteristic_rejected():
    with pytest.raises(ValueError):
        conductor_report(2, 4, 1)
    with pytest.raises(ValueError):
        conductor_report(2, 6, 1)


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("q", [3, 5, 9])
def test_invariants(n, q):
    rep = conductor_report(n, q, n - 1)
    assert rep.check() == []
    assert rep.swan_ad == n
    assert rep.dim_ad == 2 * n * n + n == (2 * n) * (2 * n + 1) // 2
    assert rep.artin_ad == 2 * n * n + 2 * n and rep.artin_ad % 2 == 0
    assert rep.gamma_log_q == n * n + n == rep.artin_ad // 2
    assert rep.formal_degree_ratio_factor == Fraction(1, 2)
    assert rep.conjecture_constant == Fraction(1, 2)
    assert rep == conductor_report(n, q, n - 1)


def test_json_has_every_field():
    data = conductor_report(2, 3, 1).to_json()
    for key in ("swan_exterior", "swan_tau", "swan_ad", "dim_ad", "artin_ad", "gamma_log_q", "s_group_order", "dim_rho"):
        assert key in data
    assert data["conjecture_constant"] == "1/2"


def test_cross_check_small():
    res = cross_check(2, 3)
    assert res.ok and res.report.swan_exterior == 1
    assert res.L.factors == ((3, 1), (27, 1), (81, -1))
