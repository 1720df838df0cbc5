from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from kloosterman import charsum as cs
from kloosterman.cyclotomic import CycInt
from kloosterman.finite_field import extend, make_field


def spec(F, n, chars=(), b=1):
    return cs.SheafSpec(F, n, chars, b)


# --- characters ------------------------------------------------------------------


@pytest.mark.parametrize("p,f,r", [(3, 1, 1), (3, 1, 2), (2, 2, 1), (5, 1, 1)])
def test_additive_character(p, f, r):
    tw = extend(make_field(p, f), r)
    psi = cs.AdditiveChar(tw)
    elems = list(tw.ext.elements())
    for x in elems[:9]:
        for y in elems[:9]:
            assert psi(x + y) == psi(x) * psi(y)
    assert any(psi(x) != 1 for x in elems)
    assert psi.full_sum() == 0


def test_additive_twist_must_be_unit(F3):
    with pytest.raises(ValueError):
        cs.AdditiveChar(extend(F3, 1), F3.zero)


@pytest.mark.parametrize("p,f", [(3, 1), (5, 1), (3, 2), (2, 2), (7, 1)])
def test_mult_character_at_minus_one(p, f):
    F = make_field(p, f)
    for e in range(F.q - 1):
        rho = cs.MultChar(F, e)
        # rho(-1) = zeta_{q-1}^(e (q-1)/2) = (-1)^e
        want = 1 if p == 2 else (-1) ** e
        assert rho.at_minus_one() == want
        assert rho.is_trivial == (e == 0)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([(3, 2), (5, 1), (7, 1), (2, 3)]), st.data())
def test_mult_character_is_multiplicative(pf, data):
    F = make_field(*pf)
    e = data.draw(st.integers(0, F.q - 2))
    u = F.element(data.draw(st.integers(1, F.q - 1)))
    v = F.element(data.draw(st.integers(1, F.q - 1)))
    rho = cs.MultChar(F, e)
    assert rho(u * v) == rho(u) * rho(v)


def test_sheaf_spec_validation(F3, F5):
    with pytest.raises(ValueError):
        cs.SheafSpec(F3, 0)
    with pytest.raises(ValueError):
        cs.SheafSpec(F3, 2, (1,))
    with pytest.raises(ValueError, match="base mismatch"):
        cs.SheafSpec(F3, 1, (cs.MultChar(F5, 1),))
    assert spec(F5, 2, (1, 2)).value_order == 20
    assert spec(F3, 2).is_trivial


# --- trace functions ------------------------------------------------------------------


def test_rank_one_is_psi(F5):
    tw = extend(F5, 1)
    psi = cs.AdditiveChar(tw)
    for a in F5.units():
        assert cs.kloosterman_trace(spec(F5, 1), tw, a) == psi(a)


def test_kl2_over_f3(F3):
    tw = extend(F3, 1)
    s = spec(F3, 2)
    assert cs.kloosterman_trace(s, tw, F3.coerce(1)) == 1
    assert cs.kloosterman_trace(s, tw, F3.coerce(2)) == -2
    table = cs.kloosterman_all(s, tw)
    assert {a.index: v.as_integer() for a, v in table.items()} == {1: 1, 2: -2}


def test_trace_errors(F3, F5):
    tw = extend(F3, 1)
    with pytest.raises(ValueError):
        cs.kloosterman_trace(spec(F3, 2), tw, F3.zero)
    with pytest.raises(ValueError, match="base mismatch"):
        cs.kloosterman_trace(spec(F5, 2), tw, F3.one)


@pytest.mark.parametrize("p,r,n", [(3, 1, 3), (2, 2, 2), (2, 3, 2), (5, 1, 3), (3, 2, 2)])
def test_table_matches_oracle_pointwise(p, r, n):
    """Package traces against complex brute force, compared as multisets (field models differ)."""
    tw = extend(make_field(p), r)
    ours = Counter(cs.kloosterman_table(spec(tw.base, n), tw).value_at_log(j).approx() for j in range(tw.Q - 1))
    F = oracle.GF(p, r)
    theirs = Counter(oracle.kl_trace(F, n, a) for a in F.units())
    key = lambda c: (round(c.real, 6) + 0.0, round(c.imag, 6) + 0.0)
    assert sorted(map(key, ours.elements())) == sorted(map(key, theirs.elements()))


# --- power sums ------------------------------------------------------------------


ORACLE_CASES = [(3, 1, 1), (3, 1, 2), (3, 1, 3), (3, 1, 4), (2, 1, 3), (2, 2, 2), (2, 2, 3), (5, 1, 2), (5, 1, 3), (3, 2, 2), (7, 1, 2)]


@pytest.mark.parametrize("p,r,n", ORACLE_CASES)
@pytest.mark.parametrize("method", ["naive", "enumerate", "structured"])
def test_tensor_against_oracle(p, r, n, method):
    if method == "naive" and (p**r - 1) ** n > 10**5:
        pytest.skip("naive summation too large")
    assert cs.tensor_power_sum(spec(make_field(p), n), r, method) == oracle.tensor_sum(p, r, n)


@pytest.mark.parametrize("p,r,n", [(3, 1, 1), (3, 1, 2), (3, 1, 3), (2, 1, 2), (2, 1, 3), (2, 2, 2), (5, 1, 2), (3, 2, 1)])
@pytest.mark.parametrize("method", ["naive", "enumerate", "structured"])
def test_frob2_against_oracle(p, r, n, method):
    assert cs.frob2_power_sum(spec(make_field(p), n), r, method) == oracle.frob2_sum(p, r, n)


def test_worked_values(F3):
    row = cs.power_sum_row(spec(F3, 2), 1)
    assert (row.tensor, row.frob2, row.exterior, row.symmetric) == (5, -7, 6, -1)
    row = cs.power_sum_row(spec(F3, 3), 1)
    assert (row.tensor, row.frob2, row.exterior) == (-13, -7, -3)


def test_closed_forms_substitution():
    assert cs.tensor_closed_form(2, 3, 1) == -1 - 3 + 9
    assert cs.tensor_closed_form(3, 3, 1) == -1 - 3 - 9
    assert cs.tensor_closed_form(3, 2, 1) == -1 - 2 - 4 + 8
    assert cs.frob2_closed_form(2, 3, 1) == -1 + 3 - 9
    assert cs.exterior_closed_form(2, 3, 1) == -3 + 9
    assert cs.exterior_closed_form(3, 3, 1) == -3
    for n in range(1, 7):
        for q in (2, 3, 4, 5, 7, 9):
            for r in (1, 2, 3):
                t, f = cs.tensor_closed_form(n, q, r), cs.frob2_closed_form(n, q, r)
                assert (t - f) % 2 == 0
                assert (t - f) // 2 == cs.exterior_closed_form(n, q, r)


@pytest.mark.parametrize("q", [2, 3, 5, 7])
@pytest.mark.parametrize("r", [1, 2])
def test_rank_one_frob2_closed_form(q, r):
    got = cs.frob2_power_sum(spec(make_field(q), 1), r, "naive")
    assert got == cs.frob2_closed_form(1, q, r)
    # psi(Tr_{k_2r/k} a) = psi(2 Tr a): -1 for odd q, all ones when p = 2
    assert got == (-1 if q % 2 else q**r - 1)


def test_verify_flag_raises_on_mismatch(F3):
    with cs.injected_sign_bug():
        with pytest.raises(cs.ClosedFormMismatch):
            cs.frob2_power_sum(spec(F3, 2), 1, verify=True)
    assert cs.frob2_power_sum(spec(F3, 2), 1, verify=True) == -7


def test_structured_route_needs_trivial_characters(F5):
    with pytest.raises(ValueError):
        cs.tensor_power_sum(spec(F5, 2, (1, 2)), 1, "structured")


def test_parity_failure_is_reported():
    with pytest.raises(ArithmeticError, match="parity"):
        cs._halve(7, "exterior square")
    with pytest.raises(ArithmeticError, match="parity"):
        cs._halve(CycInt(5, [1, 0, 0, 0, 0]), "exterior square")


def test_kummer_sums_are_integers_when_product_is_trivial(F5):
    row = cs.power_sum_row(spec(F5, 2, (1, 3)), 2, with_kl=True)
    assert row.exterior == 25**2 - 25
    assert row.tensor + 0 == row.exterior + row.symmetric


# --- Gauss sums and counts -----------------------------------------------------------


def test_gauss_trivial_character(F9):
    tw = extend(F9, 1)
    assert cs.gauss_sum(cs.MultChar(F9, 0), cs.AdditiveChar(tw)) == -1


def test_base_change_gauss_examples(F3):
    for e in range(8):
        g, want = cs.base_change_gauss_sum(F3, 1, e, verify=True)
        rho = cs.MultChar(make_field(3, 2), e)
        if e % 4:
            assert g == 3 * rho.at_minus_one()
        else:
            assert g == -1
    g, _ = cs.base_change_gauss_sum(F3, 1, 4)
    assert g == -1  # rho of order 2, rho^2 = 1


@pytest.mark.parametrize("p,k", [(3, 2), (5, 1), (2, 3), (7, 1)])
def test_gauss_values_against_oracle(p, k):
    F = make_field(p, k)
    psi = cs.AdditiveChar(extend(F, 1))
    ours = []
    for e in range(F.q - 1):
        z = cs.gauss_sum(cs.MultChar(F, e), psi).approx()
        ours.append((round(z.real, 6) + 0.0, round(z.imag, 6) + 0.0))
    theirs = []
    for e in range(F.q - 1):
        z, _, _ = oracle.gauss(p, k, e)
        theirs.append((round(z.real, 6) + 0.0, round(z.imag, 6) + 0.0))
    assert sorted(ours) == sorted(theirs)


def test_character_counts(F2, F3):
    assert cs.count_characters(F3, 1) == (2, 2, 4)
    assert cs.count_characters(F2, 1) == (1, 2, 0)
    for base, r in [(F3, 2), (F2, 3), (make_field(5), 1)]:
        c = cs.count_characters(base, r)
        assert sum(c) == base.q ** (2 * r) - 1
