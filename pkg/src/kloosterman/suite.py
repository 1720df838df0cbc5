"""Verification suite behind ``kloosterman verify-suite``.

Each check compares computed sums against an exact closed form and
returns a CheckResult; nothing here uses floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

from . import charsum as cs
from . import lfunction as lf
from .conductor import cross_check
from .finite_field import make_field

DEFAULT_GRID = ((3, 2), (3, 3), (3, 4), (3, 5), (5, 2), (5, 3), (5, 4), (7, 2), (7, 3), (2, 3), (2, 4))
KUMMER_TUPLES = {2: ((1, 2), (1, 3), (2, 2)), 3: ((1, 1, 1), (1, 2, 3), (2, 1, 1))}


@dataclass(frozen=True)
class CheckResult:
    check: str
    case: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.check, "case": self.case, "ok": self.ok, "detail": self.detail}


def _field_of(q: int):
    p, f = q, 1
    for cand in (2, 3, 5, 7, 11, 13):
        if q % cand == 0:
            p, f = cand, 0
            m = q
            while m % p == 0:
                m //= p
                f += 1
            break
    return make_field(p, f)


def check_tensor(q: int, n: int, rmax: int = 3, method: str = "enumerate") -> CheckResult:
    spec = cs.SheafSpec(_field_of(q), n)
    for r in range(1, rmax + 1):
        got = cs.tensor_power_sum(spec, r, method)
        want = cs.tensor_closed_form(n, q, r)
        if got != want:
            return CheckResult("tensor", f"q={q} n={n}", False, f"r={r}: computed {got}, closed form {want}")
    return CheckResult("tensor", f"q={q} n={n}", True, f"r<={rmax}")


def check_frob2(q: int, n: int, rmax: int = 2, method: str = "enumerate") -> CheckResult:
    spec = cs.SheafSpec(_field_of(q), n)
    for r in range(1, rmax + 1):
        got = cs.frob2_power_sum(spec, r, method)
        want = cs.frob2_closed_form(n, q, r)
        if got != want:
            return CheckResult("frob2", f"q={q} n={n}", False, f"r={r}: computed {got}, closed form {want}")
    return CheckResult("frob2", f"q={q} n={n}", True, f"r<={rmax}")


def check_exterior_L(q: int, n: int, method: str = "auto") -> CheckResult:
    cand = lf.predicted_exterior_L(n, q)
    R = 2 * cand.factor_count + 4
    sums = lf.sheaf_power_sums(cs.SheafSpec(_field_of(q), n), R, "exterior", method)
    res = lf.verify_candidate(sums, cand)
    detail = f"{cand} r<={R}" if res else f"r={res.first_failure}: computed {res.got}, predicted {res.expected}"
    return CheckResult("exterior_L", f"q={q} n={n}", res.ok, detail)


def check_swan(q: int, n: int, method: str = "auto") -> CheckResult:
    max_deg = lf.default_max_deg(n)
    sums = lf.sheaf_power_sums(cs.SheafSpec(_field_of(q), n), lf.default_R(max_deg), "exterior", method)
    L = lf.discover_lfunction(sums, max_deg)
    sw = lf.swan_from_L(L, tame_at_zero=True)
    want = lf.predicted_swan(n)
    return CheckResult("swan", f"q={q} n={n}", sw == want, f"L={L} swan={sw} predicted={want}")


def check_kl_L(q: int, n: int, rmax: int = 6, method: str = "auto") -> CheckResult:
    sums = lf.sheaf_power_sums(cs.SheafSpec(_field_of(q), n), rmax, "kl", method)
    res = lf.verify_candidate(sums, lf.kl_L())
    detail = "L = 1 - X" if res else f"r={res.first_failure}: s_r = {res.got}"
    return CheckResult("kl_L", f"q={q} n={n}", res.ok, detail)


def check_gauss(q: int, r: int) -> CheckResult:
    base = _field_of(q)
    M = q ** (2 * r) - 1
    for e in range(M):
        g, want = cs.base_change_gauss_sum(base, r, e)
        if g != want:
            return CheckResult("gauss", f"q={q} r={r}", False, f"e={e}: g={g!r}, expected {want}")
    return CheckResult("gauss", f"q={q} r={r}", True, f"{M} characters")


def check_counts(q: int, r: int) -> CheckResult:
    got = cs.count_characters(_field_of(q), r, verify=False)
    want = cs.character_counts_closed_form(q, r)
    return CheckResult("counts", f"q={q} r={r}", got == want, f"{got} vs {want}")


def check_chi_independence(q: int, chars: tuple, R: int = 5) -> CheckResult:
    n = len(chars)
    spec = cs.SheafSpec(_field_of(q), n, chars)
    L = lf.discover_lfunction(lf.sheaf_power_sums(spec, R, "exterior", "enumerate"), 1)
    sw = lf.swan_from_L(L, tame_at_zero=True)
    want = lf.predicted_swan(n)
    return CheckResult("chi_independence", f"q={q} chars={chars}", sw == want, f"L={L} swan={sw}")


def check_conductor(n: int, q: int) -> CheckResult:
    res = cross_check(n, q)
    rep = res.report
    detail = f"Sw={rep.swan_exterior} Ar={rep.artin_ad} log_q|gamma|={rep.gamma_log_q}" if rep else "; ".join(res.problems)
    return CheckResult("conductor", f"n={n} q={q}", res.ok, detail)


def plan(grid=DEFAULT_GRID) -> Iterator[tuple[str, Callable[[], CheckResult]]]:
    """(label, thunk) pairs in execution order."""
    qs = sorted({q for q, _ in grid})
    for q, n in grid:
        yield f"tensor q={q} n={n}", lambda q=q, n=n: check_tensor(q, n)
        yield f"frob2 q={q} n={n}", lambda q=q, n=n: check_frob2(q, n)
    for q, n in grid:
        yield f"exterior_L q={q} n={n}", lambda q=q, n=n: check_exterior_L(q, n)
        yield f"swan q={q} n={n}", lambda q=q, n=n: check_swan(q, n)
        yield f"kl_L q={q} n={n}", lambda q=q, n=n: check_kl_L(q, n)
    for q in qs:
        for r in itertools.count(1):
            if q ** (2 * r) > 625:
                break
            yield f"gauss q={q} r={r}", lambda q=q, r=r: check_gauss(q, r)
        for r in itertools.count(1):
            if q ** (2 * r) > 2401:
                break
            yield f"counts q={q} r={r}", lambda q=q, r=r: check_counts(q, r)
    if 5 in qs:
        for n, tuples in KUMMER_TUPLES.items():
            for chars in tuples:
                yield f"chi_independence q=5 chars={chars}", lambda chars=chars: check_chi_independence(5, chars)
    for n in (2, 3):
        for q in (3, 5):
            if q in qs:
                yield f"conductor n={n} q={q}", lambda n=n, q=q: check_conductor(n, q)


def run(grid=DEFAULT_GRID, stop_first: bool = False, sign_bug: bool = False) -> Iterator[CheckResult]:
    for label, thunk in plan(grid):
        check, case = label.split(" ", 1)
        try:
            if sign_bug:
                with cs.injected_sign_bug():
                    res = thunk()
            else:
                res = thunk()
        except (ArithmeticError, ValueError) as exc:
            res = CheckResult(check, case, False, f"{type(exc).__name__}: {exc}")
        yield res
        if stop_first and not res.ok:
            return
