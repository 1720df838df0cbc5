"""L-functions on G_m from Frobenius power sums.

L(X) = exp(sum_r s_r X^r / r).  A rational candidate in factored form
prod_j (1 - beta_j X)^(e_j) is checked through s_r = -sum_j e_j beta_j^r,
which is an exact integer identity.  Discovery expands the series with
Newton's recurrence and fits a minimal linear recurrence (Berlekamp-Massey)
to its coefficients, keeping at least two unused terms as a check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import sympy

from .cyclotomic import CycFrac, CycInt


# --- data ---------------------------------------------------------------------


def _is_cyc(x) -> bool:
    return isinstance(x, (CycInt, CycFrac))


def _normalize_entry(x):
    if isinstance(x, CycInt):
        value = x.as_integer()
        return value if value is not None else x
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ValueError(f"power sum {x} is not integral")
        return int(x)
    return int(x)


@dataclass(frozen=True)
class PowerSums:
    """s_1 .. s_R for one sheaf, 1-indexed through ``s(r)``."""

    values: tuple
    q: int | None = None
    label: str = ""

    def __post_init__(self):
        vals = tuple(_normalize_entry(v) for v in self.values)
        if not vals:
            raise ValueError("need at least one power sum")
        object.__setattr__(self, "values", vals)

    @property
    def R(self) -> int:
        return len(self.values)

    def s(self, r: int):
        return self.values[r - 1]

    @property
    def is_rational(self) -> bool:
        return not any(_is_cyc(v) for v in self.values)

    @property
    def value_order(self) -> int:
        N = 1
        for v in self.values:
            if _is_cyc(v):
                N = math.lcm(N, v.N)
        return N

    def truncate(self, R: int) -> "PowerSums":
        return PowerSums(self.values[:R], self.q, self.label)

    def __add__(self, other: "PowerSums") -> "PowerSums":
        return PowerSums(tuple(a + b for a, b in zip(self.values, other.values)), self.q, self.label)


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _trim(a: list) -> list:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


@dataclass(frozen=True)
class RationalFunctionQ:
    """num(X) / den(X) with constant terms 1.

    Coefficients are integers, or CycInt for sheaves with Kummer twists.
    ``factors`` is the factored form ((beta, e), ...) when every root is a
    rational integer; it is what verify_candidate consumes.
    """

    num: tuple
    den: tuple = (1,)
    factors: tuple | None = None

    def __post_init__(self):
        num = tuple(_trim(self.num))
        den = tuple(_trim(self.den))
        if num[0] != 1 or den[0] != 1:
            raise ValueError("numerator and denominator must have constant term 1")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if self.factors is not None:
            merged: dict[int, int] = {}
            for beta, e in self.factors:
                merged[int(beta)] = merged.get(int(beta), 0) + int(e)
            object.__setattr__(self, "factors", tuple(sorted((b, e) for b, e in merged.items() if e)))

    @classmethod
    def from_factors(cls, factors) -> "RationalFunctionQ":
        num, den = [1], [1]
        for beta, e in factors:
            for _ in range(abs(e)):
                if e > 0:
                    num = _poly_mul(num, [1, -beta])
                else:
                    den = _poly_mul(den, [1, -beta])
        return cls(tuple(num), tuple(den), tuple(factors))

    @classmethod
    def one(cls) -> "RationalFunctionQ":
        return cls((1,), (1,), ())

    @property
    def deg_num(self) -> int:
        return len(self.num) - 1

    @property
    def deg_den(self) -> int:
        return len(self.den) - 1

    @property
    def degree(self) -> int:
        """deg num - deg den."""
        return self.deg_num - self.deg_den

    @property
    def factor_count(self) -> int:
        return self.deg_num + self.deg_den

    @property
    def is_integral(self) -> bool:
        return not any(_is_cyc(c) for c in self.num + self.den)

    def power_sums(self, R: int) -> list:
        """s_1..s_R of this L-function."""
        if self.factors is not None:
            return [-sum(e * beta**r for beta, e in self.factors) for r in range(1, R + 1)]
        # X L'/L = sum_r s_r X^r, with roots of den counted negatively
        pn = _root_power_sums(self.num, R)
        pd = _root_power_sums(self.den, R)
        return [b - a for a, b in zip(pn, pd)]

    def series(self, R: int) -> list:
        """Coefficients c_0..c_R of num/den as a power series."""
        inv = [0] * (R + 1)
        inv[0] = 1
        for k in range(1, R + 1):
            inv[k] = -sum(self.den[i] * inv[k - i] for i in range(1, min(k, self.deg_den) + 1))
        return [sum(self.num[i] * inv[k - i] for i in range(0, min(k, self.deg_num) + 1)) for k in range(R + 1)]

    def __eq__(self, other):
        if not isinstance(other, RationalFunctionQ):
            return NotImplemented
        return list(self.num) == list(other.num) and list(self.den) == list(other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.factors is not None:
            def side(sign):
                parts = []
                for beta, e in self.factors:
                    if (e > 0) == (sign > 0):
                        term = "(1 - X)" if beta == 1 else f"(1 - {beta}X)" if beta > 0 else f"(1 + {-beta}X)"
                        parts.append(term + (f"^{abs(e)}" if abs(e) > 1 else ""))
                return "".join(parts) or "1"

            num = side(+1)
            return num if self.deg_den == 0 else f"{num}/{side(-1)}"
        if self.deg_den == 0:
            return f"({_poly_str(self.num)})"
        return f"({_poly_str(self.num)})/({_poly_str(self.den)})"

    def to_json(self) -> dict:
        def enc(c):
            return c.to_json() if isinstance(c, CycInt) else c

        out = {
            "numerator": [enc(c) for c in self.num],
            "denominator": [enc(c) for c in self.den],
            "degree": self.degree,
        }
        if self.factors is not None:
            out["factors"] = [[b, e] for b, e in self.factors]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RationalFunctionQ":
        def dec(c):
            return CycInt.from_json(c) if isinstance(c, dict) else int(c)

        factors = data.get("factors")
        return cls(
            tuple(dec(c) for c in data["numerator"]),
            tuple(dec(c) for c in data["denominator"]),
            None if factors is None else tuple((int(b), int(e)) for b, e in factors),
        )


def _poly_str(coeffs) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if i == 0 else "X" if i == 1 else f"X^{i}"
        terms.append(f"{c}{mono}" if i else f"{c}")
    return " + ".join(terms) or "0"


def _root_power_sums(poly, R: int) -> list:
    """p_r = sum beta^r over the factors (1 - beta X) of poly, by Newton's identities."""
    a = list(poly) + [0] * (R + 1)
    p = [0] * (R + 1)
    for r in range(1, R + 1):
        total = -r * a[r]
        for i in range(1, r):
            total = total - a[i] * p[r - i]
        p[r] = total
    return p[1:]


# --- series and checks ---------------------------------------------------------


def series_exp(s: PowerSums, R: int | None = None, check_integral: bool = True) -> list:
    """c_0..c_R of exp(sum s_r X^r / r), from r c_r = sum_{i<=r} s_i c_{r-i}.

    Rational power sums give Fractions; cyclotomic ones give CycFrac.
    With ``check_integral`` a non-integral coefficient raises ArithmeticError.
    """
    R = s.R if R is None else R
    if R > s.R:
        raise ValueError(f"need {R} power sums, have {s.R}")
    if s.is_rational:
        vals = [Fraction(v) for v in s.values]
        one = Fraction(1)
    else:
        N = s.value_order
        vals = [CycFrac.of(v, N) for v in s.values]
        one = CycFrac.of(1, N)
    c = [one]
    for r in range(1, R + 1):
        acc = vals[0] * c[r - 1]
        for i in range(2, r + 1):
            acc = acc + vals[i - 1] * c[r - i]
        c.append(acc * Fraction(1, r) if isinstance(acc, Fraction) else acc / r)
    if check_integral:
        for k, x in enumerate(c):
            den = x.denominator if isinstance(x, Fraction) else x.den
            if den != 1:
                raise ArithmeticError(f"series coefficient c_{k} = {x} is not integral")
    return c


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    first_failure: int | None = None
    expected: object = None
    got: object = None

    def __bool__(self):
        return self.ok


def verify_candidate(s: PowerSums, cand: RationalFunctionQ, R: int | None = None) -> VerifyResult:
    """Check s_r = -sum e_j beta_j^r for r = 1..R."""
    if cand.factors is None:
        raise ValueError("unfactored candidate: supply integer roots (beta, e)")
    R = s.R if R is None else R
    if R > s.R:
        raise ValueError(f"need {R} power sums, have {s.R}")
    for r in range(1, R + 1):
        want = -sum(e * beta**r for beta, e in cand.factors)
        got = s.s(r)
        if got != want:
            return VerifyResult(False, r, want, got)
    return VerifyResult(True)


# --- discovery -------------------------------------------------------------------


def _berlekamp_massey(seq: list, zero, one) -> tuple[list, int]:
    """Connection polynomial C (C[0] = 1) and length L of the shortest LFSR for seq."""
    C = [one]
    B = [one]
    L = 0
    m = 1
    b = one
    for k in range(len(seq)):
        d = seq[k]
        for i in range(1, L + 1):
            if i < len(C):
                d = d + C[i] * seq[k - i]
        if d == 0:
            m += 1
            continue
        coef = d * _inv(b)
        T = list(C)
        need = len(B) + m
        if len(C) < need:
            C = C + [zero] * (need - len(C))
        for i, bi in enumerate(B):
            C[i + m] = C[i + m] - coef * bi
        if 2 * L <= k:
            L = k + 1 - L
            B = T
            b = d
            m = 1
        else:
            m += 1
    return C, L


def _inv(x):
    return 1 / x if isinstance(x, Fraction) else x.inverse()


def _strip(poly: list) -> list:
    poly = list(poly)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _to_exact(c):
    if isinstance(c, Fraction):
        if c.denominator != 1:
            raise ArithmeticError(f"non-integral L-function coefficient {c}")
        return int(c)
    value = c.to_cycint()
    as_int = value.as_integer()
    return as_int if as_int is not None else value


def _integer_factors(num: Sequence[int], den: Sequence[int]):
    """((beta, e), ...) if num and den split into (1 - beta X) with integer beta, else None."""
    X = sympy.Symbol("X")
    out: dict[int, int] = {}
    for poly, sign in ((num, 1), (den, -1)):
        if len(poly) == 1:
            continue
        expr = sum(sympy.Integer(c) * X**i for i, c in enumerate(poly))
        const, parts = sympy.factor_list(expr)
        for fac, mult in parts:
            p = sympy.Poly(fac, X)
            if p.degree() != 1:
                return None
            a1, a0 = p.all_coeffs()  # a1 X + a0
            if a0 == 0 or a1 % a0:
                return None
            beta = int(-a1 / a0)
            out[beta] = out.get(beta, 0) + sign * int(mult)
    return tuple(out.items())


def discover_lfunction(s: PowerSums, max_deg: int, R: int | None = None, margin: int = 2) -> RationalFunctionQ:
    """The rational L with max(deg num, deg den) <= max_deg matching every supplied s_r.

    Uses s_1..s_R (all of them by default).  The fitted recurrence must
    leave at least ``margin`` series terms unused so that agreement is
    tested rather than forced.
    """
    R = s.R if R is None else R
    if R < 2 * max_deg + 2:
        raise ValueError(f"R = {R} is too small for max_deg = {max_deg} (need R >= {2 * max_deg + 2})")
    c = series_exp(s, R)
    if s.is_rational:
        zero, one = Fraction(0), Fraction(1)
    else:
        zero, one = CycFrac.of(0, s.value_order), CycFrac.of(1, s.value_order)
    C, L = _berlekamp_massey(c, zero, one)
    den = _strip(C[: L + 1] + [zero] * max(0, L + 1 - len(C)))
    num = []
    for k in range(L):
        acc = zero
        for i in range(0, min(k, len(den) - 1) + 1):
            acc = acc + den[i] * c[k - i]
        num.append(acc)
    num = _strip(num or [one])
    dn, dd = len(num) - 1, len(den) - 1
    if max(dn, dd) > max_deg or (R + 1) - 2 * L < margin:
        raise ValueError(
            f"no recurrence of degree <= {max_deg} fits {R} power sums with margin {margin} "
            f"(found deg num {dn}, deg den {dd}); increase R or max_deg"
        )
    num_x = tuple(_to_exact(x) for x in num)
    den_x = tuple(_to_exact(x) for x in den)
    factors = None
    if all(isinstance(x, int) for x in num_x + den_x):
        factors = _integer_factors(num_x, den_x)
    L_fn = RationalFunctionQ(num_x, den_x, factors)
    if factors is not None:
        check = verify_candidate(s, L_fn, R)
        if not check:
            raise ArithmeticError(f"discovered L fails the root-power identity at r={check.first_failure}")
    elif L_fn.series(R) != [_to_exact(x) for x in c]:
        raise ArithmeticError("discovered L does not reproduce the series")
    return L_fn


def swan_from_L(L: RationalFunctionQ, tame_at_zero: bool) -> int:
    """Swan conductor at infinity: deg num - deg den = -chi_c, valid when tame at 0."""
    if not tame_at_zero:
        raise ValueError("Swan extraction needs a sheaf tame at 0")
    return L.degree


# --- predictions -------------------------------------------------------------------


def predicted_exterior_L(n: int, q: int) -> RationalFunctionQ:
    """L(G_m, wedge^2 Kl_n, X) for trivial characters."""
    if n < 1:
        raise ValueError("n must be >= 1")
    m = n // 2
    factors = [(q ** (2 * i - 1), 1) for i in range(1, m + 1)]
    if n % 2 == 0:
        factors.append((q ** (2 * m), -1))
    return RationalFunctionQ.from_factors(factors)


def predicted_swan(n: int) -> int:
    if n < 2:
        return 0
    m = n // 2
    return m - 1 if n % 2 == 0 else m


def kl_L() -> RationalFunctionQ:
    """L(G_m, Kl_n, X) = 1 - X for every n."""
    return RationalFunctionQ.from_factors([(1, 1)])


def default_max_deg(n: int) -> int:
    return n * (n - 1) // 2 + 1


def default_R(max_deg: int) -> int:
    return 2 * max_deg + 4


# --- assembling power sums from a sheaf -------------------------------------------


KINDS = ("exterior", "symmetric", "tensor", "frob2", "kl")


def sheaf_power_sums(spec, R: int, kind: str = "exterior", method: str = "auto", jobs: int = 1) -> PowerSums:
    """PowerSums of one of the sheaves built from Kl(spec) for r = 1..R."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    rows = map_rows(spec, range(1, R + 1), kind, method, jobs)
    return PowerSums(tuple(rows), spec.field.q, f"{kind} Kl_{spec.n}")


def _one(args):
    from . import charsum

    spec, r, kind, method = args
    if kind == "row":
        return charsum.power_sum_row(spec, r, method)
    if kind == "kl":
        return charsum.kloosterman_power_sum(spec, r, method)
    if kind == "tensor":
        return charsum.tensor_power_sum(spec, r, method)
    if kind == "frob2":
        return charsum.frob2_power_sum(spec, r, method)
    return getattr(charsum.power_sum_row(spec, r, method), kind)


def map_rows(spec, rs, kind: str, method: str, jobs: int = 1) -> list:
    """Evaluate one power-sum kind (or "row" for all of them) at each r, in order."""
    work = [(spec, r, kind, method) for r in rs]
    if jobs <= 1 or len(work) <= 1:
        return [_one(w) for w in work]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one, work))
