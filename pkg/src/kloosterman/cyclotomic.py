"""Exact arithmetic in Z[zeta_N].

A CycInt stores a length-N integer vector over the group ring of mu_N; the
value is sum coeffs[i] * zeta_N**i.  Addition is plain vector addition and
multiplication is cyclic convolution.  The representation is redundant
(the kernel is the ideal generated by Phi_N), so reduction modulo Phi_N only
happens when comparing or extracting.
"""

from __future__ import annotations

import functools
import math
from typing import Iterable

import numpy as np


def _mobius(n: int) -> int:
    result = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    if n > 1:
        result = -result
    return result


def _pmul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pdivexact(a: list[int], b: list[int]) -> list[int]:
    """Exact division of integer polynomials with monic divisor b."""
    a = list(a)
    db = len(b) - 1
    if b[-1] != 1:
        raise ValueError("divisor must be monic")
    quot = [0] * (len(a) - db)
    for k in range(len(a) - db - 1, -1, -1):
        c = a[k + db]
        quot[k] = c
        if c:
            for i, bc in enumerate(b):
                a[k + i] -= c * bc
    if any(a[:db]):
        raise ArithmeticError("division is not exact")
    return quot


@functools.lru_cache(maxsize=None)
def cyclotomic_polynomial(N: int) -> tuple[int, ...]:
    """Phi_N as an integer coefficient tuple (lowest degree first).

    Uses Phi_N = prod_{d | N} (x^d - 1)^{mu(N/d)}: multiply the factors
    with mu = +1, then divide exactly by those with mu = -1.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    num = [1]
    den = [1]
    for d in range(1, N + 1):
        if N % d:
            continue
        mu = _mobius(N // d)
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = _pmul(num, factor)
        elif mu == -1:
            den = _pmul(den, factor)
    # den is +-monic; normalise sign
    if den[-1] == -1:
        den = [-c for c in den]
        num = [-c for c in num]
    phi = _pdivexact(num, den)
    xN = [-1] + [0] * (N - 1) + [1]
    _pdivexact(xN, phi)  # Phi_N | x^N - 1
    return tuple(phi)


def reduce_mod_phi(coeffs: Iterable[int], N: int) -> list[int]:
    """Canonical representative of sum c_i zeta^i: remainder mod Phi_N, length phi(N)."""
    phi = cyclotomic_polynomial(N)
    deg = len(phi) - 1
    a = [int(c) for c in coeffs]
    terms = [(i, c) for i, c in enumerate(phi[:-1]) if c]
    for k in range(len(a) - 1, deg - 1, -1):
        c = a[k]
        if c:
            a[k] = 0
            shift = k - deg
            for i, pc in terms:
                a[shift + i] -= c * pc
    return a[:deg] + [0] * max(0, deg - len(a))


class CycInt:
    """Element of Z[zeta_N] in group-ring form."""

    __slots__ = ("N", "coeffs", "_canon")

    def __init__(self, N: int, coeffs: Iterable[int] | None = None):
        if N < 1:
            raise ValueError("N must be >= 1")
        self.N = N
        if coeffs is None:
            vec = [0] * N
        else:
            vec = [int(c) for c in coeffs]
            if len(vec) != N:
                raise ValueError(f"expected {N} coefficients, got {len(vec)}")
        self.coeffs = tuple(vec)
        self._canon = None

    @classmethod
    def from_int(cls, value: int, N: int = 1) -> "CycInt":
        vec = [0] * N
        vec[0] = int(value)
        return cls(N, vec)

    @classmethod
    def from_counts(cls, counts, N: int) -> "CycInt":
        return cls(N, [int(c) for c in counts])

    # ring structure
    def _coerce(self, other) -> "CycInt":
        if isinstance(other, CycInt):
            if other.N == self.N:
                return other
            raise ValueError(f"order mismatch: {self.N} vs {other.N}; lift first")
        if isinstance(other, (int, np.integer)):
            return CycInt.from_int(int(other), self.N)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.N, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.N, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.N, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return CycInt(self.N, [a * int(other) for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        N = self.N
        out = [0] * N
        nz = [(j, b) for j, b in enumerate(other.coeffs) if b]
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in nz:
                    out[(i + j) % N] += a * b
        return CycInt(N, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = CycInt.from_int(1, self.N)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # canonical form
    def canonical(self) -> tuple[int, ...]:
        if self._canon is None:
            self._canon = tuple(reduce_mod_phi(self.coeffs, self.N))
        return self._canon

    def is_zero(self) -> bool:
        return not any(self.canonical())

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = CycInt.from_int(int(other), self.N)
        if not isinstance(other, CycInt):
            return NotImplemented
        if other.N != self.N:
            M = math.lcm(self.N, other.N)
            return lift_order(self, M) == lift_order(other, M)
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.N, self.canonical()))

    def as_integer(self) -> int | None:
        """The rational integer equal to this element, or None."""
        canon = self.canonical()
        if any(canon[1:]):
            return None
        return canon[0] if canon else 0

    def is_integer(self) -> bool:
        return self.as_integer() is not None

    def divide_exact(self, d: int) -> "CycInt":
        """Quotient by a rational integer, raising if it leaves Z[zeta_N]."""
        canon = self.canonical()
        if any(c % d for c in canon):
            raise ArithmeticError(f"not divisible by {d} in Z[zeta_{self.N}]")
        vec = [c // d for c in canon] + [0] * (self.N - len(canon))
        return CycInt(self.N, vec)

    def galois(self, k: int) -> "CycInt":
        """sigma_k: zeta -> zeta^k, for k prime to N."""
        if math.gcd(k, self.N) != 1:
            raise ValueError(f"{k} is not a unit mod {self.N}")
        vec = [0] * self.N
        for i, c in enumerate(self.coeffs):
            vec[(i * k) % self.N] += c
        return CycInt(self.N, vec)

    def cofactor(self) -> "CycInt":
        """Product of the nontrivial conjugates, so that self * cofactor() = norm()."""
        out = CycInt.from_int(1, self.N)
        for k in range(2, self.N):
            if math.gcd(k, self.N) == 1:
                out = out * self.galois(k)
        return out

    def norm(self) -> int:
        value = (self * self.cofactor()).as_integer()
        assert value is not None
        return value

    def approx(self) -> complex:
        """Complex embedding zeta_N -> exp(2 pi i / N).  Approximate; display only."""
        return complex(sum(c * np.exp(2j * np.pi * k / self.N) for k, c in enumerate(self.coeffs)))

    def to_json(self) -> dict:
        out = {"N": self.N, "coeffs": list(self.coeffs)}
        value = self.as_integer()
        if value is not None:
            out["as_integer"] = value
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CycInt":
        return cls(int(data["N"]), data["coeffs"])

    def __repr__(self):
        value = self.as_integer()
        if value is not None:
            return f"CycInt({value})"
        terms = [f"{c}*z{self.N}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "CycInt(" + " + ".join(terms) + ")"


def root_of_unity(N: int, k: int = 1) -> CycInt:
    """zeta_N ** k."""
    vec = [0] * N
    vec[k % N] = 1
    return CycInt(N, vec)


def lift_order(x: CycInt, M: int) -> CycInt:
    """Image of x under Z[zeta_N] -> Z[zeta_M], zeta_N -> zeta_M^(M/N)."""
    if M % x.N:
        raise ValueError(f"{x.N} does not divide {M}")
    step = M // x.N
    vec = [0] * M
    for i, c in enumerate(x.coeffs):
        vec[i * step] = c
    return CycInt(M, vec)


def as_integer(x: CycInt) -> int | None:
    return x.as_integer()


class CycFrac:
    """Element of Q(zeta_N): a CycInt numerator over a positive integer denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: CycInt, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        canon = num.canonical()
        g = functools.reduce(math.gcd, canon, den)
        if g > 1:
            num = CycInt(num.N, [c // g for c in canon] + [0] * (num.N - len(canon)))
            den //= g
        self.num = num
        self.den = den

    @classmethod
    def of(cls, x, N: int) -> "CycFrac":
        if isinstance(x, CycFrac):
            return x
        if isinstance(x, CycInt):
            return cls(lift_order(x, N) if x.N != N else x)
        return cls(CycInt.from_int(int(x), N))

    @property
    def N(self) -> int:
        return self.num.N

    def __add__(self, other):
        other = CycFrac.of(other, self.N)
        return CycFrac(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return CycFrac(-self.num, self.den)

    def __sub__(self, other):
        return self + (-CycFrac.of(other, self.N))

    def __rsub__(self, other):
        return CycFrac.of(other, self.N) - self

    def __mul__(self, other):
        other = CycFrac.of(other, self.N)
        return CycFrac(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "CycFrac":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        cof = self.num.cofactor()
        nrm = (self.num * cof).as_integer()
        return CycFrac(cof * self.den, nrm)

    def __truediv__(self, other):
        return self * CycFrac.of(other, self.N).inverse()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, CycInt, CycFrac)):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        return hash((self.N, self.num.canonical(), self.den))

    def to_cycint(self) -> CycInt:
        """The value as an algebraic integer; raises if it is not one."""
        if self.den != 1:
            raise ArithmeticError("value is not an algebraic integer in this basis")
        return self.num

    def __repr__(self):
        return f"CycFrac({self.num!r} / {self.den})"
