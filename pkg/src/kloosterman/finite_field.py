"""Explicit finite fields F_{p^f} and extension towers.

Every field is modelled as F_p[x]/(P) where P is the first monic irreducible
polynomial of its degree (ordered by the integer sum c_i p^i of its lower
coefficients).  Elements are coefficient tuples of length ``degree`` over
F_p; the integer encoding ``sum c_i p^i`` gives a total order used for all
deterministic choices (modulus, generator, embeddings).
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import cache as _cache

DEFAULT_MAX_ENUM = 2**24
_ENV_MAX_ENUM = "KLOOSTERMAN_MAX_ENUM"


class EnumerationLimitError(ValueError):
    """Raised when a computation would enumerate more elements than allowed."""


_max_enum_override: int | None = None


def set_max_enum(value: int | None) -> None:
    """Process-wide ceiling; None falls back to the environment, then the default."""
    global _max_enum_override
    if value is not None and value < 1:
        raise ValueError("enumeration ceiling must be positive")
    _max_enum_override = value


def max_enum_default() -> int:
    if _max_enum_override is not None:
        return _max_enum_override
    value = os.environ.get(_ENV_MAX_ENUM)
    return int(value) if value else DEFAULT_MAX_ENUM


def check_enum(size: int, max_enum: int | None = None, what: str = "field") -> None:
    limit = max_enum_default() if max_enum is None else max_enum
    if size > limit:
        raise EnumerationLimitError(
            f"enumeration bound exceeded: {what} of size {size} > {limit}"
        )


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# --- polynomials over F_p (lists of ints, lowest degree first) -------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and a:
        shift = len(a) - 1 - dm
        factor = a[-1] * inv_lead % p
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def poly_mulmod(a, b, m, p) -> list[int]:
    return poly_mod(poly_mul(a, b, p), m, p)


def poly_powmod(a, e: int, m, p) -> list[int]:
    result = [1]
    base = poly_mod(a, m, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, m, p)
        base = poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def poly_gcd(a, b, p) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p.

    P of degree f is irreducible iff x^{p^f} = x mod P and
    gcd(x^{p^d} - x, P) = 1 for every proper divisor d of f.
    """
    f = len(modulus) - 1
    if f < 1:
        return False
    if f == 1:
        return True
    powers = {}
    cur = [0, 1]
    for d in range(1, f + 1):
        cur = poly_powmod(cur, p, modulus, p)
        powers[d] = cur
    xpf = powers[f]
    if _trim(list(xpf)) != [0, 1]:
        return False
    for d in divisors(f)[:-1]:
        diff = list(powers[d]) + [0] * max(0, 2 - len(powers[d]))
        diff[1] -= 1
        if len(poly_gcd(diff, modulus, p)) > 1:
            return False
    return True


def first_irreducible(p: int, f: int) -> tuple[int, ...]:
    """First monic irreducible of degree f; lower coefficients ordered by sum c_i p^i."""
    for code in range(p**f):
        low = [(code // p**i) % p for i in range(f)]
        cand = low + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError(f"no irreducible polynomial of degree {f} over F_{p}")


# --- fields ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FqElement:
    field: "FqField"
    coeffs: tuple[int, ...]

    @property
    def index(self) -> int:
        return self.field.encode(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other):
        return self.field.add(self, self.field.coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.field.sub(self, self.field.coerce(other))

    def __rsub__(self, other):
        return self.field.sub(self.field.coerce(other), self)

    def __neg__(self):
        return self.field.neg(self)

    def __mul__(self, other):
        return self.field.mul(self, self.field.coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.field.mul(self, self.field.inv(self.field.coerce(other)))

    def __pow__(self, e: int):
        return self.field.pow(self, e)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.coerce(other)
        if not isinstance(other, FqElement):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((id(self.field), self.coeffs))

    def __repr__(self):
        return f"F{self.field.q}({self.index})"


class FqField:
    """The field F_q, q = p^f, with a fixed modulus and multiplicative generator.

    Immutable after construction; the power and log tables are built lazily
    and cached on the instance.
    """

    def __init__(self, p: int, f: int, modulus: Sequence[int], generator_index: int):
        self.p = p
        self.f = f
        self.q = p**f
        self.modulus = tuple(modulus)
        self._gen_index = generator_index
        self._powers = None
        self._log = None
        self._trace_vec = None

    def __reduce__(self):
        # unpickle to the cached instance so identity checks keep working across processes
        return (_build_field, (self.p, self.f))

    def __repr__(self):
        return f"FqField(p={self.p}, f={self.f}, modulus={list(self.modulus)})"

    # encoding
    def encode(self, coeffs: Sequence[int]) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(coeffs))

    def decode(self, index: int) -> tuple[int, ...]:
        return tuple((index // self.p**i) % self.p for i in range(self.f))

    def element(self, value) -> FqElement:
        if isinstance(value, FqElement):
            if value.field is not self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, int):
            return FqElement(self, self.decode(value % self.q))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.f:
            coeffs = poly_mod(coeffs, self.modulus, self.p)
        coeffs = list(coeffs) + [0] * (self.f - len(coeffs))
        return FqElement(self, tuple(coeffs))

    def coerce(self, value) -> FqElement:
        """Integers are read as elements of the prime field, not as encodings."""
        if isinstance(value, int):
            return FqElement(self, (value % self.p,) + (0,) * (self.f - 1))
        return self.element(value)

    @property
    def zero(self) -> FqElement:
        return FqElement(self, (0,) * self.f)

    @property
    def one(self) -> FqElement:
        return self.coerce(1)

    @property
    def generator(self) -> FqElement:
        return self.element(self._gen_index)

    def elements(self) -> Iterator[FqElement]:
        for i in range(self.q):
            yield self.element(i)

    def units(self) -> Iterator[FqElement]:
        for i in range(1, self.q):
            yield self.element(i)

    # arithmetic
    def add(self, a: FqElement, b: FqElement) -> FqElement:
        return FqElement(self, tuple((x + y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a: FqElement, b: FqElement) -> FqElement:
        return FqElement(self, tuple((x - y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a: FqElement) -> FqElement:
        return FqElement(self, tuple(-x % self.p for x in a.coeffs))

    def mul(self, a: FqElement, b: FqElement) -> FqElement:
        return self.element(poly_mulmod(a.coeffs, b.coeffs, self.modulus, self.p))

    def pow(self, a: FqElement, e: int) -> FqElement:
        if e < 0:
            a = self.inv(a)
            e = -e
        return self.element(poly_powmod(a.coeffs, e, self.modulus, self.p))

    def inv(self, a: FqElement) -> FqElement:
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.q - 2)

    def frobenius(self, a: FqElement, times: int = 1) -> FqElement:
        return self.pow(a, self.p**times)

    def order(self, a: FqElement) -> int:
        if a.is_zero():
            raise ValueError("zero has no multiplicative order")
        n = self.q - 1
        for ell in prime_factors(n):
            while n % ell == 0 and self.pow(a, n // ell) == self.one:
                n //= ell
        return n

    # linear algebra over F_p
    def mul_matrix(self, a: FqElement) -> np.ndarray:
        """Matrix M with M @ coeffs(x) = coeffs(a*x) (mod p)."""
        cols = []
        basis = [0] * self.f
        for k in range(self.f):
            basis = [0] * self.f
            basis[k] = 1
            cols.append(self.mul(a, FqElement(self, tuple(basis))).coeffs)
        return np.array(cols, dtype=np.int64).T

    def trace_vector(self) -> np.ndarray:
        """Absolute traces Tr_{F_q/F_p}(x^i), i < f, so Tr(a) = coeffs(a) . v mod p."""
        if self._trace_vec is None:
            xs = [0] * self.f
            out = []
            for i in range(self.f):
                xs = [0] * self.f
                xs[i] = 1
                out.append(int(np.trace(self.mul_matrix(FqElement(self, tuple(xs))))) % self.p)
            self._trace_vec = np.array(out, dtype=np.int64)
        return self._trace_vec

    def absolute_trace(self, a: FqElement) -> int:
        return int(np.dot(np.array(a.coeffs, dtype=np.int64), self.trace_vector()) % self.p)

    # tables
    def power_blocks(self, start: FqElement | None = None, block: int = 8192) -> Iterator[np.ndarray]:
        """Yield coefficient matrices of start * g^j for consecutive j, block rows at a time.

        Covers j = 0 .. q-2 exactly once; nothing of size q is held in memory.
        """
        total = self.q - 1
        block = max(1, min(block, total))
        g = self.generator
        first = []
        cur = self.one if start is None else start
        for _ in range(block):
            first.append(cur.coeffs)
            cur = self.mul(cur, g)
        rows = np.array(first, dtype=np.int64)
        step = self.mul_matrix(self.pow(g, block)).T
        done = 0
        while done < total:
            take = min(block, total - done)
            yield rows[:take]
            done += take
            if done < total:
                rows = (rows @ step) % self.p

    def powers(self) -> np.ndarray:
        """Matrix whose row j holds the coefficients of g^j (j < q-1)."""
        if self._powers is None:
            check_enum(self.q, what="power table")
            self._powers = np.concatenate(list(self.power_blocks()), axis=0)
        return self._powers

    def log_table(self) -> np.ndarray:
        """Array indexed by element encoding; entry is the discrete log (-1 at zero)."""
        if self._log is None:
            pw = self.powers()
            enc = pw @ (self.p ** np.arange(self.f, dtype=np.int64))
            log = np.full(self.q, -1, dtype=np.int64)
            log[enc] = np.arange(self.q - 1, dtype=np.int64)
            self._log = log
        return self._log

    def exp(self, j: int) -> FqElement:
        return self.pow(self.generator, j % (self.q - 1))


def dlog(field: FqField, u) -> int:
    """Exponent j in [0, q-1) with generator**j == u."""
    u = field.element(u) if not isinstance(u, FqElement) else u
    if u.is_zero():
        raise ValueError("discrete log of zero")
    return int(field.log_table()[u.index])


def _find_generator(p: int, f: int, modulus: Sequence[int]) -> int:
    probe = FqField(p, f, modulus, 1)
    n = probe.q - 1
    factors = prime_factors(n)
    for idx in range(1, probe.q):
        a = probe.element(idx)
        if all(probe.pow(a, n // ell) != probe.one for ell in factors):
            return idx
    raise AssertionError("no generator found")


@functools.lru_cache(maxsize=None)
def _build_field(p: int, f: int) -> FqField:
    cached = _cache.load_field(p, f)
    if cached is not None:
        modulus, gen = cached
    else:
        modulus = first_irreducible(p, f)
        gen = _find_generator(p, f, modulus)
        _cache.store_field(p, f, modulus, gen)
    fld = FqField(p, f, modulus, gen)
    if not is_irreducible(fld.modulus, p):
        raise ValueError(f"cached modulus for ({p}, {f}) is reducible")
    if fld.order(fld.generator) != fld.q - 1:
        raise ValueError(f"cached generator for ({p}, {f}) is not primitive")
    return fld


def make_field(p: int, f: int = 1, *, max_enum: int | None = None) -> FqField:
    """Build F_{p^f} with the canonical modulus and smallest primitive element."""
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError("p not prime")
    if f < 1:
        raise ValueError("f must be >= 1")
    check_enum(p**f, max_enum)
    return _build_field(p, f)


# --- towers ----------------------------------------------------------------


@dataclass(eq=False)
class ExtensionTower:
    """k = ``base`` inside k_r = ``ext`` via an explicit embedding.

    ``embedding_table[i]`` is the encoding in k_r of the base element with
    encoding i; ``root`` is the image of the base variable x.
    """

    base: FqField
    r: int
    ext: FqField
    root: FqElement
    embedding_table: np.ndarray = field(repr=False)
    _pullback: dict = field(default_factory=dict, repr=False)
    parent: "ExtensionTower | None" = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def Q(self) -> int:
        return self.ext.q

    def embed(self, x) -> FqElement:
        x = self.base.element(x) if not isinstance(x, FqElement) else x
        if x.field is not self.base:
            raise ValueError("element is not in the base field")
        return self.ext.element(int(self.embedding_table[x.index]))

    def pullback(self, y: FqElement) -> FqElement:
        """Inverse of the embedding on its image."""
        if not self._pullback:
            self._pullback.update({int(v): i for i, v in enumerate(self.embedding_table)})
        try:
            return self.base.element(self._pullback[y.index])
        except KeyError:
            raise ValueError(f"{y!r} is not in the image of the base field") from None

    def trace(self, y: FqElement) -> FqElement:
        """Tr_{k_r/k}(y) = y + y^q + ... + y^{q^{r-1}}, as an element of k."""
        total = self.ext.zero
        cur = y
        for _ in range(self.r):
            total = total + cur
            cur = self.ext.pow(cur, self.q)
        return self.pullback(total)

    def norm(self, y: FqElement) -> FqElement:
        """N_{k_r/k}(y) = y^{(q^r - 1)/(q - 1)}, as an element of k."""
        if y.is_zero():
            return self.base.zero
        return self.pullback(self.ext.pow(y, (self.Q - 1) // (self.q - 1)))

    def norm_exponent(self) -> int:
        """s with N(g_ext) = g_base^s, so N(g_ext^j) has discrete log s*j."""
        return dlog(self.base, self.norm(self.ext.generator))

    def twisted_trace_vector(self, b=1) -> np.ndarray:
        """v with Tr_{k_r/F_p}(embed(b) * y) = coeffs(y) . v mod p."""
        b_ext = self.embed(self.base.coerce(b) if isinstance(b, int) else b)
        m = self.ext.mul_matrix(b_ext)
        return (self.ext.trace_vector() @ m) % self.ext.p

    def extend(self, s: int) -> "ExtensionTower":
        """Tower k ⊂ k_{rs} whose embedding factors through this k_r."""
        upper = extend(self.ext, s)
        root = upper.embed(self.root)
        table = np.array([upper.embedding_table[int(v)] for v in self.embedding_table], dtype=np.int64)
        out = ExtensionTower(self.base, self.r * s, upper.ext, root, table)
        out.parent = upper
        return out


def _smallest_root(base: FqField, ext: FqField) -> FqElement:
    """Smallest element of ext (by encoding) that is a root of base.modulus."""
    if base.f == 1:
        return ext.zero
    d = (ext.q - 1) // (base.q - 1)
    h = ext.pow(ext.generator, d)
    candidates = [ext.zero]
    cur = ext.one
    for _ in range(base.q - 1):
        candidates.append(cur)
        cur = ext.mul(cur, h)
    candidates.sort(key=lambda e: e.index)
    for c in candidates:
        val = ext.zero
        for coef in reversed(base.modulus):
            val = ext.add(ext.mul(val, c), ext.coerce(coef))
        if val.is_zero():
            return c
    raise AssertionError("base modulus has no root in the extension")


def extend(base: FqField, r: int, *, max_enum: int | None = None) -> ExtensionTower:
    """The degree-r extension k_r of ``base`` together with embedding, trace and norm."""
    if r < 1:
        raise ValueError("r must be >= 1")
    ext = make_field(base.p, base.f * r, max_enum=max_enum)
    if r == 1:
        table = np.arange(base.q, dtype=np.int64)
        return ExtensionTower(base, 1, ext, ext.element([0, 1]) if base.f > 1 else ext.zero, table)
    root = _smallest_root(base, ext)
    powers = [ext.one]
    for _ in range(base.f - 1):
        powers.append(ext.mul(powers[-1], root))
    basis = np.array([pw.coeffs for pw in powers], dtype=np.int64)  # (f, D)
    codes = np.arange(base.q, dtype=np.int64)
    digits = (codes[:, None] // (base.p ** np.arange(base.f, dtype=np.int64))) % base.p
    images = (digits @ basis) % base.p
    table = images @ (base.p ** np.arange(ext.f, dtype=np.int64))
    return ExtensionTower(base, r, ext, root, table)
