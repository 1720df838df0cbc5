"""Exact convolution in group rings Z[Z/L x Z/N].

Character sums over a cyclic unit group with values in Z[zeta_N] are
functions Z/L -> Z[zeta_N]; in group-ring form they are nonnegative count
arrays of shape (L, N).  Products are 2-D cyclic convolutions, computed
exactly by Kronecker substitution: pack the array into one big integer,
multiply with GMP, unpack and fold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
import numpy as np

_LIMB = 64


def _bitlen(x: int) -> int:
    return int(x).bit_length()


def _total(a: np.ndarray) -> int:
    return int(sum(int(v) for v in a.ravel())) if a.dtype == object else int(a.sum(dtype=object))


def _max(a: np.ndarray) -> int:
    return int(max(int(v) for v in a.ravel())) if a.size else 0


def _to_limbs(values: np.ndarray, limbs: int) -> np.ndarray:
    out = np.zeros((values.size, limbs), dtype=np.uint64)
    if values.dtype != object and limbs >= 1:
        out[:, 0] = values.astype(np.uint64)
        return out
    flat = values.ravel()
    mask = (1 << _LIMB) - 1
    for t in range(limbs):
        out[:, t] = np.array([(int(v) >> (_LIMB * t)) & mask for v in flat], dtype=np.uint64)
    return out


def _pack(a: np.ndarray, slot_limbs: int) -> gmpy2.mpz:
    L, N = a.shape
    padded = np.zeros((L, 2 * N), dtype=a.dtype)
    padded[:, :N] = a
    limbs = _to_limbs(padded.reshape(-1), slot_limbs)
    return gmpy2.mpz(int.from_bytes(limbs.astype("<u8").tobytes(), "little"))


def _unpack(x: gmpy2.mpz, slots: int, slot_limbs: int) -> np.ndarray:
    raw = int(x).to_bytes(slots * slot_limbs * 8, "little")
    limbs = np.frombuffer(raw, dtype="<u8").reshape(slots, slot_limbs)
    if slot_limbs == 1 or not limbs[:, 1:].any():
        col = limbs[:, 0]
        if col.max(initial=0) < 2**63:
            return col.astype(np.int64)
        return np.array([int(v) for v in col], dtype=object)
    out = np.zeros(slots, dtype=object)
    for t in range(slot_limbs - 1, -1, -1):
        out = out * (1 << _LIMB) + limbs[:, t].astype(object)
    return out


def cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """2-D cyclic convolution of nonnegative integer arrays of equal shape (L, N)."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    L, N = a.shape
    sa, sb = _total(a), _total(b)
    if sa == 0 or sb == 0:
        return np.zeros((L, N), dtype=np.int64)
    bound = min(sa * _max(b), _max(a) * sb)
    slot_limbs = max(1, -(-(_bitlen(bound) + 1) // _LIMB))
    pa = _pack(a, slot_limbs)
    prod = pa * pa if b is a else pa * _pack(b, slot_limbs)
    flat = _unpack(prod, 2 * L * 2 * N, slot_limbs)
    rows = flat.reshape(2 * L, 2 * N)
    folded = rows[:L] + rows[L:]
    return folded[:, :N] + folded[:, N:]


def convolve_all(arrays) -> np.ndarray:
    arrays = list(arrays)
    out = arrays[0]
    for nxt in arrays[1:]:
        out = cyclic_convolve(out, nxt)
    return out


def fold_columns(row_vectors: np.ndarray, N: int) -> list[int]:
    """Sum over rows of the Z/N self-convolution of each row: sum_j c_j * c_j."""
    c = row_vectors.astype(object)
    gram = c.T.dot(c)
    out = [0] * N
    for u in range(N):
        for v in range(N):
            out[(u + v) % N] += int(gram[u, v])
    return out


def one_hot(exponents: np.ndarray, N: int) -> np.ndarray:
    L = exponents.shape[0]
    out = np.zeros((L, N), dtype=np.int64)
    out[np.arange(L), exponents % N] = 1
    return out


@dataclass
class ConstPlusSparse:
    """Function on Z/L of the form const + sum_s v_s * delta_s.

    Closed under convolution: the constant part absorbs every product
    that touches a constant, the sparse parts convolve pointwise.
    """

    L: int
    const: int = 0
    sparse: dict = field(default_factory=dict)

    def total(self) -> int:
        return self.const * self.L + sum(self.sparse.values())

    def __call__(self, w: int) -> int:
        return self.const + self.sparse.get(w % self.L, 0)

    def convolve(self, other: "ConstPlusSparse") -> "ConstPlusSparse":
        if other.L != self.L:
            raise ValueError("group order mismatch")
        const = (
            self.const * other.const * self.L
            + self.const * sum(other.sparse.values())
            + other.const * sum(self.sparse.values())
        )
        sparse: dict[int, int] = {}
        for s, v in self.sparse.items():
            for t, w in other.sparse.items():
                key = (s + t) % self.L
                sparse[key] = sparse.get(key, 0) + v * w
        return ConstPlusSparse(self.L, const, {k: v for k, v in sparse.items() if v})

    def power(self, n: int) -> "ConstPlusSparse":
        if n < 1:
            raise ValueError("power must be >= 1")
        out = self
        for _ in range(n - 1):
            out = out.convolve(self)
        return out
