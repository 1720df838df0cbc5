import numpy as np
from hypothesis import given, settings, strategies as st

from kloosterman.groupring import ConstPlusSparse, cyclic_convolve, fold_columns, one_hot


def naive(a, b):
    L, N = a.shape
    out = np.zeros((L, N), dtype=object)
    for i in range(L):
        for j in range(N):
            for k in range(L):
                for m in range(N):
                    out[(i + k) % L, (j + m) % N] += int(a[i, j]) * int(b[k, m])
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(1, 5), st.integers(0, 2**40), st.data())
def test_convolution_matches_naive(L, N, top, data):
    vals = st.integers(0, top)
    a = np.array([[data.draw(vals) for _ in range(N)] for _ in range(L)], dtype=object)
    b = np.array([[data.draw(vals) for _ in range(N)] for _ in range(L)], dtype=object)
    got = cyclic_convolve(a, b)
    want = naive(a, b)
    assert [[int(x) for x in row] for row in got] == [[int(x) for x in row] for row in want]


def test_huge_entries():
    a = np.array([[2**70, 1], [3, 2**65]], dtype=object)
    assert (cyclic_convolve(a, a) == naive(a, a)).all()


def test_fold_columns():
    rows = np.array([[1, 2, 0], [0, 1, 1]])
    # (1 + 2z)^2 + (z + z^2)^2 = 1 + 4z + 4z^2 + z^2 + 2z^3 + z^4 over Z/3
    assert fold_columns(rows, 3) == [1 + 2, 4 + 1, 4 + 1]


def test_one_hot():
    assert one_hot(np.array([0, 2, 4]), 3).tolist() == [[1, 0, 0], [0, 0, 1], [0, 1, 0]]


@given(st.integers(2, 9), st.integers(-5, 5), st.dictionaries(st.integers(0, 8), st.integers(-5, 5), max_size=3), st.integers(1, 4))
def test_const_plus_sparse_power(L, c, sparse, n):
    f = ConstPlusSparse(L, c, {k % L: v for k, v in sparse.items()})
    dense = [f(w) for w in range(L)]
    acc = dense
    for _ in range(n - 1):
        acc = [sum(acc[i] * dense[(w - i) % L] for i in range(L)) for w in range(L)]
    g = f.power(n)
    assert [g(w) for w in range(L)] == acc
