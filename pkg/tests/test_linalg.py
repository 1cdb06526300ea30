"""Exact linear algebra against known answers and numpy cross-checks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peskine_lab import linalg
from peskine_lab.rng import Rng

PRIMES = [3, 5, 7, 11, 101, 65537]


def test_is_prime_small():
    hits = [n for n in range(2, 60) if linalg.is_prime(n)]
    assert hits == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
    assert linalg.is_prime(65537)
    assert not linalg.is_prime(65536)
    assert not linalg.is_prime(1)


def test_check_prime_rejects():
    with pytest.raises(ValueError):
        linalg.check_prime(2)
    with pytest.raises(ValueError):
        linalg.check_prime(9)
    assert linalg.check_prime(7) == 7


@pytest.mark.parametrize("p", PRIMES)
def test_inv_mod(p):
    for x in range(1, min(p, 50)):
        assert x * linalg.inv_mod(x, p) % p == 1
    with pytest.raises(ValueError):
        linalg.inv_mod(0, p)


def test_rref_pivots():
    red, pivots = linalg.rref([[2, 4, 1], [1, 2, 3]], 7)
    assert pivots == (0, 2)
    assert red.tolist() == [[1, 2, 0], [0, 0, 1]]
    # Same rows collapse over F_5 where [1,2,3] = 3 * [2,4,1].
    red5, pivots5 = linalg.rref([[2, 4, 1], [1, 2, 3]], 5)
    assert pivots5 == (0,)
    assert red5.tolist() == [[1, 2, 3]]


def test_rank_kernel_relation(rng):
    p = 7
    for _ in range(20):
        rows = rng.below(5) + 1
        cols = rng.below(5) + 1
        mat = rng.matrix(rows, cols, p)
        r = linalg.rank(mat, p)
        ker = linalg.kernel(mat, p)
        assert r + len(ker) == cols
        if len(ker):
            assert not (mat @ ker.T % p).any()


def test_solve_roundtrip(rng):
    p = 101
    for _ in range(20):
        mat = linalg.sample_gl(rng, 4, p)
        x = rng.ints(4, p)
        b = mat @ x % p
        assert np.array_equal(linalg.solve(mat, b, p), x)


def test_solve_inconsistent():
    # x = 0 and x = 1 simultaneously.
    with pytest.raises(ValueError):
        linalg.solve([[1], [1]], [0, 1], 7)


def test_det_known_values():
    assert linalg.det([[1, 2], [3, 4]], 7) == (4 - 6) % 7
    assert linalg.det([[2]], 5) == 2
    assert linalg.det([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 11) == 1


def test_det_multiplicative(rng):
    p = 11
    for _ in range(30):
        a = rng.matrix(4, 4, p)
        b = rng.matrix(4, 4, p)
        lhs = linalg.det(a @ b % p, p)
        rhs = linalg.det(a, p) * linalg.det(b, p) % p
        assert lhs == rhs


def test_det_matches_numpy_sign(rng):
    # Integer determinant reduced mod p agrees with the exact field value.
    p = 101
    for _ in range(10):
        a = rng.matrix(5, 5, p)
        exact = round(np.linalg.det(a.astype(float)))
        assert linalg.det(a, p) == exact % p


def test_inverse(rng):
    p = 7
    eye = np.eye(5, dtype=np.int64)
    for _ in range(10):
        g = linalg.sample_gl(rng, 5, p)
        assert np.array_equal(g @ linalg.inverse(g, p) % p, eye)
    with pytest.raises(ValueError):
        linalg.inverse(np.zeros((3, 3), dtype=np.int64), p)


def test_sample_gl_invertible():
    rng = Rng(5)
    for p in (3, 101):
        for _ in range(10):
            g = linalg.sample_gl(rng, 6, p)
            assert linalg.rank(g, p) == 6


def test_sample_full_rank():
    rng = Rng(6)
    for _ in range(10):
        m = linalg.sample_full_rank(rng, 3, 8, 5)
        assert linalg.rank(m, 5) == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([3, 7, 101]))
def test_mat_mul_matches_numpy(seed, p):
    rng = Rng(seed)
    a = rng.matrix(3, 4, p)
    b = rng.matrix(4, 2, p)
    assert np.array_equal(linalg.mat_mul(a, b, p), a @ b % p)
