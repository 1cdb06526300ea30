"""Trivectors, skew forms and Pfaffians.

The Pfaffian oracle here is independent of the implementation: Pf^2 = det
and the 4x4 closed form pf = a01*a23 - a02*a13 + a03*a12.
"""

import numpy as np
import pytest

from peskine_lab import linalg
from peskine_lab.rng import Rng
from peskine_lab.trivector import (
    SkewForm,
    Trivector,
    pfaffian,
    perfect_matchings,
    skew_rank,
    triple_index,
    triples,
)


def random_skew(rng, n, p):
    raw = rng.matrix(n, n, p)
    return (raw - raw.T) % p


def test_triples_count():
    assert len(triples(6)) == 20
    assert len(triples(10)) == 120
    idx = triple_index(6)
    assert idx[(0, 1, 2)] == 0
    assert len(idx) == 20


def test_pfaffian_2x2():
    mat = [[0, 3], [-3 % 7, 0]]
    assert pfaffian(mat, 7) == 3


def test_pfaffian_4x4_closed_form():
    rng = Rng(10)
    p = 11
    for _ in range(50):
        a = random_skew(rng, 4, p)
        expected = (
            a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
        ) % p
        assert pfaffian(a, p) == expected


def test_pfaffian_odd_size_zero():
    rng = Rng(11)
    for n in (3, 5, 7):
        assert pfaffian(random_skew(rng, n, 7), 7) == 0


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_pfaffian_squares_to_det(n):
    rng = Rng(12)
    for p in (7, 101):
        for _ in range(20):
            a = random_skew(rng, n, p)
            assert pfaffian(a, p) ** 2 % p == linalg.det(a, p)


def test_perfect_matchings_structure():
    ms = perfect_matchings(4)
    assert len(ms) == 3
    signs = sorted(s for s, _ in ms)
    assert signs == [-1, 1, 1]


def test_skew_rank_even(rng):
    p = 7
    for _ in range(30):
        a = random_skew(rng, 6, p)
        r = skew_rank(a, p)
        assert r % 2 == 0
        assert r == linalg.rank(a, p)


def test_skewform_apply_and_kernel(rng):
    p = 7
    a = random_skew(rng, 6, p)
    form = SkewForm.from_matrix(a, p)
    u = rng.ints(6, p)
    v = rng.ints(6, p)
    assert form.apply(u, v) == int(u @ a @ v % p)
    assert form.apply(u, v) == (-form.apply(v, u)) % p
    ker = form.kernel()
    assert ker.dim == 6 - form.rank()


def test_trivector_coeff_antisymmetry(rng):
    tri = Trivector.random(rng, 6, 7)
    assert tri.coeff(0, 1, 2) == (-tri.coeff(1, 0, 2)) % 7
    assert tri.coeff(2, 1, 2) == 0
    assert tri.coeff(3, 4, 5) == tri.coeff(4, 5, 3)


def test_eval3_multilinear(rng):
    p = 11
    tri = Trivector.random(rng, 6, p)
    u, v, w, x = (rng.ints(6, p) for _ in range(4))
    lhs = tri.eval3((u + 3 * x) % p, v, w)
    rhs = (tri.eval3(u, v, w) + 3 * tri.eval3(x, v, w)) % p
    assert lhs == rhs
    assert tri.eval3(u, u, w) == 0
    assert tri.eval3(u, v, w) == (-tri.eval3(v, u, w)) % p


def test_contract1_matches_eval3(rng):
    p = 7
    tri = Trivector.random(rng, 6, p)
    u, v, w = (rng.ints(6, p) for _ in range(3))
    form = tri.contract1(u)
    assert form.apply(v, w) == tri.eval3(u, v, w)


def test_contract2_matches_eval3(rng):
    p = 7
    tri = Trivector.random(rng, 6, p)
    u, v, w = (rng.ints(6, p) for _ in range(3))
    row = tri.contract2(u, v)
    assert int(row @ w % p) == tri.eval3(u, v, w)


def test_gl_transform_pullback(rng):
    # tau = g-pullback satisfies tau(g^-1 x, ...) = sigma(x, ...); checked
    # in the forward direction on random triples.
    p = 7
    tri = Trivector.random(rng, 6, p)
    g = linalg.sample_gl(rng, 6, p)
    tau = tri.gl_transform(g)
    for _ in range(10):
        u, v, w = (rng.ints(6, p) for _ in range(3))
        lhs = tau.eval3(g @ u % p, g @ v % p, g @ w % p)
        assert lhs == tri.eval3(u, v, w)


def test_gl_transform_composition(rng):
    # tau = T_g(sigma) has tau(gx) = sigma(x), so T_h(T_g(sigma)) = T_{hg}(sigma).
    p = 7
    tri = Trivector.random(rng, 6, p)
    g = linalg.sample_gl(rng, 6, p)
    h = linalg.sample_gl(rng, 6, p)
    once = tri.gl_transform(h @ g % p)
    twice = tri.gl_transform(g).gl_transform(h)
    assert np.array_equal(once.coeffs, twice.coeffs)


def test_add_scale_zero(rng):
    p = 7
    a = Trivector.random(rng, 6, p)
    b = a.scale(p - 1)
    assert not a.add(b).coeffs.any()
    assert np.array_equal(a.scale(1).coeffs, a.coeffs)
    assert not Trivector.zero(6, p).coeffs.any()


def test_from_coeffs_roundtrip(rng):
    tri = Trivector.random(rng, 6, 7)
    again = Trivector.from_coeffs(tri.coeffs, 6, 7)
    assert np.array_equal(tri.coeffs, again.coeffs)
