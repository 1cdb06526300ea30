import numpy as np
import pytest

from peskine_lab import linalg
from peskine_lab.subspaces import (
    Flag,
    Subspace,
    all_subspaces,
    complement_rows,
    gaussian_binomial,
    sample_subspace,
)


def test_from_rows_canonicalizes():
    a = Subspace.from_rows([[1, 2, 0], [0, 0, 1]], 3, 7)
    b = Subspace.from_rows([[2, 4, 0], [1, 2, 3]], 3, 7)
    assert a == b
    assert a.dim == 2


def test_zero_and_full():
    z = Subspace.zero(4, 5)
    f = Subspace.full(4, 5)
    assert z.dim == 0 and f.dim == 4
    assert f.contains(z)


def test_contains_vector():
    s = Subspace.span_of([1, 1, 0], [0, 0, 1], n=3, p=5)
    assert s.contains_vector([2, 2, 3])
    assert not s.contains_vector([1, 0, 0])


def test_meet_join_dims(rng):
    p = 7
    for _ in range(20):
        a = sample_subspace(rng, 6, 3, p)
        b = sample_subspace(rng, 6, 4, p)
        meet = a.meet(b)
        join = a.join(b)
        assert meet.dim + join.dim == a.dim + b.dim
        assert join.contains(a) and join.contains(b)
        assert a.contains(meet) and b.contains(meet)


def test_annihilator(rng):
    p = 7
    s = sample_subspace(rng, 6, 2, p)
    ann = s.annihilator()
    assert ann.shape == (4, 6)
    assert not (s.basis @ ann.T % p).any()


def test_coords_of(rng):
    p = 7
    s = sample_subspace(rng, 6, 3, p)
    combo = rng.ints(3, p)
    v = combo @ s.basis % p
    assert np.array_equal(s.coords_of(v) @ s.basis % p, v)


def test_coords_of_outside_vector():
    s = Subspace.span_of([1, 0, 0], [0, 1, 0], n=3, p=5)
    with pytest.raises(ValueError):
        s.coords_of([0, 0, 1])


def test_quotient_lift_roundtrip(rng):
    p = 7
    s = sample_subspace(rng, 6, 2, p)
    v = rng.ints(6, p)
    q = s.quotient_coords(v)
    assert q.shape == (4,)
    lifted = s.lift_quotient(q)
    # v and its lift differ by an element of s
    assert s.contains_vector((v - lifted) % p)


def test_transform(rng):
    p = 7
    s = sample_subspace(rng, 6, 3, p)
    g = linalg.sample_gl(rng, 6, p)
    t = s.transform(g)
    for row in s.basis:
        assert t.contains_vector(g @ row % p)


def test_complement_rows(rng):
    p = 5
    sub = sample_subspace(rng, 6, 2, p)
    space = sub.join(sample_subspace(rng, 6, 3, p))
    rows = complement_rows(space, sub)
    assert len(rows) == space.dim - sub.dim
    joined = sub.join(Subspace.from_rows(np.array(rows), 6, p))
    assert joined == space


def test_gaussian_binomial_small():
    # Lines in F_3^3: (3^3-1)/(3-1) = 13.
    assert gaussian_binomial(3, 1, 3) == 13
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(5, 0, 7) == 1
    assert gaussian_binomial(3, 3, 5) == 1


@pytest.mark.parametrize("n,k,p", [(3, 1, 3), (4, 2, 3), (3, 2, 5)])
def test_all_subspaces_count(n, k, p):
    spaces = list(all_subspaces(n, k, p))
    assert len(spaces) == gaussian_binomial(n, k, p)
    assert len(set(spaces)) == len(spaces)
    assert all(s.dim == k for s in spaces)


def test_sample_subspace_dim():
    from peskine_lab.rng import Rng

    rng = Rng(77)
    for k in range(7):
        assert sample_subspace(rng, 6, k, 11).dim == k


def test_flag_accessors(rng):
    p = 7
    inner = sample_subspace(rng, 6, 2, p)
    outer = inner.join(sample_subspace(rng, 6, 3, p))
    flag = Flag((inner, outer))
    assert flag.dims() == (2, outer.dim)
    assert flag.p == p and flag.n == 6
    assert flag[0] == inner


def test_flag_rejects_non_increasing(rng):
    a = sample_subspace(rng, 6, 2, 7)
    with pytest.raises(ValueError):
        Flag((a, a))


def test_flag_transform(rng):
    p = 7
    inner = sample_subspace(rng, 6, 1, p)
    outer = inner.join(sample_subspace(rng, 6, 2, p))
    g = linalg.sample_gl(rng, 6, p)
    moved = Flag((inner, outer)).transform(g)
    assert moved[0] == inner.transform(g)
    assert moved[1] == outer.transform(g)
