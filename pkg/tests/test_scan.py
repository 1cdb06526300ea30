"""Chunked enumeration and the batched kernels it feeds."""

import numpy as np
import pytest

from peskine_lab import linalg
from peskine_lab.rng import Rng
from peskine_lab.scan import (
    affine_chunks,
    batched_contract1,
    batched_pfaffian_minors,
    batched_rank,
    inverse_table,
    projective_chunks,
    projective_count,
    run_chunked,
    thread_count,
)
from peskine_lab.trivector import Trivector, pfaffian


def collect(chunks):
    return np.vstack(list(chunks))


def test_affine_chunks_cover_everything():
    pts = collect(affine_chunks(3, 3, chunk=7))
    assert pts.shape == (27, 3)
    assert len({tuple(r) for r in pts.tolist()}) == 27


def test_affine_chunks_counter_order():
    pts = collect(affine_chunks(2, 3, chunk=100))
    assert pts[:4].tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]


def test_projective_count():
    assert projective_count(1, 3) == 4
    assert projective_count(5, 7) == (7**6 - 1) // 6
    assert projective_count(2, 5) == 31


@pytest.mark.parametrize("d,p", [(1, 3), (2, 3), (2, 5), (3, 3)])
def test_projective_chunks_canonical(d, p):
    pts = collect(projective_chunks(d, p, chunk=11))
    assert pts.shape == (projective_count(d, p), d + 1)
    seen = set()
    for row in pts.tolist():
        nz = [i for i, c in enumerate(row) if c]
        assert row[nz[0]] == 1
        seen.add(tuple(row))
    assert len(seen) == pts.shape[0]


def test_inverse_table():
    for p in (3, 7, 101):
        tab = inverse_table(p)
        assert tab[0] == 0
        for x in range(1, p):
            assert tab[x] * x % p == 1


def test_batched_rank_matches_scalar():
    rng = Rng(21)
    p = 7
    mats = np.stack([rng.matrix(5, 5, p) for _ in range(64)])
    got = batched_rank(mats, p)
    want = [linalg.rank(m, p) for m in mats]
    assert got.tolist() == want


def test_batched_rank_includes_extremes():
    p = 5
    mats = np.stack([np.zeros((4, 4), dtype=np.int64), np.eye(4, dtype=np.int64)])
    assert batched_rank(mats, p).tolist() == [0, 4]


def test_batched_contract1_matches_contract1():
    rng = Rng(22)
    p = 7
    tri = Trivector.random(rng, 6, p)
    pts = rng.matrix(30, 6, p)
    mats = batched_contract1(tri, pts)
    for u, m in zip(pts, mats):
        assert np.array_equal(m, tri.contract1(u).mat)


def test_batched_pfaffian_minors_matches_scalar():
    rng = Rng(23)
    p = 11
    raw = np.stack([rng.matrix(6, 6, p) for _ in range(40)])
    mats = (raw - raw.transpose(0, 2, 1)) % p
    for subset in [(0, 1), (0, 2, 3, 5), (0, 1, 2, 3, 4, 5)]:
        got = batched_pfaffian_minors(mats, p, subset)
        idx = np.ix_(subset, subset)
        want = [pfaffian(m[idx], p) for m in mats]
        assert got.tolist() == want


def test_run_chunked_order_independent_of_threads():
    chunks = [np.arange(i, i + 4) for i in range(0, 40, 4)]
    sums1 = run_chunked(lambda c: int(c.sum()), chunks, threads=1)
    sums4 = run_chunked(lambda c: int(c.sum()), chunks, threads=4)
    assert sums1 == sums4
    assert sums1 == [int(c.sum()) for c in chunks]


def test_thread_count_env(monkeypatch):
    monkeypatch.delenv("PESKINE_LAB_THREADS", raising=False)
    assert thread_count() == 1
    assert thread_count(3) == 3
    monkeypatch.setenv("PESKINE_LAB_THREADS", "5")
    assert thread_count() == 5
    assert thread_count(2) == 2
    monkeypatch.setenv("PESKINE_LAB_THREADS", "zebra")
    with pytest.raises(ValueError):
        thread_count()
