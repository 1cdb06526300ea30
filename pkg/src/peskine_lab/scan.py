"""Batched exhaustive scans over F_p^d and P^d(F_p).

The heavy checks walk every point of a projective space and compute the
rank of a contracted skew form at each.  Doing that one point at a time in
Python is hopeless, so this module provides chunked point generators and
vectorized mod-p kernels (batched contraction, batched Gaussian rank,
batched Pfaffian minors).  Results are exact: intermediate products are
bounded so that int64 (or float64 used as a 53-bit integer container)
never overflows.

Chunks are generated in a fixed deterministic order and combined in that
order, so scans return identical results for any worker thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator

import numpy as np

from . import linalg
from .trivector import Trivector, perfect_matchings

DEFAULT_CHUNK = 1 << 15


def thread_count(requested: int | None = None) -> int:
    """Worker count: explicit argument, else PESKINE_LAB_THREADS, else 1."""
    if requested is not None and requested > 0:
        return requested
    env = os.environ.get("PESKINE_LAB_THREADS", "")
    if env.strip():
        try:
            val = int(env)
        except ValueError as exc:
            raise ValueError(f"PESKINE_LAB_THREADS must be an integer, got {env!r}") from exc
        if val > 0:
            return val
    return 1


def affine_chunks(d: int, p: int, chunk: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
    """All p^d points of F_p^d in base-p counter order, chunked."""
    total = p**d
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = np.arange(start, stop, dtype=np.int64)
        block = np.empty((stop - start, d), dtype=np.int64)
        for c in range(d - 1, -1, -1):
            block[:, c] = idx % p
            idx = idx // p
        yield block


def projective_count(d: int, p: int) -> int:
    """Number of points of P^d(F_p)."""
    return (p ** (d + 1) - 1) // (p - 1)


def projective_chunks(d: int, p: int, chunk: int = DEFAULT_CHUNK) -> Iterator[np.ndarray]:
    """Canonical representatives of P^d(F_p): first nonzero coordinate is 1.

    Points come in pivot-major order (pivot 0 first), each pivot block in
    base-p counter order on the free coordinates.
    """
    for pivot in range(d + 1):
        free = d - pivot
        for tail in affine_chunks(free, p, chunk) if free else [np.zeros((1, 0), dtype=np.int64)]:
            block = np.zeros((tail.shape[0], d + 1), dtype=np.int64)
            block[:, pivot] = 1
            if free:
                block[:, pivot + 1 :] = tail
            yield block


def batched_contract1(sigma: Trivector, points: np.ndarray) -> np.ndarray:
    """Skew matrices sigma(u, ., .) for a batch of points u, shape (B, n, n).

    For the prime tiers in use, p^2 * n < 2^53, so the contraction runs
    through float64 matrix multiply and is exact.
    """
    p, n = sigma.p, sigma.n
    flat = sigma.tensor.reshape(n, n * n)
    if p * p * n < (1 << 53):
        prod = points.astype(np.float64) @ flat.astype(np.float64)
        mats = np.rint(prod).astype(np.int64) % p
    else:
        mats = (points @ flat) % p
    return mats.reshape(points.shape[0], n, n)


def batched_rank(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a batch of square matrices mod p via masked elimination."""
    a = mats.copy() % p
    batch, rows, cols = a.shape
    inv_table = inverse_table(p)
    ranks = np.zeros(batch, dtype=np.int64)
    row_done = np.zeros((batch, rows), dtype=bool)
    for c in range(cols):
        col = a[:, :, c]
        candidates = (col != 0) & ~row_done
        has = candidates.any(axis=1)
        if not has.any():
            continue
        pivot_row = candidates.argmax(axis=1)
        b_idx = np.nonzero(has)[0]
        pr = pivot_row[b_idx]
        pivot_vals = a[b_idx, pr, c]
        scaled = a[b_idx, pr, :] * inv_table[pivot_vals][:, None] % p
        col_vals = a[b_idx, :, c]
        a[b_idx] = (a[b_idx] - col_vals[:, :, None] * scaled[:, None, :]) % p
        a[b_idx, pr, :] = scaled
        a[b_idx, :, c] = 0
        a[b_idx, pr, c] = 1
        row_done[b_idx, pr] = True
        ranks[b_idx] += 1
    return ranks


_INV_TABLES: dict[int, np.ndarray] = {}


def inverse_table(p: int) -> np.ndarray:
    """Table of inverses mod p (index 0 unused)."""
    table = _INV_TABLES.get(p)
    if table is None:
        table = np.zeros(p, dtype=np.int64)
        table[1:] = [pow(x, -1, p) for x in range(1, p)]
        table.setflags(write=False)
        _INV_TABLES[p] = table
    return table


_MATCHING_ARRAYS: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _matching_arrays(size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Perfect matchings of `size` as index arrays (signs, rows, cols)."""
    cached = _MATCHING_ARRAYS.get(size)
    if cached is None:
        matchings = perfect_matchings(size)
        signs = np.array([sign for sign, _ in matchings], dtype=np.int64)
        rows = np.array([[i for i, _ in pairs] for _, pairs in matchings], dtype=np.int64)
        cols = np.array([[j for _, j in pairs] for _, pairs in matchings], dtype=np.int64)
        cached = (signs, rows, cols)
        _MATCHING_ARRAYS[size] = cached
    return cached


def batched_pfaffian_minors(mats: np.ndarray, p: int, subset: tuple[int, ...]) -> np.ndarray:
    """Pfaffians of the principal minor on `subset` for a batch of skew mats."""
    size = len(subset)
    if size == 0:
        return np.ones(mats.shape[0], dtype=np.int64) % p
    n = mats.shape[1]
    signs, rows, cols = _matching_arrays(size)
    sub = np.asarray(subset, dtype=np.int64)
    flat_idx = (sub[rows] * n + sub[cols]).reshape(-1)
    vals = mats.reshape(mats.shape[0], n * n)[:, flat_idx].reshape(
        mats.shape[0], rows.shape[0], rows.shape[1]
    )
    term = vals[:, :, 0] * (signs % p)[None, :] % p
    for t in range(1, vals.shape[2]):
        term = term * vals[:, :, t] % p
    return term.sum(axis=1) % p


def run_chunked(
    worker: Callable[[np.ndarray], object],
    chunks: Iterable[np.ndarray],
    threads: int | None = None,
) -> list:
    """Apply `worker` to every chunk, in order, optionally on a thread pool.

    The output list matches the chunk order regardless of thread count,
    which keeps scan results byte-identical under parallelism.
    """
    workers = thread_count(threads)
    chunk_list = list(chunks)
    if workers <= 1 or len(chunk_list) <= 1:
        return [worker(c) for c in chunk_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, chunk_list))
