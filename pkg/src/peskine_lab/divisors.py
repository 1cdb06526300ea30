"""Samplers for trivectors with prescribed flag degenerations.

Each structured kind zeroes the coefficients of a standard-position
coefficient pattern on F_p^10, then scrambles by a uniform GL element so
that downstream code never sees the standard flag.  The scramble and the
transformed flag are returned as a witness.

Kinds:
    general    all C(10, 3) coefficients uniform
    d3-3-10    sigma(V3, V3, .) = 0      for a 3-space V3
    d1-6-10    sigma(V1, V6, .) = 0      for a line V1 inside a 6-space V6
    d4-7-7     sigma(U4, V7, V7) = 0     for a 4-space U4 inside a 7-space V7

The zeroed-triple counts (22, 30, 34) are pinned by tests that re-derive
them from the defining conditions by enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg, scan
from .rng import Rng
from .subspaces import Flag, Subspace
from .trivector import Trivector, perfect_matchings, triple_index, triples

KINDS = ("general", "d3-3-10", "d1-6-10", "d4-7-7")

_FLAG_DIMS = {"d3-3-10": (3,), "d1-6-10": (1, 6), "d4-7-7": (4, 7)}


@dataclass(frozen=True)
class DivisorSample:
    kind: str
    sigma: Trivector
    flag: Flag
    scramble: np.ndarray


@lru_cache(maxsize=None)
def zeroed_triples(kind: str) -> tuple[tuple[int, int, int], ...]:
    """Coefficient triples forced to zero in standard position."""
    if kind == "general":
        return ()
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    out = []
    for (i, j, k) in triples(10):
        if kind == "d3-3-10":
            hit = sum(x < 3 for x in (i, j, k)) >= 2
        elif kind == "d1-6-10":
            hit = i == 0 and j <= 5
        else:
            hit = i <= 3 and k <= 6
        if hit:
            out.append((i, j, k))
    return tuple(out)


def standard_flag(kind: str, p: int) -> Flag:
    dims = _FLAG_DIMS[kind]
    return Flag(tuple(Subspace.from_rows(np.eye(10, dtype=np.int64)[:d], 10, p) for d in dims))


def sample_general(rng: Rng, n: int, p: int) -> Trivector:
    return Trivector.random(rng, n, p)


def sample_divisor(rng: Rng, kind: str, p: int) -> DivisorSample:
    """Uniform trivector in the pattern, in scrambled position."""
    if kind not in _FLAG_DIMS:
        raise ValueError(f"unknown structured kind {kind!r}")
    coeffs = rng.ints(len(triples(10)), p)
    tindex = triple_index(10)
    for t in zeroed_triples(kind):
        coeffs[tindex[t]] = 0
    std = Trivector.from_coeffs(coeffs, 10, p)
    g = linalg.sample_gl(rng, 10, p)
    return DivisorSample(
        kind=kind,
        sigma=std.gl_transform(g),
        flag=standard_flag(kind, p).transform(g),
        scramble=g,
    )


def verify_flag(sigma: Trivector, kind: str, flag: Flag) -> bool:
    """Check the defining vanishing of `kind` on the flag's basis vectors."""
    if kind not in _FLAG_DIMS:
        raise ValueError(f"unknown structured kind {kind!r}")
    if flag.dims() != _FLAG_DIMS[kind]:
        return False
    p = sigma.p
    if kind == "d3-3-10":
        b3 = flag[0].basis
        for a in range(3):
            for b in range(a + 1, 3):
                if sigma.contract2(b3[a], b3[b]).any():
                    return False
        return True
    if kind == "d1-6-10":
        v1 = flag[0].basis[0]
        for row in flag[1].basis:
            if sigma.contract2(v1, row).any():
                return False
        return True
    b7 = flag[1].basis
    for a in flag[0].basis:
        m = sigma.contract1(a).mat
        if (b7 @ m @ b7.T % p).any():
            return False
    return True


def recover_flag_d1_6_10(sigma: Trivector, v1) -> Flag:
    """Reconstruct (V1, V6) from sigma and the distinguished line.

    V6 is the kernel of sigma(v1, ., .); raises if that kernel does not
    have dimension 6 (the contraction must have rank exactly 4).
    """
    line = Subspace.from_rows(v1, sigma.n, sigma.p)
    if line.dim != 1:
        raise ValueError("v1 must span a line")
    ker = sigma.contract1(line.basis[0]).kernel()
    if ker.dim != 6:
        raise ValueError(f"contraction kernel has dimension {ker.dim}, expected 6")
    if not ker.contains(line):
        raise ValueError("distinguished line does not lie in the kernel")
    return Flag((line, ker))


def two_block_sample(rng: Rng, p: int) -> Trivector:
    """Trivector supported on triples inside {0..5} and inside {4..9}.

    Both e_0 and e_9 then contract to forms supported on a 5 x 5 block, so
    the scan for rank <= 4 points finds at least two.
    """
    coeffs = np.zeros(len(triples(10)), dtype=np.int64)
    tindex = triple_index(10)
    for t in triples(10):
        if max(t) <= 5 or min(t) >= 4:
            coeffs[tindex[t]] = rng.below(p)
    return Trivector.from_coeffs(coeffs, 10, p)


def rank4_uniqueness_scan(sigma: Trivector, threads: int | None = None) -> int:
    """Number of points of P(F_p^n) where the contraction drops to rank <= 4.

    For a D1_6_10 sample the planted line is always counted; the question
    is how often it is the only hit.  Practical at the enumeration primes.
    """
    return len(rank4_points(sigma, threads=threads))


def rank4_points(sigma: Trivector, filters: int = 6, threads: int | None = None) -> list[tuple[int, ...]]:
    """All points of P(F_p^n) where the contraction has rank <= 4.

    Scans canonical projective representatives in deterministic order.  A
    point u with rank sigma(u,.,.) < 6 kills every principal 6x6 Pfaffian
    minor, so a cascade of random minors (evaluated straight from gathered
    tensor slices, no full contraction) discards almost every point; the
    few survivors get an exact batched rank computation.
    """
    from itertools import combinations

    p, n = sigma.p, sigma.n
    if n < 6:
        raise ValueError("scan needs ambient dimension at least 6")
    subset_rng = Rng(0xD1CE).child(f"rank4-minors-{p}-{n}")
    subsets = []
    for _ in range(filters):
        pool = list(range(n))
        subset_rng.shuffle(pool)
        subsets.append(tuple(sorted(pool[:6])))

    tensor_flat = sigma.tensor.reshape(n, n * n)
    plans = []
    for sub in subsets:
        pairs = list(combinations(sub, 2))
        col_of = {pair: c for c, pair in enumerate(pairs)}
        pos = {v: i for i, v in enumerate(sub)}
        gather = tensor_flat[:, [i * n + j for (i, j) in pairs]]
        terms = []
        for sign, local_pairs in perfect_matchings(6):
            terms.append((sign % p, [col_of[(sub[i], sub[j])] for (i, j) in local_pairs]))
        plans.append((gather, terms))
        del pos

    use_float = p * p * n < (1 << 53)

    def minor_values(pts: np.ndarray, plan) -> np.ndarray:
        gather, terms = plan
        if use_float:
            vals = np.rint(pts.astype(np.float64) @ gather.astype(np.float64)).astype(np.int64) % p
        else:
            vals = pts @ gather % p
        out = np.zeros(pts.shape[0], dtype=np.int64)
        for sign, cols in terms:
            term = vals[:, cols[0]] * vals[:, cols[1]] % p * vals[:, cols[2]] % p
            out = (out + sign * term) % p
        return out

    def work(block: np.ndarray):
        pts = block
        for plan in plans:
            if pts.shape[0] == 0:
                return []
            pts = pts[minor_values(pts, plan) == 0]
        if pts.shape[0] == 0:
            return []
        mats = scan.batched_contract1(sigma, pts)
        ranks = scan.batched_rank(mats, p)
        return [tuple(int(x) for x in pts[i]) for i in np.nonzero(ranks <= 4)[0]]

    chunks = scan.projective_chunks(n - 1, p)
    found: list[tuple[int, ...]] = []
    for part in scan.run_chunked(work, chunks, threads):
        found.extend(part)
    return found
