"""Exhaustive locus enumeration and slice-based dimension estimation.

The dimension estimator replaces Krull-dimension computations with a
sampling scheme: intersect the locus with random affine-linear slices of
growing dimension and watch where hits start appearing.  A locus of
codimension c in affine N-space meets a generic dimension-c slice in a
nonempty set roughly 1 - 1/e of the time (the restricted system behaves
like a random one with a rational solution), while dimension-(c-1)
slices hit only with probability on the order of 1/p.  The estimator
scans slice dimensions upward and reports N - d_min for the first level
whose hit frequency clears a threshold.

Frequencies, not proofs: the thresholds are calibrated so both error
sides stay small at the enumeration primes, and estimates that land in
the uncertain band come back flagged ambiguous instead of wrong.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .polynomial import Poly, jacobian_matrix
from .scan import affine_chunks, projective_count, run_chunked

DEFAULT_BUDGET = 10**8
DEFAULT_TRIALS = 20
DEFAULT_HIT = 0.5
DEFAULT_MISS = 0.45


class BudgetExceeded(RuntimeError):
    """Raised when a scan would need more membership tests than allowed."""


@dataclass(frozen=True)
class LocusPredicate:
    """A membership test on the rational points of an ambient space.

    kind "affine" tests vectors of length n; kind "projective" tests
    homogeneous vectors of length n + 1 (the test must be invariant under
    scaling).  test_batch maps an (B, width) int64 array to (B,) bools
    and must be pure.
    """

    kind: str
    n: int
    p: int
    test_batch: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("affine", "projective"):
            raise ValueError(f"unknown ambient kind {self.kind!r}")
        linalg.check_prime(self.p)

    @property
    def width(self) -> int:
        return self.n + 1 if self.kind == "projective" else self.n

    def point_count(self) -> int:
        if self.kind == "projective":
            return projective_count(self.n, self.p)
        return self.p**self.n


@dataclass(frozen=True)
class DimEstimate:
    """Outcome of the slice ladder; -1 means empty within budget."""

    estimated_dim: int
    trials: int
    hit_profile: dict = field(compare=True)
    confidence_note: str = ""
    ambiguous: bool = False
    params: dict = field(default_factory=dict)


def enumerate_locus(
    pred: LocusPredicate,
    budget: int = DEFAULT_BUDGET,
    threads: int | None = None,
) -> tuple[list[tuple[int, ...]], int]:
    """All locus points in lexicographic order, plus the count.

    Exhausts the ambient rational points (canonical representatives for
    projective ambients), so the ambient size must fit the test budget.
    """
    total = pred.point_count()
    if total > budget:
        raise BudgetExceeded(
            f"ambient has {total} points, budget allows {budget} membership tests"
        )
    from .scan import projective_chunks

    if pred.kind == "projective":
        chunks = projective_chunks(pred.n, pred.p)
    else:
        chunks = affine_chunks(pred.n, pred.p)

    def worker(block: np.ndarray) -> np.ndarray:
        keep = np.asarray(pred.test_batch(block), dtype=bool)
        return block[keep]

    parts = run_chunked(worker, chunks, threads)
    found = [tuple(int(x) for x in row) for part in parts for row in part]
    found.sort()
    return found, len(found)


def _slice_points(rng, d: int, pred: LocusPredicate, width: int) -> np.ndarray:
    """Image of all p^d parameters under a random affine-linear embedding."""
    p = pred.p
    mat = linalg.sample_full_rank(rng, d, width, p) if d else np.zeros((0, width), np.int64)
    offset = rng.ints(width, p)
    blocks = []
    for tail in affine_chunks(d, p) if d else [np.zeros((1, 0), dtype=np.int64)]:
        blocks.append((tail @ mat + offset) % p)
    return np.vstack(blocks)


def slice_dim_estimate(
    pred: LocusPredicate,
    rng,
    trials: int = DEFAULT_TRIALS,
    hit_threshold: float = DEFAULT_HIT,
    miss_threshold: float = DEFAULT_MISS,
    budget: int = DEFAULT_BUDGET,
    threads: int | None = None,
) -> DimEstimate:
    """Estimate the locus dimension from random-slice hit frequencies.

    Walks slice dimension d upward; each level draws `trials` affine
    embeddings F_p^d -> ambient and tests every image point.  The first
    level whose nonempty fraction reaches hit_threshold pins the
    codimension; the estimate is flagged ambiguous when the level below
    it was already warm (fraction >= miss_threshold) since that pattern
    is what a misread codimension looks like.  Projective loci run on
    the affine cone (zero vector included) and the estimate drops by 1.

    Slices are offset away from the origin, so homogeneous loci get no
    free hits through the cone point.  Slice streams derive from labeled
    child generators of `rng`, making the full profile reproducible for
    a fixed seed regardless of worker count.
    """
    if not 0.0 < miss_threshold <= hit_threshold <= 1.0:
        raise ValueError("need 0 < miss_threshold <= hit_threshold <= 1")
    p = pred.p
    width = pred.width
    ambient_dim = width if pred.kind == "projective" else pred.n
    params = {
        "trials": trials,
        "hit_threshold": hit_threshold,
        "miss_threshold": miss_threshold,
        "budget": budget,
        "p": p,
        "kind": pred.kind,
        "n": pred.n,
    }

    def cone_test(points: np.ndarray) -> np.ndarray:
        if pred.kind == "affine":
            return np.asarray(pred.test_batch(points), dtype=bool)
        out = np.asarray(pred.test_batch(points), dtype=bool)
        zero = ~points.any(axis=1)
        return out | zero

    spent = 0
    profile: dict[int, int] = {}
    freqs: dict[int, float] = {}
    d_min = None
    for d in range(ambient_dim + 1):
        cost = trials * p**d
        if spent + cost > budget:
            break
        spent += cost
        hits = 0
        for t in range(trials):
            srng = rng.child(f"slice-{d}-{t}")
            pts = _slice_points(srng, d, pred, width)

            def worker(block: np.ndarray) -> bool:
                return bool(cone_test(block).any())

            step = 1 << 15
            chunk_hits = run_chunked(
                worker,
                (pts[i : i + step] for i in range(0, len(pts), step)),
                threads,
            )
            hits += int(any(chunk_hits))
        profile[d] = hits
        freqs[d] = hits / trials
        if freqs[d] >= hit_threshold:
            d_min = d
            break

    if d_min is None:
        if any(profile.values()):
            note = (
                f"no slice level reached hit threshold {hit_threshold} within "
                f"budget (profile {profile}); estimate withheld"
            )
            return DimEstimate(-1, trials, profile, note, ambiguous=True, params=params)
        note = f"no hits at any slice level scanned within budget ({spent} tests)"
        return DimEstimate(-1, trials, profile, note, ambiguous=False, params=params)

    warm = d_min > 0 and freqs[d_min - 1] >= miss_threshold
    est = ambient_dim - d_min - (1 if pred.kind == "projective" else 0)
    below = f"{profile[d_min - 1]}/{trials}" if d_min > 0 else "n/a"
    note = (
        f"level {d_min}: {profile[d_min]}/{trials} nonempty; "
        f"level below: {below} (thresholds hit={hit_threshold}, miss={miss_threshold})"
    )
    if warm:
        note += "; level below the accepted one is warm, profile inconclusive"
    return DimEstimate(est, trials, profile, note, ambiguous=warm, params=params)


def image_dim_estimate(polys: list[Poly], rng, samples: int = 50) -> int:
    """Generic differential rank of a polynomial parametrization.

    The image of a polynomial map has the dimension of its differential
    at a generic parameter; finite samples give a lower bound that is
    sharp with overwhelming probability, so the max over samples is
    reported.
    """
    if not polys:
        raise ValueError("need at least one polynomial")
    p = polys[0].p
    nvars = polys[0].nvars
    best = 0
    for _ in range(samples):
        point = rng.ints(nvars, p)
        jac = jacobian_matrix(polys, point)
        best = max(best, linalg.rank(jac, p))
    return best
