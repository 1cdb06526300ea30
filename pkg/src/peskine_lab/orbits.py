"""Coordinate models for the small orbit closures in a 20-dim quotient.

Fix a basis a_1, ..., a_7 of a 7-space A7 and let A2 = <a_1, a_2>.  The
ambient here is B = wedge^2(A7) / wedge^2(A2): coordinates are the ordered
pairs (i, j), 1 <= i < j <= 7, minus the killed pair (1, 2).  Two cubics
F1, F2 (Pfaffians of the quotients mod a_2 and mod a_1) cut out the locus
O2; its singular locus adds the rank-<=1 condition on their Jacobian; and
a 15-parameter family with an explicit normal-form decomposition models
the stratum O5.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg
from .polynomial import Poly
from .rng import Rng
from .subspaces import Subspace

PAIRS_ALL = tuple((i, j) for i in range(1, 8) for j in range(i + 1, 8))
PAIRS_B = tuple(pr for pr in PAIRS_ALL if pr != (1, 2))
PAIR_INDEX_ALL = {pr: k for k, pr in enumerate(PAIRS_ALL)}
PAIR_INDEX_B = {pr: k for k, pr in enumerate(PAIRS_B)}


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BElement:
    """Element of wedge^2(A7)/wedge^2(A2): 20 coordinates, pair-indexed."""

    p: int
    coords: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        if self.coords.shape != (20,):
            raise ValueError(f"expected 20 coordinates, got {self.coords.shape}")

    @classmethod
    def from_coords(cls, coords, p: int) -> "BElement":
        return cls(p=p, coords=_freeze(linalg.as_field(coords, p)))

    @classmethod
    def zero(cls, p: int) -> "BElement":
        return cls.from_coords(np.zeros(20, dtype=np.int64), p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BElement):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash((self.p, self.coords.tobytes()))

    def entry(self, i: int, j: int) -> int:
        """Coordinate on a_i ^ a_j (1-based, i != j), zero on the killed pair."""
        if i == j:
            return 0
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        if (i, j) == (1, 2):
            return 0
        return int(self.coords[PAIR_INDEX_B[(i, j)]]) * sign % self.p

    def lift(self, s: int = 0) -> np.ndarray:
        """7x7 skew matrix of the lift with (1,2)-entry s."""
        m = np.zeros((7, 7), dtype=np.int64)
        for (i, j), k in PAIR_INDEX_B.items():
            m[i - 1, j - 1] = self.coords[k]
            m[j - 1, i - 1] = (-int(self.coords[k])) % self.p
        m[0, 1] = s % self.p
        m[1, 0] = (-s) % self.p
        return m

    def mod_a2_block(self) -> np.ndarray:
        """The induced 5x5 skew matrix on A7/A2 (rows/cols a_3..a_7)."""
        return self.lift()[2:, 2:]

    def scale(self, c: int) -> "BElement":
        return BElement.from_coords(self.coords * (c % self.p) % self.p, self.p)

    def add(self, other: "BElement") -> "BElement":
        if self.p != other.p:
            raise ValueError("elements live over different fields")
        return BElement.from_coords((self.coords + other.coords) % self.p, self.p)


def project_to_B(mat: np.ndarray, p: int) -> BElement:
    """Image of a skew 7x7 wedge-square matrix in B (drops the (1,2) slot)."""
    m = linalg.as_field(mat, p)
    if m.shape != (7, 7) or ((m + m.T) % p).any():
        raise ValueError("need a skew-symmetric 7x7 matrix")
    coords = [int(m[i - 1, j - 1]) for (i, j) in PAIRS_B]
    return BElement.from_coords(np.array(coords, dtype=np.int64), p)


def wedge(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """The skew matrix of x ^ y for 7-vectors x, y."""
    x = linalg.as_field(x, p)
    y = linalg.as_field(y, p)
    return (np.outer(x, y) - np.outer(y, x)) % p


@lru_cache(maxsize=None)
def pencil_cubics(p: int) -> tuple[Poly, Poly]:
    """The two quotient Pfaffians F1 (mod a_2) and F2 (mod a_1).

    Both are cubics in the 20 B-coordinates, 15 monomials each; the
    symbolic construction runs through all 21 wedge coordinates and then
    asserts that the killed (1,2) variable never occurs.
    """
    from .trivector import perfect_matchings

    def quotient_pf(kept: tuple[int, ...]) -> Poly:
        acc: dict[tuple[int, ...], int] = {}
        for sign, pairs in perfect_matchings(6):
            mono = []
            flip = 1
            for (r, s) in pairs:
                i, j = kept[r], kept[s]
                if i > j:
                    i, j, flip = j, i, -flip
                mono.append(PAIR_INDEX_ALL[(i, j)])
            key = tuple(sorted(mono))
            acc[key] = (acc.get(key, 0) + sign * flip) % p
        return Poly.from_dict(acc, 21, p)

    f1_full = quotient_pf((1, 3, 4, 5, 6, 7))
    f2_full = quotient_pf((2, 3, 4, 5, 6, 7))
    killed = PAIR_INDEX_ALL[(1, 2)]
    for f in (f1_full, f2_full):
        if f.uses_variable(killed):
            raise AssertionError("quotient Pfaffian touches the killed coordinate")
    return (_restrict_to_B(f1_full, p), _restrict_to_B(f2_full, p))


def _restrict_to_B(f: Poly, p: int) -> Poly:
    """Re-index a 21-variable polynomial avoiding (1,2) to the 20 B-variables."""
    remap = {PAIR_INDEX_ALL[pr]: PAIR_INDEX_B[pr] for pr in PAIRS_B}
    terms = {tuple(sorted(remap[v] for v in mono)): c for mono, c in f.as_dict().items()}
    return Poly.from_dict(terms, 20, p)


def pf_mod_line(b: BElement, alpha: int, beta: int) -> int:
    """Pfaffian of the quotient mod the line alpha*a_1 + beta*a_2.

    Uses the pivot chart: for beta != 0 the quotient basis is
    (a_1bar, a_3..a_7) with a_2 eliminated, denominators cleared by beta^3;
    for beta = 0 the (a_2bar, a_3..a_7) chart.  Zero/nonzero is
    chart-independent.
    """
    from .trivector import pfaffian

    p = b.p
    alpha %= p
    beta %= p
    if alpha == 0 and beta == 0:
        raise ValueError("(alpha, beta) must not both vanish")
    m = b.lift()
    if beta == 0:
        kept = [1, 2, 3, 4, 5, 6]
        return pfaffian(m[np.ix_(kept, kept)], p)
    n = np.zeros((6, 6), dtype=np.int64)
    rest = [2, 3, 4, 5, 6]
    for r, i in enumerate(rest):
        n[0, r + 1] = (beta * m[0, i] - alpha * m[1, i]) % p
        n[r + 1, 0] = (-int(n[0, r + 1])) % p
    for r, i in enumerate(rest):
        for s, j in enumerate(rest):
            n[r + 1, s + 1] = m[i, j]
    return beta * beta * pfaffian(n, p) % p


def o2_member(b: BElement) -> bool:
    f1, f2 = pencil_cubics(b.p)
    return f1.evaluate(b.coords) == 0 and f2.evaluate(b.coords) == 0


@lru_cache(maxsize=None)
def _gradients(p: int) -> tuple[tuple[Poly, ...], tuple[Poly, ...]]:
    f1, f2 = pencil_cubics(p)
    return (
        tuple(f1.partial(i) for i in range(20)),
        tuple(f2.partial(i) for i in range(20)),
    )


def o2_jacobian(b: BElement) -> np.ndarray:
    """Exact 2x20 Jacobian of (F1, F2) at b."""
    g1, g2 = _gradients(b.p)
    return np.array(
        [[g.evaluate(b.coords) for g in g1], [g.evaluate(b.coords) for g in g2]],
        dtype=np.int64,
    )


def sing_o2_member(b: BElement) -> bool:
    if not o2_member(b):
        return False
    return linalg.rank(o2_jacobian(b), b.p) <= 1


def o5_sample(rng: Rng, p: int) -> BElement:
    """Sample the 15-parameter family behind the O5 stratum.

    Draws a line (alpha:beta) in A2, a plane U2 in A7/A2 with lifted basis
    (u1, u2), a 5-coordinate vector v, a lift combination u and a scalar t,
    and returns the image of l ^ v + m ^ u + t * u1 ^ u2, where m
    completes l to a basis of A2.
    """
    idx = rng.below(p + 1)
    if idx < p:
        alpha, beta = 1, idx
    else:
        alpha, beta = 0, 1
    ell = np.zeros(7, dtype=np.int64)
    ell[0], ell[1] = alpha, beta
    m_vec = np.zeros(7, dtype=np.int64)
    if alpha != 0:
        m_vec[1] = 1
    else:
        m_vec[0] = 1

    u1 = np.zeros(7, dtype=np.int64)
    u2 = np.zeros(7, dtype=np.int64)
    plane = None
    while plane is None or plane.dim != 2:
        plane = Subspace.from_rows(rng.matrix(2, 5, p), 5, p)
    u1[2:], u2[2:] = plane.basis[0], plane.basis[1]

    v = np.zeros(7, dtype=np.int64)
    v[2:] = rng.ints(5, p)
    y1, y2 = rng.below(p), rng.below(p)
    u = (y1 * u1 + y2 * u2) % p
    t = rng.below(p)
    total = (wedge(ell, v, p) + wedge(m_vec, u, p) + t * wedge(u1, u2, p)) % p
    return project_to_B(total, p)


def o5_parametrization(p: int) -> list[Poly]:
    """The 20 coordinate polynomials of the chart alpha = 1 of o5_sample.

    Parameters (15): s = beta; six chart coordinates of the plane
    (u1 = a_3 + c11 a_5 + c12 a_6 + c13 a_7, u2 = a_4 + c21 a_5 + ...);
    five coordinates of v; the two lift coefficients y1, y2; and t.
    """
    nv = 15
    var = lambda i: Poly.variable(i, nv, p)
    const = lambda c: Poly.constant(c, nv, p)
    s = var(0)
    c = [[var(1 + 3 * r + k) for k in range(3)] for r in range(2)]
    v = [var(7 + k) for k in range(5)]
    y1, y2 = var(12), var(13)
    t = var(14)

    zero = const(0)
    one = const(1)
    u1 = [one, zero, c[0][0], c[0][1], c[0][2]]
    u2 = [zero, one, c[1][0], c[1][1], c[1][2]]
    u = [y1 * u1[k] + y2 * u2[k] for k in range(5)]

    comp: dict[tuple[int, int], Poly] = {}
    for k in range(5):
        comp[(1, k + 3)] = v[k]
        comp[(2, k + 3)] = s * v[k] + u[k]
    for a in range(5):
        for bb in range(a + 1, 5):
            comp[(a + 3, bb + 3)] = t * (u1[a] * u2[bb] - u1[bb] * u2[a])
    return [comp[pr] for pr in PAIRS_B]


def o5_sufficient_member(b: BElement) -> bool:
    """The rank-based sufficient condition for the O5 stratum.

    True iff the induced element of wedge^2(A7/A2) has rank 2 and some lift
    (scan over the p choices of the (1,2) slot) has rank 4.
    """
    p = b.p
    if linalg.rank(b.mod_a2_block(), p) != 2:
        return False
    return min(linalg.rank(b.lift(s), p) for s in range(p)) == 4


@dataclass(frozen=True)
class O5Decomposition:
    """Normal form b = l ^ x + a_2 ^ y' + t * c3 ^ c4 (mod a_1 ^ a_2)."""

    ell: np.ndarray
    x: np.ndarray
    yprime: np.ndarray
    c3: np.ndarray
    c4: np.ndarray
    t: int


def o5_decompose(b: BElement) -> O5Decomposition:
    """Run the constructive normal-form decomposition.

    Writes b, modulo a_1 ^ a_2, as l ^ x + a_2 ^ y' + t c3 ^ c4 (or the
    mirrored chart with a_1 in place of a_2), where (c3, c4) span the
    rank-2 support of b mod A2 and y' lies in that span.  Raises when the
    element does not satisfy the rank conditions or the linear step has no
    solution (which would refute the normal-form claim on this input).
    """
    p = b.p
    block = b.mod_a2_block()
    if linalg.rank(block, p) != 2:
        raise ValueError("mod-A2 rank is not 2")
    red, _ = linalg.rref(block, p)
    r1, r2 = red[0], red[1]
    scale = None
    for i in range(5):
        for j in range(5):
            denom = (int(r1[i]) * int(r2[j]) - int(r1[j]) * int(r2[i])) % p
            if denom:
                scale = int(block[i, j]) * linalg.inv_mod(denom, p) % p
                break
        if scale is not None:
            break
    c3bar = r1 * scale % p
    c4bar = r2
    if not np.array_equal((np.outer(c3bar, c4bar) - np.outer(c4bar, c3bar)) % p, block):
        raise ValueError("rank-2 block is not decomposable (unexpected)")

    xbar = b.lift()[0, 2:].copy()
    ybar = b.lift()[1, 2:].copy()

    c3 = np.zeros(7, dtype=np.int64)
    c4 = np.zeros(7, dtype=np.int64)
    c3[2:], c4[2:] = c3bar, c4bar

    basis = np.vstack([xbar, c3bar, c4bar])
    try:
        sol = linalg.solve(basis.T, ybar, p)
        u = int(sol[0])
        yprime = (sol[1] * c3 + sol[2] * c4) % p
        ell = np.zeros(7, dtype=np.int64)
        ell[0], ell[1] = 1, u
        x = np.zeros(7, dtype=np.int64)
        x[2:] = xbar
        return O5Decomposition(ell=ell, x=x, yprime=yprime, c3=c3, c4=c4, t=1)
    except ValueError:
        pass

    basis = np.vstack([c3bar, c4bar])
    sol = linalg.solve(basis.T, xbar, p)
    yprime = (sol[0] * c3 + sol[1] * c4) % p
    ell = np.zeros(7, dtype=np.int64)
    ell[1] = 1
    x = np.zeros(7, dtype=np.int64)
    x[2:] = ybar
    return O5Decomposition(ell=ell, x=x, yprime=yprime, c3=c3, c4=c4, t=1)


def o5_reconstruct(dec: O5Decomposition, p: int) -> BElement:
    """Rebuild the BElement from a decomposition (the verification oracle)."""
    if dec.ell[0] % p:
        m_vec = np.zeros(7, dtype=np.int64)
        m_vec[1] = 1
    else:
        m_vec = np.zeros(7, dtype=np.int64)
        m_vec[0] = 1
    total = (
        wedge(dec.ell, dec.x, p)
        + wedge(m_vec, dec.yprime, p)
        + dec.t * wedge(dec.c3, dec.c4, p)
    ) % p
    return project_to_B(total, p)


def o5_constructed_sample(rng: Rng, p: int) -> BElement:
    """Random element with full rank 4 and mod-A2 rank 2, by construction.

    Shape: w1 ^ w2 + (w2 + alpha a_1 + beta a_2) ^ w3 with generic w's; the
    mod-A2 image is (w1 - w3) ^ w2, rank 2.  Resamples until both rank
    conditions hold exactly.
    """
    while True:
        w1 = np.concatenate([rng.ints(2, p), rng.ints(5, p)])
        w2 = np.concatenate([rng.ints(2, p), rng.ints(5, p)])
        w3 = np.concatenate([rng.ints(2, p), rng.ints(5, p)])
        alpha, beta = rng.below(p), rng.below(p)
        if alpha == 0 and beta == 0:
            continue
        shift = np.zeros(7, dtype=np.int64)
        shift[0], shift[1] = alpha, beta
        total = (wedge(w1, w2, p) + wedge((w2 + shift) % p, w3, p)) % p
        cand = project_to_B(total, p)
        if linalg.rank(cand.mod_a2_block(), p) != 2:
            continue
        if min(linalg.rank(cand.lift(s), p) for s in range(p)) != 4:
            continue
        return cand
