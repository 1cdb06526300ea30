"""Membership predicates and finite constructions for the degeneracy loci.

The central locus is the set of points [u] where the contraction
sigma(u, ., .) drops rank to n - 4; around it live the isotropic-6-space
locus, an interpolated cubic on P(V6) computed from quotient Pfaffians,
an 8-space membership test with an exhaustive inner search for isotropic
3-spaces, and the plane fibers sitting over its witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linalg, scan
from .polynomial import Poly, monomials_of_degree
from .rng import Rng
from .subspaces import Flag, Subspace, all_subspaces, complement_rows
from .trivector import Trivector, pfaffian


def peskine_member(sigma: Trivector, u) -> bool:
    """True iff the contraction at u has rank at most n - 4."""
    u = linalg.as_field(u, sigma.p).reshape(-1)
    if not u.any():
        raise ValueError("membership needs a nonzero vector")
    return sigma.contract1(u).rank() <= sigma.n - 4


def peskine_points(sigma: Trivector, threads: int | None = None) -> list[tuple[int, ...]]:
    """Canonical representatives of the rank-drop locus in P(F_p^n).

    Exhaustive and deterministic; meant for the enumeration prime tier.
    """
    p, n = sigma.p, sigma.n
    bound = n - 4

    def work(block: np.ndarray):
        mats = scan.batched_contract1(sigma, block)
        ranks = scan.batched_rank(mats, p)
        return [tuple(int(x) for x in block[i]) for i in np.nonzero(ranks <= bound)[0]]

    out: list[tuple[int, ...]] = []
    for part in scan.run_chunked(work, scan.projective_chunks(n - 1, p), threads):
        out.extend(part)
    return out


def dv_member(sigma: Trivector, u6: Subspace) -> bool:
    """True iff sigma vanishes identically on the 6-space."""
    if u6.dim != 6:
        raise ValueError(f"expected a 6-dimensional subspace, got dim {u6.dim}")
    b = u6.basis
    for (i, j, k) in combinations(range(6), 3):
        if sigma.eval3(b[i], b[j], b[k]):
            return False
    return True


def pfaffian_mod_radical(mat: np.ndarray, x, y, p: int) -> int:
    """Pfaffian of a skew form induced on the quotient by two radical vectors.

    For a skew m x m matrix M (m even) whose radical contains the
    independent vectors x and y, the m-2 dimensional quotient form has a
    Pfaffian that is well defined once a volume is fixed; this uses the
    convention that (x, y, complementary standard vectors) has unit
    determinant.  Concretely: pick the first index pair (a, b) with
    w = x_a y_b - x_b y_a nonzero; then the value is
    sign * Pf(M restricted off {a, b}) / w, independent of the pair.
    """
    m = linalg.as_field(mat, p)
    size = m.shape[0]
    x = linalg.as_field(x, p).reshape(-1)
    y = linalg.as_field(y, p).reshape(-1)
    if size % 2:
        raise ValueError("quotient pfaffian needs even ambient size")
    if (m @ x % p).any() or (m @ y % p).any():
        raise ValueError("x and y must lie in the radical of the form")
    for a in range(size):
        for b in range(a + 1, size):
            w = (int(x[a]) * int(y[b]) - int(x[b]) * int(y[a])) % p
            if w:
                rest = [i for i in range(size) if i not in (a, b)]
                inversions = sum(1 for s in rest if s > a) + sum(1 for s in rest if s > b)
                sign = 1 if inversions % 2 == 0 else p - 1
                sub = m[np.ix_(rest, rest)]
                return int(sign * pfaffian(sub, p) % p * linalg.inv_mod(w, p) % p)
    raise ValueError("x and y are not independent")


@dataclass(frozen=True)
class CubicForm:
    """Degree-3 form in 6 variables, dense graded-lex coefficients."""

    poly: Poly

    def __post_init__(self) -> None:
        if self.poly.nvars != 6:
            raise ValueError("cubic form lives in 6 variables")
        if self.poly.total_degree() > 3:
            raise ValueError("degree exceeds 3")

    @classmethod
    def from_coefficients(cls, coeffs, p: int) -> "CubicForm":
        monos = monomials_of_degree(6, 3)
        coeffs = linalg.as_field(coeffs, p).reshape(-1)
        if coeffs.shape[0] != len(monos):
            raise ValueError(f"expected {len(monos)} coefficients")
        return cls(Poly.from_dict({m: int(c) for m, c in zip(monos, coeffs)}, 6, p))

    @property
    def p(self) -> int:
        return self.poly.p

    def coefficients(self) -> np.ndarray:
        table = self.poly.as_dict()
        return np.array([table.get(m, 0) for m in monomials_of_degree(6, 3)], dtype=np.int64)

    def evaluate(self, point) -> int:
        return self.poly.evaluate(point)

    def evaluate_batch(self, points: np.ndarray) -> np.ndarray:
        return self.poly.evaluate_batch(points)

    def gradient(self, point) -> np.ndarray:
        return np.array([self.poly.partial(i).evaluate(point) for i in range(6)], dtype=np.int64)

    def is_cubic(self) -> bool:
        return self.poly.total_degree() == 3


def cubic_from_pfaffian(sigma: Trivector, flag: Flag) -> CubicForm:
    """Interpolate the quotient-Pfaffian cubic on P(V6).

    For u in V6 off the distinguished line, sigma(u, ., .) has both u and
    v1 in its radical, so the quotient Pfaffian is a well-defined scalar;
    as a function of the V6-coordinates of u it is a cubic.  The cubic is
    recovered by exact interpolation at deterministic nodes and verified
    on the surplus nodes by construction (the solve is overdetermined).
    """
    p = sigma.p
    v1 = flag[0].basis[0]
    b6 = flag[1].basis
    if flag[0].dim != 1 or flag[1].dim != 6:
        raise ValueError("need a (1, 6) flag")
    monos = monomials_of_degree(6, 3)
    if p ** 6 < 4 * len(monos):
        raise ValueError(f"field with p = {p} is too small for stable interpolation")
    node_rng = Rng(0xC0B1C).child(f"cubic-nodes-{p}")

    rows: list[np.ndarray] = []
    vals: list[int] = []
    attempts = 0
    while len(rows) < len(monos) + 20:
        attempts += 1
        if attempts > 40 * len(monos):
            raise ValueError("interpolation nodes kept degenerating")
        c = node_rng.ints(6, p)
        u = c @ b6 % p
        mu = _quotient_pfaffian_at(sigma, u, v1)
        if mu is None:
            continue
        rows.append(np.array([_mono_value(m, c, p) for m in monos], dtype=np.int64))
        vals.append(mu)
    a = np.array(rows, dtype=np.int64)
    if linalg.rank(a, p) < len(monos):
        raise ValueError("interpolation matrix is singular; nodes not in general position")
    coeffs = linalg.solve(a, np.array(vals, dtype=np.int64), p)
    return CubicForm.from_coefficients(coeffs, p)


def _mono_value(mono: tuple[int, ...], point: np.ndarray, p: int) -> int:
    val = 1
    for i in mono:
        val = val * int(point[i]) % p
    return val


def _quotient_pfaffian_at(sigma: Trivector, u, v1) -> int | None:
    """Quotient Pfaffian of sigma(u,.,.) by (u, v1); None when u, v1 are
    dependent (the Pfaffian extends there by polynomial continuity)."""
    p = sigma.p
    u = linalg.as_field(u, p).reshape(-1)
    v1 = linalg.as_field(v1, p).reshape(-1)
    if Subspace.from_rows(np.vstack([u, v1]), sigma.n, p).dim < 2:
        return None
    return pfaffian_mod_radical(sigma.contract1(u).mat, u, v1, p)


def cubic_singularity_probe(cubic: CubicForm, v1_coords) -> np.ndarray:
    """The six formal partial derivatives of the cubic at the given point."""
    return cubic.gradient(v1_coords)


def k3_member(
    sigma: Trivector,
    flag: Flag,
    u8: Subspace,
    search_p: int | None = None,
) -> tuple[bool, Subspace | None]:
    """Two-condition membership for an 8-space over the (V1, V6) flag.

    (a) sigma(v1, ., .) vanishes on u8;
    (b) some 3-dim subspace T of u8/V1 satisfies sigma(T, T, u8) = 0.
    Returns (True, U4) with U4 = V1 + lift(T) when both hold.

    The search for T is exhaustive over Gr(3, 7)(F_p) in a pruned
    formulation: every valid T lies inside the common annihilator
    A(t) = {w : sigma(t, w, u8) = 0} of each of its own points t, so
    scanning points t1 with dim A(t1) >= 3 and the planes of A(t1)/t1
    visits every candidate.  Practical only at p in {3, 5}.
    """
    p = sigma.p
    if search_p is None:
        search_p = p
    if search_p != p:
        raise ValueError("the inner search runs over the coefficient field itself")
    if p not in (3, 5):
        raise ValueError("the exhaustive inner search is limited to p in {3, 5}")
    if u8.dim != 8:
        raise ValueError(f"expected an 8-dimensional subspace, got dim {u8.dim}")
    if not u8.contains(flag[1]):
        raise ValueError("the 8-space must contain V6")
    v1 = flag[0].basis[0]
    b8 = u8.basis

    if sigma.contract1(v1).restrict(u8).mat.any():
        return (False, None)

    g = np.einsum("xi,yj,zk,ijk->xyz", b8, b8, b8, sigma.tensor) % p

    v1c = u8.coords_of(v1)
    line = Subspace.from_rows(v1c, 8, p)
    comp = list(line.complement_pivots())
    forms = g[np.ix_(comp, comp)].transpose(2, 0, 1) % p
    forms = np.ascontiguousarray(forms.reshape(8, 7, 7))

    reps = np.vstack(list(scan.projective_chunks(6, p)))
    stacked = np.tensordot(reps, forms.transpose(1, 0, 2), axes=([1], [0])) % p

    kdims = 7 - scan.batched_rank(stacked, p)
    for i in np.nonzero(kdims >= 3)[0]:
        t1 = reps[i]
        ker = linalg.kernel(stacked[i].reshape(8, 7), p)
        t1_sub = Subspace.from_rows(t1, 7, p)
        kspace = Subspace.from_rows(ker, 7, p)
        if not kspace.contains(t1_sub):
            continue
        comp_rows = complement_rows(kspace, t1_sub)
        for plane in all_subspaces(len(comp_rows), 2, p):
            t_rows = [t1]
            for prow in plane.basis:
                vec = np.zeros(7, dtype=np.int64)
                for c, r in zip(prow, comp_rows):
                    vec = (vec + c * r) % p
                t_rows.append(vec)
            t_mat = np.array(t_rows, dtype=np.int64) % p
            if _isotropic_triple(forms, t_mat, p):
                lift = np.zeros((3, 8), dtype=np.int64)
                lift[:, comp] = t_mat
                u4_rows = np.vstack([v1c[None, :], lift])
                u4 = Subspace.from_rows(u4_rows @ b8 % p, sigma.n, p)
                if u4.dim == 4:
                    return (True, u4)
    return (False, None)


def _isotropic_triple(forms: np.ndarray, t_mat: np.ndarray, p: int) -> bool:
    for c in range(forms.shape[0]):
        m = forms[c]
        for i in range(3):
            for j in range(i + 1, 3):
                if int(t_mat[i] @ m @ t_mat[j] % p):
                    return False
    return True


def lagrangian_planes(omega: np.ndarray, p: int) -> list[Subspace]:
    """All omega-isotropic 2-planes of F_p^4 for a nondegenerate skew form."""
    out = []
    for s in all_subspaces(4, 2, p):
        b = s.basis
        if int(b[0] @ omega @ b[1] % p) == 0:
            out.append(s)
    return out


def k3_witness_search(sigma: Trivector, flag: Flag) -> tuple[Subspace, Subspace] | None:
    """Scan all isotropic extensions U8 of V6 for a k3_member witness.

    Returns (U8, U4) for the first hit in canonical order, or None.
    """
    p = sigma.p
    v6 = flag[1]
    v1 = flag[0].basis[0]
    comp = list(v6.complement_pivots())
    m = sigma.contract1(v1).mat
    omega = m[np.ix_(comp, comp)] % p
    if linalg.rank(omega, p) != 4:
        raise ValueError("the induced form on the 4-dim quotient must be nondegenerate")
    for plane in lagrangian_planes(omega, p):
        lift = np.zeros((2, sigma.n), dtype=np.int64)
        lift[:, comp] = plane.basis
        u8 = v6.join(Subspace.from_rows(lift, sigma.n, p))
        if u8.dim != 8:
            continue
        ok, u4 = k3_member(sigma, flag, u8)
        if ok:
            return (u8, u4)
    return None


def conic_fiber(sigma: Trivector, v4: Subspace, v8: Subspace) -> list[Subspace]:
    """Planes T of v8/v4 with sigma vanishing on v4 + lift(T).

    Exhausts all (p^2+1)(p^2+p+1) planes of the 4-dim quotient; a smooth
    plane conic over F_p has exactly p+1 points, which is the expected
    cardinality.
    """
    if v4.dim != 4 or v8.dim != 8 or not v8.contains(v4):
        raise ValueError("need a 4-space inside an 8-space")
    p = sigma.p
    b8 = v8.basis
    v4_in_8 = Subspace.from_rows([v8.coords_of(r) for r in v4.basis], 8, p)
    comp = list(v4_in_8.complement_pivots())
    out = []
    for plane in all_subspaces(4, 2, p):
        lift = np.zeros((2, 8), dtype=np.int64)
        lift[:, comp] = plane.basis
        w6 = v4.join(Subspace.from_rows(lift @ b8 % p, sigma.n, p))
        if w6.dim == 6 and dv_member(sigma, w6):
            out.append(plane)
    return out


def _minor_quartics(sigma: Trivector, subsets) -> np.ndarray:
    """Principal Pfaffian minors of the contraction, as quartics in the point.

    For each index subset of size 8 the Pfaffian of sigma(u,.,.) on it is
    a degree-4 polynomial in u; the returned (monomials, len(subsets))
    coefficient matrix is ordered like monomials_of_degree(n, 4).
    """
    from .trivector import perfect_matchings

    n, p = sigma.n, sigma.p
    tensor = sigma.tensor
    monos = monomials_of_degree(n, 4)
    mono_index = {m: i for i, m in enumerate(monos)}
    cols = []
    for subset in subsets:
        idx = list(subset)
        acc: dict[tuple, int] = {}
        for sign, pairs in perfect_matchings(len(subset)):
            terms: dict[tuple, int] = {(): sign % p}
            for a, b in pairs:
                row = tensor[:, idx[a], idx[b]]
                grown: dict[tuple, int] = {}
                for mono, c in terms.items():
                    for i in range(n):
                        ci = int(row[i])
                        if ci:
                            key = tuple(sorted(mono + (i,)))
                            grown[key] = (grown.get(key, 0) + c * ci) % p
                terms = grown
            for mono, c in terms.items():
                acc[mono] = (acc.get(mono, 0) + c) % p
        col = np.zeros(len(monos), dtype=np.int64)
        for mono, c in acc.items():
            col[mono_index[mono]] = c
        cols.append(col)
    return np.stack(cols, axis=1)


_QUARTIC_INDEX: dict[int, tuple[np.ndarray, ...]] = {}


def _quartic_gather_arrays(n: int) -> tuple[np.ndarray, ...]:
    from itertools import combinations_with_replacement

    cached = _QUARTIC_INDEX.get(n)
    if cached is None:
        pairs = list(combinations_with_replacement(range(n), 2))
        pair_index = {pq: i for i, pq in enumerate(pairs)}
        monos = monomials_of_degree(n, 4)
        i2 = np.array([a for a, _ in pairs], dtype=np.int64)
        j2 = np.array([b for _, b in pairs], dtype=np.int64)
        i4 = np.array([pair_index[m[:2]] for m in monos], dtype=np.int64)
        j4 = np.array([pair_index[m[2:]] for m in monos], dtype=np.int64)
        cached = (i2, j2, i4, j4)
        _QUARTIC_INDEX[n] = cached
    return cached


def _batched_quartic_eval(points: np.ndarray, coeffs: np.ndarray, p: int) -> np.ndarray:
    """Values of quartic forms at a batch of points, shape (B, forms).

    Splits each monomial into two quadratic gathers; the accumulation
    runs through float64 when 715-ish terms of size p^5 stay under 2^53,
    else through int64 with reduction first.
    """
    i2, j2, i4, j4 = _quartic_gather_arrays(points.shape[1])
    x2 = points[:, i2] * points[:, j2]
    prod = x2[:, i4] * x2[:, j4]
    if coeffs.shape[0] * p**5 < (1 << 53):
        vals = prod.astype(np.float64) @ coeffs.astype(np.float64)
        return np.rint(vals).astype(np.int64) % p
    return (prod % p) @ coeffs % p


def _grid_quartic_zeros(quartics: np.ndarray, base, dirs, p: int) -> np.ndarray:
    """Common-zero parameters of quartic forms on an affine grid, (H, m).

    The grid is base + t @ dirs over all t in F_p^m.  Each form restricts
    to a polynomial of degree <= 4 per t-coordinate, so its values on the
    whole grid follow from 5^m interpolation nodes by per-axis Vandermonde
    transforms; everything stays exact mod p.
    """
    m = len(dirs)
    forms = quartics.shape[1]
    if m == 0:
        vals = _batched_quartic_eval(np.asarray(base, dtype=np.int64)[None, :], quartics, p)
        return np.zeros((1, 0), dtype=np.int64) if not vals.any() else np.zeros((0, 0), np.int64)
    nodes = np.stack(
        np.meshgrid(*([np.arange(5)] * m), indexing="ij"), axis=-1
    ).reshape(-1, m)
    pts = (nodes @ dirs + base) % p
    vals = _batched_quartic_eval(pts, quartics, p).reshape((5,) * m + (forms,))
    small = np.vander(np.arange(5), 5, increasing=True) % p
    small_inv = linalg.inverse(small, p)
    coeffs = vals
    for axis in range(m):
        coeffs = np.moveaxis(
            np.tensordot(small_inv, coeffs, axes=([1], [axis])) % p, 0, axis
        )
    big = np.vander(np.arange(p), 5, increasing=True) % p
    grid = coeffs
    for axis in range(m):
        grid = np.moveaxis(np.tensordot(big, grid, axes=([1], [axis])) % p, 0, axis)
    flat = grid.reshape(-1, forms)
    hit = ~flat.any(axis=1)
    if not hit.any():
        return np.zeros((0, m), dtype=np.int64)
    idx = np.flatnonzero(hit)
    out = np.empty((len(idx), m), dtype=np.int64)
    rem = idx.copy()
    for c in range(m - 1, -1, -1):
        out[:, c] = rem % p
        rem //= p
    return out


def sample_peskine_points(
    sigma: Trivector,
    rng,
    count: int,
    avoid: Subspace | None = None,
    max_patches: int = 200,
) -> list[np.ndarray]:
    """Random rank-drop points at genericity primes, by patch scanning.

    Scans the projectivization of random 4-dimensional subspaces: two
    principal Pfaffian minors of the contraction, precomputed as quartics
    in the point, are evaluated on each pivot chart's affine grid through
    Vandermonde factorization, and the common zeros get exact rank
    confirmation.  Points inside `avoid` are skipped.  Deduplicates
    canonical representatives; raises if the patch budget runs out first.
    """
    from .scan import batched_contract1, batched_rank

    p, n = sigma.p, sigma.n
    bound = n - 4
    subsets = (tuple(range(bound + 2)), tuple(range(n - bound - 2, n)))
    quartics = _minor_quartics(sigma, subsets)
    seen: set[bytes] = set()
    out: list[np.ndarray] = []
    for trial in range(max_patches):
        patch = linalg.sample_full_rank(rng, 4, n, p)
        for pivot in range(4):
            base = patch[pivot]
            dirs = patch[pivot + 1 :]
            params = _grid_quartic_zeros(quartics, base, dirs, p)
            if not len(params):
                continue
            cand = (params @ dirs + base) % p
            ranks = batched_rank(batched_contract1(sigma, cand), p)
            for v, r in zip(cand, ranks):
                if r > bound:
                    continue
                if avoid is not None and avoid.contains_vector(v):
                    continue
                first = int(np.flatnonzero(v)[0])
                canon = v * linalg.inv_mod(int(v[first]), p) % p
                key = canon.tobytes()
                if key in seen:
                    continue
                seen.add(key)
                out.append(canon)
                if len(out) >= count:
                    return out
    raise ValueError("patch budget exhausted before collecting enough points")
