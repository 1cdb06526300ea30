"""Fibration machinery over a (V1, V6) divisor flag.

Everything here lives downstream of one nondegenerate two-form: for a
trivector with sigma(v1, V6, .) = 0 the contraction at v1 descends to
omega on V10/V6, and perps under omega drive four constructions:

  * sigma_prime_rank: the rank of sigma(l, ., .) on U7-perp, quotiented
    by the two radical directions l and v1 (values 4 or 6 in practice;
    4 detects the rank-drop locus).
  * sigma_dprime: a 20-coordinate residue of sigma at a flagged pair
    U2 inside U7, landing in the orbit-model space of `orbits`.
  * quadric_pencil: two interpolated quadrics on P(U7/V1) whose common
    zeros catch the images of rank-drop points.
  * thm21_fiber: the fiber of the projection-from-V3 construction,
    computable both exhaustively and by an affine-linear solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .orbits import BElement, project_to_B
from .polynomial import monomials_of_degree
from .rng import Rng
from .scan import batched_contract1, batched_rank, projective_chunks, run_chunked
from .subspaces import Flag, Subspace, complement_rows
from .trivector import SkewForm, Trivector, pfaffian

logger = logging.getLogger(__name__)

_QUADRIC_NODE_SEED = 0x9AD4C0DE


@dataclass(frozen=True)
class OmegaData:
    """The descended two-form of a (V1, V6) flag on the 4-dim quotient."""

    flag: Flag
    complement_pivots: tuple[int, ...]
    omega: SkewForm

    @property
    def p(self) -> int:
        return self.omega.p


def omega_data(sigma: Trivector, flag: Flag) -> OmegaData:
    """Build omega = sigma(v1, ., .) on V10/V6 in canonical quotient coords.

    Raises when the form is degenerate (the caller should resample sigma).
    """
    v6 = flag[1]
    v1 = flag[0].basis[0]
    pivots = v6.complement_pivots()
    p = sigma.p
    basis_vecs = np.zeros((4, sigma.n), dtype=np.int64)
    for r, c in enumerate(pivots):
        basis_vecs[r, c] = 1
    contracted = sigma.contract1(v1).mat
    mat = basis_vecs @ contracted @ basis_vecs.T % p
    form = SkewForm.from_matrix(mat, p)
    if form.rank() != 4:
        raise ValueError("descended two-form is degenerate; resample sigma")
    return OmegaData(flag=flag, complement_pivots=pivots, omega=form)


def u7_perp(od: OmegaData, u7: Subspace) -> Subspace:
    """The 9-dim perp of U7: preimage of (U7/V6)-perp under omega, plus V6."""
    v6 = od.flag[1]
    if u7.dim != 7 or not u7.contains(v6):
        raise ValueError("need a 7-dim space containing the divisor 6-space")
    p = od.p
    qrows = np.array([v6.quotient_coords(r) for r in u7.basis], dtype=np.int64)
    red, _ = linalg.rref(qrows, p)
    if red.shape[0] != 1:
        raise ValueError("U7 does not project to a line in the quotient")
    line = red[0]
    perp_rows = linalg.kernel((line @ od.omega.mat % p).reshape(1, 4), p)
    lifted = np.array([v6.lift_quotient(r) for r in perp_rows], dtype=np.int64)
    out = v6.join(Subspace.from_rows(lifted, u7.n, p))
    if out.dim != 9:
        raise AssertionError("perp construction produced a wrong dimension")
    return out


def sigma_prime_rank(sigma: Trivector, flag: Flag, u7: Subspace, l) -> int:
    """Rank of sigma(l, ., .) on the 7-dim quotient U7perp/(l + V1).

    Equals the rank of the 9x9 restriction to U7perp because both l and
    v1 lie in its radical; the quotient is still formed explicitly so the
    returned object matches the definition.
    """
    p = sigma.p
    l = linalg.as_field(l, p).reshape(-1)
    if flag[1].contains_vector(l):
        raise ValueError("the probe vector must lie off the divisor 6-space")
    if not u7.contains_vector(l):
        raise ValueError("the probe vector must lie in U7")
    od = omega_data(sigma, flag)
    u9 = u7_perp(od, u7)
    b = u9.basis
    m = b @ sigma.contract1(l).mat @ b.T % p
    x = u9.coords_of(l)
    y = u9.coords_of(flag[0].basis[0])
    rad = Subspace.from_rows(np.vstack([x, y]), 9, p)
    if rad.dim != 2:
        raise AssertionError("radical pair collapsed unexpectedly")
    comp = rad.complement_pivots()
    quot = m[np.ix_(comp, comp)]
    return linalg.rank(quot, p)


def sigma_prime_rank_scan(
    sigma: Trivector,
    flag: Flag,
    u7: Subspace,
    threads: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized sweep of P(U7) minus P(V6).

    Returns (points, full_ranks, prime_ranks): canonical representatives
    in ambient coordinates, the rank of sigma(l, ., .) on the whole space,
    and the rank of its restriction to U7perp (equal to the quotient rank).
    """
    p = sigma.p
    od = omega_data(sigma, flag)
    u9 = u7_perp(od, u7)
    b9 = u9.basis.astype(np.int64)
    sub = np.einsum(
        "ui,aj,ijk->uak", u7.basis, b9, sigma.tensor, optimize=True
    )
    sub = np.tensordot(sub, b9, axes=([2], [1])) % p
    v6 = flag[1]

    def work(block: np.ndarray):
        pts = block @ u7.basis % p
        off = ~np.array([v6.contains_vector(v) for v in pts], dtype=bool)
        pts = pts[off]
        if not len(pts):
            return (np.zeros((0, sigma.n), dtype=np.int64), [], [])
        full = batched_rank(batched_contract1(sigma, pts), p)
        restricted = np.tensordot(block[off], sub, axes=([1], [0])) % p
        prime = batched_rank(restricted, p)
        return (pts, list(full), list(prime))

    points: list[np.ndarray] = []
    fulls: list[int] = []
    primes: list[int] = []
    for pts, full, prime in run_chunked(work, projective_chunks(6, p), threads):
        points.append(pts)
        fulls.extend(full)
        primes.extend(prime)
    return (
        np.vstack(points),
        np.array(fulls, dtype=np.int64),
        np.array(primes, dtype=np.int64),
    )


def thm21_fiber(
    sigma: Trivector,
    flag: Flag,
    v4: Subspace,
    mode: str = "exhaustive",
) -> list[tuple[int, ...]]:
    """Points of the affine chart P(V4) minus P(V3) on the rank-drop locus.

    Writes l = v + a1 w1 + a2 w2 + a3 w3 with (w_i) the canonical basis of
    V3 and v the canonical completion; returns the sorted list of hits a.

    exhaustive mode scans all p^3 points of the chart; linear mode mirrors
    the projection argument: the annihilator V7 of the three constant
    forms sigma(v, w_i, .) is independent of a, and the rank condition
    becomes three affine-linear equations on the complement of V4 in V7.
    """
    p = sigma.p
    v3 = flag[0]
    if v4.dim != 4 or not v4.contains(v3):
        raise ValueError("need a 4-space containing the flagged 3-space")
    comp = complement_rows(v4, v3)
    if len(comp) != 1:
        raise AssertionError("complement of V3 in V4 must be a single row")
    v = comp[0]
    w = v3.basis
    mv = sigma.contract1(v).mat
    phis = w @ mv % p
    if linalg.rank(phis, p) != 3:
        raise ValueError("contraction forms are dependent; resample V4")

    if mode == "exhaustive":
        if p > 11:
            raise ValueError("exhaustive fiber scan is for enumeration primes")
        grid = np.indices((p, p, p)).reshape(3, -1).T.astype(np.int64)
        pts = (grid @ w + v) % p
        ranks = batched_rank(batched_contract1(sigma, pts), p)
        hits = grid[ranks <= sigma.n - 4]
        return sorted(tuple(int(x) for x in row) for row in hits)
    if mode != "linear":
        raise ValueError(f"unknown mode {mode!r}")

    v7 = Subspace.from_rows(linalg.kernel(phis, p), sigma.n, p)
    if v7.dim != 7 or not v7.contains(v4):
        raise ValueError("annihilator construction failed; resample V4")
    b = np.array(complement_rows(v7, v4), dtype=np.int64)
    pairs = [(0, 1), (0, 2), (1, 2)]
    a_mat = np.zeros((3, 3), dtype=np.int64)
    c_vec = np.zeros(3, dtype=np.int64)
    for row, (r, s) in enumerate(pairs):
        c_vec[row] = sigma.eval3(v, b[r], b[s])
        for i in range(3):
            a_mat[row, i] = sigma.eval3(w[i], b[r], b[s])
    try:
        particular = linalg.solve(a_mat, (-c_vec) % p, p)
    except ValueError:
        return []
    hom = linalg.kernel(a_mat, p)
    if len(hom) == 0:
        return [tuple(int(x) for x in particular)]
    if p ** len(hom) > 200_000:
        raise ValueError("fiber is positive-dimensional beyond the enumeration cap")
    shape = (p,) * len(hom)
    coeffs = np.indices(shape).reshape(len(hom), -1).T.astype(np.int64)
    sols = (coeffs @ hom + particular) % p
    return sorted(tuple(int(x) for x in row) for row in sols)


def sigma_dprime(
    sigma: Trivector,
    flag: Flag,
    u2: Subspace,
    u7: Subspace,
    frame: np.ndarray | None = None,
    generator: np.ndarray | None = None,
) -> BElement:
    """The 20-coordinate residue of sigma at V1 < U2 < U7.

    The ambient 7-space is U7perp/U2 with frame order (two directions off
    U7, then five directions of U7 off U2); the model quotient kills the
    wedge of the first two, matching `orbits`.  Entries are
    sigma(u0, frame_i, frame_j) for the canonical (or given) generator u0
    of U2 off V1; rescaling u0 rescales the output.  Entries are
    independent of U2-shifts of the frame rows.
    """
    p = sigma.p
    v1 = flag[0]
    if u2.dim != 2 or not u2.contains(v1) or not u7.contains(u2):
        raise ValueError("need V1 < U2 < U7 with dim U2 = 2")
    od = omega_data(sigma, flag)
    u9 = u7_perp(od, u7)
    if frame is None:
        top = complement_rows(u9, u7)
        mid = complement_rows(u7, u2)
        frame = np.array(top + mid, dtype=np.int64)
    else:
        frame = linalg.as_field(frame, p)
        if frame.shape != (7, sigma.n):
            raise ValueError("frame must provide seven ambient rows")
        for r in frame:
            if not u9.contains_vector(r):
                raise ValueError("frame rows must lie in the perp 9-space")
        if u7.join(Subspace.from_rows(frame[:2], sigma.n, p)).dim != 9:
            raise ValueError("first two frame rows must span the off-U7 part")
        for r in frame[2:]:
            if not u7.contains_vector(r):
                raise ValueError("last five frame rows must lie in U7")
        if u2.join(Subspace.from_rows(frame[2:], sigma.n, p)).dim != 7:
            raise ValueError("last five frame rows must complement U2 in U7")
    if generator is None:
        generator = complement_rows(u2, v1)[0]
    else:
        generator = linalg.as_field(generator, p).reshape(-1)
        if not u2.contains_vector(generator) or v1.contains_vector(generator):
            raise ValueError("generator must lie in U2 off V1")
    mat = frame @ sigma.contract1(generator).mat @ frame.T % p
    return project_to_B(mat, p)


def prescribed_dprime_sigma(
    xmat: np.ndarray, p: int
) -> tuple[Trivector, Flag, Subspace, Subspace, np.ndarray, np.ndarray]:
    """Build the explicit generating section hitting a prescribed residue.

    xmat is a 7x7 skew matrix over F_p, read against the frame directions
    (7, 8, 2, 3, 4, 5, 6) of the standard basis e_0..e_9.  Returns
    (sigma, flag, U2, U7, frame, generator) in standard position:
    V1 = <e1>, V6 = <e1..e6>, U2 = <e0, e1>, U7 = <e0..e6>; the residue of
    sigma at this configuration is exactly project_to_B(xmat).
    """
    xmat = linalg.as_field(xmat, p)
    if xmat.shape != (7, 7) or ((xmat + xmat.T) % p).any():
        raise ValueError("need a skew 7x7 target matrix")
    from .trivector import triple_index, triples

    n = 10
    dirs = (7, 8, 2, 3, 4, 5, 6)
    index = triple_index(n)
    coeffs = np.zeros(len(triples(n)), dtype=np.int64)
    coeffs[index[(0, 1, 9)]] = (-1) % p
    coeffs[index[(1, 7, 8)]] = 1
    for i in range(7):
        for j in range(i + 1, 7):
            val = int(xmat[i, j])
            if not val:
                continue
            a, bb = dirs[i], dirs[j]
            sign = 1
            if a > bb:
                a, bb, sign = bb, a, -1
            coeffs[index[(0, a, bb)]] = (coeffs[index[(0, a, bb)]] + sign * val) % p
    sigma = Trivector.from_coeffs(coeffs, n, p)

    def span(rows_idx):
        rows = np.zeros((len(rows_idx), n), dtype=np.int64)
        for r, i in enumerate(rows_idx):
            rows[r, i] = 1
        return Subspace.from_rows(rows, n, p)

    v1 = span([1])
    v6 = span([1, 2, 3, 4, 5, 6])
    u2 = span([0, 1])
    u7 = span([0, 1, 2, 3, 4, 5, 6])
    flag = Flag((v1, v6))
    frame = np.zeros((7, n), dtype=np.int64)
    for r, d in enumerate(dirs):
        frame[r, d] = 1
    generator = np.zeros(n, dtype=np.int64)
    generator[0] = 1
    return sigma, flag, u2, u7, frame, generator


@dataclass(frozen=True)
class QuadricPencil:
    """Two interpolated quadrics on P(U7/V1) and the data to map into it."""

    p: int
    q_a: np.ndarray = field(compare=False)
    q_b: np.ndarray = field(compare=False)
    u7: Subspace = field(compare=False)
    base_point: tuple[int, ...]
    degenerate: bool

    def value_at(self, c) -> tuple[int, int]:
        c = linalg.as_field(c, self.p).reshape(-1)
        return (
            int(c @ self.q_a @ c % self.p),
            int(c @ self.q_b @ c % self.p),
        )

    def gradient_rank(self, c) -> int:
        """Rank of the 2x6 Jacobian of (Q_A, Q_B) at c (factors of 2 dropped)."""
        c = linalg.as_field(c, self.p).reshape(-1)
        rows = np.vstack([self.q_a @ c % self.p, self.q_b @ c % self.p])
        return linalg.rank(rows, self.p)

    def member_rank(self, alpha: int, beta: int) -> int:
        mixed = (alpha * self.q_a + beta * self.q_b) % self.p
        return linalg.rank(mixed, self.p)


def _interpolate_quadric(values_fn, p: int, label: str) -> np.ndarray:
    """Fit a homogeneous quadratic in 6 variables through sampled nodes."""
    monos = monomials_of_degree(6, 2)
    rng = Rng(_QUADRIC_NODE_SEED).child(label)
    nodes = []
    while len(nodes) < len(monos) + 10:
        c = rng.ints(6, p)
        if c.any():
            nodes.append(c)
    rows = np.zeros((len(nodes), len(monos)), dtype=np.int64)
    rhs = np.zeros(len(nodes), dtype=np.int64)
    for r, c in enumerate(nodes):
        rhs[r] = values_fn(c)
        for k, mono in enumerate(monos):
            val = 1
            for v in mono:
                val = val * int(c[v]) % p
            rows[r, k] = val
    if linalg.rank(rows, p) != len(monos):
        raise ValueError("interpolation nodes are degenerate; resample")
    coeffs = linalg.solve(rows, rhs, p)
    q = np.zeros((6, 6), dtype=np.int64)
    inv2 = linalg.inv_mod(2, p)
    for k, mono in enumerate(monos):
        i, j = mono
        if i == j:
            q[i, i] = coeffs[k]
        else:
            q[i, j] = q[j, i] = coeffs[k] * inv2 % p
    return q


def quadric_pencil(sigma: Trivector, flag: Flag, u7: Subspace) -> QuadricPencil:
    """Interpolate the two Pfaffian quadrics attached to U7.

    For each of the two canonical directions extending U7 inside its perp
    9-space, the value at [u] in P(U7/V1) is the Pfaffian of sigma(u, ., .)
    on the 8-space U7 + direction, taken modulo the radical pair (u, v1).
    That value is a homogeneous quadratic in the quotient coordinates.
    """
    from .loci import pfaffian_mod_radical

    p = sigma.p
    od = omega_data(sigma, flag)
    u9 = u7_perp(od, u7)
    dirs = complement_rows(u9, u7)
    if len(dirs) != 2:
        raise AssertionError("perp extension must add exactly two directions")
    v1 = flag[0]
    v1_vec = v1.basis[0]
    lift_rows = np.array(complement_rows(u7, v1), dtype=np.int64)

    quadrics = []
    for tag, direction in zip(("a", "b"), dirs):
        w8 = u7.join(Subspace.span_of(direction, n=sigma.n, p=p))
        b8 = w8.basis
        y = w8.coords_of(v1_vec)

        def value(c, _b8=b8, _w8=w8, _y=y):
            u = c @ lift_rows % p
            m8 = _b8 @ sigma.contract1(u).mat @ _b8.T % p
            return pfaffian_mod_radical(m8, _w8.coords_of(u), _y, p)

        quadrics.append(_interpolate_quadric(value, p, f"quadric-{tag}-{p}"))
    q_a, q_b = quadrics
    degenerate = not (q_a.any() or q_b.any())
    if degenerate:
        logger.warning("both quadrics vanished identically; degenerate pencil")
    v6 = flag[1]
    qrows = np.array([v6.quotient_coords(r) for r in u7.basis], dtype=np.int64)
    red, _ = linalg.rref(qrows, p)
    base = tuple(int(x) for x in red[0])
    return QuadricPencil(
        p=p, q_a=q_a, q_b=q_b, u7=u7, base_point=base, degenerate=degenerate
    )


def quotient_u7_coords(u7: Subspace, v1: Subspace, vec) -> np.ndarray:
    """Coordinates of vec in the canonical basis of U7/V1."""
    p = u7.p
    rows = np.array(complement_rows(u7, v1), dtype=np.int64)
    stacked = np.vstack([v1.basis, rows])
    sol = linalg.solve(stacked.T, linalg.as_field(vec, p).reshape(-1), p)
    return sol[v1.dim :]


def projective_rep(c: np.ndarray, p: int) -> tuple[int, ...]:
    """Scale so the first nonzero coordinate is 1."""
    c = linalg.as_field(c, p).reshape(-1)
    for x in c:
        if x:
            inv = linalg.inv_mod(int(x), p)
            return tuple(int(v) * inv % p for v in c)
    raise ValueError("zero vector has no projective representative")


def singular_fiber_probe(
    sigma: Trivector, flag: Flag, u7: Subspace, point
) -> int:
    """Jacobian rank of the quadric pair at a common zero (2 = smooth)."""
    pencil = quadric_pencil(sigma, flag, u7)
    if pencil.value_at(point) != (0, 0):
        raise ValueError("probe point is not on both quadrics")
    return pencil.gradient_rank(point)


def fiber_profile(pencil: QuadricPencil) -> dict[str, int]:
    """Scan P5 for common zeros of the pencil and their gradient ranks."""
    p = pencil.p
    sizes = {"points": 0, "rank0": 0, "rank1": 0, "rank2": 0}
    for block in projective_chunks(5, p):
        va = np.einsum("bi,ij,bj->b", block, pencil.q_a, block) % p
        vb = np.einsum("bi,ij,bj->b", block, pencil.q_b, block) % p
        hits = block[(va == 0) & (vb == 0)]
        if not len(hits):
            continue
        grads = np.stack(
            [hits @ pencil.q_a.T % p, hits @ pencil.q_b.T % p], axis=1
        )
        ranks = batched_rank(grads, p)
        sizes["points"] += len(hits)
        for r in (0, 1, 2):
            sizes[f"rank{r}"] += int((ranks == r).sum())
    return sizes


@dataclass(frozen=True)
class LineProbe:
    """Outcome of the pencil-line probe at one locus point."""

    count: int
    off_v6_degenerate: int
    v1_degenerate: bool


def birationality_probe(
    sigma: Trivector,
    flag: Flag,
    l,
    u7: Subspace | None = None,
) -> LineProbe:
    """Count the sigma'-degenerate points on the line P(U2) through [v1], [l].

    The p points off the divisor are tested through sigma_prime_rank
    dropping below the generic value 6 (a closed condition: on a line
    fully inside the locus, isolated points fall to rank 2 while the rest
    sit at rank 4, and both belong).  The point [v1] itself is counted via
    the residue criterion: its mod-A2 rank dropping to 2 or below is
    exactly the case where the whole line sits in the locus.
    """
    p = sigma.p
    l = linalg.as_field(l, p).reshape(-1)
    v1 = flag[0]
    v6 = flag[1]
    u2 = v1.join(Subspace.span_of(l, n=sigma.n, p=p))
    if u2.dim != 2:
        raise ValueError("probe point coincides with the flagged line")
    if u7 is None:
        u7 = v6.join(Subspace.span_of(l, n=sigma.n, p=p))
    od = omega_data(sigma, flag)
    u9 = u7_perp(od, u7)
    b9 = u9.basis
    v1_vec = v1.basis[0]
    pts = (np.arange(p, dtype=np.int64)[:, None] * v1_vec[None, :] + l) % p
    restricted = np.einsum(
        "ai,bij,cj->bac", b9, batched_contract1(sigma, pts), b9, optimize=True
    ) % p
    ranks = batched_rank(restricted, p)
    off = int((ranks <= 4).sum())
    resid = sigma_dprime(sigma, flag, u2, u7)
    v1_deg = linalg.rank(resid.mod_a2_block(), p) <= 2
    return LineProbe(count=off + int(v1_deg), off_v6_degenerate=off, v1_degenerate=v1_deg)


def dprime_rank2_test(sigma: Trivector, flag: Flag):
    """Batch predicate on the 8-coordinate chart of pairs U2 < U7.

    Chart: t in F^3 picks U7 = V6 + <c0 + t1 c1 + t2 c2 + t3 c3> through
    the canonical complement directions of V6; s in F^5 picks the U2
    generator through the canonical complement of V1 in U7.  Tests whether
    the residue's mod-A2 rank is at most 2.
    """
    p = sigma.p
    v1 = flag[0]
    v6 = flag[1]
    pivots = v6.complement_pivots()

    def test_batch(points: np.ndarray) -> np.ndarray:
        out = np.zeros(len(points), dtype=bool)
        for idx, row in enumerate(points):
            t = row[:3]
            s = row[3:]
            qcoords = np.zeros(4, dtype=np.int64)
            qcoords[0] = 1
            qcoords[1:] = t
            direction = v6.lift_quotient(qcoords)
            u7 = v6.join(Subspace.span_of(direction, n=sigma.n, p=p))
            rows = complement_rows(u7, v1)
            gen = (rows[0] + s @ np.array(rows[1:], dtype=np.int64)) % p
            u2 = v1.join(Subspace.span_of(gen, n=sigma.n, p=p))
            try:
                resid = sigma_dprime(sigma, flag, u2, u7)
            except ValueError:
                continue
            out[idx] = linalg.rank(resid.mod_a2_block(), p) <= 2
        return out

    return test_batch
