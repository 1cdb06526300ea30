"""Linear subspaces of F_p^n with canonical representatives.

A :class:`Subspace` stores the reduced row echelon basis of its row space,
so two objects describe the same subspace iff they compare equal.  Meets
and joins are exact; `quotient_coords` gives coordinates in V/W against the
canonical complement spanned by the standard basis vectors at the non-pivot
columns of W.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Subspace:
    p: int
    n: int
    basis: np.ndarray = field(compare=False)
    pivots: tuple[int, ...]

    @classmethod
    def from_rows(cls, rows, n: int, p: int) -> "Subspace":
        p = linalg.check_prime(p)
        arr = linalg.as_field(rows, p)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.shape[0] == 0:
            arr = arr.reshape(0, n)
        if arr.shape[1] != n:
            raise ValueError(f"rows have {arr.shape[1]} columns, ambient is {n}")
        red, piv = linalg.rref(arr, p)
        return cls(p=p, n=n, basis=_freeze(red), pivots=piv)

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls.from_rows(np.zeros((0, n), dtype=np.int64), n, p)

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls.from_rows(np.eye(n, dtype=np.int64), n, p)

    @classmethod
    def span_of(cls, *vectors, n: int, p: int) -> "Subspace":
        return cls.from_rows(np.array(vectors, dtype=np.int64), n, p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.p == other.p
            and self.n == other.n
            and self.pivots == other.pivots
            and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.pivots, self.basis.tobytes()))

    def contains_vector(self, v) -> bool:
        v = linalg.as_field(v, self.p).reshape(-1)
        if v.shape[0] != self.n:
            raise ValueError(f"vector has length {v.shape[0]}, ambient is {self.n}")
        r = v.copy()
        for row, c in zip(self.basis, self.pivots):
            if r[c]:
                r = (r - r[c] * row) % self.p
        return not r.any()

    def contains(self, other: "Subspace") -> bool:
        self._check_compatible(other)
        return all(self.contains_vector(row) for row in other.basis)

    def meet(self, other: "Subspace") -> "Subspace":
        """Intersection, computed through the dual: rows orthogonal to both
        annihilators span the meet."""
        self._check_compatible(other)
        ann = np.vstack([self.annihilator(), other.annihilator()])
        rows = linalg.kernel(ann, self.p) if ann.shape[0] else np.eye(self.n, dtype=np.int64)
        return Subspace.from_rows(rows, self.n, self.p)

    def join(self, other: "Subspace") -> "Subspace":
        self._check_compatible(other)
        return Subspace.from_rows(np.vstack([self.basis, other.basis]), self.n, self.p)

    def annihilator(self) -> np.ndarray:
        """Rows spanning {f : f . v = 0 for all v in self}."""
        return linalg.kernel(self.basis, self.p)

    def coords_of(self, v) -> np.ndarray:
        """Coordinates of v in the rref basis; raises if v is outside."""
        v = linalg.as_field(v, self.p).reshape(-1)
        coords = v[list(self.pivots)]
        if not np.array_equal(linalg.mat_mul(coords[None, :], self.basis, self.p)[0], v):
            raise ValueError("vector does not lie in the subspace")
        return coords

    def complement_pivots(self) -> tuple[int, ...]:
        """Standard coordinates spanning the canonical complement."""
        return tuple(c for c in range(self.n) if c not in self.pivots)

    def quotient_coords(self, v) -> np.ndarray:
        """Coordinates of v + self in F_p^n / self.

        The class of v is reduced against the basis; the entries at the
        non-pivot columns of the reduction are a full coordinate system on
        the quotient.
        """
        v = linalg.as_field(v, self.p).reshape(-1)
        r = v.copy()
        for row, c in zip(self.basis, self.pivots):
            if r[c]:
                r = (r - r[c] * row) % self.p
        return r[list(self.complement_pivots())]

    def lift_quotient(self, coords) -> np.ndarray:
        """Standard-position lift: inverse of `quotient_coords` modulo self."""
        coords = linalg.as_field(coords, self.p).reshape(-1)
        comp = self.complement_pivots()
        if coords.shape[0] != len(comp):
            raise ValueError(f"expected {len(comp)} quotient coordinates")
        v = np.zeros(self.n, dtype=np.int64)
        v[list(comp)] = coords
        return v

    def transform(self, g: np.ndarray) -> "Subspace":
        """Image under v -> g @ v."""
        rows = linalg.mat_mul(self.basis, linalg.as_field(g, self.p).T, self.p)
        return Subspace.from_rows(rows, self.n, self.p)

    def _check_compatible(self, other: "Subspace") -> None:
        if self.p != other.p or self.n != other.n:
            raise ValueError("subspaces live in different ambient spaces")


def complement_rows(space: Subspace, sub: Subspace) -> list[np.ndarray]:
    """Rows of `space` extending a basis of `sub` to one of `space`.

    Deterministic: walks the canonical basis of `space` in order and keeps
    every row not already spanned.
    """
    rows = [r for r in sub.basis]
    out = []
    current = sub
    for r in space.basis:
        if not current.contains_vector(r):
            out.append(r)
            rows.append(r)
            current = Subspace.from_rows(np.array(rows), space.n, space.p)
    return out


def sample_subspace(rng, n: int, k: int, p: int) -> Subspace:
    """Uniform k-dimensional subspace of F_p^n.

    Draws a k x n matrix until it has full rank; row spaces of full-rank
    matrices are equidistributed over the Grassmannian.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        return Subspace.zero(n, p)
    return Subspace.from_rows(linalg.sample_full_rank(rng, k, n, p), n, p)


def all_subspaces(n: int, k: int, p: int):
    """Yield every k-dimensional subspace of F_p^n once, via rref cells."""
    from itertools import combinations, product

    for piv in combinations(range(n), k):
        free_slots = [
            (r, c)
            for r in range(k)
            for c in range(n)
            if c > piv[r] and c not in piv
        ]
        base = np.zeros((k, n), dtype=np.int64)
        for r, c in enumerate(piv):
            base[r, c] = 1
        if not free_slots:
            yield Subspace(p=p, n=n, basis=_freeze(base), pivots=piv)
            continue
        for values in product(range(p), repeat=len(free_slots)):
            mat = base.copy()
            for (r, c), val in zip(free_slots, values):
                mat[r, c] = val
            yield Subspace(p=p, n=n, basis=_freeze(mat), pivots=piv)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^n."""
    if not 0 <= k <= n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (k - i) - 1
    return num // den


@dataclass(frozen=True)
class Flag:
    """Strictly increasing chain of subspaces of one ambient space."""

    spaces: tuple[Subspace, ...]

    def __post_init__(self) -> None:
        if not self.spaces:
            raise ValueError("a flag needs at least one subspace")
        first = self.spaces[0]
        for a, b in zip(self.spaces, self.spaces[1:]):
            a._check_compatible(first)
            if not (b.contains(a) and b.dim > a.dim):
                raise ValueError("flag subspaces must strictly increase")

    @property
    def p(self) -> int:
        return self.spaces[0].p

    @property
    def n(self) -> int:
        return self.spaces[0].n

    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    def __getitem__(self, i: int) -> Subspace:
        return self.spaces[i]

    def transform(self, g: np.ndarray) -> "Flag":
        return Flag(tuple(s.transform(g) for s in self.spaces))
