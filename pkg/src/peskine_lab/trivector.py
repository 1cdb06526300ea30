"""Alternating trivectors on F_p^n and their contractions.

A trivector sigma is stored by its coefficients on the lexicographically
ordered basis e_i ^ e_j ^ e_k, i < j < k. The central objects downstream
are the one-fold contractions sigma(u, ., .), skew bilinear forms whose
rank drops cut out all loci studied here, so this module also carries an
exact Pfaffian and rank machinery for skew matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

from . import linalg
from .subspaces import Subspace


@lru_cache(maxsize=None)
def triples(n: int) -> tuple[tuple[int, int, int], ...]:
    """Index triples i < j < k in lexicographic order."""
    return tuple(combinations(range(n), 3))


@lru_cache(maxsize=None)
def triple_index(n: int) -> dict[tuple[int, int, int], int]:
    return {t: i for i, t in enumerate(triples(n))}


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SkewForm:
    """Skew-symmetric matrix over F_p (zero diagonal enforced)."""

    p: int
    mat: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        m = self.mat
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"skew form needs a square matrix, got {m.shape}")
        if ((m + m.T) % self.p).any():
            raise ValueError("matrix is not skew-symmetric mod p")

    @classmethod
    def from_matrix(cls, mat, p: int) -> "SkewForm":
        return cls(p=p, mat=_freeze(linalg.as_field(mat, p)))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewForm):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.mat, other.mat)

    def __hash__(self) -> int:
        return hash((self.p, self.mat.tobytes()))

    def rank(self) -> int:
        return linalg.rank(self.mat, self.p)

    def kernel(self) -> Subspace:
        return Subspace.from_rows(linalg.kernel(self.mat, self.p), self.n, self.p)

    def pfaffian(self) -> int:
        return pfaffian(self.mat, self.p)

    def apply(self, u, v) -> int:
        u = linalg.as_field(u, self.p)
        v = linalg.as_field(v, self.p)
        return int(u @ self.mat @ v % self.p)

    def restrict(self, s: Subspace) -> "SkewForm":
        return restrict_skew(self, s)


def restrict_skew(form: SkewForm, s: Subspace) -> SkewForm:
    """The form pulled back to the rref basis rows of `s`."""
    if s.n != form.n or s.p != form.p:
        raise ValueError("subspace and form live on different spaces")
    b = s.basis
    mat = linalg.mat_mul(linalg.mat_mul(b, form.mat, form.p), b.T, form.p)
    return SkewForm.from_matrix(mat, form.p)


def pfaffian(mat, p: int) -> int:
    """Pfaffian by expansion along the first remaining row, memoized.

    Pf on zero indices is 1; odd sizes are rejected.  Satisfies
    Pf(M)^2 = det(M).
    """
    m = linalg.as_field(mat, p)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError(f"pfaffian needs a square matrix, got {m.shape}")
    if n % 2:
        raise ValueError(f"pfaffian needs even size, got {n}")
    memo: dict[tuple[int, ...], int] = {}

    def rec(idx: tuple[int, ...]) -> int:
        if not idx:
            return 1
        cached = memo.get(idx)
        if cached is not None:
            return cached
        s0 = idx[0]
        total = 0
        sign = 1
        for k in range(1, len(idx)):
            sk = idx[k]
            entry = int(m[s0, sk])
            if entry:
                rest = idx[1:k] + idx[k + 1 :]
                total += sign * entry * rec(rest)
            sign = -sign
        total %= p
        memo[idx] = total
        return total

    return rec(tuple(range(n)))


def skew_rank(mat, p: int) -> int:
    """Rank of a skew matrix (always even)."""
    return linalg.rank(mat, p)


@lru_cache(maxsize=None)
def perfect_matchings(size: int) -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
    """Signed perfect matchings of {0..size-1}.

    Returns (sign, pairs) terms with
    Pf(M) = sum over terms of sign * prod M[i, j] over pairs (i, j).
    """
    if size % 2:
        raise ValueError(f"perfect matchings need even size, got {size}")

    def rec(idx: tuple[int, ...]):
        if not idx:
            return [(1, ())]
        out = []
        s0 = idx[0]
        sign = 1
        for k in range(1, len(idx)):
            sk = idx[k]
            rest = idx[1:k] + idx[k + 1 :]
            for sub_sign, pairs in rec(rest):
                out.append((sign * sub_sign, ((s0, sk),) + pairs))
            sign = -sign
        return out

    return tuple(rec(tuple(range(size))))


@dataclass(frozen=True)
class Trivector:
    """Alternating 3-form on F_p^n, n even, given by lex-ordered coefficients."""

    p: int
    n: int
    coeffs: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        linalg.check_prime(self.p)
        if self.n % 2 or not 4 <= self.n <= 10:
            raise ValueError(f"ambient dimension must be even in [4, 10], got {self.n}")
        want = len(triples(self.n))
        if self.coeffs.shape != (want,):
            raise ValueError(f"expected {want} coefficients, got {self.coeffs.shape}")

    @classmethod
    def from_coeffs(cls, coeffs, n: int, p: int) -> "Trivector":
        return cls(p=p, n=n, coeffs=_freeze(linalg.as_field(coeffs, p)))

    @classmethod
    def zero(cls, n: int, p: int) -> "Trivector":
        return cls.from_coeffs(np.zeros(len(triples(n)), dtype=np.int64), n, p)

    @classmethod
    def random(cls, rng, n: int, p: int) -> "Trivector":
        return cls.from_coeffs(rng.ints(len(triples(n)), p), n, p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trivector):
            return NotImplemented
        return self.p == other.p and self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.coeffs.tobytes()))

    def coeff(self, i: int, j: int, k: int) -> int:
        """Coefficient on e_i ^ e_j ^ e_k for any distinct i, j, k, with sign."""
        if len({i, j, k}) < 3:
            return 0
        order = sorted((i, j, k))
        sign = _perm_sign((i, j, k))
        c = int(self.coeffs[triple_index(self.n)[tuple(order)]])
        return c * sign % self.p

    @cached_property
    def tensor(self) -> np.ndarray:
        """Full antisymmetric n x n x n coefficient tensor."""
        t = np.zeros((self.n, self.n, self.n), dtype=np.int64)
        for idx, (i, j, k) in enumerate(triples(self.n)):
            c = int(self.coeffs[idx])
            mc = (-c) % self.p
            t[i, j, k] = t[j, k, i] = t[k, i, j] = c
            t[i, k, j] = t[j, i, k] = t[k, j, i] = mc
        t.setflags(write=False)
        return t

    def eval3(self, u, v, w) -> int:
        u = linalg.as_field(u, self.p)
        v = linalg.as_field(v, self.p)
        w = linalg.as_field(w, self.p)
        m1 = np.tensordot(u, self.tensor, axes=([0], [0])) % self.p
        return int(v @ m1 @ w % self.p)

    def contract1(self, u) -> SkewForm:
        """The skew form sigma(u, ., .)."""
        u = linalg.as_field(u, self.p)
        mat = np.tensordot(u, self.tensor, axes=([0], [0])) % self.p
        return SkewForm.from_matrix(mat, self.p)

    def contract2(self, u, v) -> np.ndarray:
        """The covector sigma(u, v, .)."""
        return linalg.as_field(self.contract1(u).mat @ linalg.as_field(v, self.p), self.p)

    def gl_transform(self, g) -> "Trivector":
        """Pullback along g^{-1}: the result tau satisfies
        tau(g u, g v, g w) = sigma(u, v, w)."""
        h = linalg.inverse(linalg.as_field(g, self.p), self.p)
        t = self.tensor
        t = np.tensordot(h, t, axes=([0], [0])) % self.p
        t = np.tensordot(h, t, axes=([0], [1])) % self.p
        t = np.tensordot(h, t, axes=([0], [2])) % self.p
        t = np.transpose(t, (2, 1, 0))
        coeffs = [t[i, j, k] for (i, j, k) in triples(self.n)]
        return Trivector.from_coeffs(np.array(coeffs, dtype=np.int64), self.n, self.p)

    def add(self, other: "Trivector") -> "Trivector":
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("trivectors live on different spaces")
        return Trivector.from_coeffs((self.coeffs + other.coeffs) % self.p, self.n, self.p)

    def scale(self, c: int) -> "Trivector":
        return Trivector.from_coeffs(self.coeffs * (c % self.p) % self.p, self.n, self.p)


def _perm_sign(seq) -> int:
    sign = 1
    seq = list(seq)
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign
