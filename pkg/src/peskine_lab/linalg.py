"""Dense exact linear algebra over F_p.

Matrices are numpy int64 arrays with entries reduced to [0, p).  Supported
primes are odd and below 2**31, so a product of two reduced entries never
overflows int64; sums of up to ~2**18 such products stay safe as well, which
covers every matrix dimension used here.

Conventions:
    * `rref` returns the reduced row echelon form with zero rows dropped,
      pivots scaled to 1, and pivot columns cleared elsewhere.  Two row
      spaces are equal iff their rref matrices are identical.
    * `kernel` returns rows spanning the right null space, themselves in
      rref, so kernels compare by identity too.
"""

from __future__ import annotations

import numpy as np

MAX_PRIME = 1 << 31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    """Validate a field modulus: odd prime with 3 <= p < 2**31."""
    if not isinstance(p, (int, np.integer)):
        raise TypeError(f"modulus must be an int, got {type(p).__name__}")
    p = int(p)
    if p < 3 or p >= MAX_PRIME or not is_prime(p):
        raise ValueError(f"modulus must be an odd prime in [3, 2^31), got {p}")
    return p


def inv_mod(x: int, p: int) -> int:
    return pow(int(x) % p, -1, p)


def as_field(mat, p: int) -> np.ndarray:
    """Coerce to an int64 array reduced mod p."""
    arr = np.asarray(mat, dtype=np.int64) % p
    return arr


def mat_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact product mod p.

    Uses float64 BLAS when the bound p^2 * inner < 2^53 guarantees exact
    integer arithmetic, otherwise falls back to int64.
    """
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    if p * p * inner < (1 << 53):
        prod = np.dot(a.astype(np.float64), b.astype(np.float64))
        return (np.rint(prod).astype(np.int64)) % p
    return np.dot(a, b) % p


def rref(mat, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form.

    Returns (R, pivots) where R has one row per pivot (zero rows dropped),
    each pivot equals 1, pivot columns are zero elsewhere, and pivot column
    indices strictly increase.
    """
    a = as_field(mat, p).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * inv_mod(a[r, c], p) % p
        mask = np.ones(rows, dtype=bool)
        mask[r] = False
        a[mask] = (a[mask] - np.outer(a[mask, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], tuple(pivots)


def rank(mat, p: int) -> int:
    return len(rref(mat, p)[1])


def kernel(mat, p: int) -> np.ndarray:
    """Rows spanning {v : mat @ v = 0 mod p}, in rref."""
    a = np.asarray(mat, dtype=np.int64)
    rows, cols = a.shape
    red, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in pivots]
    if not free:
        return np.zeros((0, cols), dtype=np.int64)
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = (-red[r, fc]) % p
    return rref(basis, p)[0]


def solve(mat, rhs, p: int) -> np.ndarray:
    """One solution of mat @ x = rhs mod p (free variables set to 0).

    Raises ValueError when the system is inconsistent.
    """
    a = as_field(mat, p)
    b = as_field(rhs, p).reshape(-1)
    aug = np.hstack([a, b[:, None]])
    red, pivots = rref(aug, p)
    cols = a.shape[1]
    if cols in pivots:
        raise ValueError("inconsistent linear system")
    x = np.zeros(cols, dtype=np.int64)
    for r, c in enumerate(pivots):
        x[c] = red[r, cols]
    return x


def det(mat, p: int) -> int:
    a = as_field(mat, p).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"determinant needs a square matrix, got {a.shape}")
    result = 1
    for c in range(n):
        nz = np.nonzero(a[c:, c])[0]
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            a[[c, i]] = a[[i, c]]
            result = -result % p
        result = result * int(a[c, c]) % p
        inv = inv_mod(a[c, c], p)
        for r in range(c + 1, n):
            if a[r, c]:
                a[r] = (a[r] - a[r, c] * inv % p * a[c]) % p
    return result


def inverse(mat, p: int) -> np.ndarray:
    a = as_field(mat, p)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"inverse needs a square matrix, got {a.shape}")
    aug = np.hstack([a, np.eye(n, dtype=np.int64)])
    red, pivots = rref(aug, p)
    if len(pivots) < n or pivots[:n] != tuple(range(n)):
        raise ValueError("matrix is singular mod p")
    return red[:n, n:]


def sample_matrix(rng, rows: int, cols: int, p: int) -> np.ndarray:
    return rng.matrix(rows, cols, p)


def sample_gl(rng, n: int, p: int) -> np.ndarray:
    """Uniform invertible n x n matrix, by rejection."""
    while True:
        g = rng.matrix(n, n, p)
        if det(g, p) != 0:
            return g


def sample_full_rank(rng, rows: int, cols: int, p: int) -> np.ndarray:
    """Uniform rows x cols matrix of rank min(rows, cols), by rejection."""
    target = min(rows, cols)
    while True:
        m = rng.matrix(rows, cols, p)
        if rank(m, p) == target:
            return m
