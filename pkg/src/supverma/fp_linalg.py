"""Exact linear algebra over the prime field F_p.

Matrices are plain ``numpy`` int64 arrays whose entries are kept reduced
to ``[0, p)``.  Scalars are Python ints in the same range.  Every routine
is a pure function of its arguments.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

# float64 matmul is exact while every partial sum stays below 2**53
_FLOAT_EXACT = 2**53


class NoSolution(Exception):
    """Raised by :func:`solve` when ``A x = b`` is inconsistent."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_modulus(p: int) -> int:
    """Validate an odd prime modulus; characteristic 2 is rejected."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"modulus {p!r} is not prime")
    if p == 2:
        raise ValueError("characteristic 2 unsupported")
    return int(p)


def reduce_mod(a, p: int) -> np.ndarray:
    return np.mod(np.asarray(a, dtype=np.int64), p)


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, p - 2, p)


def neg_one(p: int) -> int:
    return p - 1


def sign(exponent: int, p: int) -> int:
    """(-1)**exponent as an element of F_p."""
    return 1 if exponent % 2 == 0 else p - 1


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product mod p; routes through BLAS when float64 is exact."""
    a = np.asarray(a)
    b = np.asarray(b)
    inner = a.shape[-1]
    if inner * (p - 1) ** 2 < _FLOAT_EXACT:
        out = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.mod(out.astype(np.int64), p)
    return np.mod(np.matmul(a.astype(object), b.astype(object)), p).astype(np.int64)


def mat_power(a: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.eye(a.shape[0], dtype=np.int64)
    base = reduce_mod(a, p)
    while e:
        if e & 1:
            result = matmul(result, base, p)
        base = matmul(base, base, p)
        e >>= 1
    return result


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


# ---------------------------------------------------------------------------
# binomials


def _binom_small(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


def _lucas(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        ni, ki = n % p, k % p
        if ki > ni:
            return 0
        out = out * _binom_small(ni, ki) % p
        n //= p
        k //= p
    return out


def binom_mod_p(n, k, p: int) -> int:
    """Product of C(n_i, k_i) mod p via Lucas' theorem.

    ``n`` and ``k`` may be integers or equal-length sequences.  Any
    component with k_i > n_i makes the product zero.
    """
    check_modulus(p)
    if isinstance(n, (int, np.integer)):
        return _lucas(int(n), int(k), p)
    n = tuple(int(x) for x in n)
    k = tuple(int(x) for x in k)
    if len(n) != len(k):
        raise ValueError("binom_mod_p: shape mismatch")
    return reduce(lambda acc, nk: acc * _lucas(nk[0], nk[1], p) % p, zip(n, k), 1)


# ---------------------------------------------------------------------------
# elimination


def rref(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivot choice is deterministic: scanning columns left to right, the first
    row (from the current position down) with a nonzero entry.
    """
    a = reduce_mod(m, p).copy()
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * inv_mod(int(a[r, c]), p) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: np.ndarray, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : m x = 0}, returned as the columns of a matrix."""
    m = np.asarray(m)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return identity(cols)
    r, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = zeros(cols, len(free))
    for j, f in enumerate(free):
        basis[f, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-r[i, f]) % p
    return basis


def row_space_basis(blocks: Iterable[np.ndarray], cols: int, p: int,
                    chunk: int = 4096) -> np.ndarray:
    """Echelon basis for the row space of a tall matrix given in pieces.

    Keeps memory bounded for constraint systems with many more rows than
    columns; zero and duplicate rows are discarded before elimination.
    """
    basis = zeros(0, cols)
    pending: list[np.ndarray] = []
    size = 0

    def flush(basis, pending):
        stack = np.vstack([basis] + pending)
        stack = stack[np.any(stack != 0, axis=1)]
        if stack.shape[0] == 0:
            return zeros(0, cols)
        stack = np.unique(stack, axis=0)
        r, piv = rref(stack, p)
        return r[: len(piv)]

    for blk in blocks:
        blk = reduce_mod(blk, p).reshape(-1, cols)
        blk = blk[np.any(blk != 0, axis=1)]
        if blk.shape[0] == 0:
            continue
        pending.append(blk)
        size += blk.shape[0]
        if size >= chunk:
            basis = flush(basis, pending)
            pending, size = [], 0
    if pending:
        basis = flush(basis, pending)
    return basis


def nullspace_stacked(blocks: Iterable[np.ndarray], cols: int, p: int) -> np.ndarray:
    return nullspace(row_space_basis(blocks, cols, p), p)


def solve(a: np.ndarray, b: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """One solution of ``a x = b`` plus a kernel basis of ``a``.

    ``b`` may be a vector or a matrix of right-hand sides.  Raises
    :class:`NoSolution` if the system is inconsistent.
    """
    a = reduce_mod(a, p)
    b = reduce_mod(b, p)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    if a.ndim != 2 or b.shape[0] != a.shape[0]:
        raise ValueError(f"solve: shape mismatch {a.shape} vs {b.shape}")
    n = a.shape[1]
    aug, pivots = rref(np.hstack([a, b]), p)
    if any(pc >= n for pc in pivots):
        raise NoSolution("inconsistent system")
    x = zeros(n, b.shape[1])
    for i, pc in enumerate(pivots):
        x[pc] = aug[i, n:]
    kernel = nullspace(a, p)
    return (x[:, 0] if vec else x), kernel


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug, pivots = rref(np.hstack([reduce_mod(a, p), identity(n)]), p)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return aug[:, n:]


def in_span(vectors: np.ndarray, target: np.ndarray, p: int) -> bool:
    """Whether every column of ``target`` lies in the column span of ``vectors``."""
    if vectors.shape[1] == 0:
        return not np.any(reduce_mod(target, p))
    return rank(np.hstack([vectors, target]), p) == rank(vectors, p)


def first_nonzero(m: np.ndarray) -> tuple[int, ...] | None:
    idx = np.argwhere(np.asarray(m) != 0)
    if idx.size == 0:
        return None
    return tuple(int(i) for i in idx[0])


def kron_sylvester(left: Sequence[np.ndarray], right: Sequence[np.ndarray],
                   signs: Sequence[int], p: int) -> np.ndarray:
    """Constraint matrix of ``X A_i - s_i B_i X = 0`` on vec(X) (row-major X).

    ``left`` holds the A_i (n x n), ``right`` the B_i (m x m); X is m x n.
    """
    rows = []
    for a, b, s in zip(left, right, signs):
        n = a.shape[0]
        m = b.shape[0]
        # vec_r(X A) = (I_m kron A^T) vec_r(X);  vec_r(B X) = (B kron I_n) vec_r(X)
        rows.append((np.kron(identity(m), a.T) - s * np.kron(b, identity(n))) % p)
    return np.vstack(rows) if rows else zeros(0, 0)
