"""Shared test utilities: dense reference models and random instance factories."""

import numpy as np

from nebm import QuboMatrix, build_qubo


def dense_matrix(q: QuboMatrix) -> np.ndarray:
    """Full symmetric n x n matrix equivalent of a sparse instance."""
    m = np.diag(q.diag.astype(np.int64))
    for i, j, v in zip(q.off_i.tolist(), q.off_j.tolist(), q.off_q.tolist()):
        m[i, j] = v
        m[j, i] = v
    return m


def dense_cost(q: QuboMatrix, x) -> int:
    """Reference x^T Q x straight from the dense matrix."""
    xv = np.asarray(x, dtype=np.int64)
    return int(xv @ dense_matrix(q) @ xv)


def dense_fields(q: QuboMatrix, x) -> np.ndarray:
    """Reference local fields from the dense matrix, diagonal zeroed."""
    m = dense_matrix(q)
    np.fill_diagonal(m, 0)
    return m @ np.asarray(x, dtype=np.int64)


def random_qubo(rng: np.random.Generator, n: int, density: float = 0.3,
                lo: int = -128, hi: int = 127) -> QuboMatrix:
    """Random symmetric integer instance with the given off-diagonal density."""
    entries = []
    for i in range(n):
        entries.append((i, i, int(rng.integers(lo, hi + 1))))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                v = int(rng.integers(lo, hi + 1))
                if v:
                    entries.append((i, j, v))
    return build_qubo(n, entries)


def random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n).astype(np.int8)


def brute_min_cost(q: QuboMatrix) -> int:
    """Exact minimum cost by full enumeration; keep n small."""
    assert q.n <= 16
    best = 0
    m = dense_matrix(q)
    for word in range(1 << q.n):
        x = np.array([(word >> k) & 1 for k in range(q.n)], dtype=np.int64)
        best = min(best, int(x @ m @ x))
    return best
