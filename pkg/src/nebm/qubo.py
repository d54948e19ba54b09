"""Sparse symmetric integer QUBO problems: exact costs, local fields, deltas.

The cost being minimised is ``C(x) = x^T Q x`` over binary ``x``. ``Q`` is
symmetric with integer coefficients; each off-diagonal value is stored once
for the pair ``(i, j)`` with ``i < j`` and read for both orientations, so an
edge contributes ``2 * q_ij`` to the cost when both endpoints are set. All
arithmetic is exact in 64-bit integers, which holds costs and deltas for any
problem up to ``n = 2^16`` variables with 8-bit synaptic weights by a wide
margin.

Incremental solvers keep the local-field vector ``z_i = sum_{j != i} q_ij
x_j`` alongside the assignment; ``apply_flips`` maintains it in O(degree)
per flipped variable through a compressed-row adjacency index.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass

import numpy as np

#: Off-diagonal magnitude limit imposed by 8-bit synaptic weights.
HW_WEIGHT_LIMIT = 127


@dataclass(eq=False)
class QuboMatrix:
    """Symmetric integer QUBO coefficients in sparse triplet + adjacency form.

    Attributes
    ----------
    n : int
        Number of binary variables.
    diag : np.ndarray
        Dense ``int64`` array of the ``n`` diagonal coefficients ``q_ii``.
    off_i, off_j, off_q : np.ndarray
        Off-diagonal triplets with ``off_i < off_j``, sorted lexicographically,
        no duplicates, no stored zeros. ``off_q`` is ``int64``.
    adj_ptr, adj_j, adj_q : np.ndarray
        Compressed-row adjacency over both orientations: the neighbours of
        ``i`` and their coefficients are ``adj_j[adj_ptr[i]:adj_ptr[i+1]]``
        and the matching slice of ``adj_q``.
    hardware_faithful : bool
        When set, every ``|q_ij|`` off the diagonal is at most 127.
    """

    n: int
    diag: np.ndarray
    off_i: np.ndarray
    off_j: np.ndarray
    off_q: np.ndarray
    adj_ptr: np.ndarray
    adj_j: np.ndarray
    adj_q: np.ndarray
    hardware_faithful: bool = False

    @property
    def num_offdiag(self) -> int:
        return int(self.off_q.size)

    def degree(self, i: int) -> int:
        return int(self.adj_ptr[i + 1] - self.adj_ptr[i])

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Views of the neighbour indices and coefficients of variable ``i``."""
        lo, hi = int(self.adj_ptr[i]), int(self.adj_ptr[i + 1])
        return self.adj_j[lo:hi], self.adj_q[lo:hi]

    def __repr__(self) -> str:
        return f"QuboMatrix(n={self.n}, offdiag={self.num_offdiag})"


def build_qubo(n, entries, hardware_faithful: bool = False) -> QuboMatrix:
    """Canonicalise ``(i, j, coeff)`` triplets into a :class:`QuboMatrix`.

    Diagonal entries accumulate into ``diag``. An off-diagonal pair given in
    one orientation only is taken as already symmetric. When both ``(i, j)``
    and ``(j, i)`` appear, the two accumulated values are replaced by their
    arithmetic mean; an odd sum has no integer mean and is rejected rather
    than rounded. Coefficients must be integers (``bool`` and floats are
    rejected); zero off-diagonals are dropped.
    """
    n = operator.index(n)
    if n < 0:
        raise ValueError(f"variable count must be non-negative, got {n}")
    diag = np.zeros(n, dtype=np.int64)
    upper: dict[tuple[int, int], int] = {}
    lower: dict[tuple[int, int], int] = {}
    for i, j, coeff in entries:
        i = operator.index(i)
        j = operator.index(j)
        if isinstance(coeff, bool):
            raise ValueError(f"coefficient for ({i},{j}) must be an integer")
        try:
            coeff = operator.index(coeff)
        except TypeError:
            raise ValueError(
                f"coefficient for ({i},{j}) must be an integer, got {coeff!r}"
            ) from None
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"entry ({i},{j}) out of range for n={n}")
        if i == j:
            diag[i] += coeff
        elif i < j:
            upper[(i, j)] = upper.get((i, j), 0) + coeff
        else:
            lower[(j, i)] = lower.get((j, i), 0) + coeff

    merged: dict[tuple[int, int], int] = {}
    for key in upper.keys() | lower.keys():
        if key in upper and key in lower:
            total = upper[key] + lower[key]
            if total % 2 != 0:
                raise ValueError(
                    f"entries for pair {key} sum to {total}; "
                    "the symmetric mean is not an integer"
                )
            q = total // 2
        else:
            q = upper.get(key, 0) + lower.get(key, 0)
        if q != 0:
            merged[key] = q

    if hardware_faithful:
        for (i, j), q in merged.items():
            if abs(q) > HW_WEIGHT_LIMIT:
                raise ValueError(
                    f"|q_{i}{j}| = {abs(q)} exceeds the 8-bit weight "
                    f"limit {HW_WEIGHT_LIMIT}"
                )

    keys = sorted(merged)
    off_i = np.array([k[0] for k in keys], dtype=np.int64)
    off_j = np.array([k[1] for k in keys], dtype=np.int64)
    off_q = np.array([merged[k] for k in keys], dtype=np.int64)

    # Both-orientation adjacency, grouped by row, neighbours ordered by column.
    rows = np.concatenate([off_i, off_j])
    cols = np.concatenate([off_j, off_i])
    qs = np.concatenate([off_q, off_q])
    order = np.lexsort((cols, rows))
    counts = np.bincount(rows, minlength=n)
    adj_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=adj_ptr[1:])
    return QuboMatrix(
        n=n,
        diag=diag,
        off_i=off_i,
        off_j=off_j,
        off_q=off_q,
        adj_ptr=adj_ptr,
        adj_j=cols[order],
        adj_q=qs[order],
        hardware_faithful=hardware_faithful,
    )


def as_assignment(x, n: int) -> np.ndarray:
    """Validate and return ``x`` as an ``int8`` vector of ``n`` bits."""
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"assignment must have length {n}, got shape {arr.shape}")
    if arr.dtype != np.int8:
        arr = arr.astype(np.int8)
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("assignment entries must be 0 or 1")
    return arr


def evaluate_cost(q: QuboMatrix, x) -> int:
    """Exact cost ``x^T Q x`` as a Python integer.

    Computed straight from the stored triplets (each off-diagonal counted for
    both orientations), independent of the local-field machinery.
    """
    x = as_assignment(x, q.n)
    xi = x.astype(np.int64)
    quad = int(q.off_q @ (xi[q.off_i] * xi[q.off_j])) if q.off_q.size else 0
    return int(q.diag @ xi) + 2 * quad


def local_fields(q: QuboMatrix, x) -> np.ndarray:
    """Local fields ``z_i = sum_{j != i} q_ij x_j`` as an ``int64`` array."""
    x = as_assignment(x, q.n)
    xi = x.astype(np.int64)
    z = np.zeros(q.n, dtype=np.int64)
    if q.off_q.size:
        np.add.at(z, q.off_i, q.off_q * xi[q.off_j])
        np.add.at(z, q.off_j, q.off_q * xi[q.off_i])
    return z


def delta_cost(q: QuboMatrix, x, z: np.ndarray, i: int) -> int:
    """Exact cost change of flipping variable ``i``.

    ``+(q_ii + 2 z_i)`` when ``x_i`` is 0, the negation when it is 1. ``z``
    must be the local fields of ``x``.
    """
    i = operator.index(i)
    if not 0 <= i < q.n:
        raise IndexError(f"index {i} out of range for n={q.n}")
    d = int(q.diag[i]) + 2 * int(z[i])
    return d if x[i] == 0 else -d


def apply_flips(q: QuboMatrix, x: np.ndarray, z: np.ndarray, flipped) -> None:
    """Toggle the given variables in place and patch ``z`` incrementally.

    Only the neighbours of flipped variables are touched, O(degree) per
    flip; the result is identical to a full ``local_fields`` recompute.
    ``flipped`` must hold distinct indices.
    """
    fl = np.asarray(flipped, dtype=np.int64).ravel()
    if fl.size == 0:
        return
    if np.any(fl < 0) or np.any(fl >= q.n):
        raise IndexError(f"flip index out of range for n={q.n}")
    if fl.size > 1 and np.unique(fl).size != fl.size:
        raise ValueError("flipped indices must be distinct")
    x[fl] ^= 1
    for i, new_bit in zip(fl.tolist(), x[fl].tolist()):
        lo, hi = int(q.adj_ptr[i]), int(q.adj_ptr[i + 1])
        if lo == hi:
            continue
        if new_bit:
            z[q.adj_j[lo:hi]] += q.adj_q[lo:hi]
        else:
            z[q.adj_j[lo:hi]] -= q.adj_q[lo:hi]


def save_qubo(q: QuboMatrix, path) -> None:
    """Write the instance-file form: ``qubo <n> <nnz>`` then ``i j coeff`` lines.

    Non-zero diagonal entries come first (ascending index, written as
    ``i i coeff``), then the off-diagonal triplets in sorted order, so equal
    problems serialise byte-identically.
    """
    diag_idx = np.nonzero(q.diag)[0]
    nnz = diag_idx.size + q.off_q.size
    with open(path, "w") as f:
        f.write(f"qubo {q.n} {nnz}\n")
        for i in diag_idx.tolist():
            f.write(f"{i} {i} {int(q.diag[i])}\n")
        for i, j, v in zip(q.off_i.tolist(), q.off_j.tolist(), q.off_q.tolist()):
            f.write(f"{i} {j} {v}\n")


def load_qubo(path, hardware_faithful: bool = False) -> QuboMatrix:
    """Parse the instance-file format written by :func:`save_qubo`.

    Lines starting with ``#`` and blank lines are ignored. Coefficients must
    be exact integers. Raises ``ValueError`` on any malformed content.
    """
    entries = []
    n = None
    nnz = None
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 3 or parts[0] != "qubo":
                    raise ValueError(
                        f"{path}:{lineno}: expected header 'qubo <n> <nnz>'"
                    )
                n = int(parts[1])
                nnz = int(parts[2])
                continue
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'i j coeff'")
            try:
                i, j, v = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: coefficients must be exact integers"
                ) from None
            entries.append((i, j, v))
    if n is None:
        raise ValueError(f"{path}: missing 'qubo' header")
    if len(entries) != nnz:
        raise ValueError(
            f"{path}: header promises {nnz} entries, found {len(entries)}"
        )
    return build_qubo(n, entries, hardware_faithful=hardware_faithful)
