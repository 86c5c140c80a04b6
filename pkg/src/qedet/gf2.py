"""Dense GF(2) linear algebra on numpy uint8 matrices.

Everything here works on 0/1 matrices with one column per variable.  The
sign-tracked, bit-packed elimination used for stabilizer tableaux lives in
:mod:`qedet.pauli`; these helpers cover the plain binary systems that show up
in codeword enumeration, distance search, and support solving.
"""

from __future__ import annotations

import numpy as np


def as_gf2(mat) -> np.ndarray:
    a = np.asarray(mat, dtype=np.uint8) & 1
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return a


def rref(mat) -> tuple[np.ndarray, int, list[int]]:
    """Row-reduce over GF(2).

    Returns:
        (reduced matrix, rank, pivot column indices).  Zero rows are kept in
        place at the bottom so the shape never changes.
    """
    a = as_gf2(mat).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        pivot = r + hits[0]
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        # XOR the pivot row into every other row holding this column.
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a, r, pivots


def rank(mat) -> int:
    return rref(mat)[1]


def in_rowspace(mat, vec) -> bool:
    """True iff ``vec`` is a GF(2) combination of the rows of ``mat``."""
    a = as_gf2(mat)
    v = np.asarray(vec, dtype=np.uint8) & 1
    if v.ndim != 1 or v.shape[0] != a.shape[1]:
        raise ValueError("vector length does not match column count")
    stacked = np.vstack([a, v])
    return rank(stacked) == rank(a)


def solve(mat, rhs) -> np.ndarray | None:
    """One solution x of ``mat @ x = rhs`` over GF(2), or None if inconsistent."""
    a = as_gf2(mat)
    b = np.asarray(rhs, dtype=np.uint8) & 1
    aug = np.hstack([a, b.reshape(-1, 1)])
    red, _, pivots = rref(aug)
    cols = a.shape[1]
    if cols in pivots:
        return None  # pivot in the RHS column: inconsistent system
    x = np.zeros(cols, dtype=np.uint8)
    for i, c in enumerate(pivots):
        x[c] = red[i, cols]
    return x


def nullspace(mat) -> np.ndarray:
    """Basis of {x : mat @ x = 0} as rows; shape (cols - rank, cols)."""
    a = as_gf2(mat)
    red, r, pivots = rref(a)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row_idx, pc in enumerate(pivots):
            if red[row_idx, fc]:
                basis[i, pc] = 1
    return basis


def span(rows_mat) -> np.ndarray:
    """All 2^rank GF(2) combinations of the given rows, one per output row.

    The result is ordered by the Gray-code-free binary counter over the
    reduced basis, which makes the output deterministic for tests.
    """
    basis, r, _ = rref(rows_mat)
    basis = basis[:r]
    cols = rows_mat.shape[1] if hasattr(rows_mat, "shape") else len(rows_mat[0])
    if r == 0:
        return np.zeros((1, cols), dtype=np.uint8)
    if r > 30:
        raise ValueError(f"span of dimension {r} is too large to enumerate")
    counts = np.arange(2**r, dtype=np.uint64)
    sel = (counts[:, None] >> np.arange(r, dtype=np.uint64)[None, :]) & 1
    return (sel.astype(np.uint8) @ basis) & 1
