"""Exact integer linear algebra: fraction-free elimination and Smith normal form.

Two independent methods back every injectivity verdict: Bareiss fraction-free
Gaussian elimination computes the rational rank without ever leaving the
integers, and the Smith normal form recomputes the rank (and elementary
divisors) by unimodular row/column reduction.  The left transform of the
Smith form provides explicit integer kernel witnesses.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

Matrix = List[List[int]]


def _copy(matrix: Sequence[Sequence[int]]) -> Matrix:
    return [[int(v) for v in row] for row in matrix]


def bareiss_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank over Q via the Bareiss fraction-free elimination (exact integers only)."""
    m = _copy(matrix)
    if not m or not m[0]:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    prev = 1
    r = 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        rank += 1
        if r == rows:
            break
    return rank


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss algorithm)."""
    m = _copy(matrix)
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise ValueError("determinant requires a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot_row = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot_row is None:
                return 0
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _nearest_div(x: int, p: int) -> int:
    """Quotient with minimal-magnitude remainder: |x - q*p| <= |p|/2.

    Keeps the Euclidean descent in the Smith reduction logarithmic, which is
    what bounds intermediate entry growth.
    """
    q = x // p
    r = x - q * p
    if 2 * abs(r) > abs(p):
        q += 1 if (r > 0) == (p > 0) else -1
    return q


def smith_normal_form(
    matrix: Sequence[Sequence[int]],
) -> Tuple[Matrix, Matrix, Matrix]:
    """Return (D, U, V) with U * matrix * V = D diagonal and U, V unimodular.

    The diagonal entries satisfy the divisibility chain d_1 | d_2 | ... .
    """
    a = _copy(matrix)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def move_min_pivot(t: int) -> bool:
        """Swap the submatrix entry of least absolute value into the pivot slot."""
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                val = abs(a[i][j])
                if val and (best is None or val < best):
                    best = val
                    pivot = (i, j)
        if pivot is None:
            return False
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        return True

    t = 0
    while t < rows and t < cols:
        if not move_min_pivot(t):
            break
        while True:
            # one reduction pass; remainders stay in place and the globally
            # smallest entry is re-promoted each pass, which keeps the
            # Euclidean descent (and hence entry growth) under control
            for i in range(t + 1, rows):
                if a[i][t]:
                    row_op(i, t, _nearest_div(a[i][t], a[t][t]))
            for j in range(t + 1, cols):
                if a[t][j]:
                    col_op(j, t, _nearest_div(a[t][j], a[t][t]))
            if any(a[i][t] for i in range(t + 1, rows)) or any(
                a[t][j] for j in range(t + 1, cols)
            ):
                move_min_pivot(t)
                continue
            # make the pivot divide the rest of the submatrix
            fixed = True
            for i in range(t + 1, rows):
                if any(a[i][j] % a[t][t] for j in range(t + 1, cols)):
                    row_op(t, i, -1)  # adds row i into row t
                    fixed = False
                    break
            if fixed:
                break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def smith_rank(matrix: Sequence[Sequence[int]]) -> int:
    d, _, _ = smith_normal_form(matrix)
    return sum(1 for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i] != 0)


def elementary_divisors(matrix: Sequence[Sequence[int]]) -> List[int]:
    d, _, _ = smith_normal_form(matrix)
    n = min(len(d), len(d[0]) if d else 0)
    return [d[i][i] for i in range(n) if d[i][i] != 0]


def left_kernel_witness(matrix: Sequence[Sequence[int]]) -> Optional[List[int]]:
    """A nonzero integer row vector w with w * matrix = 0, or None if none exists.

    Rows of the left Smith transform beyond the rank span the left kernel.
    """
    rows = len(matrix)
    if rows == 0:
        return None
    d, u, _ = smith_normal_form(matrix)
    cols = len(d[0]) if d else 0
    rank = sum(1 for i in range(min(rows, cols)) if d[i][i] != 0)
    if rank == rows:
        return None
    witness = u[rank]
    assert any(witness), "unimodular transform row cannot vanish"
    return list(witness)


def mat_vec_left(vector: Sequence[int], matrix: Sequence[Sequence[int]]) -> List[int]:
    """Row vector times matrix."""
    cols = len(matrix[0]) if matrix else 0
    return [sum(vector[i] * matrix[i][j] for i in range(len(matrix))) for j in range(cols)]
