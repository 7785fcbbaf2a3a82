"""Exact rational linear algebra used by the structural checks."""

from __future__ import annotations

from fractions import Fraction


def _to_rows(matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in matrix]


def row_echelon(matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns, computed over Q."""
    rows = _to_rows(matrix)
    if not rows:
        return rows, []
    n_cols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix) -> int:
    return len(row_echelon(matrix)[1])


def left_inverse(matrix) -> list[list[Fraction]]:
    """Return L with L @ A = I for a full-column-rank A (rows x cols).

    Raises ValueError when A has a nontrivial kernel.
    """
    rows = _to_rows(matrix)
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    # Row-reduce [A | I]; the pivot rows of the right block give L.
    aug = [row + [Fraction(int(i == j)) for j in range(n_rows)] for i, row in enumerate(rows)]
    reduced, pivots = row_echelon(aug)
    if pivots[:n_cols] != list(range(n_cols)):
        raise ValueError("matrix is not injective")
    return [reduced[i][n_cols:] for i in range(n_cols)]


def matmul(a, b) -> list[list[Fraction]]:
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]
