"""Exact dense linear algebra over any field implementing +, -, *, /.

Matrices are lists of row lists.  Entries may be rationals or
:class:`~tricong.exact.QuadExtElem`; the routines only use field operations
and exact zero tests, so they work uniformly over both.
"""

from __future__ import annotations

from itertools import permutations
from typing import List, Optional, Sequence, Tuple

from ._ground import Rat, rat
from .exact import QuadExtElem


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, QuadExtElem) else x == 0


def _inv(x):
    return x.inverse() if isinstance(x, QuadExtElem) else rat(1) / x


def rref(rows: Sequence[Sequence]) -> Tuple[List[List], List[int]]:
    """Reduced row echelon form; returns (matrix, pivot column indices)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(mat)):
            if not _is_zero(mat[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = _inv(mat[r][c])
        mat[r] = [inv * v for v in mat[r]]
        for i in range(len(mat)):
            if i != r and not _is_zero(mat[i][c]):
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> List[List]:
    """Basis of the right kernel of the matrix (rows = linear conditions)."""
    mat, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [rat(0)] * ncols
        vec[fc] = rat(1)
        for r_idx, pc in enumerate(pivots):
            vec[pc] = -mat[r_idx][fc]
        basis.append(vec)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Optional[List]:
    """One exact solution of A x = b, or None when inconsistent.

    Free variables are set to zero.
    """
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    mat, pivots = rref(aug)
    ncols = len(rows[0]) if rows else 0
    if ncols in pivots:
        return None  # pivot in the augmented column: inconsistent
    x = [rat(0)] * ncols
    for r_idx, pc in enumerate(pivots):
        x[pc] = mat[r_idx][ncols]
    return x


def det(rows: Sequence[Sequence]):
    """Determinant by Leibniz expansion (intended for n <= 4)."""
    n = len(rows)
    if n == 0:
        return rat(1)
    total = None
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = rows[0][perm[0]]
        for i in range(1, n):
            term = term * rows[i][perm[i]]
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return total


def mat_vec(rows: Sequence[Sequence], vec: Sequence) -> List:
    out = []
    for r in rows:
        acc = None
        for a, b in zip(r, vec):
            t = a * b
            acc = t if acc is None else acc + t
        out.append(acc)
    return out


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> List[List]:
    bt = list(zip(*b))
    return [[sum_prod(row, col) for col in bt] for row in a]


def sum_prod(xs: Sequence, ys: Sequence):
    acc = None
    for x, y in zip(xs, ys):
        t = x * y
        acc = t if acc is None else acc + t
    return acc


def row_space_contains(rows: Sequence[Sequence], vec: Sequence) -> bool:
    """True when ``vec`` lies in the row space of ``rows``."""
    base = [list(r) for r in rows]
    r0 = rank(base)
    return rank(base + [list(vec)]) == r0


def intersect_row_spaces(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> List[List]:
    """Basis of the intersection of two row spaces."""
    # x in span(a) & span(b): x = u·a = v·b; solve [a^T | -b^T] nullspace.
    rows_a = [list(r) for r in a]
    rows_b = [list(r) for r in b]
    na, nb = len(rows_a), len(rows_b)
    cond = []
    for c in range(ncols):
        cond.append([rows_a[i][c] for i in range(na)] + [-rows_b[j][c] for j in range(nb)])
    sols = nullspace(cond, na + nb)
    out = []
    for s in sols:
        vec = [rat(0)] * ncols
        for i in range(na):
            for c in range(ncols):
                vec[c] = vec[c] + s[i] * rows_a[i][c]
        if any(not _is_zero(v) for v in vec):
            out.append(vec)
    # Reduce to an independent basis.
    red, piv = rref(out)
    return [red[i] for i in range(len(piv))]
