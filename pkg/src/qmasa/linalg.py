"""Small exact linear algebra over the rationals.

Vectors are sparse dicts ``{index: Fraction}``; matrices are lists of such
rows.  Everything is Gauss-Jordan elimination with Fraction pivots, which is
plenty for the window sizes used in this package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Sequence

__all__ = ["SingularMatrix", "row_reduce", "rank", "nullspace", "solve", "in_span"]


class SingularMatrix(ArithmeticError):
    pass


def _clean(row: dict) -> dict:
    return {k: Fraction(v) for k, v in row.items() if v != 0}


def row_reduce(rows: Iterable[dict], order: Sequence[Hashable] | None = None):
    """Reduced row echelon form of sparse rows.

    Returns ``(pivots, reduced)`` where ``reduced[i]`` has pivot column
    ``pivots[i]`` normalized to 1 and eliminated from every other row.
    ``order`` fixes the column priority for pivot selection; by default the
    sorted set of all column keys is used.
    """
    work = [_clean(r) for r in rows]
    work = [r for r in work if r]
    if order is None:
        cols = set()
        for r in work:
            cols.update(r)
        order = sorted(cols)
    rank_of = {c: i for i, c in enumerate(order)}

    pivots: list = []
    reduced: list[dict] = []
    for r in work:
        # eliminate existing pivots from the incoming row
        for pc, pr in zip(pivots, reduced):
            f = r.get(pc)
            if f:
                for k, v in pr.items():
                    nv = r.get(k, 0) - f * v
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
        if not r:
            continue
        pc = min(r, key=rank_of.__getitem__)
        inv = 1 / r[pc]
        r = {k: v * inv for k, v in r.items()}
        # back-substitute into earlier rows
        for i, pr in enumerate(reduced):
            f = pr.get(pc)
            if f:
                for k, v in r.items():
                    nv = pr.get(k, 0) - f * v
                    if nv:
                        pr[k] = nv
                    else:
                        pr.pop(k, None)
        pivots.append(pc)
        reduced.append(r)
    return pivots, reduced


def rank(rows: Iterable[dict]) -> int:
    return len(row_reduce(rows)[0])


def nullspace(rows: Iterable[dict], columns: Sequence[Hashable]) -> list[dict]:
    """Basis of ``{x : row . x = 0 for all rows}`` over the given columns."""
    columns = list(columns)
    pivots, reduced = row_reduce(rows, order=columns)
    pivset = set(pivots)
    basis = []
    for free in columns:
        if free in pivset:
            continue
        vec = {free: Fraction(1)}
        for pc, r in zip(pivots, reduced):
            v = r.get(free)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> list:
    """Solve a square system ``matrix @ x = rhs`` exactly.

    ``rhs`` entries may be any objects supporting ``+`` and multiplication by
    Fraction (for instance :class:`~qmasa.poly.PolyP`).
    """
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    b = list(rhs)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrix(f"singular matrix at column {col}")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        b[col] = b[col] * inv
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] = b[r] - b[col] * f
    return b


def in_span(vec: dict, rows: Iterable[dict]) -> bool:
    rows = list(rows)
    return rank(rows + [vec]) == rank(rows)
