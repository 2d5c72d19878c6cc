"""Exact small linear algebra over Fraction."""
from __future__ import annotations

import itertools
from fractions import Fraction


def solve(A: list[list], b: list) -> list[Fraction] | None:
    """Unique solution of A x = b, or None if A is singular."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [x / p for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def dot(a, b) -> Fraction:
    return sum((Fraction(x) * y for x, y in zip(a, b)), Fraction(0))


def simplex_vertices(rows: list[list], n: int) -> list[list[Fraction]]:
    """Vertices of {v : row . v <= 0 for all rows, sum(v) = 1}."""
    verts = {}
    ones = [Fraction(1)] * n
    for combo in itertools.combinations(range(len(rows)), n - 1):
        A = [list(map(Fraction, rows[i])) for i in combo] + [ones]
        b = [Fraction(0)] * (n - 1) + [Fraction(1)]
        v = solve(A, b)
        if v is None:
            continue
        if all(dot(r, v) <= 0 for r in rows):
            verts[tuple(v)] = v
    return [verts[k] for k in sorted(verts)]


def max_on_slice(d: list, rows: list[list], n: int):
    """max d.v over {row . v <= 0, sum v = 1}; None if that set is empty."""
    vs = simplex_vertices(rows, n)
    if not vs:
        return None
    best = max(vs, key=lambda v: dot(d, v))
    return dot(d, best), best
