"""Fiberwise elimination and cell decomposition of Presburger sets."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import lcm
from typing import Iterable, Mapping, Sequence

from .formula import (
    FALSE,
    TRUE,
    Cong,
    Eq,
    Formula,
    Le,
    _clean,
    atom_key,
    branches,
    conj,
    evaluate,
    free_vars,
    is_quantifier_free,
    le,
    literal_formula,
    lt,
    make_cong,
    make_eq,
    make_le,
    subs,
)
from .linear import LinearFunction


@dataclass(frozen=True)
class Point:
    """A (0)-fiber: x equals center."""

    center: LinearFunction

    def contains(self, x: int, env) -> bool:
        return self.center.value(env) == x

    def __str__(self):
        return f"= {self.center}"


@dataclass(frozen=True)
class Interval:
    """A (1)-fiber {lo, lo + n, ..., hi}; lo, hi are congruent to residue mod n when present."""

    lo: LinearFunction | None
    hi: LinearFunction | None
    modulus: int = 1
    residue: int = 0

    def contains(self, x: int, env) -> bool:
        if (x - self.residue) % self.modulus:
            return False
        if self.lo is not None and x < self.lo.value(env):
            return False
        if self.hi is not None and x > self.hi.value(env):
            return False
        return True

    def __str__(self):
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "+inf" if self.hi is None else str(self.hi)
        return f"in [{lo}, {hi}] step {self.modulus} (= {self.residue} mod {self.modulus})"


@dataclass(frozen=True)
class PresCell:
    """Nested cell: coordinate j's data mentions only the base and coordinates before j."""

    vars: tuple
    pieces: tuple
    base: Formula = TRUE

    @property
    def type_vector(self) -> tuple:
        return tuple(0 if isinstance(p, Point) else 1 for p in self.pieces)

    def contains(self, env: Mapping[str, int]) -> bool:
        if not evaluate(self.base, env):
            return False
        for v, p in zip(self.vars, self.pieces):
            if not p.contains(env[v], env):
                return False
        return True

    def substitution(self) -> dict:
        """Map each (0)-coordinate to its center expressed through (1)-coordinates and base."""
        sub: dict = {}
        for v, p in zip(self.vars, self.pieces):
            if isinstance(p, Point):
                sub[v] = p.center.subs(sub)
        return sub

    def restrict(self, f: LinearFunction) -> LinearFunction:
        return f.subs(self.substitution())

    def __str__(self):
        rows = [f"{v} {p}" for v, p in zip(self.vars, self.pieces)]
        return f"cell[{'; '.join(rows)} | {self.base}]"


def _floor_splits(w: LinearFunction, A: int):
    """Pairs (condition, floor(w/A)) splitting on w mod A."""
    if A == 1:
        return [(TRUE, w)]
    return [(make_cong(w - r, A), (w - r) / A) for r in range(A)]


def _ceil_splits(u: LinearFunction, B: int):
    if B == 1:
        return [(TRUE, u)]
    return [(make_cong(u + r, B), (u + r) / B) for r in range(B)]


def _argmax_splits(bounds: list, better) -> list:
    """For each index i, the condition that bounds[i] is the extreme one (first wins ties)."""
    out = []
    for i, b in enumerate(bounds):
        conds = []
        for k, c in enumerate(bounds):
            if k == i:
                continue
            conds.append(better(b, c, strict=k < i))
        out.append((conds, b))
    return out


def _max_cond(b, c, strict):
    return lt(c, b) if strict else le(c, b)


def _min_cond(b, c, strict):
    return lt(b, c) if strict else le(b, c)


def fiber_pieces(lits: Sequence, x: str) -> list[tuple[tuple, object]]:
    """Split a conjunction of atoms along x into (base literals, fiber) pairs.

    The base literals no longer mention x; the pairs are disjoint and their
    union is the input set.
    """
    with_x = [l for l in lits if x in l.term.variables()]
    base = [l for l in lits if x not in l.term.variables()]
    if not with_x:
        c = _clean(base)
        return [] if c is None else [(c, Interval(None, None, 1, 0))]
    eqs = [l for l in with_x if isinstance(l, Eq)]
    if eqs:
        e = eqs[0]
        a = int(e.term.coeff(x))
        rest = e.term - LinearFunction.var(x, a)
        center = -rest / a
        conds = [make_cong(rest, abs(a))]
        for l in with_x:
            if l is e:
                continue
            conds.append(subs(l, {x: center}))
        c = _clean(base + conds)
        return [] if c is None else [(c, Point(center))]
    congs = [l for l in with_x if isinstance(l, Cong)]
    bounds = [l for l in with_x if isinstance(l, Le)]
    N = 1
    for l in congs:
        N = lcm(N, l.n)
    out = []
    for rho in range(N):
        conds = []
        for l in congs:
            a = int(l.term.coeff(x))
            rest = l.term - LinearFunction.var(x, a)
            conds.append(make_cong(rest + a * rho, l.n))
        if FALSE in conds:
            continue
        lower_opts, upper_opts = [], []
        for l in bounds:
            a = int(l.term.coeff(x))
            u = l.term - LinearFunction.var(x, a) + a * rho
            A = a * N
            if A > 0:
                upper_opts.append(_floor_splits(-u, A))
            else:
                lower_opts.append(_ceil_splits(u, -A))
        for lchoice in itertools.product(*lower_opts):
            for uchoice in itertools.product(*upper_opts):
                pick = [cnd for cnd, _ in lchoice] + [cnd for cnd, _ in uchoice]
                if FALSE in pick:
                    continue
                lows = _dedupe([b for _, b in lchoice])
                highs = _dedupe([b for _, b in uchoice])
                lsel = _argmax_splits(lows, _max_cond) if lows else [([], None)]
                usel = _argmax_splits(highs, _min_cond) if highs else [([], None)]
                for lc, lo in lsel:
                    for uc, hi in usel:
                        extra = list(lc) + list(uc)
                        if lo is not None and hi is not None:
                            extra.append(le(lo, hi))
                        c = _clean(base + conds + pick + extra)
                        if c is None:
                            continue
                        lo_x = None if lo is None else lo * N + rho
                        hi_x = None if hi is None else hi * N + rho
                        out.append((c, Interval(lo_x, hi_x, N, rho)))
    return out


def _dedupe(bs: list) -> list:
    seen = {}
    for b in bs:
        seen.setdefault(b.sort_key(), b)
    return [seen[k] for k in sorted(seen)]


def satisfiable_lits(lits: Iterable, variables: Iterable[str] | None = None) -> bool:
    lits = _clean(lits)
    if lits is None:
        return False
    vs = set()
    for l in lits:
        vs |= l.term.variables()
    if variables is not None:
        vs |= set(variables)
    stack = [(lits, sorted(vs))]
    while stack:
        ls, order = stack.pop()
        if not order:
            if not ls:
                return True
            continue
        x = order[-1]
        for bl, _ in fiber_pieces(list(ls), x):
            stack.append((bl, order[:-1]))
    return False


def is_satisfiable(f: Formula) -> bool:
    if not is_quantifier_free(f):
        from .qe import qe

        f = qe(f)
    return any(satisfiable_lits(b) for b in branches(f))


def is_valid(f: Formula) -> bool:
    from .formula import neg

    return not is_satisfiable(neg(f))


def _decompose_lits(lits, coords):
    if not coords:
        yield lits, []
        return
    x = coords[-1]
    for bl, piece in fiber_pieces(list(lits), x):
        for b2, ps in _decompose_lits(bl, coords[:-1]):
            yield b2, ps + [piece]


def graph_to_pieces(graph: Formula, y: str, args: Sequence[str]) -> list[tuple[Formula, LinearFunction]]:
    """Turn the graph of a definable function (y determined by args) into linear pieces."""
    out = []
    for lits in branches(graph):
        for bl, piece in fiber_pieces(list(lits), y):
            if not isinstance(piece, Point):
                raise ValueError("formula is not the graph of a function")
            if satisfiable_lits(bl):
                out.append((literal_formula(bl), piece.center))
    return out


def _as_pieces(f, coords):
    """Normalize a piecewise function given as pairs or a single function to a list of (formula, LinearFunction)."""
    if isinstance(f, LinearFunction):
        return [(TRUE, f)]
    if isinstance(f, tuple) and len(f) == 2 and isinstance(f[0], Formula) and isinstance(f[1], str):
        g, y = f
        args = sorted(free_vars(g) - {y})
        return graph_to_pieces(g, y, args)
    return list(f)


def cell_decompose(
    X: Formula,
    coords: Sequence[str],
    fs: Sequence = (),
) -> list[tuple[PresCell, list[LinearFunction]]]:
    """Partition X into nested cells along coords, adapted to each function in fs.

    A function is a LinearFunction, a list of (formula, LinearFunction) pieces,
    or a pair (graph formula, output variable name).
    """
    if not is_quantifier_free(X):
        raise ValueError("cell_decompose needs a quantifier-free formula; call qe first")
    coords = tuple(coords)
    piece_lists = [_as_pieces(f, coords) for f in fs]
    out = []
    for choice in itertools.product(*piece_lists) if piece_lists else [()]:
        region = conj(X, *(p for p, _ in choice))
        for lits in branches(region):
            for base_lits, pieces in _decompose_lits(lits, coords):
                if not satisfiable_lits(base_lits):
                    continue
                cell = PresCell(coords, tuple(pieces), literal_formula(base_lits))
                out.append((cell, [cell.restrict(g) for _, g in choice]))
    return out
