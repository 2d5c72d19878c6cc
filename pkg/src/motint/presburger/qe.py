"""Quantifier elimination for Presburger arithmetic (Cooper's method)."""
from __future__ import annotations

from math import lcm

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Cong,
    Eq,
    Exists,
    Forall,
    Formula,
    Le,
    Not,
    Or,
    _Const,
    atoms,
    conj,
    disj,
    make_cong,
    make_eq,
    make_le,
    neg,
)
from .linear import LinearFunction

_VALIDITY_ATOMS = 10


def qe(f: Formula) -> Formula:
    """An equivalent quantifier-free formula."""
    from .cells import is_satisfiable

    r = _qe(f)
    if r in (TRUE, FALSE):
        return r
    if not is_satisfiable(r):
        return FALSE
    # the complement's DNF can be exponential, so only small results are tested for validity
    if len(atoms(r)) <= _VALIDITY_ATOMS and not is_satisfiable(neg(r)):
        return TRUE
    return r


def _qe(f: Formula) -> Formula:
    if isinstance(f, (_Const,) + Atom):
        return f
    if isinstance(f, Not):
        return neg(_qe(f.arg))
    if isinstance(f, And):
        return conj(*(_qe(a) for a in f.args))
    if isinstance(f, Or):
        return disj(*(_qe(a) for a in f.args))
    if isinstance(f, Exists):
        return _cooper(f.var, _qe(f.body))
    if isinstance(f, Forall):
        return neg(_cooper(f.var, neg(_qe(f.body))))
    raise TypeError(f"not a formula: {f!r}")


def _nnf(f: Formula, positive: bool = True):
    """Tree of ('and'|'or', children) / ('lit', formula) with negations on atoms only."""
    if isinstance(f, _Const):
        return ("lit", f if positive else neg(f))
    if isinstance(f, Le):
        return ("lit", f if positive else make_le(-f.term + 1))
    if isinstance(f, (Eq, Cong)):
        return ("lit", f if positive else Not(f))
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, (And, Or)):
        kind = "and" if isinstance(f, And) == positive else "or"
        return (kind, [_nnf(a, positive) for a in f.args])
    raise ValueError("nested quantifier left in body")


def _leaves(tree):
    if tree[0] == "lit":
        yield tree[1]
    else:
        for c in tree[1]:
            yield from _leaves(c)


def _core(lit):
    return lit.arg if isinstance(lit, Not) else lit


def _cooper(x: str, body: Formula) -> Formula:
    if x not in _free(body):
        return body
    tree = _nnf(body)
    delta = 1
    for lit in _leaves(tree):
        a = _core(lit)
        if isinstance(a, Atom):
            c = a.term.coeff(x)
            if c:
                delta = lcm(delta, abs(int(c)))

    def raw(lit):
        """x-literal as (kind, s, rest, n) with x standing for delta*x."""
        negated = isinstance(lit, Not)
        a = _core(lit)
        if not isinstance(a, Atom):
            return None
        c = int(a.term.coeff(x))
        if not c:
            return None
        rest = a.term - LinearFunction.var(x, c)
        s = 1 if c > 0 else -1
        if isinstance(a, Le):
            return ("le", s, rest * (delta // abs(c)), 0)
        if isinstance(a, Eq):
            m = delta // c
            return ("ne" if negated else "eq", 1, rest * m, 0)
        m = delta // abs(c)
        return ("ndvd" if negated else "dvd", s, rest * m, a.n * m)

    def convert(tree):
        if tree[0] == "lit":
            r = raw(tree[1])
            return ("raw", r) if r else tree
        return (tree[0], [convert(c) for c in tree[1]])

    tree = convert(tree)
    if delta > 1:
        tree = ("and", [tree, ("raw", ("dvd", 1, LinearFunction(), delta))])

    raws = []

    def collect(t):
        if t[0] == "raw":
            raws.append(t[1])
        elif t[0] in ("and", "or"):
            for c in t[1]:
                collect(c)

    collect(tree)
    D = 1
    for kind, s, rest, n in raws:
        if kind in ("dvd", "ndvd"):
            D = lcm(D, n)

    # lower-bound variant test points b + j with b in B; upper variant a - j
    B = {}
    for kind, s, rest, n in raws:
        if kind == "le" and s < 0:
            b = rest - 1
        elif kind == "eq":
            b = -rest * s - 1
        elif kind == "ne":
            b = -rest * s
        else:
            continue
        B[b.sort_key()] = b
    A = {}
    for kind, s, rest, n in raws:
        if kind == "le" and s > 0:
            a = -rest + 1
        elif kind == "eq":
            a = -rest * s + 1
        elif kind == "ne":
            a = -rest * s
        else:
            continue
        A[a.sort_key()] = a
    use_upper = len(A) < len(B)

    def inst(r, v):
        kind, s, rest, n = r
        t = v * s + rest
        if kind == "le":
            return make_le(t)
        if kind == "eq":
            return make_eq(t)
        if kind == "ne":
            return neg(make_eq(t))
        if kind == "dvd":
            return make_cong(t, n)
        return neg(make_cong(t, n))

    def infinity(r, j):
        kind, s, rest, n = r
        if kind == "le":
            if use_upper:
                return TRUE if s < 0 else FALSE
            return TRUE if s > 0 else FALSE
        if kind == "eq":
            return FALSE
        if kind == "ne":
            return TRUE
        return inst(r, LinearFunction.constant(j))

    def build(t, leaf):
        if t[0] == "lit":
            return t[1]
        if t[0] == "raw":
            return leaf(t[1])
        parts = [build(c, leaf) for c in t[1]]
        return conj(*parts) if t[0] == "and" else disj(*parts)

    out = []
    for j in range(1, D + 1):
        out.append(build(tree, lambda r, j=j: infinity(r, j)))
        if out[-1] == TRUE:
            return TRUE
    pts = A if use_upper else B
    for key in sorted(pts):
        p = pts[key]
        for j in range(1, D + 1):
            v = p - j if use_upper else p + j
            out.append(build(tree, lambda r, v=v: inst(r, v)))
            if out[-1] == TRUE:
                return TRUE
    return disj(*out)


def _free(f):
    from .formula import free_vars

    return free_vars(f)
