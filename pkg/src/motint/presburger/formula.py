"""Presburger formulas: atoms, boolean structure, evaluation and disjoint splitting."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd
from typing import Iterable, Mapping

from .linear import LinearFunction


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)


@dataclass(frozen=True)
class _Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = _Const(True)
FALSE = _Const(False)


@dataclass(frozen=True)
class Le(Formula):
    """term <= 0, term integral and primitive."""

    term: LinearFunction

    def __str__(self):
        if all(c < 0 for _, c in self.term.coeffs):
            return _cmp_str(-self.term, ">=")
        return _cmp_str(self.term, "<=")


@dataclass(frozen=True)
class Eq(Formula):
    term: LinearFunction

    def __str__(self):
        return _cmp_str(self.term, "=")


@dataclass(frozen=True)
class Cong(Formula):
    """term = 0 mod n."""

    term: LinearFunction
    n: int

    def __str__(self):
        lhs = LinearFunction(self.term.coeffs)
        rhs = (-self.term.const) % self.n
        return f"{lhs} = {rhs} mod {self.n}"


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"not ({self.arg})"


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __str__(self):
        return " and ".join(_paren(a, Or) for a in self.args)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __str__(self):
        return " or ".join(_paren(a, And) for a in self.args)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"exists {self.var}. ({self.body})"


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula

    def __str__(self):
        return f"forall {self.var}. ({self.body})"


Atom = (Le, Eq, Cong)


def _paren(f, kind):
    s = str(f)
    return f"({s})" if isinstance(f, (kind, Exists, Forall)) else s


def _cmp_str(term: LinearFunction, op: str) -> str:
    lhs = LinearFunction(term.coeffs)
    return f"{lhs} {op} {-term.const}"


# --- atom constructors with normalization ---------------------------------

def _int_parts(t: LinearFunction) -> tuple[list, int]:
    d, g = LinearFunction.lift(t).integer_form()
    return [(v, int(c)) for v, c in g.coeffs], int(g.const)


def make_le(t) -> Formula:
    """t <= 0."""
    coeffs, c = _int_parts(t)
    if not coeffs:
        return TRUE if c <= 0 else FALSE
    g = 0
    for _, a in coeffs:
        g = gcd(g, a)
    bound = floor(Fraction(-c, g))
    return Le(LinearFunction(tuple((v, Fraction(a // g)) for v, a in coeffs), Fraction(-bound)))


def make_eq(t) -> Formula:
    coeffs, c = _int_parts(t)
    if not coeffs:
        return TRUE if c == 0 else FALSE
    g = 0
    for _, a in coeffs:
        g = gcd(g, a)
    if c % g:
        return FALSE
    if coeffs[0][1] < 0:
        g = -g
    return Eq(LinearFunction(tuple((v, Fraction(a // g)) for v, a in coeffs), Fraction(c // g)))


def make_cong(t, n: int) -> Formula:
    n = abs(int(n))
    if n == 0:
        return make_eq(t)
    d, g = LinearFunction.lift(t).integer_form()
    n = n * d
    coeffs = [(v, int(a) % n) for v, a in g.coeffs]
    coeffs = [(v, a) for v, a in coeffs if a]
    c = int(g.const) % n
    if not coeffs:
        return TRUE if c == 0 else FALSE
    G = n
    for _, a in coeffs:
        G = gcd(G, a)
    if c % G:
        return FALSE
    n //= G
    if n == 1:
        return TRUE
    coeffs = [(v, a // G) for v, a in coeffs]
    c //= G
    return Cong(LinearFunction(tuple((v, Fraction(a)) for v, a in coeffs), Fraction(c)), n)


def le(a, b) -> Formula:
    return make_le(LinearFunction.lift(a) - b)


def lt(a, b) -> Formula:
    return make_le(LinearFunction.lift(a) - b + 1)


def ge(a, b) -> Formula:
    return le(b, a)


def gt(a, b) -> Formula:
    return lt(b, a)


def eq(a, b) -> Formula:
    return make_eq(LinearFunction.lift(a) - b)


def ne(a, b) -> Formula:
    return neg(eq(a, b))


def cong(a, b, n: int) -> Formula:
    return make_cong(LinearFunction.lift(a) - b, n)


def var(name: str) -> LinearFunction:
    return LinearFunction.var(name)


# --- boolean structure ----------------------------------------------------

def atom_key(a) -> tuple:
    kind = {Eq: 0, Le: 1, Cong: 2}[type(a)]
    return (tuple(v for v, _ in a.term.coeffs), a.term.coeffs, kind, getattr(a, "n", 0), a.term.const)


def formula_key(f) -> tuple:
    if isinstance(f, Atom):
        return (1,) + atom_key(f)
    if isinstance(f, _Const):
        return (0, f.value)
    if isinstance(f, Not):
        return (2, formula_key(f.arg))
    if isinstance(f, And):
        return (3,) + tuple(formula_key(a) for a in f.args)
    if isinstance(f, Or):
        return (4,) + tuple(formula_key(a) for a in f.args)
    return (5, f.var, formula_key(f.body))


def conj(*fs: Formula) -> Formula:
    out = []
    for f in fs:
        if f is FALSE or f == FALSE:
            return FALSE
        if f == TRUE:
            continue
        if isinstance(f, And):
            out.extend(f.args)
        else:
            out.append(f)
    out = _merge_atoms(out)
    if out is None:
        return FALSE
    uniq = {formula_key(f): f for f in out}
    if not uniq:
        return TRUE
    if len(uniq) == 1:
        return next(iter(uniq.values()))
    return And(tuple(uniq[k] for k in sorted(uniq)))


def disj(*fs: Formula) -> Formula:
    out = []
    for f in fs:
        if f == TRUE:
            return TRUE
        if f == FALSE:
            continue
        if isinstance(f, Or):
            out.extend(f.args)
        else:
            out.append(f)
    uniq = {formula_key(f): f for f in out}
    if _covers_residues(uniq.values()):
        return TRUE
    if not uniq:
        return FALSE
    if len(uniq) == 1:
        return next(iter(uniq.values()))
    return Or(tuple(uniq[k] for k in sorted(uniq)))


def _merge_atoms(fs: list) -> list | None:
    """Combine bounds and single-variable congruences sharing a linear part."""
    les: dict = {}
    eqs: dict = {}
    congs: dict = {}
    rest = []
    for f in fs:
        if isinstance(f, Le):
            k = f.term.coeffs
            if k not in les or f.term.const > les[k].term.const:
                les[k] = f
        elif isinstance(f, Eq):
            k = f.term.coeffs
            if k in eqs and eqs[k].term.const != f.term.const:
                return None
            eqs[k] = f
        elif isinstance(f, Cong) and len(f.term.coeffs) == 1 and f.term.coeffs[0][1] == 1:
            v = f.term.coeffs[0][0]
            r, n = int(-f.term.const) % f.n, f.n
            if v in congs:
                r0, n0 = congs[v]
                merged = _crt(r0, n0, r, n)
                if merged is None:
                    return None
                r, n = merged
            congs[v] = (r, n)
        else:
            rest.append(f)
    out = list(les.values()) + list(eqs.values()) + rest
    for v, (r, n) in congs.items():
        out.append(make_cong(LinearFunction.var(v) - r, n))
    for k, e in eqs.items():
        # an equality decides any bound with the same linear part
        if k in les:
            if les[k].term.const > e.term.const:
                return None
            out.remove(les[k])
    return out


def _crt(r1: int, n1: int, r2: int, n2: int):
    g = gcd(n1, n2)
    if (r1 - r2) % g:
        return None
    n = n1 // g * n2
    for r in range(r1 % n1, n, n1):
        if r % n2 == r2 % n2:
            return r, n
    return None


def _covers_residues(fs) -> bool:
    groups: dict = {}
    for f in fs:
        if isinstance(f, Cong):
            key = (f.term.coeffs, f.n)
            groups.setdefault(key, set()).add(int(f.term.const) % f.n)
    return any(len(r) == key[1] for key, r in groups.items())


def neg(f: Formula) -> Formula:
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def exists(v: str, body: Formula) -> Formula:
    return Exists(v, body)


def forall(v: str, body: Formula) -> Formula:
    return Forall(v, body)


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return f.term.variables()
    if isinstance(f, _Const):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(a) for a in f.args))
    return free_vars(f.body) - {f.var}


def atoms(f: Formula) -> list:
    out: dict = {}

    def walk(g):
        if isinstance(g, Atom):
            out[atom_key(g)] = g
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)

    walk(f)
    return [out[k] for k in sorted(out)]


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    return True


def subs(f: Formula, mapping: Mapping[str, LinearFunction]) -> Formula:
    """Substitute linear functions for free variables, renormalizing atoms."""
    if isinstance(f, _Const):
        return f
    if isinstance(f, Le):
        return make_le(f.term.subs(mapping))
    if isinstance(f, Eq):
        return make_eq(f.term.subs(mapping))
    if isinstance(f, Cong):
        return make_cong(f.term.subs(mapping), f.n)
    if isinstance(f, Not):
        return neg(subs(f.arg, mapping))
    if isinstance(f, And):
        return conj(*(subs(a, mapping) for a in f.args))
    if isinstance(f, Or):
        return disj(*(subs(a, mapping) for a in f.args))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    clash = any(f.var in LinearFunction.lift(v).variables() for v in inner.values())
    if clash:
        fresh = f.var + "'"
        body = subs(f.body, {f.var: LinearFunction.var(fresh)})
        return type(f)(fresh, subs(body, inner))
    return type(f)(f.var, subs(f.body, inner))


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    return subs(f, {k: LinearFunction.var(v) for k, v in mapping.items()})


def evaluate(f: Formula, env: Mapping[str, int], qrange: int = 64) -> bool:
    """Truth value at an integer point; quantifiers are searched in [-qrange, qrange]."""
    if isinstance(f, _Const):
        return f.value
    if isinstance(f, Le):
        return f.term.value(env) <= 0
    if isinstance(f, Eq):
        return f.term.value(env) == 0
    if isinstance(f, Cong):
        return f.term.value(env) % f.n == 0
    if isinstance(f, Not):
        return not evaluate(f.arg, env, qrange)
    if isinstance(f, And):
        return all(evaluate(a, env, qrange) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, env, qrange) for a in f.args)
    e = dict(env)
    if isinstance(f, Exists):
        for y in range(-qrange, qrange + 1):
            e[f.var] = y
            if evaluate(f.body, e, qrange):
                return True
        return False
    for y in range(-qrange, qrange + 1):
        e[f.var] = y
        if not evaluate(f.body, e, qrange):
            return False
    return True


def members(f: Formula, box, qrange: int = 64) -> list[tuple]:
    """All integer points of a finite box satisfying f.

    box is a mapping var -> (lo, hi) or a list of (var, lo, hi); points are
    tuples in the box's variable order.
    """
    if isinstance(box, Mapping):
        items = [(v, lo, hi) for v, (lo, hi) in box.items()]
    else:
        items = list(box)
    missing = free_vars(f) - {v for v, _, _ in items}
    if missing:
        raise ValueError(f"box does not cover free variables {sorted(missing)}")
    names = [v for v, _, _ in items]
    ranges = [range(lo, hi + 1) for _, lo, hi in items]
    out = []
    for pt in itertools.product(*ranges):
        if evaluate(f, dict(zip(names, pt)), qrange):
            out.append(pt)
    return out


# --- disjoint splitting into conjunctions of literals ---------------------

def literal_cases(a) -> list:
    """Disjoint exhaustive literal cases for an atom, as (literal, truth)."""
    t = a.term
    if isinstance(a, Le):
        return [(a, True), (make_le(-t + 1), False)]
    if isinstance(a, Eq):
        return [(a, True), (make_le(t + 1), False), (make_le(-t + 1), False)]
    return [(a, True)] + [(make_cong(t - r, a.n), False) for r in range(1, a.n)]


def _negated_branches(a) -> list:
    return [lit for lit, truth in literal_cases(a) if not truth]


def branches(f: Formula) -> list[tuple]:
    """Split a quantifier-free formula into pairwise disjoint conjunctions of atoms."""
    return [b for b in _branches(f) if FALSE not in b]


def _clean(lits: Iterable) -> tuple | None:
    out = {}
    for l in lits:
        if l == FALSE:
            return None
        if l == TRUE:
            continue
        out[atom_key(l)] = l
    return tuple(out[k] for k in sorted(out))


def _branches(f: Formula) -> list[tuple]:
    if f == TRUE:
        return [()]
    if f == FALSE:
        return []
    if isinstance(f, Atom):
        return [(f,)]
    if isinstance(f, (Exists, Forall)):
        raise ValueError("quantified formula: eliminate quantifiers first")
    if isinstance(f, Not):
        g = f.arg
        if isinstance(g, Atom):
            out = []
            for lit in _negated_branches(g):
                c = _clean([lit])
                if c is not None:
                    out.append(c)
            return out
        if isinstance(g, Not):
            return _branches(g.arg)
        if isinstance(g, And):
            return _branches(disj(*(neg(a) for a in g.args)))
        if isinstance(g, Or):
            return _branches(conj(*(neg(a) for a in g.args)))
        if isinstance(g, _Const):
            return _branches(neg(g))
        raise ValueError("quantified formula: eliminate quantifiers first")
    if isinstance(f, And):
        acc = [()]
        for a in f.args:
            bs = _branches(a)
            nxt = []
            for x in acc:
                for y in bs:
                    c = _clean(x + y)
                    if c is not None:
                        nxt.append(c)
            acc = nxt
            if not acc:
                break
        return acc
    # Or: A1 | (~A1 & A2) | (~A1 & ~A2 & A3) ...
    from .cells import is_satisfiable

    out = []
    done: list = []
    for a in f.args:
        prefix = [neg(b) for b in done if is_satisfiable(conj(a, b))]
        out.extend(_branches(conj(*prefix, a)))
        done.append(a)
    return out


def literal_formula(lits: Iterable) -> Formula:
    return conj(*lits)


# --- JSON ------------------------------------------------------------------

def to_json(f: Formula):
    if isinstance(f, _Const):
        return {"op": "const", "value": f.value}
    if isinstance(f, Le):
        return {"op": "le", "term": f.term.to_json()}
    if isinstance(f, Eq):
        return {"op": "eq", "term": f.term.to_json()}
    if isinstance(f, Cong):
        return {"op": "cong", "term": f.term.to_json(), "n": f.n}
    if isinstance(f, Not):
        return {"op": "not", "arg": to_json(f.arg)}
    if isinstance(f, (And, Or)):
        return {"op": "and" if isinstance(f, And) else "or", "args": [to_json(a) for a in f.args]}
    return {"op": "exists" if isinstance(f, Exists) else "forall", "var": f.var, "body": to_json(f.body)}


def from_json(obj) -> Formula:
    op = obj["op"]
    if op == "const":
        return TRUE if obj["value"] else FALSE
    if op in ("le", "eq", "cong"):
        t = LinearFunction.from_json(obj["term"])
        return {"le": make_le, "eq": make_eq}[op](t) if op != "cong" else make_cong(t, obj["n"])
    if op == "not":
        return neg(from_json(obj["arg"]))
    if op in ("and", "or"):
        args = [from_json(a) for a in obj["args"]]
        return conj(*args) if op == "and" else disj(*args)
    body = from_json(obj["body"])
    return Exists(obj["var"], body) if op == "exists" else Forall(obj["var"], body)
