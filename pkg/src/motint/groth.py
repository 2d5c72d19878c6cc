"""Classes of residue-field definable sets: generators, scissor normalization, point counts."""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .motnum import ONE, MotNum
from .polys import MPoly, format_mpoly, rational_roots, u_divmod, u_gcd, u_monic, u_squarefree, u_trim


def _canon_poly(p: MPoly) -> MPoly:
    """Primitive, with positive leading coefficient."""
    p = p.primitive()
    if p.is_zero():
        return p
    lead = max(p.terms)
    return -p if p.terms[lead] < 0 else p


def _reduce_poly(p: MPoly) -> MPoly:
    """Canonical generator of the same zero set for univariate p; canonical form otherwise."""
    vs = p.variables()
    if len(vs) == 1:
        (v,) = vs
        if p.min_degree(v) >= 0:
            sf = u_squarefree(p.to_univariate(v))
            p = MPoly.from_univariate(sf, v)
    return _canon_poly(p)


@dataclass(frozen=True)
class Generator:
    """{bound vars : eqs = 0, neqs != 0}; other variables are parameters of the family."""

    vars: tuple = ()
    eqs: tuple = ()
    neqs: tuple = ()
    name: str | None = None

    def params(self) -> frozenset:
        vs = set()
        for p in self.eqs + self.neqs:
            vs |= p.variables()
        return frozenset(vs - set(self.vars))

    def key(self) -> tuple:
        return (self.vars, tuple(p.sort_key() for p in self.eqs), tuple(p.sort_key() for p in self.neqs))

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, Generator) and self.key() == other.key()

    def rename_params(self, mapping: Mapping[str, str]) -> "Generator":
        return Generator(self.vars, tuple(p.rename(mapping) for p in self.eqs),
                         tuple(p.rename(mapping) for p in self.neqs), self.name)

    def subs_params(self, mapping: Mapping[str, object]) -> "Generator":
        return Generator(self.vars, tuple(p.subs(mapping) for p in self.eqs),
                         tuple(p.subs(mapping) for p in self.neqs), self.name)

    def bind(self, names: Iterable[str]) -> "Generator":
        """Turn parameters into bound variables (projection along them)."""
        extra = tuple(n for n in names if n not in self.vars)
        return Generator(self.vars + extra, self.eqs, self.neqs)

    def describe(self) -> str:
        conds = [f"{format_mpoly(p)} = 0" for p in self.eqs] + [f"{format_mpoly(p)} != 0" for p in self.neqs]
        head = ", ".join(self.vars)
        return f"{{{head} : {', '.join(conds) or 'true'}}}"

    def __str__(self):
        return f"[{self.name}]" if self.name else f"[{self.describe()[1:-1]}]"

    def to_json(self) -> dict:
        def pj(p):
            return [[[list(ve) for ve in m], str(c)] for m, c in sorted(p.terms.items())]

        out = {"vars": list(self.vars), "eqs": [pj(p) for p in self.eqs], "neqs": [pj(p) for p in self.neqs]}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, obj) -> "Generator":
        def jp(x):
            return MPoly({tuple((v, e) for v, e in m): Fraction(c) for m, c in x})

        return cls(tuple(obj["vars"]), tuple(jp(p) for p in obj["eqs"]), tuple(jp(p) for p in obj["neqs"]),
                   obj.get("name"))


POINT = Generator()


def make_generator(vars: Sequence[str], eqs: Iterable = (), neqs: Iterable = (), name: str | None = None) -> Generator:
    """Canonical generator: bound variables renamed _x0, _x1, ... in the lexicographically least way."""
    vars = tuple(vars)
    eqs = [MPoly.lift(p) for p in eqs]
    neqs = [MPoly.lift(p) for p in neqs]
    best = None
    n = len(vars)
    for perm in itertools.permutations(range(n)) if n <= 5 else [tuple(range(n))]:
        ren = {vars[i]: f"_x{perm[i]}" for i in range(n)}
        e = sorted({_reduce_poly(p.rename(ren)).sort_key(): _reduce_poly(p.rename(ren)) for p in eqs}.items())
        q = sorted({_reduce_poly(p.rename(ren)).sort_key(): _reduce_poly(p.rename(ren)) for p in neqs}.items())
        key = (tuple(k for k, _ in e), tuple(k for k, _ in q))
        if best is None or key < best[0]:
            best = (key, tuple(p for _, p in e), tuple(p for _, p in q))
    _, e, q = best
    return Generator(tuple(f"_x{i}" for i in range(n)), e, q, name)


# --- classes --------------------------------------------------------------------

class GrothClass:
    """Finite sum of generators with coefficients in A (the point carries the pure-number part)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Generator, MotNum] | None = None):
        clean = {}
        for g, c in (terms or {}).items():
            c = MotNum.of(c) if not isinstance(c, MotNum) else c
            if g in clean:
                clean[g] = clean[g] + c
            else:
                clean[g] = c
        self.terms = {g: c for g, c in clean.items() if not c.is_zero()}

    @classmethod
    def of(cls, x) -> "GrothClass":
        if isinstance(x, GrothClass):
            return x
        if isinstance(x, Generator):
            return cls({x: ONE})
        return cls({POINT: MotNum.of(x) if not isinstance(x, MotNum) else x})

    def is_zero(self) -> bool:
        return not self.terms

    def is_number(self) -> bool:
        return all(g == POINT for g in self.terms)

    def number(self) -> MotNum:
        if not self.is_number():
            raise ValueError(f"{self} is not a pure number")
        return self.terms.get(POINT, MotNum())

    def params(self) -> frozenset:
        out: set = set()
        for g in self.terms:
            out |= g.params()
        return frozenset(out)

    def __add__(self, other):
        other = GrothClass.of(other)
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out[g] + c if g in out else c
        return GrothClass(out)

    __radd__ = __add__

    def __neg__(self):
        return GrothClass({g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-GrothClass.of(other))

    def __rsub__(self, other):
        return GrothClass.of(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, MotNum)):
            return GrothClass({g: c * other for g, c in self.terms.items()})
        other = GrothClass.of(other)
        out: dict = {}
        for g, c in self.terms.items():
            for h, d in other.terms.items():
                k = fiber_product(g, h)
                out[k] = out[k] + c * d if k in out else c * d
        return GrothClass(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = GrothClass.of(other)
        except TypeError:
            return NotImplemented
        diff = self - other
        return diff.is_zero()

    __hash__ = None

    def sort_items(self):
        return sorted(self.terms.items(), key=lambda gc: (gc[0] != POINT, gc[0].name or "", str(gc[0].key())))

    def __str__(self):
        if not self.terms:
            return "0"
        common = self._common_factor()
        if common is not None:
            inner = GrothClass({g: c / common for g, c in self.terms.items()})
            cs = str(common)
            return f"({inner}) * " + (f"({cs})" if " " in cs else cs)
        parts = []
        for g, c in sorted(self.sort_items(), key=lambda gc: gc[0] == POINT):
            if g == POINT:
                parts.append(str(c))
                continue
            cs = str(c)
            if c == ONE:
                parts.append(str(g))
            elif c == MotNum.of(-1):
                parts.append(f"-{g}")
            elif len(c.num) == 1 and c.shift == 0 and not c.factors:
                parts.append(f"{c.num[0]}*{g}")
            else:
                parts.append(f"{g} * " + (f"({cs})" if " " in cs else cs))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def _common_factor(self) -> MotNum | None:
        # a shared non-integer factor with integer cofactors, printed once
        if len(self.terms) < 2:
            return None
        cs = [c for _, c in self.sort_items()]
        c0 = cs[0]
        if len(c0.num) != 1:
            return None
        common = MotNum((1,), c0.shift, c0.factors)
        if common == ONE:
            return None
        undo = MotNum.L(c0.shift)
        for i, m in c0.factors:
            undo = undo * (MotNum.L(i) - 1) ** m
        for c in cs:
            r = c * undo
            if not (r.is_laurent() and len(r.num) == 1 and r.shift == 0):
                return None
        return common

    def __repr__(self):
        return f"GrothClass({self})"

    def to_json(self) -> list:
        return [{"gen": g.to_json(), "coeff": c.to_json()} for g, c in self.sort_items()]

    @classmethod
    def from_json(cls, obj) -> "GrothClass":
        return cls({Generator.from_json(t["gen"]): MotNum.from_json(t["coeff"]) for t in obj})

    def support_at(self, p: int, names: Sequence[str] | None = None) -> frozenset:
        """Parameter values in F_p over which the fiber has a nonzero count."""
        names = sorted(self.params()) if names is None else list(names)
        out = set()
        for pt in itertools.product(range(p), repeat=len(names)):
            env = dict(zip(names, pt))
            total = Fraction(0)
            for g, c in self.terms.items():
                n = 1 if g == POINT else count_points(g, p, {k: v for k, v in env.items() if k in g.params()})
                total += c.eval_theta(p) * n
            if total:
                out.add(pt)
        return frozenset(out)

    def eval_counts(self, p: int, counts: Mapping[str, int] | None = None) -> Fraction:
        """theta_p of the coefficients times F_p-point counts of the generators."""
        total = Fraction(0)
        for g, c in self.terms.items():
            n = 1 if g == POINT else count_points(g, p)
            total += c.eval_theta(p) * n
        return total


def fiber_product(g: Generator, h: Generator) -> Generator:
    if g == POINT:
        return h
    if h == POINT:
        return g
    ren_g = {v: f"a{i}" for i, v in enumerate(g.vars)}
    ren_h = {v: f"b{i}" for i, v in enumerate(h.vars)}
    eqs = [p.rename(ren_g) for p in g.eqs] + [p.rename(ren_h) for p in h.eqs]
    neqs = [p.rename(ren_g) for p in g.neqs] + [p.rename(ren_h) for p in h.neqs]
    return make_generator(tuple(ren_g.values()) + tuple(ren_h.values()), eqs, neqs)


def gm(var: str) -> Generator:
    """The parameter condition var != 0 (a family over the parameter)."""
    return make_generator((), (), [MPoly.var(var)])


# --- rules ----------------------------------------------------------------------

class RuleConflict(ValueError):
    pass


@dataclass
class RuleTable:
    """Append-only table of declared class identities."""

    rules: dict = field(default_factory=dict)
    log: list = field(default_factory=list)

    def declare(self, gen: Generator, value, text: str = "") -> Generator:
        """Declare [gen] = value; value is a GrothClass, a number, or a name for a new symbol."""
        canon = make_generator(gen.vars, gen.eqs, gen.neqs)
        if canon.params():
            raise ValueError("rules must be stated for closed systems")
        if isinstance(value, str):
            value = GrothClass.of(Generator(canon.vars, canon.eqs, canon.neqs, value))
        value = GrothClass.of(value)
        k = canon.key()
        if k in self.rules:
            if self.rules[k][0] == value:
                return canon
            raise RuleConflict(f"conflicting rule for {canon.describe()}")
        self.rules[k] = (value, text or canon.describe())
        self.log.append(text or canon.describe())
        return canon

    def lookup(self, gen: Generator):
        hit = self.rules.get(gen.key())
        return None if hit is None else hit[0]

    def snapshot_hash(self) -> str:
        blob = json.dumps(sorted(str(k) + "=" + str(v[0]) for k, v in self.rules.items()))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def copy(self) -> "RuleTable":
        return RuleTable(dict(self.rules), list(self.log))


RULES = RuleTable()


# --- normalization ------------------------------------------------------------

def normalize(c, rules: RuleTable | None = None) -> GrothClass:
    rules = RULES if rules is None else rules
    c = GrothClass.of(c)
    out = GrothClass()
    for g, coeff in c.terms.items():
        out = out + normalize_generator(g, rules) * coeff
    return out


def normalize_generator(g: Generator, rules: RuleTable | None = None, depth: int = 0) -> GrothClass:
    rules = RULES if rules is None else rules
    if g == POINT:
        return GrothClass.of(1)
    if g.name or depth > 60:
        return GrothClass.of(g)
    return _normalize(list(g.vars), list(g.eqs), list(g.neqs), rules, depth, g.name)


def _normalize(vars, eqs, neqs, rules, depth, name=None) -> GrothClass:
    # simplify
    E, N = [], []
    for p in eqs:
        if p.is_zero():
            continue
        if p.is_constant():
            return GrothClass()
        E.append(p)
    for p in neqs:
        if p.is_zero():
            return GrothClass()
        if p.is_constant():
            continue
        N.append(p)
    used = set()
    for p in E + N:
        used |= p.variables()
    free = [v for v in vars if v not in used]
    vars = [v for v in vars if v in used]
    scale = MotNum.L(len(free))
    if not E and not N:
        return GrothClass.of(scale)
    gen = make_generator(vars, E, N, name)
    if gen.name is None:
        hit = rules.lookup(gen)
        if hit is not None:
            return hit * scale
    E, N, vars = list(gen.eqs), list(gen.neqs), list(gen.vars)
    # eliminate a variable appearing linearly with constant coefficient
    for v in vars:
        for i, p in enumerate(E):
            if p.degree(v) != 1 or p.min_degree(v) < 0:
                continue
            co = p.coeffs_in(v)
            lin = co.get(1)
            if lin is None or not lin.is_constant():
                continue
            rest = p - MPoly.var(v) * lin
            sol = -rest * (1 / lin.constant_value())
            E2 = [q.subs({v: sol}) for j, q in enumerate(E) if j != i]
            N2 = [q.subs({v: sol}) for q in N]
            return _normalize([w for w in vars if w != v], E2, N2, rules, depth + 1) * scale
    # independent components
    comps = _components(vars, E + N)
    if len(comps) > 1:
        out = GrothClass.of(scale)
        for i, cv in enumerate(comps):
            ce = [p for p in E if _touches(p, cv, i, vars)]
            cn = [p for p in N if _touches(p, cv, i, vars)]
            out = out * _normalize(list(cv), ce, cn, rules, depth + 1)
        return out
    # one bound variable, no parameters
    if len(vars) == 1 and not gen.params():
        return _univariate(vars[0], E, N, rules) * scale
    # scissor split along an inequation that can be solved for a bound variable
    for i, p in enumerate(N):
        if any(_solvable(p, v) for v in vars):
            rest = N[:i] + N[i + 1:]
            whole = _normalize(vars, E, rest, rules, depth + 1)
            cut = _normalize(vars, E + [p], rest, rules, depth + 1)
            split = whole - cut
            # keep a single inert symbol rather than a difference of inert ones
            if len(p.variables()) == 1 or not any(g != POINT and not g.name for g in split.terms):
                return split * scale
    return GrothClass.of(gen) * scale


def _solvable(p: MPoly, v: str) -> bool:
    if p.degree(v) != 1 or p.min_degree(v) < 0:
        return False
    lin = p.coeffs_in(v).get(1)
    return lin is not None and lin.is_constant()


def _touches(p: MPoly, comp, index: int, bound) -> bool:
    pv = p.variables()
    if not pv & set(bound):
        # parameter-only condition: attach to the first component
        return index == 0
    return bool(pv & set(comp))


def _components(vars, polys) -> list[tuple]:
    parent = {v: v for v in vars}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for p in polys:
        pv = [v for v in p.variables() if v in parent]
        for a, b in zip(pv, pv[1:]):
            parent[find(a)] = find(b)
    groups: dict = {}
    for v in vars:
        groups.setdefault(find(v), []).append(v)
    comps = sorted((tuple(g) for g in groups.values()), key=lambda g: vars.index(g[0]))
    return comps


def _split_rational(f: list) -> tuple[list, list]:
    """(distinct rational roots, squarefree cofactor without rational roots)."""
    f = u_squarefree(f)
    roots = rational_roots(f)
    rest = f
    for r in roots:
        rest, _ = u_divmod(rest, [-r, 1])
    return roots, u_monic(u_trim(rest))


def _univariate(v: str, E: list, N: list, rules: RuleTable) -> GrothClass:
    excl = [q.to_univariate(v) for q in N]
    if E:
        g = E[0].to_univariate(v)
        for p in E[1:]:
            g = u_gcd(g, p.to_univariate(v))
        if len(u_trim(g)) <= 1:
            return GrothClass()
        roots, rest = _split_rational(g)
        n = sum(1 for r in roots if all(_ueval(q, r) != 0 for q in excl))
        for q in excl:
            h = u_gcd(rest, q)
            if len(h) > 1:
                rest, _ = u_divmod(rest, h)
                rest = u_monic(rest)
        out = GrothClass.of(n)
        if len(rest) > 1:
            out = out + _inert_or_rule(v, [MPoly.from_univariate(rest, v)], [], rules)
        return out
    prod = [Fraction(1)]
    for q in excl:
        prod = u_squarefree(_umul(prod, q))
    roots, rest = _split_rational(prod)
    out = GrothClass.of(MotNum.L() - len(roots))
    if len(rest) > 1:
        out = out - _inert_or_rule(v, [MPoly.from_univariate(rest, v)], [], rules)
    return out


def _inert_or_rule(v, eqs, neqs, rules) -> GrothClass:
    gen = make_generator([v], eqs, neqs)
    hit = rules.lookup(gen)
    return hit if hit is not None else GrothClass.of(gen)


def _ueval(a, x):
    return sum(Fraction(c) * x ** i for i, c in enumerate(a))


def _umul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += Fraction(x) * y
    return out


# --- point counting ---------------------------------------------------------------

def count_points(g: Generator, p: int, params: Mapping[str, int] | None = None) -> int:
    """Number of F_p-points of the system, by exhaustive vectorized enumeration."""
    params = dict(params or {})
    missing = g.params() - set(params)
    if missing:
        raise ValueError(f"parameters {sorted(missing)} need values")
    if p > 101:
        raise ValueError("prime too large for exhaustive counting")
    n = len(g.vars)
    if n > 4:
        raise ValueError("at most four variables")
    if n == 0:
        env = {k: np.int64(v % p) for k, v in params.items()}
        return int(_mask(g, env, p, ()))
    total = 0
    rest = n - 1
    grids = np.meshgrid(*([np.arange(p, dtype=np.int64)] * rest), indexing="ij") if rest else []
    for first in range(p):
        env = {k: np.int64(v % p) for k, v in params.items()}
        env[g.vars[0]] = np.int64(first)
        for v, arr in zip(g.vars[1:], grids):
            env[v] = arr
        shape = grids[0].shape if rest else ()
        total += int(np.sum(_mask(g, env, p, shape)))
    return total


def _mask(g: Generator, env, p: int, shape):
    ok = np.ones(shape, dtype=bool)
    for q in g.eqs:
        ok &= np.asarray(q.eval_mod(env, p)) % p == 0
    for q in g.neqs:
        ok &= np.asarray(q.eval_mod(env, p)) % p != 0
    return ok
