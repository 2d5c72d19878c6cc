"""Summation of constructible Presburger functions over Z-variables, and the integrability test."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, lcm
from typing import Sequence

from .cpf import CPFunction, Term
from .linalg import max_on_slice
from .motnum import ONE, MotNum
from .polys import MPoly
from .presburger.cells import Interval, Point, cell_decompose, fiber_pieces, satisfiable_lits
from .presburger.formula import TRUE, branches, conj, formula_key, literal_formula, make_cong
from .presburger.linear import LinearFunction


class NotIntegrable(ArithmeticError):
    def __init__(self, message: str, term=None, cell=None, direction=None):
        super().__init__(message)
        self.term = term
        self.cell = cell
        self.direction = direction


# --- closed forms ----------------------------------------------------------

def delta_values(P: Sequence[int], a: int) -> list[int]:
    """[Delta^i P (a) for i = 0..deg P] with Delta P(n) = P(n+1) - P(n)."""
    deg = len(P) - 1
    vals = [sum(c * (a + k) ** e for e, c in enumerate(P)) for k in range(deg + 1)]
    out = []
    for i in range(deg + 1):
        out.append(sum((-1) ** (i - l) * comb(i, l) * vals[l] for l in range(i + 1)))
    return out


@lru_cache(maxsize=None)
def geom_moment(j: int, d: int) -> MotNum:
    """sum_{k >= 0} k^j L^(d k) for d < 0."""
    if d >= 0:
        raise NotIntegrable(f"geometric ratio L^{d} does not decay")
    P = [0] * j + [1]
    z = MotNum.L(d)
    inv = MotNum.inv_one_minus_Linv(-d)
    total = MotNum()
    for i, c in enumerate(delta_values(P, 0)):
        if c:
            total = total + c * z ** i * inv ** (i + 1)
    return total


@lru_cache(maxsize=None)
def faulhaber(j: int) -> tuple:
    """Coefficients (low first) of F(K) = sum_{k=0}^{K} k^j."""
    pts = list(range(j + 2))
    vals = []
    acc = 0
    for K in pts:
        acc += K ** j if (K or j) else 1
        vals.append(acc)
    # Newton interpolation
    coeffs = [Fraction(0)] * (j + 2)
    basis = [Fraction(1)]
    diffs = [Fraction(v) for v in vals]
    for i in range(j + 2):
        c = diffs[0]
        for e, b in enumerate(basis):
            coeffs[e] += c * b
        diffs = [(diffs[k + 1] - diffs[k]) / (i + 1) for k in range(len(diffs) - 1)]
        nb = [Fraction(0)] * (len(basis) + 1)
        for e, b in enumerate(basis):
            nb[e + 1] += b
            nb[e] -= i * b
        basis = nb
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


def _integer_shift(coeffs: Sequence[Fraction], rho: int, D: int) -> list[int]:
    """Coefficients of G(m) = F(rho + D m), which are integers for suitable D."""
    out = [Fraction(0)] * len(coeffs)
    for c_idx, c in enumerate(coeffs):
        for t in range(c_idx + 1):
            out[t] += c * comb(c_idx, t) * rho ** (c_idx - t) * D ** t
    if any(x.denominator != 1 for x in out):
        raise AssertionError("Faulhaber shift is not integral")
    return [int(x) for x in out]


def faulhaber_modulus(powers) -> int:
    D = 1
    for j in powers:
        for c in faulhaber(j):
            D = lcm(D, c.denominator)
    return D


def finite_moment(j: int, d: int, K: LinearFunction, D: int | None = None) -> list[tuple]:
    """sum_{k=0}^{K} k^j L^(d k) for K >= 0 as parts (coeff, factors, exp, support)."""
    K = LinearFunction.lift(K)
    if K.is_constant():
        n = int(K.const)
        total = MotNum()
        for k in range(n + 1):
            if k or j == 0:
                total = total + (k ** j) * MotNum.L(d * k)
        return [(total, (), LinearFunction(), TRUE)]
    if d < 0:
        parts = [(geom_moment(j, d), (), LinearFunction(), TRUE)]
        for i in range(j + 1):
            c = -comb(j, i) * geom_moment(i, d)
            parts.append((c, (K + 1,) * (j - i), (K + 1) * d, TRUE))
        return parts
    if d > 0:
        parts = []
        for i in range(j + 1):
            sign = comb(j, i) * (-1) ** i
            for c, facs, e, sup in finite_moment(i, -d, K, D):
                parts.append((c * sign, (K,) * (j - i) + facs, e + K * d, sup))
        return parts
    F = faulhaber(j)
    if D is None:
        D = faulhaber_modulus([j])
    parts = []
    for rho in range(D):
        m = (K - rho) / D
        sup = make_cong(K - rho, D) if D > 1 else TRUE
        for t, g in enumerate(_integer_shift(F, rho, D)):
            if g:
                parts.append((MotNum.of(g), (m,) * t, LinearFunction(), sup))
    return parts


def power_sum_closed(b: int, c: int, n: int, var: str = "a") -> CPFunction:
    """sum_{0 <= i <= a, i = c mod n} i^b as a constructible function of a."""
    if not 0 <= c < n:
        raise ValueError("need 0 <= c < n")
    i = LinearFunction.var("_i")
    a = LinearFunction.var(var)
    from .presburger.formula import cong, ge, le

    phi = CPFunction.term(ONE, (i,) * b, None, conj(ge(i, 0), le(i, a), cong(i, c, n)))
    return mu_sum(phi, ["_i"], check=False)


# --- one-variable summation ----------------------------------------------

def _parametrizations(piece: Interval):
    """(start, direction, length or None) covering the fiber."""
    N = piece.modulus
    if piece.lo is not None and piece.hi is not None:
        return [(piece.lo, 1, (piece.hi - piece.lo) / N)]
    if piece.lo is not None:
        return [(piece.lo, 1, None)]
    if piece.hi is not None:
        return [(piece.hi, -1, None)]
    r = LinearFunction.constant(piece.residue)
    return [(r, 1, None), (r - N, -1, None)]


def _expand_factors(factors, x, start, step):
    """prod f(start + step k) as {power of k: [(int coeff, base factors)]}."""
    poly = {0: [(1, ())]}
    for f in factors:
        u = f.subs({x: start})
        v = f.coeff(x) * step
        if v.denominator != 1:
            raise ValueError(f"factor {f} is not integral along the fiber")
        v = int(v)
        nxt: dict = {}
        for p, items in poly.items():
            for c, fs in items:
                nxt.setdefault(p, []).append((c, fs + (u,)))
                if v:
                    nxt.setdefault(p + 1, []).append((c * v, fs))
        poly = nxt
    return poly


def _sum_term(t: Term, x: str, base_lits, piece) -> list[Term]:
    base = literal_formula(base_lits)
    if isinstance(piece, Point):
        s = {x: piece.center}
        return [Term(t.coeff, tuple(f.subs(s) for f in t.factors), t.exp.subs(s), base)]
    out = []
    for start, sign, K in _parametrizations(piece):
        step = sign * piece.modulus
        e0 = t.exp.subs({x: start})
        d = t.exp.coeff(x) * step
        if d.denominator != 1:
            raise ValueError("exponent is not integral along the fiber")
        d = int(d)
        if K is None and d >= 0:
            if not satisfiable_lits(base_lits):
                continue
            raise NotIntegrable(
                f"term {t} diverges along {x} on {piece} (exponent slope {d} >= 0)",
                term=str(t),
                cell=f"{x} {piece} | {base}",
                direction={x: sign},
            )
        poly = _expand_factors(t.factors, x, start, step)
        D = faulhaber_modulus(range(max(poly) + 1)) if d == 0 else None
        for p, items in poly.items():
            if K is None:
                parts = [(geom_moment(p, d), (), LinearFunction(), TRUE)]
            else:
                parts = finite_moment(p, d, K, D)
            for c, fs, e, sup in parts:
                for ic, ufs in items:
                    out.append(Term(t.coeff * c * ic, ufs + fs, e0 + e, conj(base, sup)))
    return out


def sum_var(phi: CPFunction, x: str) -> CPFunction:
    """Sum out one Z-variable."""
    out = []
    for t in phi.terms:
        if x not in t.variables():
            # the fiber is all of Z: only a zero term is summable
            raise NotIntegrable(f"term {t} does not depend on {x}; its fiber sum is infinite", term=str(t))
        for lits in branches(t.support):
            for base_lits, piece in fiber_pieces(list(lits), x):
                out.extend(_sum_term(t, x, base_lits, piece))
    return CPFunction(out)


def mu_sum(phi: CPFunction, over: Sequence[str] | None = None, check: bool = True) -> CPFunction:
    """Sum phi over the listed Z-variables (default: all), innermost last."""
    over = sorted(phi.variables()) if over is None else list(over)
    if check:
        rep = is_integrable(phi, over)
        if not rep:
            bad = rep.failures()[0]
            raise NotIntegrable(
                f"not integrable: {bad.term} on {bad.cell}",
                term=bad.term,
                cell=bad.cell,
                direction=bad.direction,
            )
    for x in reversed(over):
        phi = sum_var(phi, x)
    return phi


# --- integrability ------------------------------------------------------------

@dataclass
class CellVerdict:
    cell: str
    term: str
    ok: bool
    rate: Fraction | None = None
    direction: dict | None = None


@dataclass
class IntegrabilityReport:
    verdicts: list = field(default_factory=list)

    def __bool__(self):
        return all(v.ok for v in self.verdicts)

    @property
    def ok(self) -> bool:
        return bool(self)

    def failures(self) -> list:
        return [v for v in self.verdicts if not v.ok]

    def slowest_rate(self) -> Fraction | None:
        rates = [v.rate for v in self.verdicts if v.rate is not None]
        return max(rates) if rates else None

    def __str__(self):
        lines = [f"{'ok ' if v.ok else 'BAD'} {v.cell}: {v.term} rate={v.rate}" for v in self.verdicts]
        return "\n".join(lines)


def lf_to_mpoly(f: LinearFunction) -> MPoly:
    p = MPoly.const(f.const)
    for v, c in f.coeffs:
        p = p + MPoly.var(v) * c
    return p


def _group_is_zero(items) -> bool:
    acc: dict = {}
    for coeff, facs in items:
        poly = MPoly.const(1)
        for f in facs:
            poly = poly * lf_to_mpoly(f)
        for m, c in poly.terms.items():
            acc.setdefault(m, []).append((c, coeff))
    for lst in acc.values():
        D = 1
        for c, _ in lst:
            D = lcm(D, c.denominator)
        tot = MotNum()
        for c, a in lst:
            tot = tot + a * int(c * D)
        if not tot.is_zero():
            return False
    return True


def cell_parametrizations(cell):
    """Affine parametrizations x = x(base, k) of a cell with k >= 0.

    Yields (substitution, k variable names, cone rows, k-variable per coordinate).
    """
    opts = []
    for x, p in zip(cell.vars, cell.pieces):
        opts.append([None] if isinstance(p, Point) else _parametrizations(p))
    for choice in itertools.product(*opts):
        sub: dict = {}
        kvars = []
        bounded = []
        for (x, p), ch in zip(zip(cell.vars, cell.pieces), choice):
            if isinstance(p, Point):
                sub[x] = p.center.subs(sub)
                continue
            start, sign, K = ch
            k = f"_k_{x}"
            kvars.append(k)
            sub[x] = start.subs(sub) + LinearFunction.var(k, sign * p.modulus)
            if K is not None:
                bounded.append((k, K.subs(sub)))
        rows = []
        n = len(kvars)
        for i in range(n):
            rows.append([-1 if j == i else 0 for j in range(n)])
        for k, K in bounded:
            rows.append([(1 if kv == k else 0) - K.coeff(kv) for kv in kvars])
        yield sub, kvars, rows


def is_integrable(phi: CPFunction, over: Sequence[str] | None = None) -> IntegrabilityReport:
    """Per-cell check that deg_L goes to -infinity along every unbounded direction."""
    over = sorted(phi.variables()) if over is None else list(over)
    report = IntegrabilityReport()
    groups: dict = {}
    for t in phi.terms:
        groups.setdefault(formula_key(t.support), (t.support, []))[1].append(t)
    for key in sorted(groups):
        support, terms = groups[key]
        for cell, _ in cell_decompose(support, over):
            for sub, kvars, rows in cell_parametrizations(cell):
                by_exp: dict = {}
                for t in terms:
                    e = LinearFunction(t.exp.coeffs, t.exp.const).subs(sub)
                    facs = tuple(f.subs(sub) for f in t.factors)
                    by_exp.setdefault(e.sort_key(), (e, [], []))
                    by_exp[e.sort_key()][1].append((t.coeff, facs))
                    by_exp[e.sort_key()][2].append(t)
                for ek in sorted(by_exp):
                    e, items, originals = by_exp[ek]
                    if _group_is_zero(items):
                        continue
                    label = " + ".join(str(CPFunction([t], simplify=False)) for t in originals)
                    if not kvars:
                        report.verdicts.append(CellVerdict(str(cell), label, True))
                        continue
                    d = [e.coeff(k) for k in kvars]
                    res = max_on_slice(d, rows, len(kvars))
                    if res is None:
                        report.verdicts.append(CellVerdict(str(cell), label, True))
                        continue
                    val, v = res
                    # the worst direction, written in the summation variables
                    kv = dict(zip(kvars, v))
                    direction = {x: sum((sub[x].coeff(k) * kv[k] for k in kvars), Fraction(0)) for x in cell.vars}
                    report.verdicts.append(CellVerdict(str(cell), label, val < 0, val, direction))
    return report
