"""Rational generating series with denominators (1 - L^a T^b), and the Mellin transform."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Mapping, Sequence

from .cpf import CPFunction
from .motnum import ONE, MotNum
from .polys import MPoly, _divisors, cyclotomic, divide_exact, format_mpoly
from .presburger.cells import Interval, Point, fiber_pieces
from .presburger.formula import TRUE, Formula, branches, conj, evaluate, ge, le, literal_formula
from .presburger.linear import LinearFunction
from .summation import _expand_factors, _parametrizations, delta_values, finite_moment

Factor = tuple  # (a, b) standing for 1 - L^a T^b, b a tuple of nonnegative ints


def tname(j: int) -> str:
    return f"T{j + 1}"


def factor_poly(f: Factor) -> MPoly:
    a, b = f
    exps = {"L": a}
    exps.update({tname(j): e for j, e in enumerate(b)})
    return MPoly.const(1) - MPoly.monomial(exps)


_P = (1 << 61) - 1


def _maybe_divisible(num: MPoly, f: Factor, rng=random.Random(0)) -> bool:
    """False when num is certainly not divisible by 1 - L^a T^b.

    A multiple of the factor vanishes on the torus {L^a T^b = 1}; we evaluate
    num modulo a large prime at a random point of that torus.
    """
    a, b = f
    names = ["L"] + [tname(j) for j in range(len(b))]
    e = [a] + list(b)
    nz = [k for k, x in enumerate(e) if x]
    basis = [[0] * len(e) for _ in names]
    for k in range(len(e)):
        if not e[k]:
            basis[k][k] = 1
        elif k != nz[0]:
            basis[k][nz[0]], basis[k][k] = e[k], -e[nz[0]]
    point = [1] * len(e)
    for w in basis:
        if any(w):
            base = rng.randrange(2, _P - 1)
            point = [x * pow(base, wk, _P) % _P for x, wk in zip(point, w)]
    val = dict(zip(names, point))
    powers: dict = {}
    total = 0
    for mono, c in num.terms.items():
        term = c.numerator * pow(c.denominator, -1, _P) if c.denominator != 1 else c.numerator
        for vk in mono:
            pw = powers.get(vk)
            if pw is None:
                pw = powers[vk] = pow(val[vk[0]], vk[1], _P)
            term = term * pw % _P
        total += term
    return total % _P == 0


def _pieces(f: Factor) -> list[MPoly]:
    """Cyclotomic pieces: 1 - m^g = -prod_{d | g} Phi_d(m) with m primitive."""
    a, b = f
    g = gcd(abs(a), *b) if any(b) else abs(a)
    m = MPoly.monomial({"L": a // g, **{tname(j): e // g for j, e in enumerate(b)}})
    out = []
    for d in _divisors(g):
        poly = MPoly()
        for k, c in enumerate(cyclotomic(d)):
            if c:
                poly = poly + m ** k * c
        out.append(poly)
    return out


def unit_factor(a: int, m: int = 1) -> MotNum:
    """(1 - L^a)^-m as an element of A."""
    if a == 0:
        raise ZeroDivisionError("1 - L^0 is zero")
    if a < 0:
        return MotNum.inv_one_minus_Linv(-a, m)
    return MotNum(((-1) ** m,), 0, ((a, m),))


def motnum_to_mpoly(c: MotNum) -> tuple[MPoly, dict]:
    """c as (numerator in L, unit denominators {(i, ()): m}); (L^i - 1) = -(1 - L^i)."""
    num = MPoly()
    for k, v in enumerate(c.num):
        if v:
            num = num + MPoly.monomial({"L": k - c.shift}, v)
    den = {}
    for i, m in c.factors:
        den[(i, ())] = m
        if m % 2:
            num = -num
    return num, den


class RatFun:
    """num / prod (1 - L^a T^b)^m with num a Laurent polynomial in L and T1..Tr."""

    __slots__ = ("r", "num", "den")

    def __init__(self, r: int, num: MPoly | None = None, den: Mapping | None = None):
        self.r = r
        self.num = MPoly() if num is None else num
        clean = {}
        if not self.num.is_zero():
            for (a, b), m in (den or {}).items():
                b = tuple(b) + (0,) * (r - len(b))
                if m and (a or any(b)):
                    clean[(a, b)] = clean.get((a, b), 0) + m
        self.den = dict(sorted(clean.items()))

    @classmethod
    def const(cls, r: int, c) -> "RatFun":
        if isinstance(c, MotNum):
            num, den = motnum_to_mpoly(c)
            return cls(r, num, den)
        return cls(r, MPoly.const(c))

    @classmethod
    def monomial(cls, r: int, lexp: int, texp: Sequence[int], c=1) -> "RatFun":
        exps = {"L": lexp, **{tname(j): e for j, e in enumerate(texp)}}
        return cls(r, MPoly.monomial(exps, c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _lift(self, den: dict) -> MPoly:
        out = self.num
        for f, m in den.items():
            extra = m - self.den.get(f, 0)
            if extra:
                out = out * factor_poly(f) ** extra
        return out

    def __add__(self, other: "RatFun") -> "RatFun":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        den = dict(self.den)
        for f, m in other.den.items():
            den[f] = max(den.get(f, 0), m)
        return RatFun(self.r, self._lift(den) + other._lift(den), den).cancel()

    def __neg__(self):
        return RatFun(self.r, -self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RatFun):
            den = dict(self.den)
            for f, m in other.den.items():
                den[f] = den.get(f, 0) + m
            return RatFun(self.r, self.num * other.num, den)
        if isinstance(other, MotNum):
            return self * RatFun.const(self.r, other)
        return RatFun(self.r, self.num * other, self.den)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def cancel(self) -> "RatFun":
        """Drop whole denominator factors that divide the numerator."""
        num, den = self.num, dict(self.den)
        if num.is_zero():
            return RatFun(self.r)
        for f in list(den):
            fp = factor_poly(f)
            while den[f] and _maybe_divisible(num, f):
                q = divide_exact(num, fp)
                if q is None:
                    break
                num = q
                den[f] -= 1
        return RatFun(self.r, num, den)

    # Sigma membership
    def reduced(self) -> tuple[MPoly, dict, list]:
        """(num', den', leftover) with self = num'/den' once every removable non-decaying piece is gone.

        leftover lists the cyclotomic pieces with L-exponent >= 0 that survive.
        """
        num = self.num
        good = {}
        leftover = []
        for f, m in self.den.items():
            a, b = f
            if not any(b) or a < 0:
                good[f] = m
                continue
            if m % 2:
                num = -num
            for piece in _pieces(f):
                for _ in range(m):
                    q = divide_exact(num, piece)
                    if q is None:
                        leftover.append((f, piece))
                    else:
                        num = q
        return num, good, leftover

    def in_sigma(self) -> bool:
        return not self.reduced()[2]

    def at_one(self) -> MotNum:
        """Value at T = 1; needs Sigma membership."""
        num, good, leftover = self.reduced()
        if leftover:
            raise ValueError(f"series has a pole at T = 1 ({leftover[0][0]})")
        val = _mpoly_to_motnum(num.subs({tname(j): 1 for j in range(self.r)}))
        for (a, _), m in good.items():
            val = val * unit_factor(a, m)
        return val

    def coeff(self, k: Sequence[int]) -> MotNum:
        """Coefficient of T^k in the power-series expansion."""
        k = tuple(k)
        units = ONE
        series = []
        for (a, b), m in self.den.items():
            if any(b):
                series.append((a, b, m))
            else:
                units = units * unit_factor(a, m)
        total = {}
        for mono, c in self.num.terms.items():
            dm = dict(mono)
            rem = tuple(k[j] - dm.get(tname(j), 0) for j in range(self.r))
            if any(x < 0 for x in rem):
                continue
            for lexp, mult in _expansions(series, rem):
                e = lexp + dm.get("L", 0)
                total[e] = total.get(e, 0) + c * mult
        out = {}
        for e, c in total.items():
            if c.denominator != 1:
                raise ValueError("non-integral series coefficient")
            if c:
                out[e] = int(c)
        return MotNum.from_laurent(out) * units

    def __str__(self):
        return self.format()

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [tname(j) for j in range(self.r)]
        ren = {tname(j): n for j, n in enumerate(names)}
        num = format_mpoly(self.num.rename(ren), order=_display_order)
        if not self.den:
            return num
        parts = []
        for (a, b), m in self.den.items():
            mono = format_mpoly(MPoly.monomial({"L": a, **{names[j]: e for j, e in enumerate(b)}}))
            s = f"(1 - {mono})"
            parts.append(s if m == 1 else f"{s}^{m}")
        if len(self.num.terms) > 1:
            num = f"({num})"
        return f"{num} / " + (parts[0] if len(parts) == 1 else "(" + " * ".join(parts) + ")")

    def to_json(self) -> dict:
        return {
            "num": [[[list(ve) for ve in m], str(c)] for m, c in sorted(self.num.terms.items())],
            "den": [[a, list(b), m] for (a, b), m in self.den.items()],
        }

    @classmethod
    def from_json(cls, r: int, obj) -> "RatFun":
        num = MPoly({tuple((v, e) for v, e in m): Fraction(c) for m, c in obj["num"]})
        return cls(r, num, {(a, tuple(b)): m for a, b, m in obj["den"]})


def _display_order(m):
    # T-degree first, then L-degree, so 1 - L^-1 prints in that order
    t = sum(e for v, e in m if v != "L")
    l = sum(e for v, e in m if v == "L")
    return (-t, l)


def _mpoly_to_motnum(p: MPoly) -> MotNum:
    if p.variables() - {"L"}:
        raise ValueError(f"{p} still depends on T")
    out = {}
    for m, c in p.terms.items():
        if c.denominator != 1:
            raise ValueError(f"non-integral coefficient {c}")
        out[dict(m).get("L", 0)] = int(c)
    return MotNum.from_laurent(out)


def _expansions(series, rem):
    """Ways to write rem = sum n_f b_f; yields (L exponent, multiplicity)."""
    if not series:
        if not any(rem):
            yield 0, 1
        return
    (a, b, m), rest = series[0], series[1:]
    n = 0
    while all(n * bj <= rj for bj, rj in zip(b, rem)):
        left = tuple(rj - n * bj for bj, rj in zip(b, rem))
        for e, c in _expansions(rest, left):
            yield e + a * n, c * comb(n + m - 1, m - 1)
        n += 1


# --- series over sign sectors ----------------------------------------------------

@dataclass
class RationalSeries:
    """sum_i phi(i) T^i split into sign sectors; sector eps stores a series in U_j = T_j^eps_j."""

    names: tuple
    sectors: dict

    @property
    def r(self) -> int:
        return len(self.names)

    def in_sigma(self) -> bool:
        return all(rf.in_sigma() for rf in self.sectors.values())

    def at_one(self) -> MotNum:
        total = MotNum()
        for rf in self.sectors.values():
            total = total + rf.at_one()
        return total

    def coefficient(self, i: Sequence[int]) -> MotNum:
        eps = tuple(1 if x >= 0 else -1 for x in i)
        rf = self.sectors.get(eps)
        if rf is None:
            return MotNum()
        return rf.coeff(tuple(abs(x) for x in i))

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        keys = set(self.sectors) | set(other.sectors)
        zero = RatFun(self.r)
        return all(self.sectors.get(k, zero) == other.sectors.get(k, zero) for k in keys)

    __hash__ = None

    def __str__(self):
        if not self.sectors:
            return "0"
        out = []
        for eps in sorted(self.sectors, reverse=True):
            names = [n if e > 0 else f"(1/{n})" for n, e in zip(self.names, eps)]
            body = self.sectors[eps].format(names)
            if all(e > 0 for e in eps):
                out.append(body)
            else:
                out.append(f"[{_sector_label(self.names, eps)}] {body}")
        return " + ".join(out)

    def to_json(self) -> dict:
        return {
            "vars": list(self.names),
            "sectors": [{"eps": list(eps), **rf.to_json()} for eps, rf in sorted(self.sectors.items())],
            "in_sigma": self.in_sigma(),
        }

    @classmethod
    def from_json(cls, obj) -> "RationalSeries":
        names = tuple(obj["vars"])
        secs = {tuple(s["eps"]): RatFun.from_json(len(names), s) for s in obj["sectors"]}
        return cls(names, secs)


def _sector_label(names, eps) -> str:
    return ", ".join(f"{n} >= 0" if e > 0 else f"{n} < 0" for n, e in zip(names, eps))


def sum_poly_geometric(P: Sequence[int], a: int, name: str = "T") -> RationalSeries:
    """sum_{n >= a} P(n) T^n = sum_i [Delta^i P(a)] T^(a+i) / (1 - T)^(i+1)."""
    rf = RatFun(1)
    for i, c in enumerate(delta_values(list(P) or [0], a)):
        if c:
            rf = rf + RatFun(1, MPoly.monomial({tname(0): a + i}, c), {(0, (1,)): i + 1})
    return RationalSeries((name,), {(1,): rf} if not rf.is_zero() else {})


# --- Mellin transform ---------------------------------------------------------------

@dataclass(frozen=True)
class _GTerm:
    coeff: RatFun
    factors: tuple
    lexp: LinearFunction
    uexp: tuple
    support: Formula


def _geo(r: int, p: int, d: int, beta: tuple) -> RatFun:
    """sum_{j >= 0} j^p z^j with z = L^d U^beta."""
    out = RatFun(r)
    for i, c in enumerate(delta_values([0] * p + [1], 0)):
        if c:
            out = out + RatFun(r, MPoly.monomial({"L": d * i, **{tname(j): b * i for j, b in enumerate(beta)}}, c),
                               {(d, beta): i + 1})
    return out


def _finite_geo(r, p, d, beta, K):
    """sum_{j=0}^{K} j^p z^j as parts (coeff, factors, dl, du, support)."""
    if not any(beta):
        return [(RatFun.const(r, c), facs, e * 1, (LinearFunction(),) * r, sup)
                for c, facs, e, sup in finite_moment(p, d, K)]
    if all(b >= 0 for b in beta):
        parts = [(_geo(r, p, d, beta), (), LinearFunction(), (LinearFunction(),) * r, TRUE)]
        K1 = K + 1
        for i in range(p + 1):
            parts.append((_geo(r, i, d, beta) * (-comb(p, i)), (K1,) * (p - i), K1 * d,
                          tuple(K1 * b for b in beta), TRUE))
        return parts
    if all(b <= 0 for b in beta):
        # reflect j -> K - j
        parts = []
        nb = tuple(-b for b in beta)
        for i in range(p + 1):
            sign = comb(p, i) * (-1) ** i
            for c, facs, dl, du, sup in _finite_geo(r, i, -d, nb, K):
                parts.append((c * sign, (K,) * (p - i) + facs, dl + K * d,
                              tuple(x + K * b for x, b in zip(du, beta)), sup))
        return parts
    raise NotImplementedError("mixed-sign ratio over a parametric range")


def _sum_gterm(g: _GTerm, x: str, base_lits, piece, r: int) -> list[_GTerm]:
    base = literal_formula(base_lits)
    if isinstance(piece, Point):
        s = {x: piece.center}
        return [_GTerm(g.coeff, tuple(f.subs(s) for f in g.factors), g.lexp.subs(s),
                       tuple(u.subs(s) for u in g.uexp), base)]
    out = []
    for start, sign, K in _parametrizations(piece):
        step = sign * piece.modulus
        s = {x: start}
        e0 = g.lexp.subs(s)
        u0 = tuple(u.subs(s) for u in g.uexp)
        d = g.lexp.coeff(x) * step
        beta = tuple(u.coeff(x) * step for u in g.uexp)
        if d.denominator != 1 or any(b.denominator != 1 for b in beta):
            raise ValueError("exponent is not integral along the fiber")
        d, beta = int(d), tuple(int(b) for b in beta)
        poly = _expand_factors(g.factors, x, start, step)
        if K is None:
            if any(b < 0 for b in beta) or (not any(beta) and d >= 0):
                raise ValueError(f"generating series diverges along {x}")
            parts = {p: [(_geo(r, p, d, beta), (), LinearFunction(), (LinearFunction(),) * r, TRUE)] for p in poly}
        elif K.is_constant():
            n = int(K.const)
            parts = {}
            for p in poly:
                acc = []
                for j in range(n + 1):
                    if j or p == 0:
                        acc.append((RatFun.const(r, j ** p), (), LinearFunction.constant(d * j),
                                    tuple(LinearFunction.constant(b * j) for b in beta), TRUE))
                parts[p] = acc
        else:
            parts = {p: _finite_geo(r, p, d, beta, K) for p in poly}
        for p, items in poly.items():
            for c, facs, dl, du, sup in parts[p]:
                for ic, ufs in items:
                    out.append(_GTerm(g.coeff * c * ic, ufs + tuple(facs), e0 + dl,
                                      tuple(a + b for a, b in zip(u0, du)), conj(base, sup)))
    return out


def _sum_gterms(terms: list[_GTerm], x: str, r: int) -> list[_GTerm]:
    out = []
    for g in terms:
        for lits in branches(g.support):
            for base_lits, piece in fiber_pieces(list(lits), x):
                out.extend(_sum_gterm(g, x, base_lits, piece, r))
    return out


def mellin(phi: CPFunction, over: Sequence[str] | None = None, names: Sequence[str] | None = None) -> RationalSeries:
    """Generating series sum_i phi(i) T^i of a function of at most two Z-variables."""
    over = sorted(phi.variables()) if over is None else list(over)
    r = len(over)
    if r > 2:
        raise NotImplementedError("mellin is implemented for at most two variables")
    if phi.variables() - set(over):
        raise ValueError("mellin needs a function on a point base")
    if names is None:
        names = ("T",) if r == 1 else tuple(tname(j) for j in range(r))
    sectors = {}
    kv = [f"_u{j}" for j in range(r)]
    for eps in itertools.product((1, -1), repeat=r):
        orth = conj(*(ge(LinearFunction.var(x), 0) if e > 0 else le(LinearFunction.var(x), -1)
                      for x, e in zip(over, eps)))
        psi = phi.restrict(orth).subs({x: LinearFunction.var(k, e) for x, k, e in zip(over, kv, eps)})
        gts = [_GTerm(RatFun.const(r, t.coeff), t.factors, t.exp, tuple(LinearFunction.var(k) for k in kv), t.support)
               for t in psi.terms]
        for k in reversed(kv):
            gts = _sum_gterms(gts, k, r)
        total = RatFun(r)
        for g in gts:
            if not evaluate(g.support, {}):
                continue
            c = g.coeff
            for f in g.factors:
                c = c * int(f.eval({}))
            c = c * RatFun.monomial(r, g.lexp.eval({}), [u.eval({}) for u in g.uexp])
            total = total + c
        if not total.is_zero():
            sectors[eps] = total
    return RationalSeries(tuple(names), sectors)


def coeff_extract(m: RationalSeries, i: Sequence[int]) -> CPFunction:
    """The T^i coefficient as a constant function."""
    return CPFunction.const(m.coefficient(i))


def in_sigma(m: RationalSeries) -> bool:
    return m.in_sigma()
