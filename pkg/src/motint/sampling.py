"""Seeded random instances for property tests and the experiment runners.

Every generator takes a ``random.Random`` so runs are reproducible from a seed.
Regions carry the generators of their recession cones, which gives an
integrability verdict that does not go through the summation code.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .cpf import CPFunction
from .motnum import MotNum
from .presburger import formula as F
from .presburger.linear import LinearFunction
from . import valfield as V


def rand_motnum(rng: random.Random, deg: int = 3, coef: int = 4, shift: int = 3, dens: int = 2) -> MotNum:
    num = [rng.randint(-coef, coef) for _ in range(rng.randint(1, deg + 1))]
    factors = tuple((rng.randint(1, 3), 1) for _ in range(rng.randint(0, dens)))
    return MotNum(tuple(num), rng.randint(-shift, shift), factors)


def rand_int_poly(rng: random.Random, deg: int = 6, coef: int = 9) -> list[int]:
    """Coefficient list, constant term first."""
    return [rng.randint(-coef, coef) for _ in range(rng.randint(0, deg) + 1)]


@dataclass(frozen=True)
class Region:
    support: F.Formula
    rays: tuple  # generators of the recession cone; empty when bounded
    name: str = ""


def _v(n):
    return LinearFunction.var(n)


def region_1d(rng: random.Random, x: str = "i") -> Region:
    i = _v(x)
    a, b = sorted(rng.sample(range(-4, 5), 2))
    kind = rng.choice(["up", "down", "box", "line", "upcong"])
    if kind == "up":
        return Region(F.ge(i, a), ((1,),), kind)
    if kind == "down":
        return Region(F.le(i, b), ((-1,),), kind)
    if kind == "box":
        return Region(F.conj(F.ge(i, a), F.le(i, b)), (), kind)
    if kind == "line":
        return Region(F.TRUE, ((1,), (-1,)), kind)
    n = rng.randint(2, 3)
    return Region(F.conj(F.ge(i, a), F.cong(i, rng.randrange(n), n)), ((1,),), kind)


def region_2d(rng: random.Random, x: str = "i", y: str = "j") -> Region:
    i, j = _v(x), _v(y)
    a, b = rng.randint(-3, 3), rng.randint(-3, 3)
    kind = rng.choice(["quadrant", "cone", "strip", "triangle", "mixed", "box", "congcone"])
    if kind == "quadrant":
        return Region(F.conj(F.ge(i, a), F.ge(j, b)), ((1, 0), (0, 1)), kind)
    if kind == "cone":
        return Region(F.conj(F.ge(j, a), F.ge(i, j)), ((1, 0), (1, 1)), kind)
    if kind == "strip":
        return Region(F.conj(F.ge(i, a), F.ge(j, b), F.le(j, b + rng.randint(0, 3))), ((1, 0),), kind)
    if kind == "triangle":
        return Region(F.conj(F.ge(i, a), F.ge(j, b), F.le(i + j, a + b + rng.randint(0, 6))), (), kind)
    if kind == "mixed":
        return Region(F.conj(F.ge(i, a), F.le(j, b)), ((1, 0), (0, -1)), kind)
    if kind == "box":
        return Region(F.conj(F.ge(i, a), F.le(i, a + 3), F.ge(j, b), F.le(j, b + 3)), (), kind)
    n = rng.randint(2, 3)
    return Region(F.conj(F.ge(j, 0), F.le(j, i), F.cong(i + j, rng.randrange(n), n)), ((1, 0), (1, 1)), kind)


def _positive_coeff(rng: random.Random) -> MotNum:
    c = MotNum((rng.randint(1, 3),), rng.randint(-1, 1))
    if rng.random() < 0.3:
        c = c * MotNum.inv_one_minus_Linv(rng.randint(1, 2))
    return c


def _rate_ok(alpha, rays) -> bool:
    return all(sum(a * r for a, r in zip(alpha, ray)) < 0 for ray in rays)


def _term(rng: random.Random, region: Region, xs, integrable: bool):
    while True:
        alpha = [rng.randint(-3, 3) for _ in xs]
        if _rate_ok(alpha, region.rays) == integrable:
            break
    exp = LinearFunction.from_dict(dict(zip(xs, alpha)), rng.randint(-2, 2))
    factors = []
    for _ in range(rng.choice([0, 0, 1, 2])):
        while True:
            u = [rng.randint(-2, 2) for _ in xs]
            if any(u):
                break
        factors.append(LinearFunction.from_dict(dict(zip(xs, u)), rng.randint(-3, 3)))
    sign = 1 if rng.random() < 0.8 else -1
    return CPFunction.term(_positive_coeff(rng) * sign, factors, exp, region.support)


def rand_cpf(rng: random.Random, r: int, integrable: bool = True, terms: int = 3) -> CPFunction:
    """A sum of 1..terms terms over Z^r in the variables i (, j).

    When integrable is False exactly one term grows or stays flat along some ray
    of its region, so no cancellation can restore convergence.
    """
    xs = ["i", "j"][:r]
    make = region_1d if r == 1 else region_2d
    n = rng.randint(1, terms)
    bad = None if integrable else rng.randrange(n)
    out = CPFunction()
    for k in range(n):
        reg = make(rng, *xs)
        # a single exponent cannot decay in two opposite directions
        while (k == bad and not reg.rays) or (k != bad and reg.name == "line"):
            reg = make(rng, *xs)
        out = out + _term(rng, reg, xs, k != bad)
    return out


def rand_param_cpf(rng: random.Random) -> CPFunction:
    """An integrable function of (i, j) whose support depends on a base parameter s."""
    i, j, s = _v("i"), _v("j"), _v("s")
    kind = rng.choice(["tri", "slab", "tail"])
    if kind == "tri":
        sup = F.conj(F.ge(i, 0), F.le(i, s), F.ge(j, 0), F.le(j, i))
        alpha = (rng.randint(-2, 2), rng.randint(-2, 2))
    elif kind == "slab":
        sup = F.conj(F.ge(i, 0), F.le(i, s), F.ge(j, i))
        alpha = (rng.randint(-2, 2), rng.randint(-3, -1))
    else:
        sup = F.conj(F.ge(i, s), F.ge(j, 0), F.le(j, 2))
        alpha = (rng.randint(-3, -1), rng.randint(-2, 2))
    exp = LinearFunction.from_dict({"i": alpha[0], "j": alpha[1]}, rng.randint(-1, 1))
    factors = [i + rng.randint(0, 2)] if rng.random() < 0.4 else []
    return CPFunction.term(_positive_coeff(rng), factors, exp, F.conj(sup, F.ge(s, 0)))


# --- valued-field instances -------------------------------------------------------------

def rand_series_point(rng: random.Random, lo: int = 0, hi: int = 3, integral: bool = True) -> V.SeriesPoint:
    coeffs = [(e, rng.randint(-3, 3)) for e in range(lo if not integral else max(lo, 0), hi + 1)]
    return V.SeriesPoint(tuple(coeffs))


def rand_monomial(rng: random.Random, lo: int = -2, hi: int = 2) -> V.SeriesPoint:
    return V.SeriesPoint.t(rng.randint(lo, hi), rng.choice([1, -1, 2, -2, 3, Fraction(1, 2)]))


def rand_affine(rng: random.Random) -> V.AffineMap:
    return V.AffineMap(rand_monomial(rng), rand_series_point(rng, 0, 2))


def rand_annulus(rng: random.Random):
    """(description, center, order) for ord(x - c) = alpha and ac(x - c) = xi."""
    c = rand_series_point(rng, 0, 3)
    alpha = rng.randint(-2, 4)
    xi = rng.choice([1, -1, 2, 3, Fraction(1, 2)])
    return V.d_and(V.ord_atom(c, "=", alpha), V.ac_atom(c, xi)), c, alpha


def _good_reduction(consts, primes) -> bool:
    vals = set(consts) | {0}
    for a in vals:
        for b in vals:
            for d in (a - b, a + b):
                if d and any(d % p == 0 for p in primes):
                    return False
    return True


def rand_integer_description(rng: random.Random, primes=(3, 5), atoms: int = 3):
    """A random boolean combination of ord/ac conditions at integer centers, inside O.

    Centers and angular values are drawn so that every difference and sum of
    them stays a unit at each prime; the residue geometry then reduces well.
    """
    while True:
        centers = rng.sample(range(-3, 4), rng.randint(1, 3))
        acs = [rng.choice([1, 2, -1, -2]) for _ in range(atoms)]
        if _good_reduction(centers + acs, primes):
            break
    pool = []
    for k in range(rng.randint(1, atoms)):
        c = V.SeriesPoint.of(rng.choice(centers))
        kind = rng.random()
        if kind < 0.55:
            pool.append(V.ord_atom(c, rng.choice(["=", ">=", "<=", ">", "<"]), rng.randint(0, 3)))
        elif kind < 0.85:
            pool.append(V.ac_atom(c, acs[k], negated=rng.random() < 0.3))
        else:
            n = rng.randint(2, 3)
            pool.append(V.OrdCong(c, rng.randrange(n), n))
    body = pool[0]
    for a in pool[1:]:
        if rng.random() < 0.3:
            a = V.DNot(a)
        body = V.d_and(body, a) if rng.random() < 0.6 else V.d_or(body, a)
    return V.d_and(V.ord_atom(V.SeriesPoint(), ">=", 0), body)
