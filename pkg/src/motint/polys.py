"""Sparse Laurent polynomials over Q in named variables, plus dense univariate helpers.

Univariate dense polynomials are lists of coefficients, lowest degree first.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Mapping

Monomial = tuple  # tuple of (var, exp) sorted by var, exp != 0


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        n = d.get(v, 0) + e
        if n:
            d[v] = n
        else:
            d.pop(v, None)
    return tuple(sorted(d.items()))


def _coerce(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as a coefficient")


class MPoly:
    """Immutable sparse polynomial; negative exponents allowed."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = _coerce(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, c) -> "MPoly":
        return cls({(): _coerce(c)})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "MPoly":
        return cls({((name, exp),): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], c=1) -> "MPoly":
        m = tuple(sorted((v, e) for v, e in exps.items() if e))
        return cls({m: _coerce(c)})

    @staticmethod
    def lift(x) -> "MPoly":
        if isinstance(x, MPoly):
            return x
        return MPoly.const(x)

    # ring structure
    def __add__(self, other):
        other = MPoly.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-MPoly.lift(other))

    def __rsub__(self, other):
        return MPoly.lift(other) - self

    def __mul__(self, other):
        other = MPoly.lift(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return MPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) == 1:
                (m, c), = self.terms.items()
                return MPoly({tuple((v, -e) for v, e in m): 1 / c}) ** (-n)
            raise ValueError("negative power of a non-monomial")
        result = MPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            if isinstance(other, (int, Fraction)):
                other = MPoly.const(other)
            else:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms.get((), Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(v for m in self.terms for v, _ in m)

    def degree(self, var: str) -> int:
        return max((dict(m).get(var, 0) for m in self.terms), default=0)

    def min_degree(self, var: str) -> int:
        return min((dict(m).get(var, 0) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    def coeffs_in(self, var: str) -> dict:
        """Split as sum_k coeff_k * var^k."""
        out: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            k = d.pop(var, 0)
            rest = tuple(sorted(d.items()))
            out.setdefault(k, {})[rest] = c
        return {k: MPoly(t) for k, t in out.items()}

    def content(self) -> Fraction:
        """Positive rational g with self/g integral and primitive."""
        if not self.terms:
            return Fraction(1)
        nums = 0
        dens = 1
        for c in self.terms.values():
            nums = gcd(nums, c.numerator)
            dens = lcm(dens, c.denominator)
        return Fraction(nums, dens)

    def primitive(self) -> "MPoly":
        """Integer primitive form with positive leading coefficient."""
        if not self.terms:
            return self
        g = self.content()
        lead = self.terms[max(self.terms)]
        if lead < 0:
            g = -g
        return MPoly({m: c / g for m, c in self.terms.items()})

    def subs(self, mapping: Mapping[str, object]) -> "MPoly":
        if not mapping:
            return self
        lifted = {k: MPoly.lift(v) for k, v in mapping.items()}
        out = MPoly()
        cache: dict = {}
        for m, c in self.terms.items():
            term = MPoly.const(c)
            keep = []
            for v, e in m:
                if v in lifted:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = lifted[v] ** e
                    term = term * cache[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term * MPoly({tuple(keep): Fraction(1)})
            out = out + term
        return out

    def rename(self, mapping: Mapping[str, str]) -> "MPoly":
        out: dict = {}
        for m, c in self.terms.items():
            d: dict = {}
            for v, e in m:
                w = mapping.get(v, v)
                d[w] = d.get(w, 0) + e
            key = tuple(sorted((v, e) for v, e in d.items() if e))
            out[key] = out.get(key, 0) + c
        return MPoly(out)

    def eval(self, env: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t *= Fraction(env[v]) ** e
            total += t
        return total

    def eval_mod(self, env: Mapping[str, object], p: int):
        """Evaluate modulo p; env values may be ints or numpy int arrays."""
        total = 0
        for m, c in self.terms.items():
            if c.denominator % p == 0:
                raise ValueError(f"coefficient {c} not defined mod {p}")
            t = c.numerator * pow(c.denominator, -1, p) % p
            for v, e in m:
                if e < 0:
                    raise ValueError("negative exponent in modular evaluation")
                for _ in range(e):
                    t = (t * env[v]) % p
            total = (total + t) % p
        return total

    def to_univariate(self, var: str) -> list:
        """Dense coefficient list in var (nonnegative exponents only)."""
        if self.variables() - {var}:
            raise ValueError("not univariate")
        if not self.terms:
            return []
        deg = self.degree(var)
        if self.min_degree(var) < 0:
            raise ValueError("negative exponent")
        out = [Fraction(0)] * (deg + 1)
        for m, c in self.terms.items():
            out[dict(m).get(var, 0)] = c
        return out

    @classmethod
    def from_univariate(cls, coeffs: Iterable, var: str) -> "MPoly":
        return cls({((((var, i),) if i else ())): Fraction(c) for i, c in enumerate(coeffs) if c})

    def shift_to_polynomial(self) -> tuple["MPoly", dict]:
        """Multiply by a monomial so all exponents are >= 0; returns (poly, shift)."""
        shift = {}
        for v in self.variables():
            lo = self.min_degree(v)
            if lo < 0:
                shift[v] = -lo
        if not shift:
            return self, {}
        return self * MPoly.monomial(shift), shift

    def sort_key(self):
        return tuple(sorted((m, c) for m, c in self.terms.items()))

    def __repr__(self):
        return f"MPoly({self})"

    def __str__(self):
        return format_mpoly(self)


def _fmt_mono(m: Monomial) -> str:
    parts = []
    for v, e in m:
        parts.append(v if e == 1 else f"{v}^{e}")
    return "*".join(parts)


def _mono_order(m: Monomial):
    return (sum(e for _, e in m), tuple((v, e) for v, e in m))


def format_mpoly(p: MPoly, order=None) -> str:
    if not p.terms:
        return "0"
    keys = sorted(p.terms, key=order or _mono_order, reverse=True)
    out = []
    for i, m in enumerate(keys):
        c = p.terms[m]
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        mono = _fmt_mono(m)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def divide_exact(num: MPoly, den: MPoly) -> MPoly | None:
    """Exact quotient num/den of polynomials (after clearing Laurent shifts), or None."""
    if den.is_zero():
        raise ZeroDivisionError
    if num.is_zero():
        return MPoly()
    n, sn = num.shift_to_polynomial()
    d, sd = den.shift_to_polynomial()
    names = sorted(n.variables() | d.variables())

    def vec(m):
        dm = dict(m)
        return tuple(dm.get(v, 0) for v in names)

    # graded lex order; the heap holds negated keys and may hold stale entries
    def hkey(v):
        return (-sum(v), tuple(-e for e in v))

    dterms = [(vec(m), c) for m, c in d.terms.items()]
    lead_v, lead_c = max(dterms, key=lambda t: (sum(t[0]), t[0]))
    rem = {vec(m): c for m, c in n.terms.items()}
    heap = [hkey(v) for v in rem]
    heapq.heapify(heap)
    q: dict = {}
    while rem:
        key = heapq.heappop(heap)
        m = tuple(-e for e in key[1])
        if m not in rem:
            continue
        qv = tuple(a - b for a, b in zip(m, lead_v))
        if min(qv, default=0) < 0:
            return None
        qc = rem[m] / lead_c
        q[qv] = qc
        for dv, dc in dterms:
            t = tuple(a + b for a, b in zip(qv, dv))
            old = rem.get(t)
            val = (old or 0) - qc * dc
            if val:
                rem[t] = val
                if old is None:
                    heapq.heappush(heap, hkey(t))
            elif old is not None:
                del rem[t]
    quot = MPoly({tuple((v, e) for v, e in zip(names, qv) if e): c for qv, c in q.items()})
    # undo the Laurent shifts: num = x^-sn * n, den = x^-sd * d
    adj = {v: sd.get(v, 0) - sn.get(v, 0) for v in set(sn) | set(sd)}
    if any(adj.values()):
        quot = quot * MPoly.monomial(adj)
    return quot


# --- dense univariate helpers over Fraction / int -------------------------

def u_trim(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def u_add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return u_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def u_sub(a: list, b: list) -> list:
    return u_add(a, [-c for c in b])


def u_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return u_trim(out)


def u_scale(a: list, c) -> list:
    return u_trim([c * x for x in a])


def u_shift(a: list, k: int) -> list:
    return [0] * k + list(a) if a else []


def u_pow(a: list, n: int) -> list:
    out = [1]
    for _ in range(n):
        out = u_mul(out, a)
    return out


def u_eval(a: list, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def u_divmod(a: list, b: list) -> tuple[list, list]:
    b = u_trim(b)
    if not b:
        raise ZeroDivisionError
    a = [Fraction(c) for c in u_trim(a)]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, bc in enumerate(b):
            a[i + k] -= c * bc
        a = u_trim(a)
    return u_trim(q), a


def u_exact_div_int(a: list, b: list) -> list | None:
    """Integer polynomial division when b is monic or ±1-leading; None if inexact."""
    q, r = u_divmod(a, b)
    if r:
        return None
    if any(Fraction(c).denominator != 1 for c in q):
        return None
    return [int(c) for c in q]


def u_deriv(a: list) -> list:
    return u_trim([i * a[i] for i in range(1, len(a))])


def u_monic(a: list) -> list:
    a = u_trim(a)
    if not a:
        return a
    lead = Fraction(a[-1])
    return [Fraction(c) / lead for c in a]


def u_gcd(a: list, b: list) -> list:
    a, b = u_trim(a), u_trim(b)
    while b:
        _, r = u_divmod(a, b)
        a, b = b, r
    return u_monic(a)


def u_squarefree(a: list) -> list:
    a = u_trim(a)
    if len(a) <= 1:
        return u_monic(a)
    g = u_gcd(a, u_deriv(a))
    q, _ = u_divmod(a, g)
    return u_monic(q)


def sturm_sequence(a: list) -> list:
    seq = [u_trim([Fraction(c) for c in a])]
    seq.append(u_deriv(seq[0]))
    while seq[-1]:
        _, r = u_divmod(seq[-2], seq[-1])
        seq.append(u_scale(r, -1))
    return seq[:-1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_changes(seq: list, x) -> int:
    signs = [s for s in (_sign(u_eval(p, x)) for p in seq) if s]
    return sum(1 for i in range(1, len(signs)) if signs[i] != signs[i - 1])


def count_roots(seq: list, lo, hi) -> int:
    """Distinct real roots in the half-open interval (lo, hi]."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def root_bound(a: list) -> Fraction:
    a = u_trim(a)
    lead = abs(Fraction(a[-1]))
    return 1 + max((abs(Fraction(c)) / lead for c in a[:-1]), default=Fraction(0))


def isolate_roots(a: list, lo: Fraction, hi: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (l, h], each holding exactly one distinct root in (lo, hi]."""
    seq = sturm_sequence(a)
    out = []
    stack = [(Fraction(lo), Fraction(hi))]
    while stack:
        l, h = stack.pop()
        n = count_roots(seq, l, h)
        if n == 0:
            continue
        if n == 1:
            out.append((l, h))
            continue
        mid = (l + h) / 2
        stack.append((mid, h))
        stack.append((l, mid))
    return sorted(out)


def rational_roots(a: list) -> list[Fraction]:
    """Distinct rational roots of a rational-coefficient polynomial."""
    a = u_trim(a)
    if not a:
        raise ValueError("zero polynomial")
    den = 1
    for c in a:
        den = lcm(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in a]
    roots = set()
    while ints and ints[0] == 0:
        roots.add(Fraction(0))
        ints = ints[1:]
    if len(ints) <= 1:
        return sorted(roots)
    a0, an = abs(ints[0]), abs(ints[-1])
    for p in _divisors(a0):
        for q in _divisors(an):
            for s in (1, -1):
                r = Fraction(s * p, q)
                if u_eval(ints, r) == 0:
                    roots.add(r)
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple:
    """Integer coefficients of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            q = u_exact_div_int(num, list(cyclotomic(d)))
            num = q
    return tuple(num)
