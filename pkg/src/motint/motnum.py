"""The coefficient ring A = Z[L, 1/L, 1/(1 - L^-i)] and its positive part."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .polys import (
    isolate_roots,
    root_bound,
    u_add,
    u_eval,
    u_exact_div_int,
    u_mul,
    u_pow,
    u_scale,
    u_shift,
    u_trim,
)


class DomainError(ValueError):
    pass


def _cyc(i: int) -> list:
    """L^i - 1 as a dense list."""
    return [-1] + [0] * (i - 1) + [1]


@dataclass(frozen=True, eq=False)
class MotNum:
    """num(L) / (L^shift * prod (L^i - 1)^m), kept canonical."""

    num: tuple = ()
    shift: int = 0
    factors: tuple = ()

    def __post_init__(self):
        num = u_trim([int(c) for c in self.num])
        shift = int(self.shift)
        facs = {}
        for i, m in self.factors:
            if i < 1 or m < 0:
                raise ValueError(f"bad denominator factor {(i, m)}")
            if m:
                facs[int(i)] = facs.get(int(i), 0) + int(m)
        if not num:
            shift, facs = 0, {}
        else:
            k = 0
            while num[k] == 0:
                k += 1
            if k:
                num = num[k:]
                shift -= k
            for i in sorted(facs):
                while facs[i] > 0:
                    q = u_exact_div_int(num, _cyc(i))
                    if q is None:
                        break
                    num = q
                    facs[i] -= 1
            facs = {i: m for i, m in facs.items() if m}
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "factors", tuple(sorted(facs.items())))

    # constructors
    @classmethod
    def of(cls, x) -> "MotNum":
        if isinstance(x, MotNum):
            return x
        if isinstance(x, int):
            return cls((x,))
        if isinstance(x, Fraction) and x.denominator == 1:
            return cls((x.numerator,))
        raise TypeError(f"cannot convert {x!r} to MotNum")

    @classmethod
    def L(cls, k: int = 1) -> "MotNum":
        return cls((1,), -k)

    @classmethod
    def inv_one_minus_Linv(cls, i: int, m: int = 1) -> "MotNum":
        """(1 - L^-i)^-m = L^(im) / (L^i - 1)^m."""
        return cls((1,), -i * m, ((i, m),))

    @classmethod
    def from_laurent(cls, coeffs: dict) -> "MotNum":
        """From {exponent: int coefficient}."""
        if not coeffs:
            return cls()
        lo = min(coeffs)
        num = [0] * (max(coeffs) - lo + 1)
        for k, c in coeffs.items():
            num[k - lo] += int(c)
        return cls(tuple(num), -lo)

    # predicates
    def is_zero(self) -> bool:
        return not self.num

    def is_laurent(self) -> bool:
        return not self.factors

    def laurent_coeffs(self) -> dict:
        if self.factors:
            raise ValueError("not a Laurent polynomial")
        return {k - self.shift: c for k, c in enumerate(self.num) if c}

    def deg_L(self) -> float:
        if not self.num:
            return float("-inf")
        return len(self.num) - 1 - self.shift - sum(i * m for i, m in self.factors)

    # arithmetic
    def _den_poly(self, shift: int, facs: dict) -> list:
        out = [1]
        for i, m in facs.items():
            out = u_mul(out, u_pow(_cyc(i), m))
        return out

    def _lift_to(self, shift: int, facs: dict) -> list:
        """Numerator over the common denominator L^shift prod facs."""
        mine = dict(self.factors)
        extra = {i: m - mine.get(i, 0) for i, m in facs.items() if m - mine.get(i, 0)}
        out = u_mul(list(self.num), self._den_poly(0, extra))
        return u_shift(out, shift - self.shift)

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if not self.num:
            return other
        if not other.num:
            return self
        shift = max(self.shift, other.shift)
        facs = dict(self.factors)
        for i, m in other.factors:
            facs[i] = max(facs.get(i, 0), m)
        num = u_add(self._lift_to(shift, facs), other._lift_to(shift, facs))
        return MotNum(tuple(num), shift, tuple(facs.items()))

    __radd__ = __add__

    def __neg__(self):
        return MotNum(tuple(-c for c in self.num), self.shift, self.factors)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        facs = dict(self.factors)
        for i, m in other.factors:
            facs[i] = facs.get(i, 0) + m
        return MotNum(tuple(u_mul(list(self.num), list(other.num))), self.shift + other.shift, tuple(facs.items()))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = MotNum((1,))
        for _ in range(n):
            out = out * self
        return out

    def unit_decomposition(self):
        """(sign, L-exponent, {i: m}) with self = sign * L^k * prod (L^i-1)^m, or None."""
        if not self.num:
            return None
        num = list(self.num)
        found: dict = {}
        for i in range(len(num) - 1, 0, -1):
            while len(num) > i:
                q = u_exact_div_int(num, _cyc(i))
                if q is None:
                    break
                num = q
                found[i] = found.get(i, 0) + 1
        if len(num) != 1 or abs(num[0]) != 1:
            return None
        dec = dict(found)
        for i, m in self.factors:
            dec[i] = dec.get(i, 0) - m
        return num[0], -self.shift, {i: m for i, m in dec.items() if m}

    def is_unit(self) -> bool:
        return self.unit_decomposition() is not None

    def inverse(self) -> "MotNum":
        dec = self.unit_decomposition()
        if dec is None:
            raise DomainError(f"{self} is not a unit of A")
        sign, k, facs = dec
        num = [sign]
        neg = []
        for i, m in facs.items():
            if m < 0:
                num = u_mul(num, u_pow(_cyc(i), -m))
            else:
                neg.append((i, m))
        return MotNum(tuple(num), k, tuple(neg))

    def __truediv__(self, other):
        return self * _lift(other).inverse()

    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash(self.eval_theta(Fraction(1000003, 7)))

    # evaluation
    def eval_theta(self, q) -> Fraction:
        q = Fraction(q)
        if q <= 1:
            raise DomainError("theta_q needs q > 1")
        val = Fraction(u_eval(list(self.num), q))
        den = q ** self.shift
        for i, m in self.factors:
            den *= (q ** i - 1) ** m
        return val / den

    def nonneg_witness(self) -> Fraction | None:
        """A rational q > 1 with theta_q(self) < 0, or None when self is in A+."""
        p = list(self.num)
        if not p:
            return None
        hi = max(root_bound(p), Fraction(2))
        iv = isolate_roots(p, Fraction(1), hi)
        from .polys import count_roots, sturm_sequence

        seq = sturm_sequence(p)

        def ok(iv):
            if iv and iv[0][0] <= 1:
                return False
            return all(iv[k][1] < iv[k + 1][0] for k in range(len(iv) - 1))

        while not ok(iv):
            nxt = []
            for l, h in iv:
                mid = (l + h) / 2
                nxt.append((l, mid) if count_roots(seq, l, mid) else (mid, h))
            iv = nxt
        if iv:
            probes = [iv[0][0]]
            probes += [(iv[k][1] + iv[k + 1][0]) / 2 for k in range(len(iv) - 1)]
            probes.append(hi + 1)
        else:
            probes = [Fraction(2)]
        for q in probes:
            if u_eval(p, q) < 0:
                return q
        return None

    def is_nonneg(self) -> bool:
        return self.nonneg_witness() is None

    # text forms
    def to_text(self) -> str:
        poly = _fmt_dense(list(self.num)) if self.num else "0"
        den = [f"L^{self.shift}"] + [f"(L^{i} - 1)^{m}" for i, m in self.factors]
        return f"{poly} / ({' * '.join(den)})"

    def to_json(self) -> dict:
        return {"num": list(self.num), "shift": self.shift, "factors": [list(f) for f in self.factors]}

    @classmethod
    def from_json(cls, obj) -> "MotNum":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(obj["num"]), obj["shift"], tuple(tuple(f) for f in obj["factors"]))

    def __str__(self):
        if not self.factors:
            return _fmt_laurent({k - self.shift: c for k, c in enumerate(self.num) if c})
        top = _fmt_laurent({k - self.shift: c for k, c in enumerate(self.num) if c})
        if len([c for c in self.num if c]) > 1:
            top = f"({top})"
        bottom = " * ".join(_fmt_cyc(i, m) for i, m in self.factors)
        if len(self.factors) > 1 or "^" in bottom.split(")")[-1]:
            bottom = f"({bottom})"
        return f"{top} / {bottom}"

    def __repr__(self):
        return f"MotNum({self})"


def _fmt_cyc(i: int, m: int) -> str:
    base = "(L - 1)" if i == 1 else f"(L^{i} - 1)"
    return base if m == 1 else f"{base}^{m}"


def _fmt_dense(num: list) -> str:
    return _fmt_laurent({k: c for k, c in enumerate(num) if c})


def _fmt_laurent(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    parts = []
    for n, k in enumerate(sorted(coeffs, reverse=True)):
        c = coeffs[k]
        mono = "" if k == 0 else ("L" if k == 1 else f"L^{k}")
        a = abs(c)
        body = str(a) if not mono else (mono if a == 1 else f"{a}*{mono}")
        if n == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def _lift(x):
    if isinstance(x, MotNum):
        return x
    if isinstance(x, (int, Fraction)):
        try:
            return MotNum.of(x)
        except TypeError:
            return NotImplemented
    return NotImplemented


ZERO = MotNum()
ONE = MotNum((1,))
L = MotNum.L()


# --- parsing -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(L)|(\*\*|[-+*/^()]))")


def parse_motnum(text) -> MotNum:
    """Parse the canonical text form, any ring expression in L, or the JSON object."""
    if isinstance(text, dict):
        return MotNum.from_json(text)
    s = text.strip()
    if s.startswith("{"):
        return MotNum.from_json(s)
    toks = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at {pos}: {s[pos:pos + 10]!r}")
        num, sym, op = m.groups()
        toks.append(("num", int(num)) if num else ("L", None) if sym else ("op", "^" if op == "**" else op))
        pos = m.end()
        if s[pos:].strip() == "":
            break
    toks.append(("end", None))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        t = toks[i]
        i += 1
        return t

    def expr():
        v = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            r = term()
            v = v + r if op == "+" else v - r
        return v

    def term():
        v = unary()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            r = unary()
            v = v * r if op == "*" else v / r
        return v

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        b = atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            if peek() == ("op", "("):
                take()
                sign2 = 1
                if peek() == ("op", "-"):
                    take()
                    sign2 = -1
                t = take()
                if take() != ("op", ")"):
                    raise ValueError("expected ')' after exponent")
                n = sign * sign2 * t[1]
            else:
                t = take()
                if t[0] != "num":
                    raise ValueError("exponent must be an integer")
                n = sign * t[1]
            return b ** n
        return b

    def atom():
        t = take()
        if t[0] == "num":
            return MotNum.of(t[1])
        if t[0] == "L":
            return L
        if t == ("op", "("):
            v = expr()
            if take() != ("op", ")"):
                raise ValueError("expected ')'")
            return v
        raise ValueError(f"unexpected token {t}")

    v = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input at token {peek()}")
    return v
