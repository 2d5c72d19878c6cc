"""Integer-valued affine functions with rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping


@dataclass(frozen=True)
class LinearFunction:
    """sum coeffs[v] * v + const, required to be integer-valued where used.

    `domain` lists congruence conditions (var, c, n) meaning var = c mod n;
    evaluating outside them is an error.
    """

    coeffs: tuple = ()
    const: Fraction = Fraction(0)
    domain: tuple = ()

    def __post_init__(self):
        d: dict = {}
        for v, c in self.coeffs:
            d[v] = d.get(v, 0) + Fraction(c)
        object.__setattr__(self, "coeffs", tuple(sorted((v, c) for v, c in d.items() if c)))
        object.__setattr__(self, "const", Fraction(self.const))
        object.__setattr__(self, "domain", tuple(sorted(set(self.domain))))

    @classmethod
    def var(cls, name: str, coeff=1) -> "LinearFunction":
        return cls(((name, Fraction(coeff)),))

    @classmethod
    def constant(cls, c) -> "LinearFunction":
        return cls((), Fraction(c))

    @classmethod
    def from_dict(cls, coeffs: Mapping[str, object], const=0) -> "LinearFunction":
        return cls(tuple((v, Fraction(c)) for v, c in coeffs.items()), Fraction(const))

    @staticmethod
    def lift(x) -> "LinearFunction":
        if isinstance(x, LinearFunction):
            return x
        return LinearFunction.constant(x)

    # queries
    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def coeff(self, v: str) -> Fraction:
        for w, c in self.coeffs:
            if w == v:
                return c
        return Fraction(0)

    def variables(self) -> frozenset:
        return frozenset(v for v, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return self.const.denominator == 1 and all(c.denominator == 1 for _, c in self.coeffs)

    def denominator(self) -> int:
        d = self.const.denominator
        for _, c in self.coeffs:
            d = lcm(d, c.denominator)
        return d

    def integer_form(self) -> tuple[int, "LinearFunction"]:
        """(D, g) with g integral and self = g / D."""
        d = self.denominator()
        return d, self * d

    # arithmetic
    def __add__(self, other):
        other = LinearFunction.lift(other)
        return LinearFunction(self.coeffs + other.coeffs, self.const + other.const, self.domain + other.domain)

    __radd__ = __add__

    def __neg__(self):
        return LinearFunction(tuple((v, -c) for v, c in self.coeffs), -self.const, self.domain)

    def __sub__(self, other):
        return self + (-LinearFunction.lift(other))

    def __rsub__(self, other):
        return LinearFunction.lift(other) - self

    def __mul__(self, k):
        if isinstance(k, LinearFunction):
            if k.is_constant():
                k = k.const
            elif self.is_constant():
                return k * self.const
            else:
                raise TypeError("product of two non-constant linear functions")
        k = Fraction(k)
        return LinearFunction(tuple((v, c * k) for v, c in self.coeffs), self.const * k, self.domain)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / Fraction(k))

    def subs(self, mapping: Mapping[str, "LinearFunction"]) -> "LinearFunction":
        out = LinearFunction((), self.const)
        for v, c in self.coeffs:
            if v in mapping:
                out = out + LinearFunction.lift(mapping[v]) * c
            else:
                out = out + LinearFunction(((v, c),))
        dom = []
        for v, a, n in self.domain:
            if v not in mapping:
                dom.append((v, a, n))
                continue
            w = LinearFunction.lift(mapping[v])
            if len(w.coeffs) == 1 and w.coeffs[0][1] == 1 and w.const.denominator == 1:
                # v = u + c0 keeps the congruence on u
                dom.append((w.coeffs[0][0], (a - int(w.const)) % n, n))
        dom = tuple(dom)
        return LinearFunction(out.coeffs, out.const, dom)

    def rename(self, mapping: Mapping[str, str]) -> "LinearFunction":
        return LinearFunction(
            tuple((mapping.get(v, v), c) for v, c in self.coeffs),
            self.const,
            tuple((mapping.get(v, v), a, n) for v, a, n in self.domain),
        )

    def value(self, env: Mapping[str, int]) -> Fraction:
        total = self.const
        for v, c in self.coeffs:
            total += c * env[v]
        return total

    def eval(self, env: Mapping[str, int]) -> int:
        for v, c, n in self.domain:
            if v in env and (env[v] - c) % n:
                raise ValueError(f"{v}={env[v]} outside the domain {v} = {c} mod {n}")
        val = self.value(env)
        if val.denominator != 1:
            raise ValueError(f"{self} is not integral at {dict(env)}")
        return val.numerator

    def partial(self, env: Mapping[str, int]) -> "LinearFunction":
        return self.subs({v: LinearFunction.constant(x) for v, x in env.items()})

    def sort_key(self):
        return (self.coeffs, self.const)

    def to_json(self) -> dict:
        return {
            "coeffs": {v: str(c) for v, c in self.coeffs},
            "const": str(self.const),
            "domain": [list(d) for d in self.domain],
        }

    @classmethod
    def from_json(cls, obj) -> "LinearFunction":
        return cls(
            tuple((v, Fraction(c)) for v, c in obj["coeffs"].items()),
            Fraction(obj["const"]),
            tuple(tuple(d) for d in obj.get("domain", [])),
        )

    def __str__(self):
        d, g = self.integer_form()
        parts = []
        for v, c in g.coeffs:
            c = int(c)
            body = v if abs(c) == 1 else f"{abs(c)}*{v}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        k = int(g.const)
        if k or not parts:
            if not parts:
                parts.append(str(k))
            else:
                parts.append((" - " if k < 0 else " + ") + str(abs(k)))
        s = "".join(parts)
        if d == 1:
            return s
        return f"({s})/{d}"

    def __repr__(self):
        return f"LinearFunction({self})"


def slinear(var_terms: Mapping[str, tuple] = (), base_coeffs: Mapping[str, int] = (), constant: int = 0) -> LinearFunction:
    """Build sum a_i (x_i - c_i)/n_i + sum b_j s_j + constant.

    var_terms maps x_i to (a_i, c_i, n_i); the congruence x_i = c_i mod n_i
    becomes part of the function's domain.
    """
    var_terms = dict(var_terms)
    base_coeffs = dict(base_coeffs)
    coeffs = []
    const = Fraction(constant)
    dom = []
    for v, (a, c, n) in var_terms.items():
        if n < 1 or not 0 <= c < n:
            raise ValueError(f"bad congruence data {(a, c, n)} for {v}")
        coeffs.append((v, Fraction(a, n)))
        const -= Fraction(a * c, n)
        if n > 1:
            dom.append((v, c, n))
    for v, b in base_coeffs.items():
        coeffs.append((v, Fraction(b)))
    return LinearFunction(tuple(coeffs), const, tuple(dom))
