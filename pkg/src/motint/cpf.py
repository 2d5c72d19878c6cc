"""Constructible Presburger functions: finite sums of coeff * prod(linear) * L^linear on supports."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .motnum import ONE, MotNum
from .presburger import formula as F
from .presburger.formula import FALSE, TRUE, Formula, conj, evaluate, formula_key
from .presburger.linear import LinearFunction


@dataclass(frozen=True)
class Term:
    coeff: MotNum
    factors: tuple = ()
    exp: LinearFunction = LinearFunction()
    support: Formula = TRUE

    def variables(self) -> frozenset:
        vs = set(self.exp.variables()) | set(F.free_vars(self.support))
        for f in self.factors:
            vs |= f.variables()
        return frozenset(vs)

    def key(self) -> tuple:
        return (tuple(f.sort_key() for f in self.factors), self.exp.sort_key(), formula_key(self.support))

    def value(self, env: Mapping[str, int]) -> MotNum:
        if not evaluate(self.support, env):
            return MotNum()
        v = self.coeff
        for f in self.factors:
            v = v * f.eval(env)
        return v * MotNum.L(self.exp.eval(env))

    def theta(self, env: Mapping[str, int], q: Fraction, coeff_val: Fraction | None = None) -> Fraction:
        if not evaluate(self.support, env):
            return Fraction(0)
        v = self.coeff.eval_theta(q) if coeff_val is None else coeff_val
        for f in self.factors:
            v *= f.eval(env)
        return v * Fraction(q) ** self.exp.eval(env)

    def subs(self, mapping: Mapping[str, LinearFunction]) -> "Term":
        return Term(
            self.coeff,
            tuple(f.subs(mapping) for f in self.factors),
            self.exp.subs(mapping),
            F.subs(self.support, mapping),
        )

    def __str__(self):
        parts = []
        if self.coeff != ONE or (not self.factors and self.exp.is_constant() and self.exp.const == 0):
            c = str(self.coeff)
            parts.append(f"({c})" if " " in c else c)
        for f in self.factors:
            parts.append(f"({f})" if len(f.coeffs) + (f.const != 0) > 1 or f.denominator() > 1 else str(f))
        if not (self.exp.is_constant() and self.exp.const == 0):
            e = str(self.exp)
            parts.append(f"L^{e}" if e.lstrip("-").isalnum() else f"L^({e})")
        body = " * ".join(parts) if parts else "1"
        if self.support != TRUE:
            body += f" [{self.support}]"
        return body


class CPFunction:
    """Immutable finite sum of terms; value at a point is the sum of active terms."""

    __slots__ = ("terms", "positive")

    def __init__(self, terms: Iterable[Term] = (), positive: bool = False, simplify: bool = True):
        terms = tuple(terms)
        self.terms = _simplify(terms) if simplify else terms
        self.positive = positive
        if positive and not self.syntactically_nonneg():
            raise ValueError("function marked positive fails the positivity check")

    # constructors
    @classmethod
    def const(cls, c, support: Formula = TRUE) -> "CPFunction":
        return cls([Term(MotNum.of(c) if not isinstance(c, MotNum) else c, (), LinearFunction(), support)])

    @classmethod
    def indicator(cls, support: Formula) -> "CPFunction":
        return cls.const(ONE, support)

    @classmethod
    def term(cls, coeff=ONE, factors=(), exp=None, support: Formula = TRUE) -> "CPFunction":
        coeff = coeff if isinstance(coeff, MotNum) else MotNum.of(coeff)
        exp = LinearFunction() if exp is None else LinearFunction.lift(exp)
        return cls([Term(coeff, tuple(LinearFunction.lift(f) for f in factors), exp, support)])

    @classmethod
    def L_power(cls, exp, support: Formula = TRUE) -> "CPFunction":
        return cls.term(ONE, (), exp, support)

    @classmethod
    def linear(cls, f: LinearFunction, support: Formula = TRUE) -> "CPFunction":
        return cls.term(ONE, (f,), None, support)

    # structure
    def variables(self) -> frozenset:
        out: set = set()
        for t in self.terms:
            out |= t.variables()
        return frozenset(out)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = _lift(other)
        return CPFunction(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return CPFunction(Term(-t.coeff, t.factors, t.exp, t.support) for t in self.terms)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, MotNum)):
            c = MotNum.of(other) if isinstance(other, int) else other
            return CPFunction(Term(t.coeff * c, t.factors, t.exp, t.support) for t in self.terms)
        other = _lift(other)
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(Term(a.coeff * b.coeff, a.factors + b.factors, a.exp + b.exp, conj(a.support, b.support)))
        return CPFunction(out)

    __rmul__ = __mul__

    def restrict(self, support: Formula) -> "CPFunction":
        return CPFunction(Term(t.coeff, t.factors, t.exp, conj(t.support, support)) for t in self.terms)

    def subs(self, mapping: Mapping[str, LinearFunction]) -> "CPFunction":
        return CPFunction(t.subs(mapping) for t in self.terms)

    def rename(self, mapping: Mapping[str, str]) -> "CPFunction":
        return self.subs({k: LinearFunction.var(v) for k, v in mapping.items()})

    # evaluation
    def value(self, env: Mapping[str, int] | None = None) -> MotNum:
        env = env or {}
        total = MotNum()
        for t in self.terms:
            total = total + t.value(env)
        return total

    def total(self) -> MotNum:
        """The value of a function with no free variables."""
        vs = self.variables()
        if vs:
            raise ValueError(f"function still depends on {sorted(vs)}")
        return self.value({})

    def eval_theta(self, env: Mapping[str, int], q) -> Fraction:
        return sum((t.theta(env, Fraction(q)) for t in self.terms), Fraction(0))

    def syntactically_nonneg(self) -> bool:
        """Sufficient test: each coefficient in A+ and each factor bounded below by 0 on its support."""
        from .presburger.cells import is_satisfiable

        for t in self.terms:
            if not t.coeff.is_nonneg():
                return False
            for f in t.factors:
                if is_satisfiable(conj(t.support, F.lt(f, 0))):
                    return False
        return True

    def equals(self, other: "CPFunction", box: Mapping[str, tuple] | None = None) -> bool:
        """Exact comparison; functions of free variables are compared pointwise on a box."""
        diff = self - other
        if diff.is_zero():
            return True
        vs = sorted(diff.variables())
        if not vs:
            return diff.total().is_zero()
        if box is None:
            box = {v: (-12, 12) for v in vs}
        import itertools

        for pt in itertools.product(*(range(box[v][0], box[v][1] + 1) for v in vs)):
            if not diff.value(dict(zip(vs, pt))).is_zero():
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, CPFunction):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "positive": self.positive,
            "terms": [
                {
                    "coeff": t.coeff.to_json(),
                    "factors": [f.to_json() for f in t.factors],
                    "exp": t.exp.to_json(),
                    "support": F.to_json(t.support),
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "CPFunction":
        terms = [
            Term(
                MotNum.from_json(t["coeff"]),
                tuple(LinearFunction.from_json(f) for f in t["factors"]),
                LinearFunction.from_json(t["exp"]),
                F.from_json(t["support"]),
            )
            for t in obj["terms"]
        ]
        return cls(terms, obj.get("positive", False))

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(str(t) for t in self.terms)

    def __repr__(self):
        return f"CPFunction({self})"


def _lift(x) -> CPFunction:
    if isinstance(x, CPFunction):
        return x
    if isinstance(x, (int, MotNum)):
        return CPFunction.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a constructible function")


def _simplify(terms) -> tuple:
    merged: dict = {}
    for t in terms:
        if t.coeff.is_zero() or t.support == FALSE:
            continue
        coeff = t.coeff
        facs = []
        dead = False
        for f in t.factors:
            if f.is_constant():
                if f.const.denominator != 1:
                    raise ValueError(f"non-integral constant factor {f.const}")
                if f.const == 0:
                    dead = True
                    break
                coeff = coeff * int(f.const)
            else:
                facs.append(f)
        if dead:
            continue
        exp = LinearFunction(t.exp.coeffs, t.exp.const)
        if exp.is_constant():
            if exp.const.denominator != 1:
                raise ValueError("non-integral constant exponent")
            coeff = coeff * MotNum.L(int(exp.const))
            exp = LinearFunction()
        elif coeff.shift:
            # fold the L-power of the coefficient into the exponent
            exp = exp - coeff.shift
            coeff = MotNum(coeff.num, 0, coeff.factors)
        nt = Term(coeff, tuple(sorted(facs, key=lambda f: f.sort_key())), exp, t.support)
        k = nt.key()
        if k in merged:
            old = merged[k]
            merged[k] = Term(old.coeff + nt.coeff, old.factors, old.exp, old.support)
        else:
            merged[k] = nt
    return tuple(merged[k] for k in sorted(merged) if not merged[k].coeff.is_zero())
