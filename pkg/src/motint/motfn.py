"""Constructible motivic functions: sums of [class] (x) Presburger function, graded by dimension."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cpf import CPFunction
from .groth import POINT, Generator, GrothClass, RuleTable, count_points, make_generator, normalize_generator
from .motnum import ONE, MotNum
from .polys import MPoly
from .presburger.formula import Formula
from .presburger.linear import LinearFunction
from .series import RationalSeries, mellin
from .summation import mu_sum


class MotFunction:
    """Finite sum over (generator, grade) of [generator] (x) CPFunction.

    Generators may carry residue parameters (free variables of their systems);
    the Presburger parts carry the Z-variables.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict = {}
        for (g, d), f in items:
            out[(g, d)] = out[(g, d)] + f if (g, d) in out else f
        self.terms = {k: v for k, v in out.items() if not v.is_zero()}

    # constructors
    @classmethod
    def of(cls, x, grade: int = 0) -> "MotFunction":
        if isinstance(x, MotFunction):
            return x
        if isinstance(x, CPFunction):
            return cls({(POINT, grade): x})
        if isinstance(x, GrothClass):
            return cls([((g, grade), CPFunction.const(c)) for g, c in x.terms.items()])
        if isinstance(x, Generator):
            return cls({(x, grade): CPFunction.const(1)})
        return cls({(POINT, grade): CPFunction.const(x)})

    @classmethod
    def tensor(cls, c, f: CPFunction, grade: int = 0) -> "MotFunction":
        """[c] (x) f."""
        return cls.of(c, grade) * f

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def zvars(self) -> frozenset:
        out: set = set()
        for f in self.terms.values():
            out |= f.variables()
        return frozenset(out)

    def rvars(self) -> frozenset:
        out: set = set()
        for g, _ in self.terms:
            out |= g.params()
        return frozenset(out)

    def grades(self) -> list[int]:
        return sorted({d for _, d in self.terms})

    def grade(self, d: int) -> "MotFunction":
        return MotFunction({k: v for k, v in self.terms.items() if k[1] == d})

    def with_grade(self, d: int) -> "MotFunction":
        return MotFunction([((g, d), f) for (g, _), f in self.terms.items()])

    # arithmetic
    def __add__(self, other):
        other = MotFunction.of(other)
        return MotFunction(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return MotFunction([(k, -f) for k, f in self.terms.items()])

    def __sub__(self, other):
        return self + (-MotFunction.of(other))

    def __mul__(self, other):
        if isinstance(other, (int, MotNum)):
            return MotFunction([(k, f * other) for k, f in self.terms.items()])
        if isinstance(other, CPFunction):
            return MotFunction([(k, f * other) for k, f in self.terms.items()])
        other = MotFunction.of(other)
        out = []
        for (g, d), f in self.terms.items():
            for (h, e), k in other.terms.items():
                prod = GrothClass.of(g) * GrothClass.of(h)
                for gh, c in prod.terms.items():
                    out.append(((gh, d + e), f * k * c))
        return MotFunction(out)

    __rmul__ = __mul__

    # normalization and values
    def normalize(self, rules: RuleTable | None = None) -> "MotFunction":
        out = []
        for (g, d), f in self.terms.items():
            for h, c in normalize_generator(g, rules).terms.items():
                out.append(((h, d), f * c))
        return MotFunction(out)

    def value(self, env: Mapping[str, int] | None = None, grade: int | None = None) -> GrothClass:
        """The class at a point of the Z-base (residue parameters stay symbolic)."""
        total = GrothClass()
        for (g, d), f in self.terms.items():
            if grade is None or d == grade:
                total = total + GrothClass({g: f.value(env or {})})
        return total

    def total(self, grade: int | None = None) -> GrothClass:
        zs = self.zvars()
        if zs:
            raise ValueError(f"function still depends on {sorted(zs)}")
        return self.value({}, grade)

    def eval_counts(self, p: int, zenv: Mapping[str, int] | None = None,
                    renv: Mapping[str, int] | None = None) -> Fraction:
        """Specialization L -> p, classes -> F_p-point counts."""
        total = Fraction(0)
        for (g, _), f in self.terms.items():
            n = 1 if g == POINT else count_points(g, p, renv)
            total += f.eval_theta(zenv or {}, p) * n
        return total

    # functoriality
    def pullback(self, zmap: Mapping[str, LinearFunction] | None = None,
                 rmap: Mapping[str, object] | None = None) -> "MotFunction":
        """Composition with a base map: Z-variables by linear functions, parameters by polynomials."""
        zmap = {k: LinearFunction.lift(v) for k, v in (zmap or {}).items()}
        rmap = {k: (MPoly.var(v) if isinstance(v, str) else MPoly.lift(v)) for k, v in (rmap or {}).items()}
        out = []
        for (g, d), f in self.terms.items():
            if rmap and g.params() & set(rmap):
                g2 = g.subs_params(rmap)
                g = make_generator(g2.vars, g2.eqs, g2.neqs, g.name)
            out.append(((g, d), f.subs(zmap) if zmap else f))
        return MotFunction(out)

    def push_residue(self, params: Sequence[str], rules: RuleTable | None = None) -> "MotFunction":
        """Projection forgetting residue parameters: they become bound variables of the classes."""
        leak = set(params) & self.zvars()
        if leak:
            raise ValueError(f"parameters {sorted(leak)} appear in the Presburger part")
        out = []
        for (g, d), f in self.terms.items():
            used = [p for p in params if p in g.params()]
            if g.name and used:
                raise ValueError(f"named class {g} cannot be projected along {used}")
            h = make_generator(g.vars + tuple(used), g.eqs, g.neqs) if used else g
            # a dropped parameter that does not occur ranges over the whole line
            missing = len(params) - len(used)
            out.append(((h, d), f * MotNum.L(missing)))
        return MotFunction(out).normalize(rules)

    def push_z(self, zvars: Sequence[str]) -> "MotFunction":
        """Summation along Z-variables; raises NotIntegrable with the offending term."""
        return MotFunction([(k, mu_sum(f, list(zvars))) for k, f in self.terms.items()])

    def push_inclusion(self, support: Formula) -> "MotFunction":
        """Extension by zero from the subset defined by support."""
        return MotFunction([(k, f.restrict(support)) for k, f in self.terms.items()])

    # output
    def __eq__(self, other):
        other = MotFunction.of(other)
        diff = (self - other).normalize()
        for (g, d), f in diff.terms.items():
            if not f.equals(CPFunction()):
                return False
        return True

    __hash__ = None

    def __str__(self):
        if not self.terms:
            return "0"
        if not self.zvars() and len(self.grades()) == 1:
            return str(self.value({}))
        parts = []
        for (g, d), f in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0] == POINT, str(kv[0][0]))):
            tag = f"{{grade {d}}} " if len(self.grades()) > 1 else ""
            if not f.variables():
                v = f.total()
                cls = GrothClass({g: v})
                parts.append(tag + str(cls))
            elif g == POINT:
                parts.append(tag + str(f))
            else:
                parts.append(f"{tag}{g} * ({f})")
        return " + ".join(parts)

    def __repr__(self):
        return f"MotFunction({self})"

    def to_json(self) -> list:
        return [
            {"gen": g.to_json(), "grade": d, "cpf": f.to_json()}
            for (g, d), f in sorted(self.terms.items(), key=lambda kv: (kv[0][1], str(kv[0][0])))
        ]

    @classmethod
    def from_json(cls, obj) -> "MotFunction":
        return cls([((Generator.from_json(t["gen"]), t["grade"]), CPFunction.from_json(t["cpf"])) for t in obj])


class SignedMotFunction:
    """Formal difference pos - neg of positive functions."""

    def __init__(self, pos, neg=None):
        self.pos = MotFunction.of(pos)
        self.neg = MotFunction.of(0 if neg is None else neg)

    def push_residue(self, params, rules=None) -> "SignedMotFunction":
        return SignedMotFunction(self.pos.push_residue(params, rules), self.neg.push_residue(params, rules))

    def push_z(self, zvars) -> "SignedMotFunction":
        return SignedMotFunction(self.pos.push_z(zvars), self.neg.push_z(zvars))

    def collapse(self, rules=None) -> MotFunction:
        return (self.pos - self.neg).normalize(rules)

    def compare(self, other: "SignedMotFunction", rules=None, primes=(3, 5, 7)) -> str:
        """'equal', 'unequal' or 'unknown'."""
        diff = SignedMotFunction(self.pos + other.neg, self.neg + other.pos).collapse(rules)
        if diff.is_zero():
            return "equal"
        zs = sorted(diff.zvars())
        if any(g != POINT for g, _ in diff.terms):
            if diff.rvars():
                return "unknown"
            # inert classes: a point-count mismatch still proves inequality
            import itertools

            for p in primes:
                for pt in itertools.product(range(0, 4), repeat=len(zs)):
                    if diff.eval_counts(p, dict(zip(zs, pt))) != 0:
                        return "unequal"
            return "unknown"
        return "equal" if diff == MotFunction() else "unequal"

    def __str__(self):
        return str(self.collapse())


class ClassSeries:
    """Generating series with class coefficients: sum over generators of [g] * series."""

    def __init__(self, parts: Mapping[Generator, RationalSeries]):
        self.parts = {g: s for g, s in parts.items() if s.sectors}

    def series(self) -> RationalSeries:
        if set(self.parts) - {POINT}:
            raise ValueError("series has class coefficients")
        return self.parts.get(POINT) or RationalSeries(("T",), {})

    def __eq__(self, other):
        if isinstance(other, RationalSeries):
            other = ClassSeries({POINT: other})
        return isinstance(other, ClassSeries) and self.parts == other.parts

    def __str__(self):
        if not self.parts:
            return "0"
        out = []
        for g, s in sorted(self.parts.items(), key=lambda gs: (gs[0] != POINT, str(gs[0]))):
            out.append(str(s) if g == POINT else f"{g} * ({s})")
        return " + ".join(out)

    def to_json(self) -> list:
        return [{"gen": g.to_json(), "series": s.to_json()} for g, s in sorted(self.parts.items(), key=lambda gs: str(gs[0]))]


def poincare_series(family: MotFunction, n: str, rules: RuleTable | None = None, name: str = "T") -> ClassSeries:
    """sum_n mu(slice n) T^n for a family over the Z-variable n (other Z-variables are integrated)."""
    others = sorted(family.zvars() - {n})
    fam = family.push_z(others) if others else family
    fam = fam.normalize(rules)
    parts: dict = {}
    for (g, _), f in fam.terms.items():
        s = mellin(f, [n], names=(name,))
        if g in parts:
            merged = dict(parts[g].sectors)
            for eps, rf in s.sectors.items():
                merged[eps] = merged[eps] + rf if eps in merged else rf
            parts[g] = RationalSeries(s.names, merged)
        else:
            parts[g] = s
    return ClassSeries(parts)
