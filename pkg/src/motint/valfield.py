"""One valued-field variable: centers, annulus cells, dimension-one integration, affine changes of variable."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import inf
from typing import Mapping, Sequence

from .cpf import CPFunction
from .groth import POINT, GrothClass, RuleTable, make_generator
from .motfn import MotFunction
from .motnum import MotNum
from .polys import MPoly, format_mpoly
from .presburger.formula import FALSE, TRUE, Formula, conj, cong, disj, eq, ge, gt, le, lt, ne, neg
from .presburger.cells import is_satisfiable
from .presburger.linear import LinearFunction
from .summation import NotIntegrable


class UndecomposableDescription(ValueError):
    pass


# --- points of k((t)) -----------------------------------------------------------

@dataclass(frozen=True)
class SeriesPoint:
    """Finite Laurent polynomial sum c_e t^e over Q."""

    coeffs: tuple = ()

    def __post_init__(self):
        d: dict = {}
        for e, c in self.coeffs:
            d[int(e)] = d.get(int(e), 0) + Fraction(c)
        object.__setattr__(self, "coeffs", tuple(sorted((e, c) for e, c in d.items() if c)))

    @classmethod
    def of(cls, x) -> "SeriesPoint":
        if isinstance(x, SeriesPoint):
            return x
        if isinstance(x, str):
            return parse_series(x)
        return cls(((0, Fraction(x)),))

    @classmethod
    def t(cls, k: int = 1, c=1) -> "SeriesPoint":
        return cls(((k, Fraction(c)),))

    def is_zero(self) -> bool:
        return not self.coeffs

    def ord(self):
        return self.coeffs[0][0] if self.coeffs else inf

    def ac(self) -> Fraction:
        return self.coeffs[0][1] if self.coeffs else Fraction(0)

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def __add__(self, other):
        other = SeriesPoint.of(other)
        return SeriesPoint(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return SeriesPoint(tuple((e, -c) for e, c in self.coeffs))

    def __sub__(self, other):
        return self + (-SeriesPoint.of(other))

    def __rsub__(self, other):
        return SeriesPoint.of(other) - self

    def __mul__(self, other):
        other = SeriesPoint.of(other)
        return SeriesPoint(tuple((e + f, c * d) for e, c in self.coeffs for f, d in other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = SeriesPoint.of(other)
        if not other.is_monomial():
            raise ValueError("division only by monomials u*t^k")
        (k, u), = other.coeffs
        return SeriesPoint(tuple((e - k, c / u) for e, c in self.coeffs))

    def integral(self) -> bool:
        return all(c.denominator == 1 and e >= 0 for e, c in self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.coeffs):
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                mono = "t" if e == 1 else f"t^{e}"
                body = mono if a == 1 else f"{a}*{mono}"
            sign = "-" if c < 0 else "+"
            out.append(("-" if sign == "-" else "") + body if i == 0 else f" {sign} {body}")
        return "".join(out)


def parse_series(text: str) -> SeriesPoint:
    """Parse a Laurent polynomial literal like '1 + 2*t^-1 + t^3'."""
    terms = re.split(r"(?<=[^\^\s*])\s*(?=[+-])", text.strip())
    total = SeriesPoint()
    for term in terms:
        s = term.replace(" ", "")
        if not s:
            continue
        sign = 1
        while s and s[0] in "+-":
            sign = -sign if s[0] == "-" else sign
            s = s[1:]
        coef = Fraction(1)
        exp = 0
        m = re.fullmatch(r"(\d+(?:/\d+)?)?\*?(?:t(?:\^\(?(-?\d+)\)?)?)?", s)
        if not m or not s:
            raise ValueError(f"bad series literal {text!r}")
        if m.group(1):
            coef = Fraction(m.group(1))
        if "t" in s:
            exp = int(m.group(2)) if m.group(2) else 1
        total = total + SeriesPoint(((exp, sign * coef),))
    return total


@dataclass(frozen=True)
class PowerCenter:
    """The center coeff * t^exp with exp a Z-valued function of the basis."""

    coeff: Fraction
    exp: LinearFunction

    def ord(self):
        return self.exp

    def ac(self) -> Fraction:
        return self.coeff

    def __str__(self):
        e = str(self.exp)
        mono = f"t^{e}" if e.lstrip("-").isalnum() else f"t^({e})"
        return mono if self.coeff == 1 else f"{self.coeff}*{mono}"


def center_text(x: str, c) -> str:
    if isinstance(c, SeriesPoint) and c.is_zero():
        return x
    s = str(c)
    if isinstance(c, SeriesPoint) and len(c.coeffs) == 1 and c.coeffs[0][1] < 0:
        return f"{x} + {s[1:]}"
    return f"{x} - {s}" if len(getattr(c, "coeffs", ())) <= 1 else f"{x} - ({s})"


def ord_var(x: str, c) -> str:
    return f"ord[{center_text(x, SeriesPoint.of(c))}]".replace(" ", "")


def ac_var(x: str, c) -> str:
    return f"ac[{center_text(x, SeriesPoint.of(c))}]".replace(" ", "")


# --- descriptions ----------------------------------------------------------------

@dataclass(frozen=True)
class OrdAtom:
    center: SeriesPoint
    op: str  # one of >= > = <= < !=
    value: LinearFunction


@dataclass(frozen=True)
class OrdCong:
    center: SeriesPoint
    residue: int
    modulus: int


@dataclass(frozen=True)
class AcAtom:
    center: SeriesPoint
    value: MPoly  # constant or a polynomial in residue parameters
    negated: bool = False


@dataclass(frozen=True)
class PointAtom:
    center: SeriesPoint


@dataclass(frozen=True)
class DAnd:
    args: tuple


@dataclass(frozen=True)
class DOr:
    args: tuple


@dataclass(frozen=True)
class DNot:
    arg: object


@dataclass(frozen=True)
class DConst:
    value: bool


DTRUE, DFALSE = DConst(True), DConst(False)


def d_and(*args):
    return DAnd(tuple(args))


def d_or(*args):
    return DOr(tuple(args))


def ord_atom(center, op: str, value) -> OrdAtom:
    if op not in (">=", ">", "=", "<=", "<", "!="):
        raise ValueError(f"bad comparison {op}")
    return OrdAtom(SeriesPoint.of(center), op, LinearFunction.lift(value))


def ac_atom(center, value, negated: bool = False) -> AcAtom:
    v = MPoly.var(value) if isinstance(value, str) else MPoly.lift(value)
    return AcAtom(SeriesPoint.of(center), v, negated)


def d_centers(d) -> list:
    out: list = []

    def walk(n):
        if isinstance(n, (OrdAtom, OrdCong, AcAtom, PointAtom)):
            if n.center not in out:
                out.append(n.center)
        elif isinstance(n, (DAnd, DOr)):
            for a in n.args:
                walk(a)
        elif isinstance(n, DNot):
            walk(n.arg)

    walk(d)
    return out


def d_str(d, x: str = "x") -> str:
    if isinstance(d, DConst):
        return "true" if d.value else "false"
    if isinstance(d, OrdAtom):
        return f"ord({center_text(x, d.center)}) {d.op} {d.value}"
    if isinstance(d, OrdCong):
        return f"ord({center_text(x, d.center)}) = {d.residue} mod {d.modulus}"
    if isinstance(d, AcAtom):
        return f"ac({center_text(x, d.center)}) {'!=' if d.negated else '='} {format_mpoly(d.value)}"
    if isinstance(d, PointAtom):
        return f"{x} = {d.center}"
    if isinstance(d, DNot):
        return f"not ({d_str(d.arg, x)})"
    sep = " and " if isinstance(d, DAnd) else " or "
    return "(" + sep.join(d_str(a, x) for a in d.args) + ")"


def _cmp(o: LinearFunction, op: str, v: LinearFunction) -> Formula:
    return {">=": ge, ">": gt, "=": eq, "<=": le, "<": lt, "!=": ne}[op](o, v)


def _cmp_inf(op: str) -> Formula:
    # ord(0) = +infinity exceeds every value
    return TRUE if op in (">=", ">", "!=") else FALSE


# --- cells ---------------------------------------------------------------------------

@dataclass
class ValCell:
    """A 0-cell (x = center) or a 1-cell {ord(x - c) = alpha, ac(x - c) = xi} over a basis.

    weight is a function on the basis (Z-variables zvars, residue parameters rvars);
    it carries the basis indicator times the integrand.
    """

    kind: int
    center: object
    weight: MotFunction
    alpha: LinearFunction | None = None
    xi: MPoly | None = None
    zvars: tuple = ()
    rvars: tuple = ()
    gamma: LinearFunction = field(default_factory=LinearFunction)
    label: str = ""

    def describe(self, x: str = "x") -> str:
        if self.kind == 0:
            return f"0-cell {x} = {self.center}" + (f" ({self.label})" if self.label else "")
        return (f"1-cell ord({center_text(x, self.center)}) = {self.alpha}, "
                f"ac({center_text(x, self.center)}) = {format_mpoly(self.xi)}"
                + (f" ({self.label})" if self.label else ""))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "center": str(self.center),
            "alpha": None if self.alpha is None else str(self.alpha),
            "xi": None if self.xi is None else format_mpoly(self.xi),
            "basis": {"z": list(self.zvars), "residue": list(self.rvars)},
            "weight": self.weight.to_json(),
            "label": self.label,
        }


def annulus_cell(center, alpha, xi, basis: MotFunction | None = None, zvars=(), rvars=(), label="") -> ValCell:
    """A user-supplied 1-cell presentation."""
    c = center if isinstance(center, PowerCenter) else SeriesPoint.of(center)
    xi = MPoly.var(xi) if isinstance(xi, str) else MPoly.lift(xi)
    w = MotFunction.of(1) if basis is None else MotFunction.of(basis)
    if xi.is_zero():
        raise ValueError("angular component must be nonzero")
    if not xi.is_constant():
        # the angular component takes values in G_m
        w = w * MotFunction.of(make_generator((), [], [xi]))
    return ValCell(1, c, w, LinearFunction.lift(alpha), xi, tuple(zvars), tuple(rvars), label=label)


def point_cell(center, basis: MotFunction | None = None, rvars=(), gamma=0, label="") -> ValCell:
    c = center if isinstance(center, PowerCenter) else SeriesPoint.of(center)
    w = MotFunction.of(1) if basis is None else MotFunction.of(basis)
    return ValCell(0, c, w, rvars=tuple(rvars), gamma=LinearFunction.lift(gamma), label=label)


class _Res:
    """Residue condition poly = 0 inside a region (poly may be constant)."""

    __slots__ = ("poly",)

    def __init__(self, poly: MPoly):
        self.poly = poly


def _region_eval(d, ctx, res: list) -> object:
    """Description -> nested structure with Presburger leaves and residue leaves."""
    if isinstance(d, DConst):
        return TRUE if d.value else FALSE
    if isinstance(d, DNot):
        return ("not", _region_eval(d.arg, ctx, res))
    if isinstance(d, (DAnd, DOr)):
        return ("and" if isinstance(d, DAnd) else "or", [_region_eval(a, ctx, res) for a in d.args])
    o, w, is_center = ctx(d.center)
    if isinstance(d, PointAtom):
        return TRUE if is_center else FALSE
    if isinstance(d, OrdAtom):
        return _cmp_inf(d.op) if o is None else _cmp(o, d.op, d.value)
    if isinstance(d, OrdCong):
        return FALSE if o is None else cong(o, d.residue, d.modulus)
    if isinstance(d, AcAtom):
        p = w - d.value
        if p.is_constant():
            hit = p.is_zero()
            return TRUE if hit != d.negated else FALSE
        p = _monic(p)
        for i, q in enumerate(res):
            if q == p:
                break
        else:
            res.append(p)
            i = len(res) - 1
        return ("not", ("res", i)) if d.negated else ("res", i)
    raise TypeError(f"unknown description node {d!r}")


def _monic(p: MPoly) -> MPoly:
    p = p.primitive()
    lead = max(p.terms)
    return -p if p.terms[lead] < 0 else p


def _fold(tree, sigma) -> Formula:
    if isinstance(tree, Formula):
        return tree
    kind = tree[0]
    if kind == "res":
        return TRUE if sigma[tree[1]] else FALSE
    if kind == "not":
        return neg(_fold(tree[1], sigma))
    parts = [_fold(a, sigma) for a in tree[1]]
    return conj(*parts) if kind == "and" else disj(*parts)


def _weight(tree, res, extra_neqs, region: Formula) -> MotFunction:
    """Sum over truth patterns of the residue atoms of [class] (x) 1_{region and formula}."""
    out = MotFunction()
    for sigma in itertools.product((True, False), repeat=len(res)):
        F = conj(region, _fold(tree, sigma))
        if F == FALSE or not is_satisfiable(F):
            continue
        eqs = [p for p, s in zip(res, sigma) if s]
        neqs = [p for p, s in zip(res, sigma) if not s] + list(extra_neqs)
        gen = make_generator((), eqs, neqs) if eqs or neqs else POINT
        out = out + MotFunction.tensor(gen, CPFunction.indicator(F))
    return out


def annulus_decompose(desc, x: str = "x", phi: MotFunction | None = None, tag: str = "") -> list[ValCell]:
    """Disjoint cells covering the set, each point attached to its nearest (then first) center.

    phi may use Z-variables ord_var(x, c) and residue parameters ac_var(x, c) for
    any center c; they are rewritten on each cell.
    """
    phi = MotFunction.of(1) if phi is None else MotFunction.of(phi)
    centers = list(d_centers(desc))
    for name in sorted(phi.zvars() | phi.rvars()):
        c = _center_of_var(name, x)
        if c is not None and c not in centers:
            centers.append(c)
    if not centers:
        centers = [SeriesPoint()]
    for c in centers:
        if not isinstance(c, SeriesPoint):
            raise UndecomposableDescription("centers must be explicit Laurent polynomials")
    n = len(centers)
    d = [[(centers[j] - centers[k]).ord() for k in range(n)] for j in range(n)]
    a = [[(centers[j] - centers[k]).ac() for k in range(n)] for j in range(n)]
    mname, ename = f"_m{tag}", f"_eta{tag}"
    m = LinearFunction.var(mname)
    eta = MPoly.var(ename)
    cells = []
    for j in range(n):
        bps = sorted({d[j][k] for k in range(n) if k != j})
        regions = []
        lo = None
        for b in bps:
            regions.append(("open", lo, b))
            regions.append(("point", b, b))
            lo = b
        regions.append(("open", lo, None))
        for kind, lo_b, hi_b in regions:
            if kind == "point":
                rel = {k: ("=" if d[j][k] == lo_b else ("<" if lo_b < d[j][k] else ">")) for k in range(n) if k != j}
                region = eq(m, lo_b)
            else:
                rel = {}
                for k in range(n):
                    if k == j:
                        continue
                    if hi_b is not None and d[j][k] >= hi_b:
                        rel[k] = "<"
                    else:
                        rel[k] = ">"
                region = conj(gt(m, lo_b) if lo_b is not None else TRUE, lt(m, hi_b) if hi_b is not None else TRUE)
            if any(rel[k] != ">" for k in range(j)):
                continue  # a point here is at least as close to an earlier center
            excl = [eta] + [eta + a[j][k] for k in range(n) if k > j and rel[k] == "="]

            def ctx(c, rel=rel):
                k = centers.index(c)
                if k == j or rel[k] in "<":
                    return m, eta, False
                if rel[k] == "=":
                    return m, eta + a[j][k], False
                return LinearFunction.constant(d[j][k]), MPoly.const(a[j][k]), False

            res: list = []
            tree = _region_eval(desc, ctx, res)
            w = _weight(tree, res, excl, region)
            if w.is_zero():
                continue
            zmap, rmap = {}, {}
            for k, c in enumerate(centers):
                o, ac, _ = ctx(c)
                zmap[ord_var(x, c)] = o
                rmap[ac_var(x, c)] = ac
            w = w * phi.pullback(zmap, rmap)
            if w.is_zero():
                continue
            cells.append(ValCell(1, centers[j], w, m, eta, (mname,), (ename,),
                                 label=f"center {centers[j]}, {kind} region"))
    for j in range(n):
        def ctx0(c, j=j):
            k = centers.index(c)
            if k == j:
                return None, MPoly.const(0), True
            return LinearFunction.constant(d[j][k]), MPoly.const(a[j][k]), False

        res = []
        tree = _region_eval(desc, ctx0, res)
        F = _fold(tree, ())
        if F == FALSE or not is_satisfiable(F):
            continue
        zmap, rmap = {}, {}
        for k, c in enumerate(centers):
            if k != j:
                zmap[ord_var(x, c)] = LinearFunction.constant(d[j][k])
                rmap[ac_var(x, c)] = MPoly.const(a[j][k])
        own = {ord_var(x, centers[j])} & phi.zvars()
        if own:
            raise UndecomposableDescription(f"integrand uses {sorted(own)} at its own center")
        w = MotFunction.tensor(POINT, CPFunction.indicator(F)) * phi.pullback(zmap, rmap)
        if not w.is_zero():
            cells.append(ValCell(0, centers[j], w, label=f"center {centers[j]}"))
    return cells


def _center_of_var(name: str, x: str):
    mt = re.fullmatch(r"(?:ord|ac)\[(.*)\]", name)
    if not mt:
        return None
    body = mt.group(1)
    if body == x:
        return SeriesPoint()
    if not body.startswith(x):
        return None
    rest = body[len(x):]
    if rest.startswith("-"):
        inner = rest[1:]
        if inner.startswith("(") and inner.endswith(")"):
            inner = inner[1:-1]
        return parse_series(inner)
    if rest.startswith("+"):
        return -parse_series(rest[1:])
    return None


# --- integration ---------------------------------------------------------------------

def integrate_1cell(cell: ValCell, psi: MotFunction | None = None, rules: RuleTable | None = None) -> MotFunction:
    """mu(pi_residue(L^(-alpha-1) psi)) over the basis of a 1-cell."""
    if cell.kind != 1:
        raise ValueError("not a 1-cell")
    w = cell.weight if psi is None else cell.weight * MotFunction.of(psi)
    w = w * CPFunction.L_power(-cell.alpha - 1)
    if cell.rvars:
        w = w.push_residue(list(cell.rvars), rules)
    if cell.zvars:
        try:
            w = w.push_z(list(cell.zvars))
        except NotIntegrable as e:
            raise NotIntegrable(f"{e} on {cell.describe()}", term=e.term, cell=cell.describe(),
                                direction=e.direction) from None
    return w.normalize(rules)


def integrate_0cell(cell: ValCell, psi: MotFunction | None = None, rules: RuleTable | None = None) -> MotFunction:
    """psi * L^gamma pushed along the residue parameters of the basis; gamma is the ordjac of the projection."""
    if cell.kind != 0:
        raise ValueError("not a 0-cell")
    w = cell.weight if psi is None else cell.weight * MotFunction.of(psi)
    w = w * CPFunction.L_power(cell.gamma)
    if cell.rvars:
        w = w.push_residue(list(cell.rvars), rules)
    return w.normalize(rules)


def measure(desc_or_cells, phi: MotFunction | None = None, x: str = "x", rules: RuleTable | None = None) -> MotFunction:
    """Dimension-one integral: sum over 1-cells (0-cells carry no volume)."""
    cells = desc_or_cells if isinstance(desc_or_cells, list) else annulus_decompose(desc_or_cells, x, phi)
    total = MotFunction()
    for c in cells:
        if c.kind == 1:
            psi = phi if isinstance(desc_or_cells, list) else None
            total = total + integrate_1cell(c, psi, rules)
    return total.normalize(rules)


def count_measure(desc_or_cells, phi: MotFunction | None = None, x: str = "x", rules: RuleTable | None = None) -> MotFunction:
    """Grade-zero integral: sum over the 0-cells."""
    cells = desc_or_cells if isinstance(desc_or_cells, list) else annulus_decompose(desc_or_cells, x, phi)
    total = MotFunction()
    for c in cells:
        if c.kind == 0:
            psi = phi if isinstance(desc_or_cells, list) else None
            total = total + integrate_0cell(c, psi, rules)
    return total.normalize(rules)


# --- affine maps -----------------------------------------------------------------------

@dataclass(frozen=True)
class AffineMap:
    """x -> a*x + b."""

    a: SeriesPoint
    b: SeriesPoint = SeriesPoint()

    def __post_init__(self):
        object.__setattr__(self, "a", SeriesPoint.of(self.a))
        object.__setattr__(self, "b", SeriesPoint.of(self.b))
        if self.a.is_zero():
            raise ValueError("zero derivative")

    def __call__(self, x):
        return self.a * SeriesPoint.of(x) + self.b

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """self after inner."""
        return AffineMap(self.a * inner.a, self.a * inner.b + self.b)

    def inverse(self) -> "AffineMap":
        return AffineMap(SeriesPoint.of(1) / self.a, -(self.b / self.a))

    def __str__(self):
        return f"x -> ({self.a})*x + {self.b}"


def ordjac(f: AffineMap) -> LinearFunction:
    return LinearFunction.constant(f.a.ord())


def graph_ordjac(f: AffineMap) -> LinearFunction:
    """ordjac of the projection from the graph z = f(y) onto y, for the canonical volume form."""
    return LinearFunction.constant(max(0, -f.a.ord()))


def pullback_desc(f: AffineMap, d):
    """The description of f^-1(set) in terms of x."""
    if isinstance(d, DConst):
        return d
    if isinstance(d, DNot):
        return DNot(pullback_desc(f, d.arg))
    if isinstance(d, (DAnd, DOr)):
        return type(d)(tuple(pullback_desc(f, a) for a in d.args))
    c = (d.center - f.b) / f.a
    k = f.a.ord()
    if isinstance(d, OrdAtom):
        return OrdAtom(c, d.op, d.value - k)
    if isinstance(d, OrdCong):
        return OrdCong(c, (d.residue - k) % d.modulus, d.modulus)
    if isinstance(d, AcAtom):
        return AcAtom(c, d.value * (1 / f.a.ac()), d.negated)
    if isinstance(d, PointAtom):
        return PointAtom(c)
    raise TypeError(d)


def pullback_phi(f: AffineMap, phi: MotFunction, centers: Sequence, x: str = "x") -> MotFunction:
    """f^* phi for phi written with ord/ac variables at the given centers."""
    k = f.a.ord()
    zmap, rmap = {}, {}
    for c in centers:
        c = SeriesPoint.of(c)
        c2 = (c - f.b) / f.a
        zmap[ord_var(x, c)] = LinearFunction.var(ord_var(x, c2)) + k
        rmap[ac_var(x, c)] = MPoly.var(ac_var(x, c2)) * f.a.ac()
    return phi.pullback(zmap, rmap)


def change_of_variable(f: AffineMap, desc, phi: MotFunction | None = None, x: str = "x",
                       rules: RuleTable | None = None) -> dict:
    """Compare mu(phi 1_desc) with mu(L^(-ordjac f) f^*(phi 1_desc))."""
    phi = MotFunction.of(1) if phi is None else MotFunction.of(phi)
    lhs = measure(desc, phi, x, rules)
    centers = list(d_centers(desc))
    for name in sorted(phi.zvars() | phi.rvars()):
        c = _center_of_var(name, x)
        if c is not None and c not in centers:
            centers.append(c)
    pulled = pullback_phi(f, phi, centers, x) * CPFunction.L_power(-ordjac(f))
    rhs = measure(pullback_desc(f, desc), pulled, x, rules)
    diff = (lhs - rhs).normalize(rules)
    if diff.is_zero():
        verdict = "equal"
    elif any(g != POINT for g, _ in diff.terms):
        verdict = "unknown"
    else:
        verdict = "equal" if lhs == rhs else "unequal"
    return {"lhs": lhs, "rhs": rhs, "verdict": verdict, "ordjac": f.a.ord()}


def graph_pushforward(f: AffineMap) -> MotFunction:
    """Push forward of the indicator of the graph of f to the source line: L^(ordjac p o p^-1)."""
    return MotFunction.of(CPFunction.L_power(graph_ordjac(f)))
