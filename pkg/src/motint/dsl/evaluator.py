"""Batch evaluation of parsed scripts."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .. import oracle as O
from .. import valfield as V
from ..cpf import CPFunction
from ..groth import POINT, Generator, RuleTable, make_generator
from ..motfn import ClassSeries, MotFunction, poincare_series
from ..motnum import L as LNUM, MotNum
from ..polys import MPoly
from ..presburger import formula as F
from ..presburger.linear import LinearFunction
from ..presburger.qe import qe
from ..series import mellin
from ..summation import NotIntegrable
from . import syntax as S


class ScriptError(Exception):
    def __init__(self, msg: str, span=(0, 0)):
        self.span = span
        super().__init__(f"line {span[0]}, column {span[1]}: {msg}" if span[0] else msg)


@dataclass
class Entry:
    kind: str  # value, formula, class, cells, series
    value: object
    params: tuple = ()
    meta: dict = field(default_factory=dict)

    def text(self) -> str:
        v = self.value
        if self.kind == "cells":
            n = len(v.cells)
            return f"{n} cell{'' if n == 1 else 's'} over {v.var}"
        if self.kind == "class":
            g = next(iter(v.terms))
            return f"{g} := {g.describe()}"
        return str(v)

    def to_json(self):
        v = self.value
        if self.kind == "value":
            return v.to_json()
        if self.kind == "formula":
            return F.to_json(v)
        if self.kind == "class":
            return v.to_json()
        if self.kind == "cells":
            return v.to_json()
        return v.to_json()


@dataclass
class CellSet:
    var: str
    base: tuple
    cells: list
    desc: object = None

    def to_json(self) -> dict:
        return {"var": self.var, "base": list(self.base),
                "description": None if self.desc is None else V.d_str(self.desc, self.var),
                "cells": [c.to_json() for c in self.cells]}


@dataclass
class Ctx:
    zvars: frozenset = frozenset()
    rvars: frozenset = frozenset()
    bound: frozenset = frozenset()
    fvar: str | None = None


@dataclass
class Val:
    kind: str  # num, lin, poly, mot, fn, formula, res, series
    v: object


def _lf_to_fn(x: Val) -> MotFunction:
    if x.kind == "num":
        if x.v.denominator != 1:
            raise TypeError("non-integral constant")
        return MotFunction.of(int(x.v))
    if x.kind == "mot":
        return MotFunction.of(CPFunction.const(x.v))
    if x.kind == "lin":
        return MotFunction.of(CPFunction.linear(x.v))
    if x.kind == "fn":
        return x.v
    raise TypeError(f"a {x.kind} cannot be used as a function value")


@dataclass
class Report:
    name: str
    method: str
    rows: list
    ok: bool
    skipped: bool = False

    def to_json(self) -> dict:
        return {"name": self.name, "method": self.method, "ok": self.ok, "skipped": self.skipped, "reports": self.rows}


class Evaluator:
    """Runs statements in order against a name table; single assignment."""

    def __init__(self, oracle: O.OracleConfig | None = None, seed: int = 0,
                 out: Callable[[str], None] = print, rules: RuleTable | None = None):
        self.env: dict[str, Entry] = {}
        self.order: list[str] = []
        self.rules = RuleTable() if rules is None else rules
        self.oracle = oracle
        self.seed = seed
        self.out = out
        self.checks: list[Report] = []

    # public
    def run(self, script: S.Script) -> None:
        for st in script.stmts:
            self.statement(st)

    def failed(self) -> bool:
        return any(not c.ok and not c.skipped for c in self.checks)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "seed": self.seed,
            "oracle": None if self.oracle is None else {
                "q": [str(q) for q in self.oracle.qs], "p": list(self.oracle.primes), "depth": self.oracle.depth},
            "rules": {"hash": self.rules.snapshot_hash(), "declared": list(self.rules.log)},
            "results": [{"name": n, "kind": self.env[n].kind, "text": self.env[n].text(),
                         "value": self.env[n].to_json()} for n in self.order],
            "checks": [c.to_json() for c in self.checks],
        }

    # statements
    def _bind(self, st: S.Stmt, entry: Entry, show: str | None = None) -> None:
        if st.name in self.env:
            raise ScriptError(f"{st.name} is already defined", st.span)
        self.env[st.name] = entry
        self.order.append(st.name)
        self.out(f"{st.name} = {show if show is not None else entry.text()}")

    def statement(self, st: S.Stmt) -> None:
        getattr(self, "do_" + st.kind)(st)

    def do_let(self, st):
        v = self.eval(st.expr, Ctx())
        self._bind(st, Entry("value", _lf_to_fn(v).normalize(self.rules)))

    def do_class_rule(self, st):
        b = st.expr
        if b.bound is None:
            raise ScriptError("class_rule needs [vars : conditions]", st.span)
        gen = self._class(b, Ctx())
        if gen.params():
            raise ScriptError(f"unbound names {sorted(gen.params())} in class rule", st.span)
        canon = self.rules.declare(gen, st.name, f"[{st.name}] = {gen.describe()}")
        named = self.rules.lookup(canon)
        self._bind(st, Entry("class", named))

    def do_presburger(self, st):
        f = self.boolean(st.expr, Ctx(zvars=frozenset(st.params)))
        if f.kind != "formula":
            raise ScriptError("a Presburger formula may not contain residue conditions", st.span)
        self._bind(st, Entry("formula", f.v, st.params))

    def do_cpf(self, st):
        v = self.eval(st.expr, Ctx(zvars=frozenset(st.params)))
        self._bind(st, Entry("value", _lf_to_fn(v).normalize(self.rules), st.params))

    def do_cells(self, st):
        base = frozenset(st.params)
        e = st.expr
        if self._is_presentation(e):
            cells = [self._cell(c, base, st.var) for c in self._summands(e)]
            cs = CellSet(st.var, st.params, cells)
        else:
            desc = self.description(e, Ctx(zvars=base, fvar=st.var))
            try:
                cells = V.annulus_decompose(desc, st.var)
            except V.UndecomposableDescription as exc:
                raise ScriptError(str(exc), st.span) from None
            cs = CellSet(st.var, st.params, cells, desc)
        entry = Entry("cells", cs, st.params)
        self._bind(st, entry)
        for c in cs.cells:
            self.out(f"  {c.describe(st.var)}")

    def do_measure(self, st):
        cs = self._get(st.var, "cells", st.span).value
        zs = set(cs.base)
        rs = set()
        for c in cs.cells:
            zs |= set(c.zvars)
            rs |= set(c.rvars)
        phi = None
        if st.extra is not None:
            phi = _lf_to_fn(self.eval(st.extra, Ctx(zvars=frozenset(zs), rvars=frozenset(rs), fvar=cs.var)))
        target = cs.desc if cs.desc is not None else cs.cells
        try:
            m = V.measure(target, phi, cs.var, self.rules)
        except NotIntegrable as exc:
            raise NotIntegrable(f"{st.name}: {exc}", term=exc.term, cell=exc.cell, direction=exc.direction) from None
        meta = {"cells": st.var, "plain": phi is None}
        self._bind(st, Entry("value", m, cs.base, meta))

    def _summand(self, st) -> tuple[MotFunction, list]:
        zs = frozenset(st.params) | frozenset(st.vars)
        phi = _lf_to_fn(self.eval(st.expr, Ctx(zvars=zs)))
        return phi.normalize(self.rules), list(st.vars)

    def do_sum(self, st):
        phi, vs = self._summand(st)
        try:
            r = phi.push_z(vs).normalize(self.rules)
        except NotIntegrable as exc:
            raise NotIntegrable(f"{st.name}: {exc}", term=exc.term, cell=exc.cell, direction=exc.direction) from None
        self._bind(st, Entry("value", r, st.params, {"summand": phi, "over": vs}))

    def do_mellin(self, st):
        phi, vs = self._summand(st)
        if any(g != POINT for g, _ in phi.terms):
            raise ScriptError("mellin needs a function without class coefficients; use poincare", st.span)
        f = phi.terms.get((POINT, 0), CPFunction())
        self._bind(st, Entry("series", mellin(f, vs)))

    def do_poincare(self, st):
        phi, vs = self._summand(st)
        if len(vs) != 1:
            raise ScriptError("poincare takes exactly one index variable", st.span)
        cs = poincare_series(phi, vs[0], self.rules)
        self._bind(st, Entry("series", cs))

    def do_dump(self, st):
        import json

        e = self._get(st.name, None, st.span)
        blob = json.dumps({"name": st.name, "kind": e.kind, "value": e.to_json()}, indent=2, sort_keys=True)
        if st.path:
            with open(st.path, "w") as fh:
                fh.write(blob + "\n")
            self.out(f"dumped {st.name} to {st.path}")
        else:
            self.out(blob)

    # checks
    def do_check(self, st):
        e = self._get(st.name, None, st.span)
        if st.expr is not None:
            rep = self._check_symbolic(st, e)
        else:
            m = st.method
            handler = getattr(self, "_check_" + m.func, None)
            if handler is None:
                raise ScriptError(f"unknown check method {m.func}", m.span)
            if self.oracle is None:
                rep = Report(st.name, m.func, [], True, skipped=True)
            else:
                rep = handler(st, e, m.args)
        self.checks.append(rep)
        status = "skipped (no --oracle)" if rep.skipped else ("ok" if rep.ok else "FAILED")
        self.out(f"check {st.name} by {rep.method}: {status}")
        for r in rep.rows:
            if r["verdict"] != "match" or not rep.ok:
                self.out(f"  {r}")

    def _check_symbolic(self, st, e) -> Report:
        if e.kind == "series":
            return self._check_series(st, e)
        if e.kind != "value":
            raise ScriptError(f"{st.name} is not a function value", st.span)
        zs = frozenset(e.params) | e.value.zvars()
        exp = _lf_to_fn(self.eval(st.expr, Ctx(zvars=zs))).normalize(self.rules)
        diff = (e.value - exp).normalize(self.rules)
        ok = diff == MotFunction()
        row = {"target": st.name, "method": "symbolic", "parameters": {}, "expected": str(exp),
               "observed": str(e.value), "verdict": "match" if ok else "mismatch"}
        return Report(st.name, "symbolic", [row], ok)

    def _check_series(self, st, e) -> Report:
        if not isinstance(st.expr, S.Name):
            raise ScriptError("a series can only be compared with another named series", st.span)
        other = self._get(st.expr.id, None, st.span)
        if other.kind != "series":
            raise ScriptError(f"{st.expr.id} is not a series", st.span)
        a, b = e.value, other.value
        ok = (a == b) if isinstance(a, ClassSeries) else (b == a)
        row = {"target": st.name, "method": "symbolic", "parameters": {}, "expected": str(b),
               "observed": str(a), "verdict": "match" if ok else "mismatch"}
        return Report(st.name, "symbolic", [row], ok)

    def _samples(self, params) -> list[dict]:
        if not params:
            return [{}]
        rng = random.Random(self.seed)
        return [{p: rng.randint(0, 5) for p in params} for _ in range(3)]

    def _check_padic(self, st, e, args) -> Report:
        meta = e.meta
        if "cells" not in meta or not meta.get("plain"):
            raise ScriptError("padic checks apply to measures of descriptions without integrand", st.span)
        cs = self.env[meta["cells"]].value
        if cs.desc is None or cs.base:
            raise ScriptError("padic checks need a description without base parameters", st.span)
        rows = O.check(st.name, e.value, lambda p: O.padic_measure(cs.desc, p, self.oracle.depth), self.oracle)
        return Report(st.name, "padic", rows, O.all_match(rows))

    def _check_numeric(self, st, e, args) -> Report:
        if "summand" not in e.meta:
            raise ScriptError("numeric checks apply to sum results", st.span)
        phi, vs = e.meta["summand"], e.meta["over"]
        rows = []
        for env in self._samples(sorted(e.value.zvars() | phi.zvars() - set(vs))):
            for (g, d), f in phi.terms.items():
                closed = e.value.terms.get((g, d), CPFunction())
                rows += O.check_sum(st.name, f, vs, closed, self.oracle, env)
        return Report(st.name, "numeric", rows, O.all_match(rows))

    def _check_curve(self, st, e, args) -> Report:
        """Volume of {x^2 = g(y)} over O^2 by residue counting, optionally for y mod t in a set."""
        if not args:
            raise ScriptError("curve(g) needs a polynomial in one variable", st.span)
        pos = [a for a in args if not isinstance(a, S.KwArg)]
        kws = {a.name: a for a in args if isinstance(a, S.KwArg)}
        g = self.eval(pos[0], Ctx(bound=frozenset(self._free_names(pos[0]))))
        if g.kind == "num":
            g = Val("poly", MPoly.const(g.v))
        if g.kind != "poly" or len(g.v.variables()) > 1:
            raise ScriptError("curve(g) needs a polynomial in one variable", st.span)
        var = next(iter(g.v.variables()), "y")
        coeffs = [int(c) for c in g.v.to_univariate(var)]
        only = self._int_set(kws.get("only"))
        skip = self._int_set(kws.get("except"))
        depth = max(1, min(self.oracle.depth, 3))

        def numeric(p):
            vols = O.hyperelliptic_volumes(coeffs, p, depth)
            keep = [r for r in range(p) if (only is None or r % p in {x % p for x in only})
                    and (skip is None or r % p not in {x % p for x in skip})]
            return sum((vols[r] for r in keep), Fraction(0))

        rows = O.check(st.name, e.value, numeric, self.oracle)
        return Report(st.name, "curve", rows, O.all_match(rows))

    def _int_set(self, kw):
        if kw is None:
            return None
        v = kw.value
        items = v.items if isinstance(v, S.ListExpr) else (v,)
        out = []
        for it in items:
            x = self.eval(it, Ctx())
            if x.kind != "num" or x.v.denominator != 1:
                raise ScriptError("expected integers", kw.span)
            out.append(int(x.v))
        return out

    def _free_names(self, e) -> set:
        out = set()

        def walk(n):
            if isinstance(n, S.Name):
                if n.id not in ("L", "t") and n.id not in self.env:
                    out.add(n.id)
            elif hasattr(n, "__dataclass_fields__"):
                for k in n.__dataclass_fields__:
                    if k != "span":
                        walk(getattr(n, k))
            elif isinstance(n, tuple):
                for x in n:
                    walk(x)

        walk(e)
        return out

    # lookup
    def _get(self, name: str, kind: str | None, span) -> Entry:
        if name not in self.env:
            raise ScriptError(f"unknown name {name}", span)
        e = self.env[name]
        if kind and e.kind != kind:
            raise ScriptError(f"{name} is a {e.kind}, expected {kind}", span)
        return e

    # expressions
    def eval(self, e, ctx: Ctx) -> Val:
        try:
            return self._eval(e, ctx)
        except (TypeError, ValueError, ZeroDivisionError, ArithmeticError) as exc:
            if isinstance(exc, (ScriptError, NotIntegrable)):
                raise
            raise ScriptError(str(exc), getattr(e, "span", (0, 0))) from None

    def _eval(self, e, ctx: Ctx) -> Val:
        if isinstance(e, S.Num):
            return Val("num", Fraction(e.value))
        if isinstance(e, S.Name):
            return self._name(e, ctx)
        if isinstance(e, S.Neg):
            x = self._eval(e.arg, ctx)
            return self._mul(Val("num", Fraction(-1)), x)
        if isinstance(e, S.BinOp):
            if e.op == "^":
                return self._pow(e, ctx)
            a, b = self._eval(e.left, ctx), self._eval(e.right, ctx)
            if e.op == "+":
                return self._add(a, b)
            if e.op == "-":
                return self._add(a, self._mul(Val("num", Fraction(-1)), b))
            if e.op == "*":
                return self._mul(a, b)
            return self._div(a, b, e.span)
        if isinstance(e, S.Bracket):
            return Val("fn", self._bracket(e, ctx))
        if isinstance(e, S.Call):
            return self._call(e, ctx)
        if isinstance(e, (S.Cmp, S.BoolOp, S.Not, S.Bool, S.Quant)):
            raise ScriptError("conditions must appear inside [ ]", e.span)
        raise ScriptError(f"unexpected {type(e).__name__}", getattr(e, "span", (0, 0)))

    def _name(self, e: S.Name, ctx: Ctx) -> Val:
        n = e.id
        if n in ctx.bound or n in ctx.rvars:
            return Val("poly", MPoly.var(n))
        if n in ctx.zvars:
            return Val("lin", LinearFunction.var(n))
        if n == "L":
            return Val("mot", LNUM)
        if n in self.env:
            ent = self.env[n]
            if ent.kind == "value":
                return Val("fn", ent.value)
            if ent.kind == "class":
                return Val("fn", MotFunction.of(ent.value))
            raise ScriptError(f"{n} is a {ent.kind} and cannot be used here", e.span)
        raise ScriptError(f"unknown name {n}", e.span)

    def _add(self, a: Val, b: Val) -> Val:
        ks = {a.kind, b.kind}
        if ks == {"num"}:
            return Val("num", a.v + b.v)
        if ks <= {"num", "lin"}:
            return Val("lin", LinearFunction.lift(a.v) + LinearFunction.lift(b.v))
        if ks <= {"num", "poly"}:
            return Val("poly", MPoly.lift(a.v) + MPoly.lift(b.v))
        if ks <= {"num", "mot"} and not (a.kind == "num" and a.v.denominator != 1) and not (
                b.kind == "num" and b.v.denominator != 1):
            return Val("mot", MotNum.of(int(a.v) if a.kind == "num" else a.v) + MotNum.of(int(b.v) if b.kind == "num" else b.v))
        return Val("fn", _lf_to_fn(a) + _lf_to_fn(b))

    def _mul(self, a: Val, b: Val) -> Val:
        ks = {a.kind, b.kind}
        if ks == {"num"}:
            return Val("num", a.v * b.v)
        if ks == {"num", "lin"}:
            return Val("lin", (a.v if a.kind == "lin" else b.v) * (b.v if a.kind == "lin" else a.v))
        if ks <= {"num", "poly"}:
            return Val("poly", MPoly.lift(a.v) * MPoly.lift(b.v))
        if ks == {"lin"}:
            return Val("fn", MotFunction.of(CPFunction.term(factors=(a.v, b.v))))
        if ks <= {"num", "mot"}:
            return Val("mot", self._mot(a) * self._mot(b))
        return Val("fn", _lf_to_fn(a) * _lf_to_fn(b))

    @staticmethod
    def _mot(x: Val) -> MotNum:
        if x.kind == "mot":
            return x.v
        if x.v.denominator != 1:
            raise TypeError(f"{x.v} is not in the coefficient ring")
        return MotNum.of(int(x.v))

    def _div(self, a: Val, b: Val, span) -> Val:
        if b.kind == "num":
            if b.v == 0:
                raise ScriptError("division by zero", span)
            if a.kind in ("num", "lin", "poly"):
                return self._mul(a, Val("num", 1 / b.v))
            if b.v in (1, -1):
                return self._mul(a, b)
        if a.kind in ("num", "mot") and b.kind in ("num", "mot"):
            return Val("mot", self._mot(a) / self._mot(b))
        raise ScriptError("division only by constants or units of the coefficient ring", span)

    def _pow(self, e: S.BinOp, ctx: Ctx) -> Val:
        base = self._eval(e.left, ctx)
        ex = self._eval(e.right, ctx)
        if base.kind == "mot" and base.v == LNUM:
            if ex.kind == "num":
                if ex.v.denominator != 1:
                    raise ScriptError("L-exponents must be integers", e.span)
                return Val("mot", MotNum.L(int(ex.v)))
            if ex.kind == "lin":
                return Val("fn", MotFunction.of(CPFunction.L_power(ex.v)))
        if ex.kind != "num" or ex.v.denominator != 1:
            raise ScriptError("exponent must be an integer constant", e.span)
        k = int(ex.v)
        if base.kind == "num":
            return Val("num", base.v ** k)
        if base.kind == "poly" and k >= 0:
            return Val("poly", base.v ** k)
        if base.kind == "mot":
            return Val("mot", base.v ** k)
        if k >= 0:
            out = Val("num", Fraction(1))
            for _ in range(k):
                out = self._mul(out, base)
            return out
        raise ScriptError("negative powers only of L", e.span)

    def _call(self, e: S.Call, ctx: Ctx) -> Val:
        if e.func in ("ord", "ac"):
            if ctx.fvar is None or len(e.args) != 1:
                raise ScriptError(f"{e.func}(...) needs the valued-field variable of a cells statement", e.span)
            c = self.center_of(e.args[0], ctx)
            if e.func == "ord":
                return Val("lin", LinearFunction.var(V.ord_var(ctx.fvar, c)))
            return Val("poly", MPoly.var(V.ac_var(ctx.fvar, c)))
        raise ScriptError(f"unknown function {e.func}", e.span)

    # brackets: classes and indicators
    def _bracket(self, b: S.Bracket, ctx: Ctx) -> MotFunction:
        if b.bound is not None:
            return MotFunction.of(self._class(b, ctx))
        if len(b.conds) == 1 and isinstance(b.conds[0], S.Name) and b.conds[0].id in self.env:
            ent = self.env[b.conds[0].id]
            if ent.kind == "class":
                return MotFunction.of(ent.value)
            if ent.kind == "formula":
                return MotFunction.of(CPFunction.indicator(ent.value))
        f = self.boolean(S.BoolOp("and", b.conds) if len(b.conds) > 1 else b.conds[0], ctx)
        if f.kind == "formula":
            return MotFunction.of(CPFunction.indicator(f.v))
        forms, res = f.v
        eqs = [p for p, is_eq in res if is_eq]
        neqs = [p for p, is_eq in res if not is_eq]
        return MotFunction.of(make_generator((), eqs, neqs)) * CPFunction.indicator(forms)

    def _class(self, b: S.Bracket, ctx: Ctx) -> Generator:
        inner = Ctx(ctx.zvars, ctx.rvars, ctx.bound | frozenset(b.bound), ctx.fvar)
        eqs, neqs = [], []
        for c in b.conds:
            if not isinstance(c, S.Cmp) or c.op not in ("=", "!=") or c.modulus is not None:
                raise ScriptError("class conditions are polynomial equations p = q or p != q", getattr(c, "span", b.span))
            lhs = self._poly(self._eval(c.left, inner), c.span)
            rhs = self._poly(self._eval(c.right, inner), c.span)
            (eqs if c.op == "=" else neqs).append(lhs - rhs)
        return make_generator(b.bound, eqs, neqs)

    @staticmethod
    def _poly(x: Val, span) -> MPoly:
        if x.kind == "num":
            return MPoly.const(x.v)
        if x.kind == "poly":
            return x.v
        raise ScriptError(f"expected a residue-field polynomial, found a {x.kind}", span)

    def boolean(self, e, ctx: Ctx) -> Val:
        """Val('formula', F) or Val('res', (F, [(poly, is_eq)]))."""
        if isinstance(e, S.Bool):
            return Val("formula", F.TRUE if e.value else F.FALSE)
        if isinstance(e, S.Name) and e.id in self.env and self.env[e.id].kind == "formula":
            return Val("formula", self.env[e.id].value)
        if isinstance(e, S.Cmp):
            a, b = self.eval(e.left, ctx), self.eval(e.right, ctx)
            if {a.kind, b.kind} <= {"num", "lin"}:
                x, y = LinearFunction.lift(a.v), LinearFunction.lift(b.v)
                if e.modulus is not None:
                    return Val("formula", F.cong(x, y, e.modulus))
                fn = {"=": F.eq, "!=": F.ne, "<=": F.le, ">=": F.ge, "<": F.lt, ">": F.gt}[e.op]
                return Val("formula", fn(x, y))
            if {a.kind, b.kind} <= {"num", "poly"} and e.op in ("=", "!=") and e.modulus is None:
                p = MPoly.lift(a.v) - MPoly.lift(b.v)
                return Val("res", (F.TRUE, [(p, e.op == "=")]))
            raise ScriptError("cannot compare these quantities", e.span)
        if isinstance(e, S.BoolOp):
            parts = [self.boolean(a, ctx) for a in e.args]
            if all(p.kind == "formula" for p in parts):
                comb = F.conj if e.op == "and" else F.disj
                return Val("formula", comb(*[p.v for p in parts]))
            if e.op == "or":
                raise ScriptError("disjunctions of residue conditions are not supported inside [ ]", e.span)
            forms, res = [], []
            for p in parts:
                if p.kind == "formula":
                    forms.append(p.v)
                else:
                    forms.append(p.v[0])
                    res += p.v[1]
            return Val("res", (F.conj(*forms), res))
        if isinstance(e, S.Not):
            p = self.boolean(e.arg, ctx)
            if p.kind != "formula":
                raise ScriptError("negated residue conditions: write != instead", e.span)
            return Val("formula", F.neg(p.v))
        if isinstance(e, S.Quant):
            inner = Ctx(ctx.zvars | {e.var}, ctx.rvars, ctx.bound, ctx.fvar)
            p = self.boolean(e.body, inner)
            if p.kind != "formula":
                raise ScriptError("quantifiers range over Z only", e.span)
            build = F.exists if e.q == "exists" else F.forall
            return Val("formula", qe(build(e.var, p.v)))
        raise ScriptError("expected a condition", getattr(e, "span", (0, 0)))

    # valued-field data
    def center_of(self, arg, ctx: Ctx) -> V.SeriesPoint:
        if isinstance(arg, S.Name) and arg.id == ctx.fvar:
            return V.SeriesPoint()
        if isinstance(arg, S.BinOp) and arg.op in "+-" and isinstance(arg.left, S.Name) and arg.left.id == ctx.fvar:
            c = self.series(arg.right, ctx)
            if not isinstance(c, V.SeriesPoint):
                raise ScriptError("centers inside descriptions must be explicit", arg.span)
            return c if arg.op == "-" else -c
        raise ScriptError(f"expected {ctx.fvar} - c with c a Laurent polynomial in t", getattr(arg, "span", (0, 0)))

    def series(self, e, ctx: Ctx):
        if isinstance(e, S.Num):
            return V.SeriesPoint.of(e.value)
        if isinstance(e, S.Name) and e.id == "t":
            return V.SeriesPoint.t()
        if isinstance(e, S.Neg):
            x = self.series(e.arg, ctx)
            return -x if isinstance(x, V.SeriesPoint) else V.PowerCenter(-x.coeff, x.exp)
        if isinstance(e, S.BinOp):
            if e.op == "^" and isinstance(e.left, S.Name) and e.left.id == "t":
                k = self.eval(e.right, ctx)
                if k.kind == "num" and k.v.denominator == 1:
                    return V.SeriesPoint.t(int(k.v))
                if k.kind == "lin":
                    return V.PowerCenter(Fraction(1), k.v)
                raise ScriptError("exponent of t must be an integer or a base variable", e.span)
            a, b = self.series(e.left, ctx), self.series(e.right, ctx)
            if isinstance(a, V.SeriesPoint) and isinstance(b, V.SeriesPoint):
                if e.op == "+":
                    return a + b
                if e.op == "-":
                    return a - b
                if e.op == "*":
                    return a * b
                if e.op == "/":
                    return a / b
            if e.op == "*":
                sp, pc = (a, b) if isinstance(a, V.SeriesPoint) else (b, a)
                if isinstance(sp, V.SeriesPoint) and sp.is_monomial() and sp.ord() == 0:
                    return V.PowerCenter(pc.coeff * sp.ac(), pc.exp)
        raise ScriptError("expected a Laurent polynomial in t", getattr(e, "span", (0, 0)))

    def description(self, e, ctx: Ctx):
        if isinstance(e, S.Bool):
            return V.DTRUE if e.value else V.DFALSE
        if isinstance(e, S.BoolOp):
            parts = tuple(self.description(a, ctx) for a in e.args)
            return V.DAnd(parts) if e.op == "and" else V.DOr(parts)
        if isinstance(e, S.Not):
            return V.DNot(self.description(e.arg, ctx))
        if isinstance(e, S.Cmp):
            left, right, op = e.left, e.right, e.op
            flip = {">=": "<=", "<=": ">=", "<": ">", ">": "<", "=": "=", "!=": "!="}
            if not isinstance(left, (S.Call, S.Name)) or (isinstance(left, S.Name) and left.id != ctx.fvar):
                left, right, op = right, left, flip[op]
            if isinstance(left, S.Call) and left.func == "ord":
                c = self.center_of(left.args[0], ctx)
                v = self.eval(right, Ctx(zvars=ctx.zvars))
                if v.kind not in ("num", "lin"):
                    raise ScriptError("orders are integers or linear in base variables", e.span)
                if e.modulus is not None:
                    if v.kind != "num":
                        raise ScriptError("congruence residues must be integers", e.span)
                    return V.OrdCong(c, int(v.v) % e.modulus, e.modulus)
                return V.OrdAtom(c, op, LinearFunction.lift(v.v))
            if isinstance(left, S.Call) and left.func == "ac" and op in ("=", "!="):
                c = self.center_of(left.args[0], ctx)
                v = self.eval(right, Ctx(rvars=ctx.rvars))
                return V.AcAtom(c, self._poly(v, e.span), op == "!=")
            if isinstance(left, S.Name) and left.id == ctx.fvar and op == "=":
                c = self.series(right, ctx)
                return V.PointAtom(c)
        raise ScriptError(f"expected a condition on ord({ctx.fvar} - c), ac({ctx.fvar} - c) or {ctx.fvar} = c",
                          getattr(e, "span", (0, 0)))

    @staticmethod
    def _summands(e) -> list:
        if isinstance(e, S.BinOp) and e.op == "+":
            return Evaluator._summands(e.left) + Evaluator._summands(e.right)
        return [e]

    def _is_presentation(self, e) -> bool:
        return all(isinstance(x, S.Call) and x.func in ("annulus", "point") for x in self._summands(e))

    def _names_arg(self, kw) -> tuple:
        if kw is None:
            return ()
        v = kw.value
        items = v.items if isinstance(v, S.ListExpr) else (v,)
        if not all(isinstance(i, S.Name) for i in items):
            raise ScriptError("expected variable names", kw.span)
        return tuple(i.id for i in items)

    def _cell(self, call: S.Call, base: frozenset, var: str) -> V.ValCell:
        kws = {}
        for a in call.args:
            if not isinstance(a, S.KwArg):
                raise ScriptError(f"{call.func} takes keyword arguments", getattr(a, "span", call.span))
            kws[a.name] = a
        allowed = {"annulus": {"center", "order", "ac", "z", "residue", "basis"},
                   "point": {"center", "residue", "basis", "gamma"}}[call.func]
        extra = set(kws) - allowed
        if extra:
            raise ScriptError(f"unexpected arguments {sorted(extra)} for {call.func}", call.span)
        zs = self._names_arg(kws.get("z"))
        rs = self._names_arg(kws.get("residue"))
        ctx = Ctx(zvars=base | frozenset(zs), rvars=frozenset(rs))
        center = self.series(kws["center"].value, ctx) if "center" in kws else V.SeriesPoint()
        basis = None
        if "basis" in kws:
            basis = _lf_to_fn(self.eval(kws["basis"].value, ctx))
        if call.func == "point":
            gamma = self.eval(kws["gamma"].value, ctx) if "gamma" in kws else Val("num", Fraction(0))
            return V.point_cell(center, basis, rs, LinearFunction.lift(gamma.v))
        if "order" not in kws or "ac" not in kws:
            raise ScriptError("annulus needs order and ac", call.span)
        alpha = self.eval(kws["order"].value, ctx)
        if alpha.kind not in ("num", "lin"):
            raise ScriptError("order must be linear in the basis variables", kws["order"].span)
        xi = self._poly(self.eval(kws["ac"].value, ctx), kws["ac"].span)
        return V.annulus_cell(center, LinearFunction.lift(alpha.v), xi, basis, zs, rs)
