"""Lexer, AST, recursive-descent parser and pretty-printer for motint scripts."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, fields

KEYWORDS = {
    "let", "class_rule", "presburger", "cpf", "cells", "measure", "sum", "mellin", "poincare",
    "check", "dump", "over", "with", "in", "by", "and", "or", "not", "exists", "forall", "mod", "true", "false", "to",
}
STATEMENTS = ("let", "class_rule", "presburger", "cpf", "cells", "measure", "sum", "mellin",
              "poincare", "check", "dump")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+)
  | (?P<string>"[^"\n]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>!=|<=|>=|[-+*/^()\[\],:;=<>{}])
""", re.VERBOSE)


class ParseError(Exception):
    def __init__(self, line: int, col: int, expected, found: str):
        self.line, self.col = line, col
        self.expected = sorted(set(expected))
        self.found = found
        exp = ", ".join(self.expected)
        super().__init__(f"line {line}, column {col}: expected {exp}; found {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # number, string, ident, keyword, op, eof
    text: str
    line: int
    col: int

    def show(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(line, pos - start + 1, ["a token"], repr(text[pos]))
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            if kind == "ident" and s in KEYWORDS:
                kind = "keyword"
            out.append(Token(kind, s, line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


# --- AST ---------------------------------------------------------------------------------

def _span():
    return field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    value: int
    span: tuple = _span()


@dataclass(frozen=True)
class Name:
    id: str
    span: tuple = _span()


@dataclass(frozen=True)
class Bool:
    value: bool
    span: tuple = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    span: tuple = _span()


@dataclass(frozen=True)
class Neg:
    arg: object
    span: tuple = _span()


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    span: tuple = _span()


@dataclass(frozen=True)
class KwArg:
    name: str
    value: object
    span: tuple = _span()


@dataclass(frozen=True)
class ListExpr:
    items: tuple
    span: tuple = _span()


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object
    modulus: int | None = None
    span: tuple = _span()


@dataclass(frozen=True)
class BoolOp:
    op: str
    args: tuple
    span: tuple = _span()


@dataclass(frozen=True)
class Not:
    arg: object
    span: tuple = _span()


@dataclass(frozen=True)
class Quant:
    q: str
    var: str
    body: object
    span: tuple = _span()


@dataclass(frozen=True)
class Bracket:
    """[E], [formula] or [u, v : conditions]."""

    bound: tuple | None
    conds: tuple
    span: tuple = _span()


@dataclass(frozen=True)
class Stmt:
    kind: str
    name: str | None
    params: tuple = ()
    var: str | None = None
    expr: object = None
    extra: object = None
    vars: tuple = ()
    method: object = None
    path: str | None = None
    span: tuple = _span()


@dataclass(frozen=True)
class Script:
    stmts: tuple


# --- parser --------------------------------------------------------------------------------

class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "keyword") and t.text in texts

    def fail(self, expected):
        t = self.tok
        raise ParseError(t.line, t.col, expected, t.show())

    def take(self, *texts) -> Token:
        if not self.at(*texts):
            self.fail([repr(x) for x in texts])
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self.fail(["identifier"])
        t = self.tok
        self.i += 1
        return t.text

    def number(self) -> int:
        if self.tok.kind != "number":
            self.fail(["number"])
        t = self.tok
        self.i += 1
        return int(t.text)

    def span(self) -> tuple:
        return (self.tok.line, self.tok.col)

    # statements
    def script(self) -> Script:
        out = []
        while self.tok.kind != "eof":
            out.append(self.statement())
        return Script(tuple(out))

    def statement(self) -> Stmt:
        sp = self.span()
        if not self.at(*STATEMENTS):
            self.fail(["statement keyword"] + [repr(s) for s in STATEMENTS])
        kw = self.take(*STATEMENTS).text
        st = getattr(self, "st_" + kw)(sp)
        self.take(";")
        return st

    def _params(self) -> tuple:
        if not self.at("("):
            return ()
        self.take("(")
        names = [self.ident()]
        while self.at(","):
            self.take(",")
            names.append(self.ident())
        self.take(")")
        return tuple(names)

    def _names(self) -> tuple:
        names = [self.ident()]
        while self.at(","):
            self.take(",")
            names.append(self.ident())
        return tuple(names)

    def st_let(self, sp):
        name = self.ident()
        self.take("=")
        return Stmt("let", name, expr=self.expr(), span=sp)

    def st_class_rule(self, sp):
        name = self.ident()
        self.take("=")
        if not self.at("["):
            self.fail(["'['"])
        return Stmt("class_rule", name, expr=self.bracket(), span=sp)

    def st_presburger(self, sp):
        name = self.ident()
        params = self._params()
        self.take("=")
        return Stmt("presburger", name, params, expr=self.expr(), span=sp)

    def st_cpf(self, sp):
        name = self.ident()
        params = self._params()
        self.take("=")
        return Stmt("cpf", name, params, expr=self.expr(), span=sp)

    def st_cells(self, sp):
        name = self.ident()
        params = self._params()
        self.take("over")
        var = self.ident()
        self.take("=")
        return Stmt("cells", name, params, var=var, expr=self.expr(), span=sp)

    def st_measure(self, sp):
        name = self.ident()
        self.take("=")
        cells = self.ident()
        extra = None
        if self.at("with"):
            self.take("with")
            extra = self.expr()
        return Stmt("measure", name, var=cells, extra=extra, span=sp)

    def _summation(self, kind, sp, sep):
        name = self.ident()
        params = self._params()
        self.take("=")
        e = self.expr()
        self.take(sep)
        return Stmt(kind, name, params, expr=e, vars=self._names(), span=sp)

    def st_sum(self, sp):
        return self._summation("sum", sp, "over")

    def st_mellin(self, sp):
        return self._summation("mellin", sp, "over")

    def st_poincare(self, sp):
        return self._summation("poincare", sp, "in")

    def st_check(self, sp):
        name = self.ident()
        if self.at("="):
            self.take("=")
            return Stmt("check", name, expr=self.expr(), span=sp)
        self.take("by")
        msp = self.span()
        method = self.ident()
        args = ()
        if self.at("("):
            args = self.call_args()
        return Stmt("check", name, method=Call(method, args, span=msp), span=sp)

    def st_dump(self, sp):
        name = self.ident()
        path = None
        if self.at("to"):
            self.take("to")
            if self.tok.kind != "string":
                self.fail(["string"])
            path = self.tok.text[1:-1]
            self.i += 1
        return Stmt("dump", name, path=path, span=sp)

    # expressions, loosest first
    def expr(self):
        return self.or_expr()

    def or_expr(self):
        sp = self.span()
        args = [self.and_expr()]
        while self.at("or"):
            self.take("or")
            args.append(self.and_expr())
        return args[0] if len(args) == 1 else BoolOp("or", tuple(args), span=sp)

    def and_expr(self):
        sp = self.span()
        args = [self.not_expr()]
        while self.at("and"):
            self.take("and")
            args.append(self.not_expr())
        return args[0] if len(args) == 1 else BoolOp("and", tuple(args), span=sp)

    def not_expr(self):
        if self.at("not"):
            sp = self.span()
            self.take("not")
            return Not(self.not_expr(), span=sp)
        if self.at("exists", "forall"):
            sp = self.span()
            q = self.take("exists", "forall").text
            v = self.ident()
            self.take(":")
            return Quant(q, v, self.or_expr(), span=sp)
        return self.cmp_expr()

    def cmp_expr(self):
        sp = self.span()
        left = self.add_expr()
        if self.at("=", "!=", "<=", ">=", "<", ">"):
            op = self.take("=", "!=", "<=", ">=", "<", ">").text
            right = self.add_expr()
            modulus = None
            if op == "=" and self.at("mod"):
                self.take("mod")
                modulus = self.number()
            return Cmp(op, left, right, modulus, span=sp)
        return left

    def add_expr(self):
        left = self.mul_expr()
        while self.at("+", "-"):
            sp = self.span()
            op = self.take("+", "-").text
            left = BinOp(op, left, self.mul_expr(), span=sp)
        return left

    def mul_expr(self):
        left = self.unary()
        while self.at("*", "/"):
            sp = self.span()
            op = self.take("*", "/").text
            left = BinOp(op, left, self.unary(), span=sp)
        return left

    def unary(self):
        if self.at("-"):
            sp = self.span()
            self.take("-")
            return Neg(self.unary(), span=sp)
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            sp = self.span()
            self.take("^")
            return BinOp("^", base, self.unary(), span=sp)
        return base

    def atom(self):
        t = self.tok
        sp = (t.line, t.col)
        if t.kind == "number":
            self.i += 1
            return Num(int(t.text), span=sp)
        if t.kind == "ident":
            self.i += 1
            if self.at("("):
                return Call(t.text, self.call_args(), span=sp)
            return Name(t.text, span=sp)
        if self.at("true", "false"):
            self.i += 1
            return Bool(t.text == "true", span=sp)
        if self.at("("):
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if self.at("["):
            return self.bracket()
        if self.at("{"):
            self.take("{")
            items = []
            if not self.at("}"):
                items.append(self.expr())
                while self.at(","):
                    self.take(",")
                    items.append(self.expr())
            self.take("}")
            return ListExpr(tuple(items), span=sp)
        self.fail(["number", "identifier", "'('", "'['", "'{'", "'-'", "'true'", "'false'"])

    def call_args(self) -> tuple:
        self.take("(")
        args = []
        if not self.at(")"):
            args.append(self.call_arg())
            while self.at(","):
                self.take(",")
                args.append(self.call_arg())
        self.take(")")
        return tuple(args)

    def call_arg(self):
        t = self.tok
        if t.kind == "ident" and self.toks[self.i + 1].kind == "op" and self.toks[self.i + 1].text == ":":
            self.i += 2
            return KwArg(t.text, self.expr(), span=(t.line, t.col))
        return self.expr()

    def bracket(self) -> Bracket:
        sp = self.span()
        self.take("[")
        bound = None
        # lookahead for "ident (, ident)* :"
        j = self.i
        names = []
        while self.toks[j].kind == "ident":
            names.append(self.toks[j].text)
            j += 1
            if self.toks[j].kind == "op" and self.toks[j].text == ",":
                j += 1
                continue
            break
        if self.toks[j].kind == "op" and self.toks[j].text == ":":
            bound = tuple(names)
            self.i = j + 1
        elif self.at(":"):
            bound = ()
            self.take(":")
        conds = []
        if not self.at("]"):
            conds.append(self.expr())
            while self.at(","):
                self.take(",")
                conds.append(self.expr())
        self.take("]")
        return Bracket(bound, tuple(conds), span=sp)


def parse(text: str) -> Script:
    return Parser(text).script()


def parse_expr(text: str):
    p = Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail(["end of input"])
    return e


# --- pretty printer ----------------------------------------------------------------------

_PREC = {"or": 1, "and": 2, "not": 3, "cmp": 4, "+": 5, "-": 5, "*": 6, "/": 6, "neg": 7, "^": 8}


def _prec(e) -> int:
    if isinstance(e, BoolOp):
        return _PREC[e.op]
    if isinstance(e, Not):
        return 3
    if isinstance(e, Quant):
        return 0
    if isinstance(e, Cmp):
        return 4
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 7
    return 9


def _wrap(e, need: int) -> str:
    s = pretty_expr(e)
    return f"({s})" if _prec(e) < need else s


def pretty_expr(e) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, BoolOp):
        p = _PREC[e.op]
        return f" {e.op} ".join(_wrap(a, p + 1) for a in e.args)
    if isinstance(e, Not):
        return "not " + _wrap(e.arg, 3)
    if isinstance(e, Quant):
        return f"{e.q} {e.var}: {pretty_expr(e.body)}"
    if isinstance(e, Cmp):
        s = f"{_wrap(e.left, 5)} {e.op} {_wrap(e.right, 5)}"
        return s + (f" mod {e.modulus}" if e.modulus is not None else "")
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            return f"{_wrap(e.left, 9)}^{_wrap(e.right, 7)}"
        return f"{_wrap(e.left, p)} {e.op} {_wrap(e.right, p + 1)}"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, 7)
    if isinstance(e, Call):
        return f"{e.func}(" + ", ".join(pretty_expr(a) for a in e.args) + ")"
    if isinstance(e, KwArg):
        return f"{e.name}: {pretty_expr(e.value)}"
    if isinstance(e, ListExpr):
        return "{" + ", ".join(pretty_expr(a) for a in e.items) + "}"
    if isinstance(e, Bracket):
        head = ""
        if e.bound is not None:
            head = (", ".join(e.bound) + " : ") if e.bound else ": "
        return "[" + head + ", ".join(pretty_expr(c) for c in e.conds) + "]"
    raise TypeError(f"cannot print {e!r}")


def pretty_stmt(s: Stmt) -> str:
    ps = f"({', '.join(s.params)})" if s.params else ""
    k = s.kind
    if k in ("let", "class_rule"):
        return f"{k} {s.name} = {pretty_expr(s.expr)};"
    if k in ("presburger", "cpf"):
        return f"{k} {s.name}{ps} = {pretty_expr(s.expr)};"
    if k == "cells":
        return f"cells {s.name}{ps} over {s.var} = {pretty_expr(s.expr)};"
    if k == "measure":
        w = f" with {pretty_expr(s.extra)}" if s.extra is not None else ""
        return f"measure {s.name} = {s.var}{w};"
    if k in ("sum", "mellin", "poincare"):
        sep = "in" if k == "poincare" else "over"
        return f"{k} {s.name}{ps} = {pretty_expr(s.expr)} {sep} {', '.join(s.vars)};"
    if k == "check":
        if s.expr is not None:
            return f"check {s.name} = {pretty_expr(s.expr)};"
        m = s.method
        args = "(" + ", ".join(pretty_expr(a) for a in m.args) + ")" if m.args else ""
        return f"check {s.name} by {m.func}{args};"
    if k == "dump":
        return f"dump {s.name}" + (f' to "{s.path}"' if s.path else "") + ";"
    raise TypeError(k)


def pretty_print(script: Script) -> str:
    return "\n".join(pretty_stmt(s) for s in script.stmts) + ("\n" if script.stmts else "")


def strip_spans(node):
    """Structural view without source positions (spans are excluded from == already)."""
    if isinstance(node, tuple):
        return tuple(strip_spans(x) for x in node)
    if hasattr(node, "__dataclass_fields__"):
        return (type(node).__name__,) + tuple(
            strip_spans(getattr(node, f.name)) for f in fields(node) if f.name != "span")
    return node
