"""Numeric ground truth: truncated theta_q sums, finite-field counts, residue-ring counts of t-adic sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .cpf import CPFunction
from .motfn import MotFunction
from .presburger import formula as F
from .presburger.linear import LinearFunction
from .summation import is_integrable
from .valfield import (AcAtom, DAnd, DConst, DNot, DOr, OrdAtom, OrdCong, PointAtom, SeriesPoint, d_centers)


class DepthError(ValueError):
    """Truncation depth too small to decide the description on some residue ball."""


@dataclass
class OracleConfig:
    qs: tuple = (Fraction(2), Fraction(3))
    primes: tuple = (3, 5)
    box: int = 40
    depth: int = 6
    rtol: float = 1e-6
    max_box: int = 640

    def __post_init__(self):
        self.qs = tuple(Fraction(q) for q in self.qs)
        if any(q <= 1 for q in self.qs):
            raise ValueError("q values must exceed 1")
        if any(p > 101 or p < 2 for p in self.primes):
            raise ValueError("primes must lie in [2, 101]")


# --- vectorized evaluation of Presburger data -----------------------------------------

def _lin(f: LinearFunction, grid: Mapping[str, np.ndarray], shape) -> np.ndarray:
    out = np.full(shape, float(f.const))
    for v, c in f.coeffs:
        out = out + float(c) * grid[v]
    return out


def _lin_int(f: LinearFunction, grid, shape) -> np.ndarray:
    d, g = f.integer_form()
    out = np.full(shape, int(g.const), dtype=np.int64)
    for v, c in g.coeffs:
        out = out + int(c) * grid[v]
    return out, d


def _holds(f, grid, shape) -> np.ndarray:
    if f == F.TRUE:
        return np.ones(shape, dtype=bool)
    if f == F.FALSE:
        return np.zeros(shape, dtype=bool)
    if isinstance(f, (F.Le, F.Eq, F.Cong)):
        v, d = _lin_int(f.term, grid, shape)
        if isinstance(f, F.Le):
            return v <= 0
        if isinstance(f, F.Eq):
            return v == 0
        return (v % (f.n * d)) == 0 if d == 1 else (v % d == 0) & ((v // d) % f.n == 0)
    if isinstance(f, F.Not):
        return ~_holds(f.arg, grid, shape)
    if isinstance(f, F.And):
        out = np.ones(shape, dtype=bool)
        for a in f.args:
            out &= _holds(a, grid, shape)
        return out
    if isinstance(f, F.Or):
        out = np.zeros(shape, dtype=bool)
        for a in f.args:
            out |= _holds(a, grid, shape)
        return out
    # quantified supports: pointwise fallback
    names = sorted(grid)
    flat = [grid[n].ravel() for n in names]
    vals = [F.evaluate(f, {n: int(x[i]) for n, x in zip(names, flat)}) for i in range(flat[0].size)]
    return np.array(vals, dtype=bool).reshape(shape)


def theta_grid(phi: CPFunction, vars: Sequence[str], box: int, q, env: Mapping[str, int] | None = None):
    """theta_q(phi) on the cube [-box, box]^r as a float array."""
    axes = np.meshgrid(*[np.arange(-box, box + 1, dtype=np.int64)] * len(vars), indexing="ij")
    grid = dict(zip(vars, axes))
    shape = axes[0].shape if axes else ()
    for k, v in (env or {}).items():
        grid[k] = np.full(shape, int(v), dtype=np.int64)
    q = float(q)
    out = np.zeros(shape)
    for t in phi.terms:
        mask = _holds(t.support, grid, shape)
        if not mask.any():
            continue
        val = np.full(shape, float(t.coeff.eval_theta(Fraction(q))))
        for f in t.factors:
            val = val * _lin(f, grid, shape)
        e = _lin(t.exp, grid, shape)
        with np.errstate(over="ignore"):
            val = val * np.power(q, np.where(mask, e, 0.0))
        out = out + np.where(mask, val, 0.0)
    return out


def _shells(arr: np.ndarray, box: int) -> np.ndarray:
    """Sum of arr over each sup-norm shell 0..box."""
    r = len(arr.shape)
    idx = np.meshgrid(*[np.abs(np.arange(-box, box + 1))] * r, indexing="ij")
    norm = np.maximum.reduce(idx) if r > 1 else idx[0]
    return np.bincount(norm.ravel(), weights=arr.ravel(), minlength=box + 1)


@dataclass
class SumResult:
    value: float
    tail: float
    box: int
    partial: list = field(default_factory=list)
    diverging: bool = False

    def to_json(self) -> dict:
        return {"value": self.value, "tail": self.tail, "box": self.box,
                "partial": self.partial, "diverging": self.diverging}


def _decay(phi: CPFunction, vars: Sequence[str]) -> tuple[float | None, int]:
    """(slowest L-exponent slope per unit of sup norm, polynomial degree) over phi's cells.

    The slope is None when every cell is bounded. Congruence steps and the number
    of coordinates dilate the parametrization, so the slope is divided by both.
    """
    rep = is_integrable(phi, vars)
    rate = rep.slowest_rate()
    if rate is None:
        return None, 0
    step = 1
    for t in phi.terms:
        for a in F.atoms(t.support):
            if isinstance(a, F.Cong):
                step = math.lcm(step, a.n)
    deg = max((len(t.factors) for t in phi.terms), default=0) + len(vars) - 1
    return float(rate) / (step * len(vars)), deg


def _tail(last_shell: float, box: int, slope: float, deg: int, q: float) -> float:
    """Sum over n > box of last_shell * (n/box)^deg * q^(slope (n - box))."""
    r = q ** slope
    if r >= 1:
        return math.inf
    total, k = 0.0, 1
    while True:
        term = last_shell * ((box + k) / box) ** deg * r ** k
        total += term
        if term <= total * 1e-16 or k > 100000:
            return total
        k += 1


def numeric_sum(phi: CPFunction, vars: Sequence[str], q, cfg: OracleConfig | None = None,
                env: Mapping[str, int] | None = None, probe: bool = False) -> SumResult:
    """Truncated sum of theta_q(phi) over Z^r with a tail bound from the slowest exponent.

    The radius starts where the slowest decaying cell exponent has fallen below the
    tolerance and doubles until the extrapolated tail is below rtol times the value.
    In probe mode the partial sums of |phi| over boxes of radius 4, 8, 16, ... are
    returned instead.
    """
    cfg = cfg or OracleConfig()
    vars = list(vars)
    if probe:
        radii = [4, 8, 16, 32] if len(vars) > 1 else [4, 8, 16, 32, 64]
        arr = np.abs(theta_grid(phi, vars, radii[-1], q, env))
        cum = np.cumsum(_shells(arr, radii[-1]))
        partial = [float(cum[b]) for b in radii]
        inc = np.diff(partial)
        diverging = bool(inc[-1] > 0 and inc[-1] >= 0.5 * inc[-2])
        return SumResult(partial[-1], math.inf, radii[-1], partial, diverging)
    qf = float(q)
    base = phi.subs({k: LinearFunction.constant(v) for k, v in (env or {}).items()}) if env else phi
    slope, deg = _decay(base, vars)
    limit = cfg.max_box if len(vars) == 1 else cfg.max_box // 8
    box = cfg.box if len(vars) == 1 else max(8, cfg.box // 2)
    if slope is not None and slope < 0:
        target = math.log(cfg.rtol * 1e-3)
        while box < limit and deg * math.log(box) + slope * box * math.log(qf) > target:
            box *= 2
    while True:
        arr = theta_grid(phi, vars, box, q, env)
        total = math.fsum(arr.ravel())
        last = float(_shells(np.abs(arr), box)[-1])
        if last == 0:
            tail = 0.0 if slope is None or slope < 0 else math.inf
        elif slope is None:
            tail = math.inf  # bounded support reaching the box edge: enlarge
        else:
            tail = _tail(last, box, slope, deg, qf)
        if tail <= cfg.rtol * 1e-3 * max(abs(total), 1e-300) or box >= limit:
            return SumResult(total, tail, box)
        box *= 2


# --- finite fields and residue rings -----------------------------------------------

def theta_counts(m: MotFunction, p: int, zenv: Mapping[str, int] | None = None) -> Fraction:
    """L -> p, classes -> F_p point counts."""
    return m.eval_counts(p, zenv)


def elliptic_affine_count(p: int, a: int = 0, b: int = 1, c: int = 2) -> int:
    """#{(x, y) in F_p^2 : y^2 = (x - a)(x - b)(x - c)} by exhaustion."""
    xs = np.arange(p)
    rhs = (xs - a) * (xs - b) % p * (xs - c) % p
    sq = np.bincount((xs * xs) % p, minlength=p)
    return int(sq[rhs].sum())


def _trunc_mul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Product in F_p[t]/t^N of digit arrays of shape (N, ...)."""
    N = A.shape[0]
    out = np.zeros_like(A)
    for i in range(N):
        for j in range(N - i):
            out[i + j] = (out[i + j] + A[i] * B[j]) % p
    return out


def _codes(D: np.ndarray, p: int) -> np.ndarray:
    w = p ** np.arange(D.shape[0], dtype=np.int64)
    return (D * w[:, None]).sum(axis=0)


def hyperelliptic_volumes(g: Sequence[int], p: int, N: int) -> dict[int, Fraction]:
    """Volumes of {x^2 = g(y), x, y in F_p[[t]]} split by y mod t.

    Counts solutions modulo t^N, normalized by p^N; exact for smooth curves.
    """
    Y = _digits(p, 0, N)
    # g(y) by Horner
    G = np.zeros_like(Y)
    for c in reversed(list(g)):
        G = _trunc_mul(G, Y, p)
        G[0] = (G[0] + c) % p
    sq = np.bincount(_codes(_trunc_mul(Y, Y, p), p), minlength=p ** N)
    per_y = sq[_codes(G, p)]
    out = {}
    for r in range(p):
        out[r] = Fraction(int(per_y[Y[0] == r].sum()), p ** N)
    return out


def _digits(p: int, lo: int, N: int) -> np.ndarray:
    """All residues sum_{lo <= i < N} x_i t^i as a (N - lo, p^(N - lo)) digit array."""
    n = N - lo
    idx = np.arange(p ** n, dtype=np.int64)
    return np.stack([(idx // p ** k) % p for k in range(n)]) if n else np.zeros((0, 1), dtype=np.int64)


def _center_digits(c: SeriesPoint, p: int, lo: int, N: int) -> np.ndarray:
    out = np.zeros(N - lo, dtype=np.int64)
    for e, a in c.coeffs:
        if a.denominator != 1:
            raise ValueError(f"center {c} has a non-integral coefficient")
        if e < lo:
            raise ValueError(f"center {c} has an exponent below {lo}")
        if e < N:
            out[e - lo] = int(a) % p
    return out


def _kleene(d, info, p, N, shape):
    """(definitely true, definitely false) masks."""
    if isinstance(d, DConst):
        one = np.full(shape, d.value)
        return one, ~one
    if isinstance(d, DNot):
        t, f = _kleene(d.arg, info, p, N, shape)
        return f, t
    if isinstance(d, (DAnd, DOr)):
        parts = [_kleene(a, info, p, N, shape) for a in d.args]
        ts = [x[0] for x in parts]
        fs = [x[1] for x in parts]
        if isinstance(d, DAnd):
            return np.logical_and.reduce(ts), np.logical_or.reduce(fs)
        return np.logical_or.reduce(ts), np.logical_and.reduce(fs)
    o, ac, big = info[d.center]
    if isinstance(d, PointAtom):
        # a single point carries no volume
        z = np.zeros(shape, dtype=bool)
        return z, ~z
    if isinstance(d, OrdAtom):
        if not d.value.is_constant():
            raise ValueError("orders must be integers for residue counting")
        v = int(d.value.const)
        op = {">=": np.greater_equal, ">": np.greater, "=": np.equal,
              "<=": np.less_equal, "<": np.less, "!=": np.not_equal}[d.op]
        known = op(o, v)
        # on a ball around the center ord ranges over [N, inf]
        if v < N:
            big_val = d.op in (">=", ">", "!=")
        elif v == N and d.op == ">=":
            big_val = True
        else:
            big_val = None
        t = np.where(big, big_val is True, known)
        f = np.where(big, big_val is False, ~known)
        return t, f
    if isinstance(d, OrdCong):
        known = (o - d.residue) % d.modulus == 0
        return known & ~big, ~known & ~big
    if isinstance(d, AcAtom):
        if not d.value.is_constant():
            raise ValueError("angular components must be constants for residue counting")
        xi = d.value.constant_value()
        if xi.denominator % p == 0:
            raise ValueError(f"constant {xi} is not p-integral")
        target = int(xi.numerator * pow(xi.denominator, -1, p)) % p
        known = ac == target
        if d.negated:
            known = ~known
        return known & ~big, ~known & ~big
    raise TypeError(d)


def padic_measure(desc, p: int, N: int, lo: int = 0) -> Fraction:
    """Normalized count of residues of t^lo F_p[[t]] mod t^N whose ball lies in the set.

    Each residue ball has volume p^-N. Points x = c are ignored (volume zero).
    Raises DepthError when some ball is neither inside nor outside the set.
    """
    if N <= lo:
        raise ValueError("depth must exceed the lowest exponent")
    X = _digits(p, lo, N)
    shape = X.shape[1:]
    info = {}
    for c in d_centers(desc):
        D = (X - _center_digits(c, p, lo, N)[:, None]) % p
        nz = D != 0
        big = ~nz.any(axis=0)
        first = np.argmax(nz, axis=0)
        ac = np.take_along_axis(D, first[None, :], axis=0)[0]
        info[c] = (first + lo, ac, big)
    t, f = _kleene(desc, info, p, N, shape)
    if not (t | f).all():
        raise DepthError(f"depth {N} does not decide the description at p={p}")
    return Fraction(int(t.sum()), p ** N)


def graph_pair_measure(a: SeriesPoint, b: SeriesPoint, p: int, N: int, e: int) -> Fraction:
    """#{(y mod t^N, (a y + b) mod t^N) : ord y >= e} / p^N by exhaustion."""
    a, b = SeriesPoint.of(a), SeriesPoint.of(b)
    k = a.ord()
    if not a.is_monomial():
        raise ValueError("a must be a monomial")
    if e + k < 0 or not b.integral():
        raise ValueError("the graph must lie over integral z")
    M = N + max(0, -k)
    Y = _digits(p, e, M)
    u = int(a.ac().numerator * pow(a.ac().denominator, -1, p)) % p
    bd = _center_digits(b, p, 0, N)
    # z_i = u * y_{i-k} + b_i for 0 <= i < N
    Z = np.zeros((N, Y.shape[1]), dtype=np.int64)
    for i in range(N):
        j = i - k
        if e <= j < M:
            Z[i] = (u * Y[j - e] + bd[i]) % p
        else:
            Z[i] = bd[i]
    ylow = Y[: max(0, N - e)]
    keys = np.concatenate([ylow, Z]) if ylow.size else Z
    pairs = np.unique(keys.T, axis=0)
    return Fraction(len(pairs), p ** N)


# --- reports -------------------------------------------------------------------------

def _num(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(float(x))


def report(target: str, method: str, parameters: Mapping, expected, observed, tol: float | None = None) -> dict:
    if tol is None:
        ok = Fraction(expected) == Fraction(observed)
    else:
        e, o = float(expected), float(observed)
        ok = abs(e - o) <= tol * max(abs(e), abs(o), 1e-300)
    return {"target": target, "method": method, "parameters": dict(parameters),
            "expected": _num(expected), "observed": _num(observed), "verdict": "match" if ok else "mismatch"}


def check(target: str, symbolic: MotFunction, numeric: Callable[[int], Fraction],
          cfg: OracleConfig | None = None, zenv: Mapping[str, int] | None = None) -> list[dict]:
    """Compare theta_p(symbolic) with a numeric computation at each configured prime."""
    cfg = cfg or OracleConfig()
    out = []
    for p in cfg.primes:
        obs = theta_counts(symbolic, p, zenv)
        exp = numeric(p)
        out.append(report(target, "residue-count", {"p": p, "depth": cfg.depth, **(zenv or {})}, exp, obs))
    return out


def check_sum(target: str, phi: CPFunction, vars: Sequence[str], symbolic: CPFunction,
              cfg: OracleConfig | None = None, env: Mapping[str, int] | None = None) -> list[dict]:
    """Compare theta_q of a closed-form sum with the truncated numeric sum at each configured q."""
    cfg = cfg or OracleConfig()
    out = []
    for q in cfg.qs:
        res = numeric_sum(phi, vars, q, cfg, env)
        obs = symbolic.eval_theta(env or {}, q)
        r = report(target, "truncated-sum", {"q": str(q), "box": res.box, **(env or {})}, res.value, obs, cfg.rtol)
        out.append(r)
    return out


def all_match(reports: Iterable[dict]) -> bool:
    return all(r["verdict"] == "match" for r in reports)
