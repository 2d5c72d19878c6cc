"""End-to-end acceptance checks, one test per criterion.

Each test reports a PASS/FAIL line that is printed in the terminal summary.
"""
import itertools
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from motint.cli import parse_oracle, run_text
from motint.cpf import CPFunction
from motint.motfn import MotFunction, poincare_series
from motint.motnum import L, MotNum
from motint.oracle import DepthError, graph_pair_measure, numeric_sum, padic_measure, theta_counts
from motint.presburger import eq, var
from motint.sampling import (rand_affine, rand_annulus, rand_cpf, rand_int_poly, rand_integer_description,
                             rand_motnum)
from motint.series import coeff_extract, in_sigma, mellin, sum_poly_geometric
from motint.summation import is_integrable, mu_sum
from motint.valfield import (change_of_variable, d_and, graph_ordjac, graph_pushforward, measure,
                             ord_atom, ordjac)

SCRIPTS = Path(__file__).parents[1] / "scripts"
QS = (Fraction(2), Fraction(3))


def _run(name, oracle=None):
    out = []
    t = time.perf_counter()
    code, ev = run_text((SCRIPTS / name).read_text(), oracle=oracle, out=out.append)
    return code, ev, time.perf_counter() - t


def test_c01_elliptic(record):
    code, ev, dt = _run("elliptic.mot", parse_oracle(["p=5,7"]))
    got = {k: str(ev.env[k].value) for k in ("A", "B0", "B1", "B2", "total")}
    want = {"A": "([E] - 3) * L^-1", "B0": "L^-1", "B1": "L^-1", "B2": "L^-1", "total": "[E] * L^-1"}
    curve = [c for c in ev.checks if c.method == "curve"]
    primes = {r["parameters"]["p"] for c in curve for r in c.rows}
    ok = (code == 0 and got == want and len(curve) == 5 and all(c.ok and not c.skipped for c in curve)
          and primes == {5, 7} and dt < 1)
    record(ok, f"total = {got['total']}, curve checks at p=5,7 {'match' if code == 0 else 'fail'}, {dt:.2f}s")
    assert ok


def test_c02_balls(record):
    t = time.perf_counter()
    code, ev, _ = _run("ball.mot")
    vals = [ev.env[k].value for k in ("ball", "ball1", "ball2", "ball4")]
    fam = ev.env["ball3"].value
    gammas = [str(fam.value({"g": g})) for g in range(1, 11)]
    dt = time.perf_counter() - t
    ok = code == 0 and all(v == MotFunction.of(L ** -1) for v in vals) and set(gammas) == {"L^-1"} and dt < 1
    record(ok, f"4 presentations and gamma=1..10 give L^-1, {dt:.2f}s")
    assert ok


def test_c03_trl(record):
    rng = random.Random(3)
    bad = 0
    for _ in range(200):
        P, a = rand_int_poly(rng), rng.randint(0, 5)
        m = sum_poly_geometric(P, a)
        for n in range(25):
            direct = sum(c * n ** e for e, c in enumerate(P)) if n >= a else 0
            bad += m.coefficient([n]) != direct
    record(bad == 0, f"200 polynomials x 25 coefficients, {bad} mismatches")
    assert bad == 0


def test_c04_theta_and_positivity(record):
    rng = random.Random(4)
    bad = 0
    one = MotNum((1,))
    for _ in range(500):
        a, b = rand_motnum(rng), rand_motnum(rng)
        for q in (Fraction(2), Fraction(3), Fraction(7, 2)):
            ta, tb = a.eval_theta(q), b.eval_theta(q)
            bad += (a + b).eval_theta(q) != ta + tb
            bad += (a * b).eval_theta(q) != ta * tb
            bad += (a - b).eval_theta(q) != ta - tb
            bad += one.eval_theta(q) != 1
    accept = [L ** i for i in range(-3, 4)]
    accept += [L ** i - L ** j for i in range(-2, 4) for j in range(-3, i)]
    accept += [MotNum.inv_one_minus_Linv(i) for i in range(1, 4)]
    rejected = [x for x in accept if not x.is_nonneg()]
    w = (L - 2).nonneg_witness()
    witness_ok = w is not None and w > 1 and (L - 2).eval_theta(w) < 0
    ok = bad == 0 and not rejected and witness_ok
    record(ok, f"500 pairs at q=2,3,7/2: {bad} failures; {len(accept)} accepted; L - 2 rejected at q={w}")
    assert ok


@pytest.fixture(scope="module")
def batch():
    rng = random.Random(5)
    good = [(rand_cpf(rng, 1 + k % 2), ["i", "j"][: 1 + k % 2]) for k in range(100)]
    bad = [(rand_cpf(rng, 1 + k % 2, integrable=False), ["i", "j"][: 1 + k % 2]) for k in range(100)]
    return good, bad


def test_c05_summation_oracle(record, batch):
    good, bad = batch
    t = time.perf_counter()
    worst, misses = 0.0, 0
    for phi, vs in good:
        closed = mu_sum(phi, vs)
        for q in QS:
            want = float(closed.eval_theta({}, q))
            got = numeric_sum(phi, vs, q).value
            err = abs(want - got) / max(abs(want), 1e-300)
            worst = max(worst, err)
            misses += err > 1e-6
    rejected = growing = 0
    for phi, vs in bad:
        rejected += not is_integrable(phi, vs)
        res = numeric_sum(phi, vs, 2, probe=True)
        growing += res.diverging
    dt = time.perf_counter() - t
    ok = misses == 0 and rejected == 100 and growing == 100 and dt < 30
    record(ok, f"max rel err {worst:.1e}; rejected {rejected}/100, growing {growing}/100; {dt:.1f}s")
    assert ok


def test_c06_mellin(record, batch):
    good, bad = batch
    disagree = mismatched = 0
    for phi, vs in good + bad:
        m = mellin(phi, vs)
        disagree += bool(is_integrable(phi, vs)) != in_sigma(m)
        for pt in itertools.product(range(-5, 5), repeat=len(vs)):
            if coeff_extract(m, pt).value() != phi.value(dict(zip(vs, pt))):
                mismatched += 1
    ok = disagree == 0 and mismatched == 0
    record(ok, f"integrable vs Sigma: {disagree} disagreements; box round-trip: {mismatched} mismatches")
    assert ok


def test_c07_fubini(record):
    rng = random.Random(7)
    bad = 0
    for _ in range(50):
        phi = rand_cpf(rng, 2)
        ij = mu_sum(mu_sum(phi, ["i"]), ["j"]).value()
        ji = mu_sum(mu_sum(phi, ["j"]), ["i"]).value()
        both = mu_sum(phi, ["i", "j"]).value()
        bad += not (ij == ji == both)
    record(bad == 0, f"50 two-block sums, {bad} disagreements")
    assert bad == 0


def test_c08_change_of_variable(record):
    rng = random.Random(8)
    verdicts = []
    for _ in range(20):
        desc, _, _ = rand_annulus(rng)
        verdicts.append(change_of_variable(rand_affine(rng), desc)["verdict"])
    chain = sum(ordjac(f.compose(g)) == ordjac(f) + ordjac(g)
                for f, g in ((rand_affine(rng), rand_affine(rng)) for _ in range(20)))
    ok = verdicts.count("equal") == 20 and chain == 20
    record(ok, f"cv1 equal on {verdicts.count('equal')}/20 annuli; chain rule {chain}/20")
    assert ok


def test_c09_annulus_and_graph(record):
    rng = random.Random(9)
    annuli = 0
    for _ in range(20):
        desc, _, alpha = rand_annulus(rng)
        annuli += measure(desc) == MotFunction.of(L ** (-alpha - 1))
    graphs = 0
    for _ in range(20):
        f = rand_affine(rng)
        k = f.a.ord()
        push = graph_pushforward(f)
        e = max(0, -k)
        same = all(graph_pair_measure(f.a, f.b, p, 4, e) == theta_counts(push * MotFunction.of(L ** -e), p)
                   for p in (5, 7))
        inverse = graph_ordjac(f).const == max(0, ordjac(f.inverse()).const)
        graphs += same and inverse
    ok = annuli == 20 and graphs == 20
    record(ok, f"annuli {annuli}/20 give L^(-alpha-1); graphs {graphs}/20 match residue counts")
    assert ok


def test_c10_padic(record):
    rng = random.Random(10)
    matched = resampled = 0
    while matched < 30:
        d = rand_integer_description(rng)
        try:
            numeric = {p: padic_measure(d, p, 8) for p in (3, 5)}
        except DepthError:
            resampled += 1
            continue
        m = measure(d)
        if all(theta_counts(m, p) == numeric[p] for p in (3, 5)):
            matched += 1
        else:
            break
    ok = matched == 30
    record(ok, f"{matched}/30 descriptions match at p=3,5 depth 8 ({resampled} resampled for depth)")
    assert ok


def test_c11_poincare(record):
    m, n = var("m"), var("n")
    slices = measure(d_and(ord_atom(0, ">=", 0), ord_atom(0, "=", m)))
    fam = slices * MotFunction.of(CPFunction.const(1, eq(n, 2 * m)))
    P = poincare_series(fam, "n")
    reindexed = fam.push_z(["m"]).normalize()
    (gen, _), f = next(iter(reindexed.terms.items()))
    M = mellin(f, ["n"])
    coeffs = all(P.series().coefficient([k]) == ((1 - L ** -1) * L ** (-k // 2) if k % 2 == 0 else 0)
                 for k in range(12))
    ok = str(P) == "(1 - L^-1) / (1 - L^-1*T^2)" and P == M and coeffs
    record(ok, f"P = {P}; mellin of the reindexed function agrees: {P == M}")
    assert ok
