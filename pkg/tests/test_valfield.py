from fractions import Fraction
from pathlib import Path

import pytest

from motint.cli import run_text
from motint.motfn import MotFunction
from motint.motnum import L
from motint.oracle import DepthError, padic_measure
from motint.presburger import var
from motint.presburger.linear import LinearFunction
from motint.sampling import rand_affine, rand_annulus, rand_integer_description
from motint.valfield import (DTRUE, AffineMap, OrdCong, PointAtom, SeriesPoint, annulus_decompose,
                             change_of_variable, d_and, d_or, graph_ordjac, graph_pushforward,
                             integrate_0cell, measure, ord_atom, ordjac, point_cell)

s = var("s")
k = LinearFunction.constant


def mf(x):
    return MotFunction.of(x)


def test_ball_plus_origin():
    d = d_or(ord_atom(0, ">=", 1), PointAtom(SeriesPoint()))
    cells = annulus_decompose(d, "x")
    assert sorted(c.kind for c in cells) == [0, 1]
    assert measure(d) == mf(L ** -1)


def test_three_centers_one_cell():
    d = d_and(ord_atom(0, "=", 0), ord_atom(1, "=", 0), ord_atom(2, "=", 0))
    cells = annulus_decompose(d, "x")
    assert len(cells) == 1
    assert measure(d) == mf(1 - 3 * L ** -1)


def test_orders():
    assert measure(ord_atom(0, "=", 3)) == mf(L ** -3 - L ** -4)
    even = d_and(ord_atom(0, ">", 0), OrdCong(SeriesPoint(), 0, 2))
    assert str(measure(even)) == "(1 - L^-1) / (L^2 - 1)"
    assert str(measure(ord_atom(0, ">=", -s))) == "L^s"


def test_annulus_measure(rng):
    for _ in range(20):
        d, c, alpha = rand_annulus(rng)
        assert measure(d) == mf(L ** (-alpha - 1))


def test_measure_additive(rng):
    for _ in range(10):
        a, _, _ = rand_annulus(rng)
        b, _, _ = rand_annulus(rng)
        both = measure(d_and(a, b))
        assert measure(d_or(a, b)) + both == measure(a) + measure(b)


def test_presentations_agree():
    code, ev = run_text((Path(__file__).parents[1] / "scripts" / "ball.mot").read_text(), out=lambda _: None)
    assert code == 0
    for name in ("ball", "ball1", "ball2", "ball4"):
        assert ev.env[name].value == mf(L ** -1)
    fam = ev.env["ball3"].value
    for g in range(1, 11):
        assert str(fam.value({"g": g})) == "L^-1"


def test_padic_values():
    assert padic_measure(ord_atom(0, ">=", 1), 5, 4) == Fraction(1, 5)
    assert padic_measure(ord_atom(0, "=", 0), 3, 3) == Fraction(2, 3)
    assert padic_measure(DTRUE, 3, 3) == 1


def test_padic_depth_stable(rng):
    seen = 0
    while seen < 8:
        d = rand_integer_description(rng)
        try:
            a, b = padic_measure(d, 3, 6), padic_measure(d, 3, 8)
        except DepthError:
            continue
        assert a == b
        seen += 1


def test_padic_matches_measure(rng):
    seen = 0
    while seen < 8:
        d = rand_integer_description(rng)
        try:
            want = padic_measure(d, 5, 8)
        except DepthError:
            continue
        assert measure(d).total().number().eval_theta(5) == want
        seen += 1


def test_ordjac():
    assert ordjac(AffineMap(SeriesPoint.t(2), 1)) == k(2)
    assert ordjac(AffineMap(3)) == k(0)
    assert ordjac(AffineMap(SeriesPoint.t(3)).compose(AffineMap(SeriesPoint.t(1)))) == k(4)


def test_ordjac_additive(rng):
    for _ in range(20):
        f, g = rand_affine(rng), rand_affine(rng)
        assert ordjac(f.compose(g)) == ordjac(f) + ordjac(g)
        assert ordjac(f.inverse()) == -ordjac(f)


@pytest.mark.parametrize("f,d", [
    (AffineMap(SeriesPoint.t(1)), ord_atom(0, ">=", 0)),
    (AffineMap(1, 1), ord_atom(0, "=", 2)),
    (AffineMap(3), ord_atom(0, ">=", 0)),
])
def test_change_of_variable(f, d):
    assert change_of_variable(f, d)["verdict"] == "equal"


def test_change_of_variable_random(rng):
    for _ in range(10):
        d, _, _ = rand_annulus(rng)
        assert change_of_variable(rand_affine(rng), d)["verdict"] == "equal"


def test_graph():
    f = AffineMap(SeriesPoint.t(-2), 1)
    assert graph_ordjac(f) == k(2)
    assert graph_pushforward(f) == mf(L ** 2)
    assert graph_ordjac(AffineMap(SeriesPoint.t(3))) == k(0)


def test_zero_cells():
    assert integrate_0cell(point_cell(5)) == mf(1)
    assert integrate_0cell(point_cell(5), MotFunction()) == MotFunction()
