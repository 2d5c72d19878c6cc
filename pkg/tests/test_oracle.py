import json
from fractions import Fraction

import pytest

from motint.cpf import CPFunction
from motint.motnum import L
from motint.oracle import (DepthError, OracleConfig, all_match, check_sum, elliptic_affine_count,
                           graph_pair_measure, hyperelliptic_volumes, numeric_sum, padic_measure, report)
from motint.presburger import conj, ge, le, var
from motint.summation import mu_sum
from motint.valfield import SeriesPoint, ord_atom

i, j = var("i"), var("j")
CUBIC = [0, 2, -3, 1]  # y (y - 1) (y - 2)


def test_geometric():
    res = numeric_sum(CPFunction.L_power(-i, ge(i, 1)), ["i"], 2)
    assert res.value == pytest.approx(1, rel=1e-9)
    assert res.tail < 1e-8


def test_finite_box():
    res = numeric_sum(CPFunction.const(1, conj(ge(i, 0), le(i, 3))), ["i"], 2)
    assert res.value == 4 and res.tail == 0


def test_two_dim():
    phi = CPFunction.L_power(-i - j, conj(ge(i, 0), ge(j, 0)))
    assert numeric_sum(phi, ["i", "j"], 3).value == pytest.approx(2.25, rel=1e-9)


def test_probe_diverges():
    res = numeric_sum(CPFunction.const(1, ge(i, 0)), ["i"], 2, probe=True)
    assert res.diverging
    assert res.partial == sorted(res.partial)
    conv = numeric_sum(CPFunction.L_power(-i, ge(i, 0)), ["i"], 2, probe=True)
    assert not conv.diverging


def test_check_sum_reports():
    phi = CPFunction.term(1, [i], -i, ge(i, 0))
    rows = check_sum("s", phi, ["i"], mu_sum(phi, ["i"]), OracleConfig(qs=(Fraction(2), Fraction(7, 2))))
    assert all_match(rows) and len(rows) == 2
    assert set(rows[0]) == {"target", "method", "parameters", "expected", "observed", "verdict"}
    json.dumps(rows)


def test_report_mismatch():
    assert report("x", "residue-count", {"p": 3}, Fraction(1, 3), Fraction(1, 9))["verdict"] == "mismatch"
    assert report("x", "residue-count", {"p": 3}, Fraction(1, 3), Fraction(1, 3))["verdict"] == "match"


def test_padic_ball():
    for p in (3, 5, 7):
        assert padic_measure(ord_atom(0, ">=", 1), p, 3) == Fraction(1, p)
        assert padic_measure(ord_atom(0, ">=", 1), p, 3) != (L ** -2).eval_theta(p)


def test_padic_too_shallow():
    with pytest.raises(DepthError):
        padic_measure(ord_atom(0, "=", 5), 3, 3)


def test_elliptic_counts():
    for p in (5, 7, 11):
        vols = hyperelliptic_volumes(CUBIC, p, 3)
        assert sum(vols.values()) == Fraction(elliptic_affine_count(p), p)
        # each branch point contributes p^-1
        for r in (0, 1, 2):
            assert vols[r] == Fraction(1, p)


def test_elliptic_brute_force():
    p = 5
    n = sum(1 for x in range(p) for y in range(p) if (x * x - y * (y - 1) * (y - 2)) % p == 0)
    assert elliptic_affine_count(p) == n


def test_graph_pairs():
    assert graph_pair_measure(SeriesPoint.t(1), SeriesPoint(), 3, 5, 2) == Fraction(1, 9)
    # a unit multiplier keeps the volume of the domain
    assert graph_pair_measure(SeriesPoint.of(2), SeriesPoint.of(1), 3, 4, 1) == Fraction(1, 3)
    # dividing by t stretches the image
    assert graph_pair_measure(SeriesPoint.t(-1), SeriesPoint(), 3, 4, 1) == Fraction(1, 1)
