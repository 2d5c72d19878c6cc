import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from motint.cpf import CPFunction
from motint.motnum import L, MotNum
from motint.presburger import conj, cong, ge, le, var
from motint.sampling import rand_cpf
from motint.summation import NotIntegrable, is_integrable, mu_sum, power_sum_closed

i, j, s = var("i"), var("j"), var("s")


def test_integrability_examples():
    assert is_integrable(CPFunction.L_power(-i, ge(i, 0)))
    assert not is_integrable(CPFunction.L_power(i, ge(i, 0)))
    assert is_integrable(CPFunction.term(1, [i], -i, ge(i, 1)))


def test_mu_sum_examples():
    assert mu_sum(CPFunction.L_power(-i, ge(i, 1))).total() == MotNum.of(1) / (L - 1)
    assert mu_sum(CPFunction.term(L - 1, [], -i - 1, ge(i, 1))).total() == L ** -1
    count = mu_sum(CPFunction.const(1, conj(ge(i, 0), le(i, s), ge(s, 0))), ["i"])
    for k in range(0, 12):
        assert count.value({"s": k}) == k + 1
    assert count.value({"s": -1}) == 0


def test_not_integrable_reports_term_and_direction():
    phi = CPFunction.L_power(i - j, conj(ge(i, 0), ge(j, 0)))
    with pytest.raises(NotIntegrable) as err:
        mu_sum(phi)
    assert err.value.direction == {"i": 1, "j": 0}
    assert "L^(i - j)" in err.value.term


def test_flat_direction_is_not_integrable():
    assert not is_integrable(CPFunction.const(1, ge(i, 0)))
    assert not is_integrable(CPFunction.L_power(-i, conj(ge(i, 0), ge(j, 0))), ["i", "j"])


def test_power_sums_against_enumeration():
    assert power_sum_closed(2, 1, 2).value({"a": 7}) == 84
    for b, c, n in [(0, 0, 1), (1, 0, 1), (2, 1, 2), (3, 2, 3), (1, 1, 4)]:
        f = power_sum_closed(b, c, n)
        for a in range(0, 25):
            expected = sum(k ** b for k in range(0, a + 1) if k % n == c)
            assert f.value({"a": a}) == expected


def test_injection_invariance():
    phi = CPFunction.term(L + 1, [i], -2 * i, ge(i, -2)) + CPFunction.L_power(-i, conj(ge(i, 0), cong(i, 1, 3)))
    moved = phi.subs({"i": i - 7})  # push forward along i -> i + 7
    assert mu_sum(phi).total() == mu_sum(moved).total()


def test_monotone_integrability(rng):
    for _ in range(20):
        f = rand_cpf(rng, 2, True)
        g = CPFunction(f.terms[:1])
        assert is_integrable(f, ["i", "j"]) and is_integrable(g, ["i", "j"])


def test_parametric_geometric_tail():
    phi = CPFunction.L_power(-i, conj(ge(i, s), ge(s, 0)))
    out = mu_sum(phi, ["i"])
    for k in range(0, 6):
        assert out.value({"s": k}) == L ** -k / (1 - L ** -1)


@settings(max_examples=40)
@given(st.integers(-3, 3), st.integers(1, 3), st.integers(0, 2))
def test_theta_of_closed_form_matches_partial_sums(a, rate, deg):
    phi = CPFunction.term(1, [i] * deg, -rate * i, ge(i, a))
    total = mu_sum(phi).total()
    q = Fraction(3)
    partial = sum(Fraction(k) ** deg * q ** (-rate * k) for k in range(a, a + 200))
    assert abs(float(total.eval_theta(q) - partial)) < 1e-30


def test_two_variable_order_independence(rng):
    for _ in range(10):
        phi = rand_cpf(rng, 2, True)
        assert mu_sum(phi, ["i", "j"]).total() == mu_sum(phi, ["j", "i"]).total()


def test_finite_sums_exact():
    phi = CPFunction.term(1, [i, j], i, conj(ge(i, 0), le(i, 3), ge(j, i), le(j, 3)))
    expected = MotNum()
    for a, b in itertools.product(range(4), repeat=2):
        if b >= a:
            expected = expected + L ** a * (a * b)
    assert mu_sum(phi).total() == expected
