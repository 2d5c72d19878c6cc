from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from motint.motnum import L, DomainError, MotNum, parse_motnum


def motnums():
    return st.builds(
        MotNum,
        st.lists(st.integers(-5, 5), min_size=1, max_size=4).map(tuple),
        st.integers(-3, 3),
        st.lists(st.tuples(st.integers(1, 3), st.just(1)), max_size=2).map(tuple),
    )


def test_ring_identities():
    assert (L - 1) + 1 == L
    assert (L - 1) * MotNum.inv_one_minus_Linv(1) == L
    assert L ** -1 * L ** -1 == L ** -2
    assert parse_motnum("(L^2 - 1)/(L - 1)") == L + 1


def test_theta_values():
    assert (L ** -1).eval_theta(2) == Fraction(1, 2)
    assert parse_motnum("1/(1 - L^-2)").eval_theta(2) == Fraction(4, 3)
    assert parse_motnum("L - 2").eval_theta(Fraction(3, 2)) == Fraction(-1, 2)


@pytest.mark.parametrize("q", [1, Fraction(1, 2), 0])
def test_theta_domain(q):
    with pytest.raises(DomainError):
        L.eval_theta(q)


def test_nonneg():
    assert parse_motnum("L^3 - L").is_nonneg()
    assert MotNum().is_nonneg()
    w = parse_motnum("L - 2").nonneg_witness()
    assert w is not None and w > 1
    assert parse_motnum("L - 2").eval_theta(w) < 0


def test_canonical_form_is_unique():
    a = MotNum((0, 0, 1, -1), 2, ((1, 1),))
    b = MotNum((-1,), 0)
    assert a == b
    assert a.num[0] != 0


def test_text_and_json_roundtrip():
    m = parse_motnum("(L^2 + 1)/(L - 1) - 3*L^-2")
    assert parse_motnum(str(m)) == m
    assert MotNum.from_json(m.to_json()) == m


def test_deg():
    assert parse_motnum("L^3 - L").deg_L() == 3
    assert parse_motnum("1/(1 - L^-1)").deg_L() == 0
    assert MotNum().deg_L() == float("-inf")


@settings(max_examples=150, deadline=None)
@given(motnums(), motnums(), st.sampled_from([2, 3, Fraction(7, 2)]))
def test_theta_is_a_ring_map(a, b, q):
    assert (a + b).eval_theta(q) == a.eval_theta(q) + b.eval_theta(q)
    assert (a * b).eval_theta(q) == a.eval_theta(q) * b.eval_theta(q)
    assert (-a).eval_theta(q) == -a.eval_theta(q)


@settings(max_examples=80, deadline=None)
@given(motnums())
def test_parse_of_str(a):
    assert parse_motnum(str(a)) == a
