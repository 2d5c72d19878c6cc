import pytest

from motint.cpf import CPFunction
from motint.motnum import L, MotNum
from motint.presburger import conj, ge, le, var
from motint.series import coeff_extract, in_sigma, mellin, sum_poly_geometric
from motint.summation import delta_values

i, j = var("i"), var("j")


def test_geometric_closed_forms():
    assert str(sum_poly_geometric([1], 0)) == "1 / (1 - T)"
    assert str(sum_poly_geometric([0, 1], 0)) == "T / (1 - T)^2"
    assert delta_values([0, 0, 1], 2) == [4, 5, 2]
    m = sum_poly_geometric([0, 0, 1], 2)
    for n in range(20):
        assert m.coefficient([n]) == (n * n if n >= 2 else 0)


def test_mellin_examples():
    assert mellin(CPFunction.const(1, ge(i, 0))) == sum_poly_geometric([1], 0)
    up = mellin(CPFunction.L_power(i, ge(i, 0)))
    assert str(up) == "1 / (1 - L*T)" and not in_sigma(up)
    down = mellin(CPFunction.L_power(-i, ge(i, 0)))
    assert str(down) == "1 / (1 - L^-1*T)" and in_sigma(down)


def test_coeff_extract_examples():
    assert coeff_extract(sum_poly_geometric([1], 0), [5]).total() == 1
    assert coeff_extract(sum_poly_geometric([0, 1], 0), [4]).total() == 4
    assert coeff_extract(mellin(CPFunction.L_power(-i, ge(i, 0))), [3]).total() == L ** -3


def test_negative_sector():
    phi = CPFunction.term(2, [i], i, le(i, -1))
    m = mellin(phi)
    for n in range(-8, 3):
        assert m.coefficient([n]) == phi.value({"i": n})
    assert "(1/T)" in str(m)


def test_two_variable_roundtrip():
    phi = CPFunction.term(1, [i + j], -i - 2 * j, conj(ge(j, 0), ge(i, j))) + CPFunction.const(3, conj(ge(i, -2), le(i, 0), le(j, 1), ge(j, -1)))
    m = mellin(phi, ["i", "j"])
    assert m.in_sigma()
    for a in range(-5, 6):
        for b in range(-5, 6):
            assert m.coefficient([a, b]) == phi.value({"i": a, "j": b})


def test_sum_at_one():
    m = mellin(CPFunction.term(L - 1, [], -i - 1, ge(i, 1)))
    assert m.at_one() == L ** -1


def test_three_variables_rejected():
    k = var("k")
    with pytest.raises(NotImplementedError):
        mellin(CPFunction.const(1, conj(ge(i, 0), ge(j, 0), ge(k, 0))), ["i", "j", "k"])


def test_json_roundtrip():
    from motint.series import RationalSeries

    m = mellin(CPFunction.term(1, [i], -i, ge(i, -2)))
    assert RationalSeries.from_json(m.to_json()) == m
