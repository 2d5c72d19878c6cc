import itertools

from hypothesis import given, settings, strategies as st

from motint.presburger import (
    FALSE, TRUE, cell_decompose, conj, cong, disj, eq, evaluate, exists, forall, ge, gt, is_satisfiable,
    is_valid, le, lt, members, ne, neg, qe, var,
)
from motint.presburger.formula import from_json, to_json
from motint.presburger.linear import LinearFunction

x, y, s = var("x"), var("y"), var("s")


def holds_on(f, g, lo=-50, hi=50, name="x"):
    return all(evaluate(f, {name: k}) == evaluate(g, {name: k}) for k in range(lo, hi + 1))


def test_qe_examples():
    assert qe(exists("y", eq(x, y * 2))) == cong(x, 0, 2)
    assert qe(exists("y", conj(le(x, y), le(y, x)))) == TRUE
    band = exists("y", conj(le(y * 2, x), le(x, y * 2 + 1)))
    assert qe(band) == TRUE
    assert all(evaluate(band, {"x": k}) for k in range(-50, 51))


def test_qe_forall():
    f = forall("y", disj(ne(x, y * 3), ge(x, 0)))
    g = qe(f)
    assert holds_on(f, g, -30, 30)


def test_cell_decompose_examples():
    (c, _), = cell_decompose(ge(x, 0), ["x"])
    assert c.type_vector == (1,)
    cells = cell_decompose(conj(ge(x, 0), le(x, s)), ["s", "x"])
    assert [c.type_vector for c, _ in cells] == [(1, 1)]
    types = sorted(c.type_vector for c, _ in cell_decompose(disj(cong(x, 1, 2), eq(x, 4)), ["x"]))
    assert types == [(0,), (1,)]


def test_members_examples():
    assert members(cong(x, 0, 3), {"x": (0, 9)}) == [(0,), (3,), (6,), (9,)]
    assert members(FALSE, {"x": (0, 9)}) == []
    assert members(conj(ge(x, 2), le(x, 4)), {"x": (0, 9)}) == [(2,), (3,), (4,)]


def test_satisfiability():
    assert not is_satisfiable(conj(ge(x, 1), le(x * 2, 1)))
    assert is_satisfiable(conj(cong(x, 1, 2), cong(x, 2, 3)))
    assert not is_satisfiable(conj(cong(x, 1, 2), cong(x, 0, 4)))
    assert is_valid(disj(cong(x, 0, 2), cong(x, 1, 2)))


def test_linear_function_arithmetic():
    f = x * 2 + y - 3
    assert f.eval({"x": 2, "y": 1}) == 2
    assert f.subs({"y": x}) == x * 3 - 3
    assert LinearFunction.from_json(f.to_json()) == f


def test_json_roundtrip():
    f = disj(conj(ge(x, 0), cong(x + y, 1, 3)), neg(lt(y, 4)))
    assert from_json(to_json(f)) == f


# random quantifier-free formulas in x, y with small coefficients
coeff = st.integers(-3, 3)
terms = st.builds(lambda a, b, c: x * a + y * b + c, coeff, coeff, st.integers(-6, 6))
atoms = st.one_of(
    st.builds(le, terms, st.just(0)),
    st.builds(eq, terms, st.just(0)),
    st.builds(lambda t, n: cong(t, 0, n), terms, st.integers(2, 3)),
)
formulas = st.recursive(
    atoms,
    lambda sub: st.one_of(
        st.builds(lambda a, b: conj(a, b), sub, sub),
        st.builds(lambda a, b: disj(a, b), sub, sub),
        st.builds(neg, sub),
    ),
    max_leaves=4,
)


@settings(max_examples=60, deadline=None)
@given(formulas)
def test_qe_agrees_with_search(f):
    g = qe(exists("y", f))
    for k in range(-12, 13):
        expected = any(evaluate(f, {"x": k, "y": j}) for j in range(-60, 61))
        assert evaluate(g, {"x": k}) == expected


@settings(max_examples=60, deadline=None)
@given(formulas)
def test_cells_partition_the_set(f):
    cells = [c for c, _ in cell_decompose(f, ["x", "y"])]
    for a, b in itertools.product(range(-8, 9), repeat=2):
        env = {"x": a, "y": b}
        hits = sum(c.contains(env) for c in cells)
        assert hits == (1 if evaluate(f, env) else 0)


@settings(max_examples=40, deadline=None)
@given(formulas, terms)
def test_cells_make_functions_linear(f, t):
    for c, (g,) in cell_decompose(f, ["x", "y"], [t]):
        for a, b in itertools.product(range(-6, 7), repeat=2):
            env = {"x": a, "y": b}
            if c.contains(env):
                assert g.eval(env) == t.eval(env)
