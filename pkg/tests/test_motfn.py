import random

import pytest

from motint.cpf import CPFunction
from motint.groth import RuleTable, gm, make_generator, normalize
from motint.motfn import MotFunction, SignedMotFunction, poincare_series
from motint.motnum import L
from motint.polys import MPoly
from motint.presburger import FALSE, conj, eq, ge, le, var
from motint.sampling import rand_cpf
from motint.summation import NotIntegrable

i, j, m, n, s = (var(k) for k in "ijmns")
xi, eta = MPoly.var("xi"), MPoly.var("eta")


def test_pullback():
    phi = MotFunction.of(CPFunction.L_power(-i, ge(i, 0)))
    assert phi.pullback() == phi
    assert str(MotFunction.of(CPFunction.L_power(-i)).pullback({"i": j + 1})) == "L^(-j - 1)"
    cyl = MotFunction.tensor(gm("eta"), CPFunction.const(1, ge(s, 0))).pullback({"s": s})
    assert cyl.rvars() == {"eta"} and cyl.zvars() == {"s"}


def test_pullback_functorial():
    phi = MotFunction.of(CPFunction.term(L, [i], -2 * i, ge(i, 1)))
    f = {"i": j * 2 + 1}
    g = {"j": n - 3}
    once = phi.pullback({"i": (j * 2 + 1).subs(g)})
    assert once == phi.pullback(f).pullback(g)


def test_push_residue():
    assert MotFunction.of(1).push_residue(["eta"]) == MotFunction.of(L)
    assert MotFunction.of(1).push_residue([]) == MotFunction.of(1)
    fam = MotFunction.of(make_generator(("xi",), [xi ** 2 - 2 * eta], [eta]))
    assert fam.push_residue(["eta"]) == MotFunction.of(L - 1)


def test_push_residue_leak():
    bad = MotFunction.of(CPFunction.L_power(var("eta")))
    with pytest.raises(ValueError):
        bad.push_residue(["eta"])


def test_push_z():
    assert MotFunction.of(CPFunction.term(L - 1, [], -i - 1, ge(i, 1))).push_z(["i"]) == MotFunction.of(L ** -1)
    b = MotFunction.tensor(gm("eta"), CPFunction.L_power(-m - 1, ge(m, 1)))
    assert b.push_z(["m"]).push_residue(["eta"]) == MotFunction.of(L ** -1)
    assert MotFunction.of(CPFunction.const(1, conj(ge(i, 1), le(i, 3)))).push_z(["i"]) == MotFunction.of(3)
    with pytest.raises(NotIntegrable):
        MotFunction.of(CPFunction.L_power(i, ge(i, 0))).push_z(["i"])


def test_push_inclusion():
    phi = MotFunction.of(CPFunction.L_power(-i, ge(i, 0)))
    assert phi.push_inclusion(ge(i, 0)) == phi
    pt = phi.push_inclusion(eq(i, 2))
    assert pt.value({"i": 2}) == normalize(L ** -2) and pt.value({"i": 3}).is_zero()
    assert phi.push_inclusion(FALSE).is_zero()


def test_signed_functions():
    rules = RuleTable()
    E = normalize(rules.declare(make_generator(("xi", "eta"), [xi ** 2 - eta * (eta - 1) * (eta - 2)]), "E"), rules)
    phi = MotFunction.of(CPFunction.L_power(-i, ge(i, 0)))
    assert SignedMotFunction(phi, phi).collapse().is_zero()
    assert str(SignedMotFunction(MotFunction.of(E), 3)) == "[E] - 3"
    assert SignedMotFunction(L, L - 1).collapse() == MotFunction.of(1)
    assert SignedMotFunction(L, L - 1).compare(SignedMotFunction(1)) == "equal"
    assert SignedMotFunction(MotFunction.of(E), 3).compare(SignedMotFunction(MotFunction.of(E)), rules) == "unequal"
    inert = MotFunction.of(make_generator(("xi",), [xi ** 2 + eta]))
    assert SignedMotFunction(inert).compare(SignedMotFunction(0)) == "unknown"


def test_poincare():
    fam = MotFunction.of(CPFunction.term(1 - L ** -1, [], -m, conj(ge(m, 0), eq(n, 2 * m))))
    assert str(poincare_series(fam, "n")) == "(1 - L^-1) / (1 - L^-1*T^2)"
    assert str(poincare_series(MotFunction.of(CPFunction.L_power(-n, ge(n, 0))), "n")) == "1 / (1 - L^-1*T)"
    assert str(poincare_series(MotFunction(), "n")) == "0"


def test_grades_stay_apart():
    a = MotFunction.of(CPFunction.const(1), grade=0)
    b = MotFunction.of(CPFunction.const(1), grade=1)
    assert (a + b).grades() == [0, 1]
    assert (a + b).grade(1) == b.grade(1)


def test_json_roundtrip():
    phi = MotFunction.tensor(gm("eta"), CPFunction.term(L, [i], -i, ge(i, 0)), grade=1)
    assert MotFunction.from_json(phi.to_json()) == phi


def _mixed(rng: random.Random) -> MotFunction:
    gens = [gm("eta"), make_generator(("xi",), [xi ** 2 - eta]), make_generator((), [eta - 1]),
            make_generator(("xi",), [xi - eta * eta], [xi + 1])]
    out = MotFunction()
    for _ in range(rng.randint(1, 3)):
        out = out + MotFunction.tensor(rng.choice(gens), rand_cpf(rng, 1, True, terms=2))
    return out


def test_order_exchange(rng):
    for _ in range(30):
        phi = _mixed(rng)
        a = phi.push_residue(["eta"]).push_z(["i"])
        b = phi.push_z(["i"]).push_residue(["eta"])
        assert a == b


def test_projection_formula(rng):
    for _ in range(10):
        beta = MotFunction.of(rand_cpf(rng, 1, True, terms=2))
        alpha = MotFunction.of(CPFunction.term(L + 1, [s], -s, ge(s, 0)))
        lhs = (alpha.pullback({"s": s}) * beta).push_z(["i"])
        assert lhs == alpha * beta.push_z(["i"])
        res = MotFunction.tensor(gm("eta"), CPFunction.const(1))
        assert (alpha * res).push_residue(["eta"]) == alpha * res.push_residue(["eta"])


def test_blockwise_fubini(rng):
    for _ in range(10):
        phi = MotFunction.of(rand_cpf(rng, 2, True, terms=2))
        assert phi.push_z(["i"]).push_z(["j"]) == phi.push_z(["i", "j"])


def test_specialization_is_linear(rng):
    for _ in range(10):
        a, b = _mixed(rng), _mixed(rng)
        for p in (5, 7):
            for k in (0, 2):
                env = {"i": k}
                assert (a + b).eval_counts(p, env, {"eta": 2}) == a.eval_counts(p, env, {"eta": 2}) + b.eval_counts(p, env, {"eta": 2})
                pa = a.push_residue(["eta"])
                assert pa.eval_counts(p, env) == sum(a.eval_counts(p, env, {"eta": e}) for e in range(p))
