import random

import pytest

from ainfty_workbench.ainfty import (AssemblyError, GammaTildeError, PseudoisotopyData, StructureError,
                                     assemble_m_from_q, build_energy_zero, build_gamma_tilde, build_gauge_family,
                                     check_def11, check_fundamental_class, check_pseudoisotopy, check_relations,
                                     constant_family, eval_m)
from ainfty_workbench.coefficients import Cochain, builtin_models
from ainfty_workbench.fixtures import _gamma, homotopy_example_q
from ainfty_workbench.novikov import Nov
from ainfty_workbench.qstructures import QStructure, standard_ambient, standard_ring
from ainfty_workbench.sampling import random_element, random_scalar
from ainfty_workbench.signs import sign

RING = standard_ring(3, 3)
DATA = builtin_models()


@pytest.fixture(scope="module")
def zero():
    return {name: build_energy_zero(D, RING) for name, D in DATA.items()}


@pytest.mark.parametrize("name", sorted(DATA))
def test_energy_zero_passes_every_property(zero, name):
    rep = check_def11(zero[name], 6, trials=30)
    assert rep.ok, rep.to_human()
    assert all(c.count > 0 for n, c in rep.checks.items() if n.startswith("(") and "m_0" not in n), rep.to_human()


@pytest.mark.parametrize("native", [True, False])
def test_energy_zero_operations(native):
    circle = DATA["circle"]
    S = build_energy_zero(circle, RING, native=native)
    rng = random.Random(4)
    for _ in range(20):
        a1, a2 = random_element(circle, RING, rng), random_element(circle, RING, rng)
        assert eval_m(S, 1, [a1]) == a1.d()
        expect = Cochain.zero(circle, RING)
        for d, part in a1.homogeneous_parts().items():
            expect = expect + circle.wedge_elems(part, a2).scale(sign(d))
        assert eval_m(S, 2, [a1, a2]) == expect
    with pytest.raises(StructureError):
        eval_m(S, 2, [a1])


def test_linearity_rule_on_scaled_inputs(zero):
    S = zero["klein"]
    rng = random.Random(9)
    checked = 0
    while checked < 30:
        x, y = random_element(S.datum, RING, rng), random_element(S.datum, RING, rng)
        a = random_scalar(RING, rng)
        if a is None or not a.is_homogeneous() or len(x.homogeneous_parts()) != 1:
            continue
        # slot 2: (-1)^{|a|(2 + |x|)}
        par = a.degree() * (2 + x.degree())
        assert eval_m(S, 2, [x, y.lmul(a)]) == eval_m(S, 2, [x, y]).lmul(a).scale(sign(par))
        checked += 1


def test_m1_squares_to_zero(zero):
    for S in zero.values():
        for b in range(S.datum.size):
            assert not eval_m(S, 1, [eval_m(S, 1, [S.basis(b)])])


def test_mutated_product_breaks_relations(zero):
    S = zero["circle"]
    key = next(k for k in S.table(2) if S.datum.degree(k[0]) % 2)
    bad = S.with_entry(2, key, -S.entry(2, key))
    rep = check_relations(bad, 4)
    assert not rep.ok
    assert any(w["k"] == 3 for w in rep.checks["relations"].witnesses if isinstance(w, dict))


def test_unit_and_valuation_axioms_catch_bad_structures(zero):
    S = zero["circle"]
    one = S.datum.unit_index
    th = S.datum.index("th")
    rep = check_def11(S.with_entry(2, (th, one), -S.entry(2, (th, one))), 4, trials=10)
    assert rep.checks["(10) m_2 unit identities"].violations
    rep = check_def11(S.with_entry(0, (), S.unit), 4, trials=10)
    assert rep.checks["(4) valuation of m"].violations


def test_minimal_q_assembles_to_energy_zero(zero):
    circle = DATA["circle"]
    amb = standard_ambient(circle)
    Q = QStructure.minimal(circle, amb, RING)
    S = assemble_m_from_q(Q, Cochain.zero(amb, RING))
    for k in (1, 2):
        assert S.table(k) == zero["circle"].table(k)
    assert not S.table(0)


def test_fundamental_class_gives_minus_t0_unit():
    circle = DATA["circle"]
    amb = standard_ambient(circle)
    Q = QStructure.minimal(circle, amb, RING)
    S = assemble_m_from_q(Q, _gamma(amb, RING, **{"1X": 0}))
    assert S.entry(0, ()) == S.unit.lmul(Nov.t(RING, 0)).scale(-1)
    assert check_fundamental_class(S).ok


def test_gamma_preconditions_are_reported():
    circle = DATA["circle"]
    amb = standard_ambient(circle)
    Q = QStructure.minimal(circle, amb, RING)
    cases = {
        "degree": _gamma(amb, RING, **{"1X": 1}),
        "valuation": Cochain.from_scalar(amb, amb.index("g1"), Nov.const(RING)),
        "closed": _gamma(amb, RING, h=0),
    }
    for label, gamma in cases.items():
        with pytest.raises(AssemblyError) as err:
            assemble_m_from_q(Q, gamma)
        assert any(label in f for f in err.value.failures), (label, err.value.failures)


def test_gamma_tilde():
    amb = standard_ambient(DATA["circle"])
    g, gp = _gamma(amb, RING, **{"1X": 0, "g1": 1}), _gamma(amb, RING, **{"1X": 0, "g2": 1})
    eta = _gamma(amb, RING, h=1)
    tilde = build_gamma_tilde(g, gp, eta)
    assert tilde.restrict(0) == g and tilde.restrict(1) == gp
    assert not tilde.d()
    assert build_gamma_tilde(g, g, Cochain.zero(amb, RING)).restrict(1) == g
    with pytest.raises(GammaTildeError):
        build_gamma_tilde(g, gp, Cochain.zero(amb, RING))


def test_constant_family_is_a_pseudoisotopy(zero):
    S = zero["klein"]
    assert check_pseudoisotopy(constant_family(S), S, S, 4, trials=10).ok


@pytest.fixture(scope="module")
def exact_pair():
    Q = homotopy_example_q(RING)
    amb = Q.ambient
    g, gp = _gamma(amb, RING, **{"1X": 0, "g1": 1}), _gamma(amb, RING, **{"1X": 0, "g2": 1})
    S0, S1 = assemble_m_from_q(Q, g), assemble_m_from_q(Q, gp)
    F = assemble_m_from_q(Q, build_gamma_tilde(g, gp, _gamma(amb, RING, h=1)))
    return PseudoisotopyData(F, "gamma-tilde"), S0, S1


def test_gamma_tilde_family_is_a_pseudoisotopy(exact_pair):
    P, S0, S1 = exact_pair
    assert S0.m != S1.m
    rep = check_pseudoisotopy(P, S0, S1, 3, trials=10)
    assert rep.ok, rep.to_human()


def test_swapped_or_mutated_endpoints_fail(exact_pair):
    P, S0, S1 = exact_pair
    assert not check_pseudoisotopy(P, S1, S0, 3, trials=5).ok
    key = next(iter(S1.table(2)))
    assert not check_pseudoisotopy(P, S0, S1.with_entry(2, key, S1.entry(2, key).scale(2)), 3, trials=5).ok


def test_gauge_family(zero):
    S = zero["circle"]
    circle = S.datum
    X = {circle.index("thx"): Cochain.basis(circle, RING, circle.index("y"))}
    P, end = build_gauge_family(S, X, (1,))
    rep = check_pseudoisotopy(P, S, end, 3, trials=10)
    assert rep.ok, rep.to_human()
