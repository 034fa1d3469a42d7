import pytest

from ainfty_workbench.ainfty import assemble_m_from_q, check_relations
from ainfty_workbench.coefficients import Cochain, builtin_models
from ainfty_workbench.fixtures import _gamma, homotopy_example_q, km1_example_q
from ainfty_workbench.novikov import Nov
from ainfty_workbench.qstructures import (PERTURBATIONS, PROPERTIES, QStructure, add_curvature,
                                          build_divisor_extension, check_divisor_axiom, check_properties,
                                          check_q_relations, check_q_relations_km1, fit_qm1, perturb_q,
                                          random_admissible_q, sphere_term_applies, standard_ambient,
                                          standard_ring)

RING = standard_ring(3, 3)
DATA = builtin_models()


def minimal(name, periods=(1,)):
    datum = DATA[name]
    return QStructure.minimal(datum, standard_ambient(datum, periods), RING)


@pytest.mark.parametrize("name", sorted(DATA))
def test_minimal_q_satisfies_everything(name):
    Q = minimal(name)
    assert check_q_relations(Q, 3, 2).ok
    if name != "point":
        assert check_q_relations_km1(Q, 2).ok
    rep = check_properties(Q)
    assert rep.ok, rep.to_human()


def test_minimal_energy_zero_bulk_entry_is_minus_restriction():
    Q = minimal("circle")
    amb = Q.ambient
    # the relative ambient classes restrict to zero on L, only 1X survives
    assert set(Q.tables[(0, 1, Q.beta0)]) == {((amb.index("1X"),), ())}


@pytest.mark.parametrize("name", sorted(DATA))
def test_curved_divisor_extension_satisfies_the_relations(name):
    Q = build_divisor_extension(add_curvature(minimal(name), (1,)), max_l=2)
    assert check_q_relations(Q, 3, 2).ok
    assert check_properties(Q, "divisor").ok


def test_single_bulk_entry_couples_to_d():
    Q = homotopy_example_q(RING)
    assert check_q_relations(Q, 2, 1).ok
    h = Q.ambient.index("h")
    entry = ((h,), ())
    broken = Q.with_entry((0, 1, (1,)), entry, Q.tables[(0, 1, (1,))][entry].scale(-1))
    assert not check_q_relations(broken, 2, 1).ok


def test_degree_gate_rejects_before_evaluating():
    Q = minimal("klein")
    key, entry = (2, 0, Q.beta0), next(iter(minimal("klein").tables[(2, 0, Q.beta0)]))
    bad = Q.with_entry(key, entry, Q.tables[key][entry].lmul(Nov.monomial(RING, p=2)))
    rep = check_q_relations(bad, 3, 2)
    assert rep.checks["degree gate"].violations
    assert "q-relations" not in rep.checks or rep.checks["q-relations"].count == 0


def test_divisor_extension_power_law():
    circle = DATA["circle"]
    amb = standard_ambient(circle, (2,))
    Q0 = add_curvature(QStructure.minimal(circle, amb, RING), (1,))
    g1 = amb.index("g1")
    Q = build_divisor_extension(Q0, [g1], max_l=3)
    base = Q0.tables[(0, 0, (1,))][((), ())]
    assert Q.tables[(0, 3, (1,))][((g1, g1, g1), ())] == base.scale(8)
    flat = build_divisor_extension(QStructure.minimal(circle, standard_ambient(circle, (0,)), RING).copy(),
                                   max_l=3)
    assert set(flat.tables) == set(QStructure.minimal(circle, standard_ambient(circle, (0,)), RING).tables)


def test_divisor_axiom_exponentiates():
    ring = standard_ring(5, 4)
    Q = random_admissible_q(DATA["klein"], 3, {"max_l": 4, "density": 0.3}, ring=ring)
    amb = Q.ambient
    assert check_divisor_axiom(Q, amb.index("g1"), _gamma(amb, ring, **{"1X": 0}), t_index=1).ok


def test_symmetry_sign_on_odd_inputs():
    circle = DATA["circle"]
    amb = standard_ambient(circle)
    Q = minimal("circle")
    # swapping two odd interior inputs costs a sign, so q(h, h) must vanish
    h = amb.index("h")
    bad = Q.with_entry((0, 2, (1,)), ((h, h), ()), Cochain.basis(circle, RING, circle.index("1")))
    assert not bad.degree_problems()
    assert not check_properties(bad, "symmetry").ok


def test_random_admissible_q_is_reproducible():
    klein = DATA["klein"]
    a, b = random_admissible_q(klein, 7, {"max_l": 2}), random_admissible_q(klein, 7, {"max_l": 2})
    assert a.tables == b.tables and a.qm1 == b.qm1
    assert random_admissible_q(klein, 8, {"max_l": 2}).tables != a.tables


@pytest.mark.parametrize("seed", range(3))
def test_random_admissible_q_implies_ainfty(seed):
    Q = random_admissible_q(DATA["point"], seed, {"max_l": 2})
    assert check_q_relations(Q, 3, 2).ok
    assert check_properties(Q, ["degree", "admissibility", "divisor", "symmetry"]).ok
    gamma = _gamma(Q.ambient, RING, **{"1X": 0, "g1": 1})
    assert check_relations(assemble_m_from_q(Q, gamma, 4), 4).ok


@pytest.mark.parametrize("kind", PERTURBATIONS)
def test_perturbations_are_detected(kind):
    Q = random_admissible_q(DATA["klein"], 1, {"max_l": 2})
    bad, info = perturb_q(Q, seed=2, kind=kind)
    assert info["kind"] in PERTURBATIONS
    assert not check_q_relations(bad, 3, 2).ok, info


def test_km1_fit():
    Q = km1_example_q(RING)
    assert check_q_relations(Q, 3, 2).ok
    rep = check_q_relations_km1(Q, 2)
    assert {(w["l"], w["beta"]) for w in rep.checks["q-relations k=-1"].witnesses} == {(2, (3,))}
    F = fit_qm1(Q, 2, (3,))
    assert check_q_relations_km1(F, 2).ok
    amb = F.ambient
    g1 = amb.index("g1")
    key = next(iter(F.qm1[(2, (3,))]))
    nudged = F.copy()
    nudged.qm1[(2, (3,))][key] = F.qm1[(2, (3,))][key].scale(2)
    assert not check_q_relations_km1(nudged, 2).ok
    assert F.qm1[(2, (3,))][(g1, g1)] == Nov.monomial(RING, 12, p=-2)


def test_point_needs_a_constant_sphere_term():
    # on a zero-dimensional L the unit is a top form, so <1X|_L, 1X|_L> = 1 survives at energy zero
    Q = minimal("point")
    rep = check_q_relations_km1(Q, 2)
    assert [(w["l"], w["beta"], w["residual"]) for w in rep.checks["q-relations k=-1"].witnesses] == \
        [(2, (0,), "1*1")]
    one = Q.ambient.index("1X")
    for value, ok in ((1, True), (-1, False)):
        F = Q.copy()
        F.sphere[(2, Q.beta0)] = {(one, one): Nov.const(RING).scale(value)}
        F.__post_init__()
        assert check_q_relations_km1(F, 2).ok is ok


def test_sphere_term_is_omitted_for_odd_maslov_on_non_orientable():
    Q = minimal("klein")
    assert not sphere_term_applies(Q, (1,))
    assert sphere_term_applies(Q, (2,))
    assert sphere_term_applies(minimal("circle"), (1,))


def test_property_selector():
    Q = minimal("point")
    assert set(check_properties(Q, "all").checks) >= set(PROPERTIES)
    with pytest.raises(ValueError):
        check_properties(Q, [])
    with pytest.raises(ValueError):
        check_properties(Q, ["nope"])
