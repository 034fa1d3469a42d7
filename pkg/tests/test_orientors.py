import random

import pytest
from hypothesis import given, settings, strategies as st

from ainfty_workbench.orientors import (LAWS, MUTATIONS, GradedLocalSystem, MapSymbol, MissingOrientationData,
                                        OrientorTypeError, boundary_orientor, compose_orientors, extend,
                                        identity_orientor, pullback_orientor, random_orientor, random_symbol,
                                        random_system, same_up_to_trivial_lines, trivial_system,
                                        verify_orientor_laws, verify_pullback_examples)


def instance(seed):
    rng = random.Random(seed)
    A, B, C = random_system(rng), random_system(rng), random_system(rng)
    F = random_orientor(rng, A, B, random_symbol(rng, "f"))
    G = random_orientor(rng, B, C, random_symbol(rng, "g"))
    return rng, F, G


@given(st.integers(0, 10 ** 6))
def test_identity_is_a_unit(seed):
    _, F, _ = instance(seed)
    assert compose_orientors(identity_orientor(F.tgt), F) == F
    assert compose_orientors(F, identity_orientor(F.src)) == F


@given(st.integers(0, 10 ** 6))
def test_degrees_add(seed):
    _, F, G = instance(seed)
    assert compose_orientors(G, F).degree == F.degree + G.degree


def test_degree_one_and_two_compose_to_three():
    A = GradedLocalSystem(("a",), (0,))
    B = GradedLocalSystem(("b",), (1,))
    C = GradedLocalSystem(("c",), (3,))
    rng = random.Random(0)
    F = random_orientor(rng, A, B, MapSymbol("f", 0), 1)
    G = random_orientor(rng, B, C, MapSymbol("g", 0), 2)
    assert (F.degree, G.degree, compose_orientors(G, F).degree) == (1, 2, 3)


def test_mismatched_systems_are_a_type_error():
    _, F, _ = instance(1)
    other = GradedLocalSystem(("z",), (7,))
    with pytest.raises(OrientorTypeError):
        compose_orientors(identity_orientor(other), F)


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6))
def test_trivial_extension_changes_nothing(seed):
    _, F, _ = instance(seed)
    for side in ("left", "right"):
        E = extend(F, trivial_system(), side)
        assert E.degree == F.degree
        # the trivial line is one-dimensional in degree 0, so indices are unchanged
        assert E.matrix.entries == F.matrix.entries
        assert E.src.degrees == F.src.degrees
    with pytest.raises(ValueError):
        extend(F, trivial_system(), "middle")


def test_pullback_requires_orientation_data():
    _, F, _ = instance(2)
    with pytest.raises(MissingOrientationData):
        pullback_orientor(F, MapSymbol("f", 1))
    with pytest.raises(MissingOrientationData):
        pullback_orientor(F, MapSymbol("f", 1, (("l", -1),)), orientation=1)


def test_pullback_along_a_diffeomorphism_matches_the_square():
    _, G, _ = instance(3)
    g = G.path[0]
    direct = pullback_orientor(G, MapSymbol("f", 0), orientation=1)
    square = pullback_orientor(G, MapSymbol("f", 0), square=(MapSymbol("g.f", g.rdim, g.character), 1))
    assert same_up_to_trivial_lines(direct, square)
    assert square.degree == G.degree


def test_boundary_raises_degree():
    _, G, _ = instance(4)
    assert boundary_orientor(G, MapSymbol("iota", -1)).degree == G.degree + 1
    with pytest.raises(OrientorTypeError):
        boundary_orientor(G, MapSymbol("iota", 0))


def test_random_orientors_are_equivariant():
    for seed in range(50):
        _, F, G = instance(seed)
        assert not F.equivariance_defects()
        assert not compose_orientors(G, F).equivariance_defects()


def test_laws_hold():
    rep = verify_orientor_laws(150, seed=11)
    assert rep.ok, rep.to_human()
    for law in LAWS:
        assert rep.check(law).count == 150


def test_even_degrees_carry_no_signs():
    rep = verify_orientor_laws(100, seed=2, even_only=True)
    assert rep.ok, rep.to_human()
    assert rep.check("all signs +1").count == 100


@pytest.mark.parametrize("mutation", MUTATIONS)
def test_mutations_are_detected(mutation):
    assert not verify_orientor_laws(100, seed=0, mutate=mutation).ok


def test_pullback_examples():
    rep = verify_pullback_examples(100, seed=7)
    assert rep.ok, rep.to_human()


def test_bad_arguments():
    with pytest.raises(ValueError):
        verify_orientor_laws(0)
    with pytest.raises(ValueError):
        verify_orientor_laws(5, mutate="nope")
