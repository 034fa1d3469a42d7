import itertools
import random

import pytest
from hypothesis import given, strategies as st

from ainfty_workbench.coefficients import (Cochain, LagrangianModel, RLElement, builtin_models, compute_efield,
                                           int_odd, monodromy_act, o_split, pairing, rl_mul)
from ainfty_workbench.novikov import Nov
from ainfty_workbench.qstructures import standard_ring
from ainfty_workbench.sampling import random_element
from ainfty_workbench.signs import sign

RING = standard_ring(3, 3)
DATA = builtin_models()
MOBIUS = LagrangianModel(1, ("a",), (1,))
TRIVIAL = LagrangianModel(1, ("a",), (0,))


def basis(datum, name):
    return Cochain.basis(datum, RING, datum.index(name))


def test_rl_products():
    x = RLElement.x()
    assert rl_mul(x, x) == RLElement.x(2)
    assert rl_mul(x, x) != RLElement()
    assert rl_mul(x, RLElement.x(-1)) == RLElement.x(0)
    assert rl_mul(RLElement.x(1, 2), RLElement.x(3, 3)) == RLElement.x(4, 6)


def test_monodromy():
    assert monodromy_act(MOBIUS, "a", RLElement.x()) == RLElement.x(1, -1)
    assert monodromy_act(MOBIUS, "a", RLElement.x(2)) == RLElement.x(2)
    assert monodromy_act(TRIVIAL, "a", RLElement.x()) == RLElement.x()
    with pytest.raises(KeyError):
        monodromy_act(MOBIUS, "b", RLElement.x())


def test_efield_is_the_fixed_subalgebra():
    for model in (MOBIUS, TRIVIAL, LagrangianModel(2, ("a", "b"), (0, 1))):
        E = compute_efield(model)
        for k in range(-4, 5):
            fixed = all(monodromy_act(model, g, RLElement.x(k)) == RLElement.x(k) for g in model.loops)
            assert E.contains_power(k) == fixed
    assert compute_efield(MOBIUS).fiber_rank == 2
    assert compute_efield(TRIVIAL).fiber_rank == 1


def test_o_split_examples():
    s = o_split(RLElement.x(), odd_only=True, n=1)
    assert s.line == RLElement.x(0) and s.plain == RLElement() and s.line_weight == 0
    s = o_split(RLElement.x(2), odd_only=True)
    assert s.line == RLElement() and s.plain == RLElement()
    assert o_split(RLElement.x(3), odd_only=True).line == RLElement.x(2)
    assert o_split(RLElement.x(2), odd_only=False).plain == RLElement.x(2)


def test_int_odd_examples():
    circle = DATA["circle"]
    assert int_odd(circle, basis(circle, "thx")) == Nov.const(RING)
    assert int_odd(circle, basis(circle, "1")) == 0
    # trace extends E-linearly: th x^3 = x^2 * (th x)
    assert int_odd(circle, basis(circle, "thx").lmul(Nov.monomial(RING, p=-2))) == Nov.monomial(RING, p=-2)


def test_pairing_examples():
    circle = DATA["circle"]
    thx, one = basis(circle, "thx"), basis(circle, "1")
    assert pairing(circle, thx, one) == Nov.const(RING)
    assert pairing(circle, one, thx) == Nov.const(RING)
    assert pairing(circle, one, one) == 0
    with pytest.raises(ValueError):
        pairing(circle, one, thx, variant="nope")


@pytest.mark.parametrize("name", sorted(DATA))
def test_builtin_data_validate(name):
    rep = DATA[name].validate(RING)
    assert rep.ok, rep.to_human()


@pytest.mark.parametrize("name", sorted(DATA))
def test_pairing_antisymmetry_and_chain_map(name):
    datum = DATA[name]
    for b1, b2 in itertools.product(range(datum.size), repeat=2):
        x, y = Cochain.basis(datum, RING, b1), Cochain.basis(datum, RING, b2)
        dx, dy = datum.degree(b1), datum.degree(b2)
        lhs = datum.pairing(x, y)
        assert lhs == datum.pairing(y, x).scale(sign((1 + dx) * (1 + dy) + 1))
        # <d x, y> = (-1)^{(1+|x|)(1+|y|)} <d y, x> on a point base
        assert datum.pairing(x.d(), y) == datum.pairing(y.d(), x).scale(sign((1 + dx) * (1 + dy)))


@pytest.mark.parametrize("name", sorted(DATA))
def test_trace_kills_exact_elements(name):
    datum = DATA[name]
    rng = random.Random(0)
    for _ in range(30):
        assert datum.int_odd(random_element(datum, RING, rng).d()) == 0


def test_non_orientable_trace_only_on_twisted_top_forms():
    klein = DATA["klein"]
    for b, t in klein.trace.items():
        assert klein.form_degree(b) == klein.n and klein.basis[b].e == 1 and t
    assert not klein.form_trace


@given(st.integers(0, 10 ** 6), st.sampled_from(sorted(DATA)))
def test_wedge_is_bilinear_over_scalars(seed, name):
    datum = DATA[name]
    rng = random.Random(seed)
    x, y = random_element(datum, RING, rng), random_element(datum, RING, rng)
    a = Nov.monomial(RING, 2, beta=(1,), p=-2)
    assert datum.wedge_elems(x.lmul(a), y) == datum.wedge_elems(x, y).lmul(a)
    assert datum.wedge_elems(x + y, y) == datum.wedge_elems(x, y) + datum.wedge_elems(y, y)


def test_corrupted_datum_fails_validation():
    circle = builtin_models()["circle"]
    y, dy = circle.index("y"), circle.index("dy")
    circle.dtable[y] = {dy: 2, circle.index("th"): 1}
    rep = circle.validate(RING)
    assert not rep.ok
