import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ainfty_workbench.coefficients import builtin_models
from ainfty_workbench.fiber_forms import (FamilyElement, family_d, pushforward_interval, pushforward_square,
                                          random_family, restrict, stokes_residual, t_power,
                                          verify_stokes_interval)

DATA = builtin_models()
CIRCLE = DATA["circle"]
ONE = CIRCLE.unit_index
TH = CIRCLE.index("th")


def const(b, coeff=1):
    return FamilyElement.basis(CIRCLE, b, 0, coeff)


def test_restriction_examples():
    assert restrict(t_power(CIRCLE, TH, 1), 0) == FamilyElement.zero(CIRCLE, 0)
    xi = t_power(CIRCLE, TH, 1) + t_power(CIRCLE, ONE, 0, dt=True)
    assert restrict(xi, 1) == const(TH)
    assert restrict(FamilyElement.basis(CIRCLE, TH), Fraction(1, 3)) == const(TH)
    assert restrict(t_power(CIRCLE, ONE, 2), Fraction(1, 2)) == const(ONE, Fraction(1, 4))


def test_differential_examples():
    assert family_d(t_power(CIRCLE, ONE, 1)) == t_power(CIRCLE, ONE, 0, dt=True)
    assert not family_d(t_power(CIRCLE, ONE, 0, dt=True))
    # th is closed of degree 1, so d(t th) = (-1)^1 th dt
    assert family_d(t_power(CIRCLE, TH, 1)) == t_power(CIRCLE, TH, 0, dt=True, coeff=-1)
    assert not family_d(family_d(t_power(CIRCLE, TH, 2)))


def test_pushforward_examples():
    assert pushforward_interval(t_power(CIRCLE, ONE, 1, dt=True)) == const(ONE, Fraction(1, 2))
    assert not pushforward_interval(t_power(CIRCLE, ONE, 3))


def test_stokes_on_a_hand_checked_instance():
    # xi = t th: pi_* xi = 0, pi_*(d xi) = -th, boundary term (-1)^{1+1}(th - 0) = th
    xi = t_power(CIRCLE, TH, 1)
    assert pushforward_interval(family_d(xi)) == const(TH, -1)
    assert not stokes_residual(xi)
    assert stokes_residual(xi, mutate=True)


def test_stokes_without_fiber_form_reduces_to_boundary_terms():
    xi = t_power(CIRCLE, ONE, 3)
    assert not pushforward_interval(xi)
    assert pushforward_interval(family_d(xi)) == restrict(xi, 1) - restrict(xi, 0)


def test_odd_x_powers_and_shapes_are_rejected():
    with pytest.raises(ValueError):
        FamilyElement.build(CIRCLE, 1, {(ONE, 1, (0,), (0,)): 1})
    with pytest.raises(ValueError):
        FamilyElement.build(CIRCLE, 1, {(ONE, 0, (0, 0), (0,)): 1})
    with pytest.raises(ValueError):
        (t_power(CIRCLE, ONE, 1) + t_power(CIRCLE, TH, 1)).degree()


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6), st.sampled_from(sorted(DATA)))
def test_stokes_property(seed, name):
    D = DATA[name]
    xi = random_family(D, random.Random(seed), 1)
    if xi:
        assert not stokes_residual(xi)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_fubini_property(seed):
    zeta = random_family(CIRCLE, random.Random(seed), 2)
    assert zeta.pushforward(1).pushforward(0) == pushforward_square(zeta)
    assert zeta.swap().swap() == zeta


def test_verifier_passes():
    rep = verify_stokes_interval(150, seed=3)
    assert rep.ok, rep.to_human()
    assert rep.check("projection formula (right)").count > 0


def test_verifier_detects_the_sign_mutation():
    assert not verify_stokes_interval(50, seed=3, mutate=True).ok
    with pytest.raises(ValueError):
        verify_stokes_interval(0)
