import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ainfty_workbench.novikov import (ConfigurationError, Cutoff, DegreeGroup, IncompatibleCutoff, Nov, Ring,
                                      TVariables, enumerate_degrees, ideal_reduce, nov_add, nov_mul, valuation,
                                      valuation_test_rings, verify_valuation_laws)
from ainfty_workbench.sampling import random_mono

RING = Ring(DegreeGroup(1, 0, (1,), (Fraction(3, 2),), gap=Fraction(3, 2)), TVariables((2, 1, 1)), Cutoff(5, 3))


def element(ring, seed, terms=3):
    rng = random.Random(seed)
    out = {}
    for _ in range(terms):
        m = random_mono(ring, rng)
        if m is not None:
            out[m] = out.get(m, 0) + rng.choice((1, -1, 2, Fraction(1, 3)))
    return Nov(ring, out)


seeds = st.integers(0, 10 ** 6)


def test_addition_examples():
    T = Nov.T(RING, (1,))
    assert nov_add(T, Nov.zero(RING)) == T
    assert nov_add(T, Nov.T(RING, (1,), -1)) == 0
    # omega(4) = 6 > E = 5, so that term is dropped on construction
    assert nov_add(T, Nov.T(RING, (4,))) == T


def test_multiplication_examples():
    assert nov_mul(Nov.T(RING, (1,)), Nov.T(RING, (2,))) == Nov.T(RING, (3,))
    a, b = Nov.t(RING, 1), Nov.t(RING, 2)
    assert a * b == -(b * a)
    assert a * a == 0
    assert nov_mul(element(RING, 3), Nov.zero(RING)) == 0


def test_valuation_examples():
    assert valuation(Nov.const(RING)) == 0
    x = Nov.monomial(RING, 3, beta=(1,), t=(2, 0, 0))
    assert valuation(x) == Fraction(7, 2)
    assert valuation(Nov.zero(RING)) == math.inf


def test_ideal_reduce_examples():
    assert ideal_reduce(Nov.const(RING) + Nov.T(RING, (1,))) == Nov.const(RING)
    assert ideal_reduce(Nov.t(RING, 0)) == 0
    assert ideal_reduce(Nov.zero(RING)) == 0


def test_enumeration_examples():
    Z = DegreeGroup(1, 0, (1,), (1,))
    assert enumerate_degrees(Z, 2) == [(0,), (1,), (2,)]
    assert enumerate_degrees(Z, 0) == [(0,)]
    rotating = DegreeGroup(1, 1, (1,), (1,))
    assert sorted(enumerate_degrees(rotating, 1)) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(ValueError):
        enumerate_degrees(Z, -1)


def test_gap_violation_is_a_configuration_error():
    bad = DegreeGroup(1, 0, (1,), (Fraction(1, 2),), gap=Fraction(1))
    with pytest.raises(ConfigurationError):
        bad.enumerate(3)
    with pytest.raises(ConfigurationError):
        DegreeGroup(2, 0, (1,), (1,))


def test_mismatched_cutoffs_are_rejected():
    other = Ring(RING.group, RING.tvars, Cutoff(4, 3))
    with pytest.raises(IncompatibleCutoff):
        Nov.const(RING) + Nov.const(other)
    with pytest.raises(IncompatibleCutoff):
        Nov.const(RING) * Nov.const(other)


def test_odd_x_power_is_not_a_scalar():
    with pytest.raises(ValueError):
        Nov.monomial(RING, p=1)


@given(seeds, seeds, seeds)
def test_ring_axioms(s1, s2, s3):
    x, y, z = element(RING, s1), element(RING, s2), element(RING, s3)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) * z == x * z + y * z
    assert x + y == y + x


@given(seeds, seeds)
def test_graded_commutativity(s1, s2):
    x, y = element(RING, s1, 1), element(RING, s2, 1)
    if not (x and y):
        return
    sign = -1 if (x.degree() * y.degree()) % 2 else 1
    assert x * y == (y * x).scale(sign)


@given(seeds, seeds)
def test_valuation_laws_hypothesis(s1, s2):
    x, y = element(RING, s1), element(RING, s2)
    assert valuation(x * y) >= valuation(x) + valuation(y)
    assert valuation(x + y) >= min(valuation(x), valuation(y))


@given(seeds, seeds)
def test_reduction_is_multiplicative(s1, s2):
    x, y = element(RING, s1), element(RING, s2)
    assert ideal_reduce(x * y) == ideal_reduce(x) * ideal_reduce(y)


@settings(max_examples=30)
@given(seeds)
def test_stored_terms_respect_cutoff(seed):
    x = element(RING, seed, 6)
    for m in x.terms:
        assert RING.keeps(m)
        assert x.terms[m] != 0


def test_valuation_verifier_passes():
    rep = verify_valuation_laws(300, seed=5)
    assert rep.ok, rep.to_human()
    assert rep.check("monomial product additive").count > 0
    assert rep.check("monomial sum attains minimum").count > 0


def test_valuation_verifier_catches_a_broken_product(monkeypatch):
    # a product that forgets energy additivity violates submultiplicativity
    def broken(self, m1, m2):
        e1, l1, p1, b1, s1 = m1
        e2, l2, p2, b2, s2 = m2
        if e1 and e2:
            return None
        return 1, (e1 + e2, tuple(a + b for a, b in zip(l1, l2)), p1 + p2, b1, s1 + s2)
    monkeypatch.setattr(Ring, "mono_mul", broken)
    rings = [r for r in valuation_test_rings() if r.group.rank]
    assert not verify_valuation_laws(200, seed=1, rings=rings).ok
