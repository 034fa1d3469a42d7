import itertools

import pytest
from hypothesis import given, strategies as st

from ainfty_workbench.signs import (I_UNIT, MINUS, MUTATIONS, PLUS, InteriorSplit, Partition3, SignValue,
                                    UnsupportedField, binom2, epsilon, epsilon_interior, interior_splits,
                                    intro_m_sign, iota_sign, koszul_swap_sign, map_tensor_sign, partitions3,
                                    permute, rho, shuffle_sign, split_sign, verify_sign_lemmas, zeta)

degrees = st.lists(st.integers(-6, 6), max_size=6)


@pytest.mark.parametrize("d1,d2,want", [(1, 1, -1), (0, 5, 1), (3, 2, 1)])
def test_koszul_swap_examples(d1, d2, want):
    assert koszul_swap_sign(d1, d2) == want


@pytest.mark.parametrize("args,want", [((0, 1, 1), -1), ((7, 0, 3), 1), ((1, 1, 0), 1)])
def test_map_tensor_examples(args, want):
    assert map_tensor_sign(*args) == want


@pytest.mark.parametrize("a,c,want", [([], [], 1), ([1], [], 0), ([1, 2], [3], 1)])
def test_epsilon_examples(a, c, want):
    assert epsilon(a, c) == want


def test_epsilon_interior():
    assert epsilon_interior(2, [1, 1]) == 0
    assert epsilon_interior(1, [1, 2]) == 1


@pytest.mark.parametrize("P,degs,want", [
    (Partition3(3, 2, 1), (0, 0, 1), 1),
    (Partition3(0, 1, 0), (0, 0, 0), 0),
    (Partition3(2, 1, 2), (0, 2, 0), 0),
])
def test_zeta_examples(P, degs, want):
    gI, gJ, a13 = degs
    assert zeta(P, gI, gJ, a13) == want


def test_iota_examples():
    assert iota_sign([], [], Partition3(0, 1, 0), InteriorSplit((), ())) == 0
    assert iota_sign([1], [2], Partition3(1, 2, 0), InteriorSplit((1,), ())) == 0
    split = InteriorSplit((2,), (1,))
    assert split_sign([1, 1], split) == 1
    # |gamma^I| = 1 plus that inversion
    assert iota_sign([], [1, 1], Partition3(0, 1, 0), split) == 0


@pytest.mark.parametrize("gamma,sigma,want", [([1, 1], [0, 1], 0), ([1, 1], [1, 0], 1), ([2, 1], [1, 0], 0)])
def test_shuffle_examples(gamma, sigma, want):
    assert shuffle_sign(gamma, sigma) == want


def test_rho_examples():
    assert rho("c", 0, 5, [], []) == -1
    assert rho("c", 1, 2, [], []) == 1
    assert rho("i", 1, 3, [], []) == SignValue(3)
    with pytest.raises(UnsupportedField):
        rho("i", 1, 3, [], [], field_has_i=False)


@pytest.mark.parametrize("k,alpha,want", [(0, [], -1), (1, [1], -1), (2, [0, 0], 1)])
def test_intro_sign_examples(k, alpha, want):
    assert intro_m_sign(k, alpha) == want


def test_sign_values_multiply():
    assert I_UNIT * I_UNIT == MINUS
    assert MINUS * MINUS == PLUS
    assert -I_UNIT == SignValue(3)
    with pytest.raises(ValueError):
        int(I_UNIT)


def test_partition_and_split_invariants():
    for k in range(5):
        parts = list(partitions3(k))
        assert len(parts) == (k + 1) * (k + 2) // 2
        for P in parts:
            blocks = P.blocks(tuple(range(1, k + 1)))
            assert sum(blocks, ()) == tuple(range(1, k + 1))
    for l in range(4):
        assert len(list(interior_splits(l))) == 2 ** l
    with pytest.raises(ValueError):
        Partition3(2, 4, 0)
    with pytest.raises(ValueError):
        InteriorSplit((1,), (1,))


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_swap_is_involutive(d1, d2):
    assert koszul_swap_sign(d1, d2) * koszul_swap_sign(d2, d1) == PLUS


@given(st.integers(0, 8), st.integers(0, 8))
def test_binomial_identity(a, b):
    assert binom2(a + b) % 2 == (binom2(a) + binom2(b) + a * b) % 2


@given(st.data())
def test_shuffle_sign_is_a_cocycle(data):
    n = data.draw(st.integers(0, 6))
    gamma = data.draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    sigma = data.draw(st.permutations(range(n)))
    tau = data.draw(st.permutations(range(n)))
    # apply tau first, then sigma: the composite sends position a to sigma[tau[a]]
    composite = [sigma[tau[a]] for a in range(n)]
    lhs = shuffle_sign(gamma, composite)
    rhs = (shuffle_sign(permute(gamma, tau), sigma) + shuffle_sign(gamma, tau)) % 2
    assert lhs == rhs


@given(degrees, degrees)
def test_epsilon_depends_only_on_parities(a, c):
    assert epsilon(a, c) == epsilon([x % 2 for x in a], [x % 2 for x in c])


def test_lemma_suite_passes_small():
    rep = verify_sign_lemmas(3, 2)
    assert rep.ok, rep.to_human()
    assert all(c.count > 0 for c in rep.checks.values())


@pytest.mark.parametrize("target", MUTATIONS)
def test_each_mutation_is_detected(target):
    assert not verify_sign_lemmas(3, 2, mutate=target).ok


def test_lemma_suite_rejects_bad_arguments():
    with pytest.raises(ValueError):
        verify_sign_lemmas(-1, 0)
    with pytest.raises(ValueError):
        verify_sign_lemmas(1, 1, mutate="nonsense")


def test_trivially_small_space():
    assert verify_sign_lemmas(1, 0).ok


def test_parity_enumeration_is_complete():
    # every formula is affine in parities, so shifting a degree by 2 never matters
    for a, c in itertools.product(itertools.product(range(3), repeat=2), itertools.product(range(3), repeat=1)):
        assert epsilon(a, c) == epsilon([x + 2 for x in a], [x - 2 for x in c])
