"""Seeded random scalars and elements for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .coefficients import Cochain
from .novikov import Nov, Ring

_COEFFS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-3), Fraction(1, 2), Fraction(-2, 3))


def random_mono(ring: Ring, rng: random.Random, degree: int | None = None, *, family: bool = False,
                positive: bool = False, tries: int = 50):
    """A random kept monomial, optionally of a prescribed degree.

    Only even x-powers are used, so every scalar lies in the invariant field
    for both orientable and non-orientable models.
    """
    degs = ring.tvars.degrees
    betas = ring.group.enumerate(ring.cutoff.energy) if ring.group.rank or ring.group.torsion else [ring.group.zero]
    for _ in range(tries):
        t = [0] * len(degs)
        budget = rng.randint(0, ring.cutoff.t_order)
        for _ in range(budget):
            i = rng.randrange(len(degs)) if degs else None
            if i is None:
                break
            if degs[i] % 2 and t[i]:
                continue
            t[i] += 1
        beta = rng.choice(betas)
        e = rng.randint(0, 1) if family else 0
        s = rng.randint(0, 2) if family else 0
        if degree is None:
            p = rng.choice((-2, 0, 0, 2))
        else:
            p = e + ring.tvars.degree(t) - degree
            if p % 2:
                if not family:
                    continue
                e = 1 - e
                p = e + ring.tvars.degree(t) - degree
        m = (e, tuple(t), p, beta, s)
        if not ring.keeps(m):
            continue
        if positive and ring.mono_valuation(m) == 0:
            continue
        return m
    return None


def random_scalar(ring: Ring, rng: random.Random, degree: int | None = None, *, family: bool = False,
                  positive: bool = False, terms: int = 2) -> Nov | None:
    """A random homogeneous scalar, or None if no monomial of that degree was found."""
    first = random_mono(ring, rng, degree, family=family, positive=positive)
    if first is None:
        return None
    d = ring.mono_degree(first)
    out = {first: rng.choice(_COEFFS)}
    for _ in range(terms - 1):
        m = random_mono(ring, rng, d, family=family, positive=positive)
        if m is not None:
            out[m] = out.get(m, 0) + rng.choice(_COEFFS)
    return Nov(ring, out)


def random_element(space, ring: Ring, rng: random.Random, *, family: bool = False, positive: bool = False,
                   basis: int | None = None, degree: int | None = None) -> Cochain:
    """A homogeneous element a * b (plus a second term of the same degree when possible)."""
    for _ in range(50):
        b = rng.randrange(space.size) if basis is None else basis
        want = None if degree is None else degree - space.degree(b)
        a = random_scalar(ring, rng, want, family=family, positive=positive)
        if a is None or not a:
            continue
        out = Cochain.basis(space, ring, b).lmul(a)
        if not out:
            continue
        total = out.degree()
        if basis is None and rng.random() < 0.5:
            b2 = rng.randrange(space.size)
            a2 = random_scalar(ring, rng, total - space.degree(b2), family=family, positive=positive)
            if a2:
                out = out + Cochain.basis(space, ring, b2).lmul(a2)
        if out:
            return out
    return Cochain.basis(space, ring, 0 if basis is None else basis)
