"""Truncated Novikov-type coefficient rings with valuation.

A scalar is a finite sum of monomials

    dt^e * t_0^{l_0} ... t_N^{l_N} * x^p * T^beta * s^k

with exact rational coefficients.  ``x^p`` (p even) is an element of the
invariant field E, ``T^beta`` a Novikov symbol, and ``s``/``dt`` the
coordinate and its differential on the interval [0, 1] used by family
structures; outside families they stay at exponent zero.  T^beta, s and even
x-powers all have even degree, so the only Koszul signs come from the graded
t-variables and dt.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

Beta = tuple[int, ...]
# (e, t-exponents, p, beta, s)
Mono = tuple[int, tuple[int, ...], int, Beta, int]

INF = math.inf


class IncompatibleCutoff(ValueError):
    pass


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeGroup:
    """Pi = Z^rank + (Z/2)^torsion with mu, omega on the free part.

    The effective monoid is the non-negative cone of the free generators
    (times all torsion), and each free generator must have omega >= gap > 0.
    """

    rank: int = 0
    torsion: int = 0
    mu: tuple[int, ...] = ()
    omega: tuple[Fraction, ...] = ()
    gap: Fraction = Fraction(1)
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(Fraction(w) for w in self.omega))
        object.__setattr__(self, "gap", Fraction(self.gap))
        if len(self.mu) != self.rank or len(self.omega) != self.rank:
            raise ConfigurationError("mu and omega need one value per free generator")

    @property
    def zero(self) -> Beta:
        return (0,) * (self.rank + self.torsion)

    def add(self, b1: Beta, b2: Beta) -> Beta:
        r = self.rank
        return tuple(b1[i] + b2[i] for i in range(r)) + tuple((b1[i] + b2[i]) % 2 for i in range(r, r + self.torsion))

    def sub(self, b: Beta, b1: Beta) -> Beta:
        r = self.rank
        return tuple(b[i] - b1[i] for i in range(r)) + tuple((b[i] - b1[i]) % 2 for i in range(r, r + self.torsion))

    def is_effective(self, b: Beta) -> bool:
        return all(v >= 0 for v in b[: self.rank])

    def omega_of(self, b: Beta) -> Fraction:
        return sum((w * v for w, v in zip(self.omega, b)), Fraction(0))

    def mu_of(self, b: Beta) -> int:
        return sum(m * v for m, v in zip(self.mu, b))

    def validate(self) -> None:
        if self.gap <= 0:
            raise ConfigurationError("the energy gap must be positive")
        for w in self.omega:
            if w < self.gap:
                raise ConfigurationError(
                    f"generator energy {w} below the gap {self.gap}: enumeration would not be finite")

    def enumerate(self, E) -> list[Beta]:
        """All effective beta with omega(beta) <= E, ordered by energy."""
        E = Fraction(E)
        if E < 0:
            raise ValueError("energy cutoff must be non-negative")
        return list(_enumerate(self, E))

    def decompositions(self, b: Beta) -> list[tuple[Beta, Beta]]:
        """All (b1, b2) effective with b1 + b2 = b."""
        out = []
        for free in itertools.product(*(range(v + 1) for v in b[: self.rank])):
            for tors in itertools.product((0, 1), repeat=self.torsion):
                b1 = tuple(free) + tors
                out.append((b1, self.sub(b, b1)))
        return out


@functools.lru_cache(maxsize=256)
def _enumerate(group: DegreeGroup, E: Fraction) -> tuple[Beta, ...]:
    group.validate()
    bounds = [int(E // w) for w in group.omega]
    out = []
    for free in itertools.product(*(range(b + 1) for b in bounds)):
        if group.omega_of(free) <= E:
            for tors in itertools.product((0, 1), repeat=group.torsion):
                out.append(tuple(free) + tors)
    out.sort(key=lambda b: (group.omega_of(b), b))
    return tuple(out)


def enumerate_degrees(group: DegreeGroup, E) -> list[Beta]:
    return group.enumerate(E)


@dataclass(frozen=True)
class TVariables:
    degrees: tuple[int, ...] = ()

    @property
    def count(self) -> int:
        return len(self.degrees)

    def degree(self, exps: tuple[int, ...]) -> int:
        return sum(d * l for d, l in zip(self.degrees, exps))


@dataclass(frozen=True)
class Cutoff:
    energy: Fraction = Fraction(3)
    t_order: int = 3

    def __post_init__(self):
        object.__setattr__(self, "energy", Fraction(self.energy))


@dataclass(frozen=True)
class Ring:
    """The coefficient context shared by every element of one session."""

    group: DegreeGroup = field(default_factory=DegreeGroup)
    tvars: TVariables = field(default_factory=TVariables)
    cutoff: Cutoff = field(default_factory=Cutoff)

    # -- monomial helpers -------------------------------------------------
    def one_mono(self) -> Mono:
        return (0, (0,) * self.tvars.count, 0, self.group.zero, 0)

    def mono_degree(self, m: Mono) -> int:
        return m[0] + self.tvars.degree(m[1]) - m[2]

    def mono_valuation(self, m: Mono) -> Fraction:
        return self.group.omega_of(m[3]) + sum(m[1])

    def keeps(self, m: Mono) -> bool:
        return (sum(m[1]) <= self.cutoff.t_order
                and self.group.omega_of(m[3]) + sum(m[1]) <= self.cutoff.energy)

    def mono_mul(self, m1: Mono, m2: Mono) -> tuple[int, Mono] | None:
        """Product of normal-ordered monomials as (sign, monomial), or None if zero."""
        e1, l1, p1, b1, s1 = m1
        e2, l2, p2, b2, s2 = m2
        if e1 and e2:
            return None
        degs = self.tvars.degrees
        parity = e2 * self.tvars.degree(l1)
        for i, (a, d) in enumerate(zip(l1, degs)):
            if a and d % 2:
                for j in range(i):
                    if l2[j] and degs[j] % 2:
                        parity += a * l2[j]
        lt = tuple(a + b for a, b in zip(l1, l2))
        for v, d in zip(lt, degs):
            if d % 2 and v > 1:
                return None
        return (-1 if parity % 2 else 1), (e1 + e2, lt, p1 + p2, self.group.add(b1, b2), s1 + s2)

    def __repr__(self) -> str:
        return f"Ring(rank={self.group.rank}, t={self.tvars.degrees}, E={self.cutoff.energy}, Nt={self.cutoff.t_order})"


class Nov:
    """A truncated scalar: a sparse map from monomials to Fractions."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[Mono, Fraction] | None = None, *, truncate: bool = True):
        self.ring = ring
        self.terms: dict[Mono, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c and (not truncate or ring.keeps(m)):
                    self.terms[m] = Fraction(c)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring) -> "Nov":
        return cls(ring)

    @classmethod
    def const(cls, ring: Ring, c=1) -> "Nov":
        return cls(ring, {ring.one_mono(): Fraction(c)})

    @classmethod
    def monomial(cls, ring: Ring, coeff=1, *, beta: Beta | None = None, t: Iterable[int] | None = None,
                 p: int = 0, s: int = 0, dt: int = 0) -> "Nov":
        if p % 2:
            raise ValueError("only even powers of x are scalars")
        t = tuple(t) if t is not None else (0,) * ring.tvars.count
        beta = tuple(beta) if beta is not None else ring.group.zero
        return cls(ring, {(dt, t, p, beta, s): Fraction(coeff)})

    @classmethod
    def T(cls, ring: Ring, beta: Beta, coeff=1) -> "Nov":
        return cls.monomial(ring, coeff, beta=beta)

    @classmethod
    def t(cls, ring: Ring, i: int, coeff=1) -> "Nov":
        exps = [0] * ring.tvars.count
        exps[i] = 1
        return cls.monomial(ring, coeff, t=exps)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Nov") -> None:
        if self.ring != other.ring:
            raise IncompatibleCutoff(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "Nov") -> "Nov":
        if not isinstance(other, Nov):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Nov(self.ring, out)

    def __neg__(self) -> "Nov":
        return Nov(self.ring, {m: -c for m, c in self.terms.items()}, truncate=False)

    def __sub__(self, other: "Nov") -> "Nov":
        return self + (-other)

    def scale(self, c) -> "Nov":
        c = Fraction(c)
        return Nov(self.ring, {m: c * v for m, v in self.terms.items()}, truncate=False)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Nov):
            return NotImplemented
        self._check(other)
        ring = self.ring
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                r = ring.mono_mul(m1, m2)
                if r is None:
                    continue
                sgn, m = r
                if not ring.keeps(m):
                    continue
                v = out.get(m, 0) + sgn * c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Nov(ring, out, truncate=False)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, Nov):
            return self.ring == other.ring and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- structure --------------------------------------------------------
    def homogeneous_parts(self) -> dict[int, "Nov"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.ring.mono_degree(m), {})[m] = c
        return {d: Nov(self.ring, t, truncate=False) for d, t in parts.items()}

    def degree(self) -> int:
        """Degree of a homogeneous element (0 for zero)."""
        degs = {self.ring.mono_degree(m) for m in self.terms}
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop() if degs else 0

    def is_homogeneous(self) -> bool:
        return len({self.ring.mono_degree(m) for m in self.terms}) <= 1

    def valuation(self) -> Fraction | float:
        if not self.terms:
            return INF
        return min(self.ring.mono_valuation(m) for m in self.terms)

    def ideal_reduce(self) -> "Nov":
        """Image in the quotient by the positive-valuation ideal."""
        return Nov(self.ring, {m: c for m, c in self.terms.items() if self.ring.mono_valuation(m) == 0},
                   truncate=False)

    def beta_part(self, beta: Beta) -> "Nov":
        return Nov(self.ring, {m: c for m, c in self.terms.items() if m[3] == beta}, truncate=False)

    def t_order_part(self, order: int) -> "Nov":
        return Nov(self.ring, {m: c for m, c in self.terms.items() if sum(m[1]) == order}, truncate=False)

    def d(self) -> "Nov":
        """Interval differential dt * d/ds (dt sits leftmost, so no sign)."""
        out = {}
        for (e, l, p, b, s), c in self.terms.items():
            if e == 0 and s > 0:
                out[(1, l, p, b, s - 1)] = out.get((1, l, p, b, s - 1), 0) + s * c
        return Nov(self.ring, out, truncate=False)

    def dt_derivative(self, i: int) -> "Nov":
        """Left partial derivative in t_i."""
        degs = self.ring.tvars.degrees
        out = {}
        for (e, l, p, b, s), c in self.terms.items():
            if not l[i]:
                continue
            parity = degs[i] * (e + sum(l[j] * degs[j] for j in range(i)))
            nl = l[:i] + (l[i] - 1,) + l[i + 1:]
            key = (e, nl, p, b, s)
            out[key] = out.get(key, 0) + (-1 if parity % 2 else 1) * l[i] * c
        return Nov(self.ring, {m: v for m, v in out.items() if v}, truncate=False)

    def restrict(self, at: int) -> "Nov":
        """Pull back to the endpoint s = at of the interval (kills dt)."""
        out = {}
        for (e, l, p, b, s), c in self.terms.items():
            if e:
                continue
            if at == 0 and s > 0:
                continue
            key = (0, l, p, b, 0)
            out[key] = out.get(key, 0) + c
        return Nov(self.ring, {m: v for m, v in out.items() if v}, truncate=False)

    def has_interval_dependence(self) -> bool:
        return any(m[0] or m[4] for m in self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{format_mono(self.ring, m)}" for m, c in sorted(self.terms.items()))


def format_mono(ring: Ring, m: Mono) -> str:
    e, l, p, b, s = m
    parts = []
    if e:
        parts.append("dt")
    parts += [f"t{i}^{v}" if v > 1 else f"t{i}" for i, v in enumerate(l) if v]
    if p:
        parts.append(f"x^{p}")
    if any(b):
        parts.append(f"T^{b}")
    if s:
        parts.append(f"s^{s}" if s > 1 else "s")
    return "*".join(parts) or "1"


# functional aliases
def nov_add(x: Nov, y: Nov) -> Nov:
    return x + y


def nov_mul(x: Nov, y: Nov) -> Nov:
    return x * y


def valuation(x: Nov):
    return x.valuation()


def ideal_reduce(x: Nov) -> Nov:
    return x.ideal_reduce()


def valuation_test_rings() -> list[Ring]:
    """Rings exercising torsion, fractional energies and odd t-variables."""
    return [
        Ring(DegreeGroup(1, 0, (1,), (1,)), TVariables((2, 0)), Cutoff(3, 3)),
        Ring(DegreeGroup(2, 1, (2, 0), (Fraction(1, 2), Fraction(3, 2)), gap=Fraction(1, 2)),
             TVariables((2, 1, 0)), Cutoff(4, 3)),
        Ring(DegreeGroup(0, 0, (), ()), TVariables((-1, 2)), Cutoff(0, 4)),
    ]


def verify_valuation_laws(trials: int = 1000, seed: int = 0, *, rings: list[Ring] | None = None):
    """Exact check of the valuation inequalities on random pairs.

    Each trial draws a ring and two random (not necessarily homogeneous)
    elements, then checks nu(xy) >= nu(x) + nu(y) and nu(x + y) >= min.  A
    pair of single monomials is also drawn per trial; for those the product
    valuation must be additive whenever the product survives truncation, and
    a sum of two monomials of different valuation must attain the minimum.
    """
    import random
    import time

    from .report import Report
    from .sampling import random_mono

    if trials <= 0:
        raise ValueError("trials must be positive")
    start = time.perf_counter()
    rng = random.Random(seed)
    rings = rings or valuation_test_rings()
    rep = Report("valuation laws", {"trials": trials, "seed": seed, "rings": [repr(r) for r in rings]})
    coeffs = (Fraction(1), Fraction(-1), Fraction(2), Fraction(-5, 3))

    def element(ring):
        if rng.random() < 0.05:
            return Nov.zero(ring)
        terms = {}
        for _ in range(rng.randint(1, 4)):
            m = random_mono(ring, rng)
            if m is not None:
                terms[m] = terms.get(m, 0) + rng.choice(coeffs)
        return Nov(ring, terms)

    def law(check, holds, ring, x, y):
        check.count += 1
        if not holds:
            check.fail({"ring": repr(ring), "x": repr(x), "y": repr(y)})

    zero = rep.check("zero has infinite valuation")
    for ring in rings:
        zero.expect(Nov.zero(ring).valuation() == INF, repr(ring))

    for _ in range(trials):
        ring = rng.choice(rings)
        x, y = element(ring), element(ring)
        nx, ny = x.valuation(), y.valuation()
        law(rep.check("submultiplicative"), (x * y).valuation() >= nx + ny, ring, x, y)
        law(rep.check("ultrametric"), (x + y).valuation() >= min(nx, ny), ring, x, y)

        m1, m2 = random_mono(ring, rng), random_mono(ring, rng)
        if m1 is None or m2 is None:
            continue
        a = Nov(ring, {m1: rng.choice(coeffs)})
        b = Nov(ring, {m2: rng.choice(coeffs)})
        prod = ring.mono_mul(m1, m2)
        if prod is not None and ring.keeps(prod[1]):
            law(rep.check("monomial product additive"),
                (a * b).valuation() == a.valuation() + b.valuation(), ring, a, b)
        if a.valuation() != b.valuation():
            law(rep.check("monomial sum attains minimum"),
                (a + b).valuation() == min(a.valuation(), b.valuation()), ring, a, b)
    rep.elapsed = time.perf_counter() - start
    return rep
