"""Polynomial forms on L x [0,1]^m, fiber integration, and the interval Stokes and Fubini laws.

A :class:`FamilyElement` is a finite sum of terms

    c * x^p * e_b  ^  t_1^{j_1} ... t_m^{j_m}  ^  dt_{i_1} ^ ... ^ dt_{i_r}      (i_1 < ... < i_r)

with the datum factor on the left and the interval form on the right.  Only
even x-powers occur, so x commutes with everything.  Pushforward along t_i
integrates over [0,1] with the fiber form moved to the far right, which is
the pushforward (pi, O)_* for the standard orientation of the interval.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .coefficients import TwistedPoincareDatum
from .report import Report

TermKey = tuple[int, int, tuple[int, ...], tuple[int, ...]]   # (basis, x-power, t-exponents, dt mask)


def _sgn(parity: int) -> int:
    return -1 if parity % 2 else 1


@dataclass(frozen=True)
class FamilyElement:
    datum: TwistedPoincareDatum
    nvars: int
    terms: tuple[tuple[TermKey, Fraction], ...]

    @classmethod
    def build(cls, datum, nvars: int, terms: Mapping[TermKey, Fraction]) -> "FamilyElement":
        clean = {}
        for (b, p, j, m), c in terms.items():
            if p % 2:
                raise ValueError("only even powers of x are allowed")
            if len(j) != nvars or len(m) != nvars or any(v not in (0, 1) for v in m):
                raise ValueError("exponent and dt tuples must have one entry per interval variable")
            c = Fraction(c)
            if c:
                clean[(b, p, tuple(j), tuple(m))] = clean.get((b, p, tuple(j), tuple(m)), 0) + c
        return cls(datum, nvars, tuple(sorted((k, v) for k, v in clean.items() if v)))

    @classmethod
    def basis(cls, datum, b: int, nvars: int = 1, coeff=1) -> "FamilyElement":
        return cls.build(datum, nvars, {(b, 0, (0,) * nvars, (0,) * nvars): coeff})

    @classmethod
    def zero(cls, datum, nvars: int = 1) -> "FamilyElement":
        return cls(datum, nvars, ())

    def as_dict(self) -> dict[TermKey, Fraction]:
        return dict(self.terms)

    def _new(self, terms: Mapping[TermKey, Fraction], nvars: int | None = None) -> "FamilyElement":
        return FamilyElement.build(self.datum, self.nvars if nvars is None else nvars, terms)

    def __add__(self, other: "FamilyElement") -> "FamilyElement":
        self._check(other)
        out = self.as_dict()
        for k, v in other.terms:
            out[k] = out.get(k, 0) + v
        return self._new(out)

    def __neg__(self) -> "FamilyElement":
        return self.scale(-1)

    def __sub__(self, other: "FamilyElement") -> "FamilyElement":
        return self + (-other)

    def scale(self, c) -> "FamilyElement":
        return self._new({k: v * c for k, v in self.terms})

    def __eq__(self, other) -> bool:
        return isinstance(other, FamilyElement) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check(self, other: "FamilyElement") -> None:
        if other.datum is not self.datum or other.nvars != self.nvars:
            raise ValueError("family elements live over different data")

    # -- grading ------------------------------------------------------------
    def term_degree(self, key: TermKey) -> int:
        b, p, _j, m = key
        return self.datum.degree(b) - p + sum(m)

    def homogeneous_parts(self) -> dict[int, "FamilyElement"]:
        parts: dict[int, dict] = {}
        for k, v in self.terms:
            parts.setdefault(self.term_degree(k), {})[k] = v
        return {d: self._new(t) for d, t in sorted(parts.items())}

    def degree(self) -> int:
        degs = {self.term_degree(k) for k, _ in self.terms}
        if len(degs) != 1:
            raise ValueError(f"element is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    # -- operations ---------------------------------------------------------
    def d(self) -> "FamilyElement":
        """Total differential: d_L on the datum factor plus sum_i dt_i d/dt_i on the right."""
        out: dict[TermKey, Fraction] = {}
        for (b, p, j, m), c in self.terms:
            for b2, v in self.datum.dtable.get(b, {}).items():
                key = (b2, p, j, m)
                out[key] = out.get(key, 0) + c * v
            s0 = self.datum.degree(b)
            for i in range(self.nvars):
                if not j[i] or m[i]:
                    continue
                # dt_i is produced just right of the polynomial, then sorted into place
                s = s0 + sum(m[:i])
                nj = j[:i] + (j[i] - 1,) + j[i + 1:]
                nm = m[:i] + (1,) + m[i + 1:]
                key = (b, p, nj, nm)
                out[key] = out.get(key, 0) + _sgn(s) * j[i] * c
        return self._new(out)

    def restrict(self, at: int | Fraction, var: int = 0) -> "FamilyElement":
        """Pull back along j_at: set t_var = at and kill dt_var; the variable is dropped."""
        at = Fraction(at)
        out: dict[TermKey, Fraction] = {}
        for (b, p, j, m), c in self.terms:
            if m[var]:
                continue
            key = (b, p, j[:var] + j[var + 1:], m[:var] + m[var + 1:])
            out[key] = out.get(key, 0) + c * at ** j[var]
        return self._new(out, self.nvars - 1)

    def pushforward(self, var: int = 0) -> "FamilyElement":
        """Integrate over t_var in [0,1]; dt_var is first moved to the far right."""
        out: dict[TermKey, Fraction] = {}
        for (b, p, j, m), c in self.terms:
            if not m[var]:
                continue
            s = sum(m[var + 1:])
            key = (b, p, j[:var] + j[var + 1:], m[:var] + m[var + 1:])
            out[key] = out.get(key, 0) + _sgn(s) * c / (j[var] + 1)
        return self._new(out, self.nvars - 1)

    def wedge(self, other: "FamilyElement") -> "FamilyElement":
        self._check(other)
        out: dict[TermKey, Fraction] = {}
        for (b1, p1, j1, m1), c1 in self.terms:
            for (b2, p2, j2, m2), c2 in other.terms:
                if any(a and b for a, b in zip(m1, m2)):
                    continue
                prod = self.datum.wedge.get((b1, b2))
                if not prod:
                    continue
                # move the interval form of the left factor past e_{b2}, then merge dt's
                s = sum(m1) * self.datum.degree(b2)
                s += sum(m1[i] for i in range(self.nvars) for k in range(i) if m2[k])
                j = tuple(a + b for a, b in zip(j1, j2))
                m = tuple(a + b for a, b in zip(m1, m2))
                for (b, p), v in prod.items():
                    key = (b, p1 + p2 + p, j, m)
                    out[key] = out.get(key, 0) + _sgn(s) * c1 * c2 * v
        return self._new(out)

    def lift(self, nvars: int) -> "FamilyElement":
        """Pull a datum element (nvars = 0) back to L x [0,1]^nvars."""
        if self.nvars:
            raise ValueError("only datum elements can be lifted")
        zeros = (0,) * nvars
        return FamilyElement.build(self.datum, nvars, {(b, p, zeros, zeros): c for (b, p, _j, _m), c in self.terms})

    def swap(self) -> "FamilyElement":
        """Pull back along (t_0, t_1) -> (t_1, t_0) on a two-interval family."""
        if self.nvars != 2:
            raise ValueError("swap needs exactly two interval variables")
        out = {}
        for (b, p, j, m), c in self.terms:
            s = m[0] * m[1]
            key = (b, p, (j[1], j[0]), (m[1], m[0]))
            out[key] = out.get(key, 0) + _sgn(s) * c
        return self._new(out)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = self.datum.names
        parts = []
        for (b, p, j, m), c in self.terms:
            s = f"{c}"
            if p:
                s += f"*x^{p}"
            s += f"*{names[b]}"
            for i, e in enumerate(j):
                if e:
                    s += f"*t{i}^{e}" if e > 1 else f"*t{i}"
            for i, e in enumerate(m):
                if e:
                    s += f"*dt{i}"
            parts.append(s)
        return " + ".join(parts)


def restrict(x: FamilyElement, at, var: int = 0) -> FamilyElement:
    return x.restrict(at, var)


def family_d(x: FamilyElement) -> FamilyElement:
    return x.d()


def pushforward_interval(x: FamilyElement, var: int = 0) -> FamilyElement:
    return x.pushforward(var)


def t_power(datum, b: int, j: int, nvars: int = 1, var: int = 0, dt: bool = False, coeff=1) -> FamilyElement:
    exps = tuple(j if i == var else 0 for i in range(nvars))
    mask = tuple(1 if (i == var and dt) else 0 for i in range(nvars))
    return FamilyElement.build(datum, nvars, {(b, 0, exps, mask): coeff})


def random_family(datum, rng: random.Random, nvars: int = 1, max_degree: int = 6, terms: int = 4,
                  degree: int | None = None) -> FamilyElement:
    """A random homogeneous polynomial family (total degree ``degree`` if given)."""
    out: dict[TermKey, Fraction] = {}
    target = degree
    for _ in range(terms * 4):
        if len(out) >= terms:
            break
        b = rng.randrange(datum.size)
        m = tuple(rng.randint(0, 1) for _ in range(nvars))
        p_needed = datum.degree(b) + sum(m) - target if target is not None else 2 * rng.randint(-1, 1)
        if p_needed % 2:
            continue
        j = tuple(rng.randint(0, max_degree) for _ in range(nvars))
        while sum(j) > max_degree:
            j = tuple(max(0, e - 1) for e in j)
        if target is None:
            target = datum.degree(b) - p_needed + sum(m)
        key = (b, p_needed, j, m)
        out[key] = out.get(key, 0) + Fraction(rng.choice((1, -1, 2, -3, 5)), rng.choice((1, 2, 3, 7)))
    return FamilyElement.build(datum, nvars, out)


def pushforward_square(z: FamilyElement) -> FamilyElement:
    """Integrate over [0,1]^2 oriented by dt_0 ^ dt_1, computed directly from the coefficients."""
    if z.nvars != 2:
        raise ValueError("needs a two-interval family")
    out: dict[TermKey, Fraction] = {}
    for (b, p, j, m), c in z.terms:
        if m == (1, 1):
            out[(b, p, (), ())] = out.get((b, p, (), ()), 0) + c / ((j[0] + 1) * (j[1] + 1))
    return FamilyElement.build(z.datum, 0, out)


# ---------------------------------------------------------------------------
# verification

def stokes_residual(xi: FamilyElement, *, mutate: bool = False) -> FamilyElement:
    """d(pi_* xi) - pi_*(d xi) - (-1)^{1+|xi|} (j_1^* xi - j_0^* xi) for homogeneous xi."""
    s = xi.degree() + (0 if mutate else 1)
    boundary = (xi.restrict(1) - xi.restrict(0)).scale(_sgn(s))
    return xi.pushforward().d() - xi.d().pushforward() - boundary


def verify_stokes_interval(trials: int = 1000, seed: int = 0, *, data=None, max_degree: int = 6,
                           mutate: bool = False, max_witnesses: int = 10) -> Report:
    """Stokes, projection formula, chain-map and two-interval Fubini checks on random polynomial families.

    ``mutate`` flips the boundary sign in the Stokes identity.
    """
    from .coefficients import builtin_models

    if trials <= 0:
        raise ValueError("trials must be positive")
    start = time.perf_counter()
    rng = random.Random(seed)
    data = list(data or builtin_models().values())
    rep = Report("interval Stokes and Fubini", {"trials": trials, "seed": seed, "max_degree": max_degree,
                                                "mutate": mutate, "data": [D.name for D in data]})
    W = max_witnesses
    for trial in range(trials):
        D = data[trial % len(data)]
        xi = FamilyElement.zero(D, 1)
        while not xi:
            xi = random_family(D, rng, 1, max_degree)
        res = stokes_residual(xi, mutate=mutate)
        rep.check("Stokes").expect(not res, {"datum": D.name, "xi": repr(xi), "residual": repr(res)}, W)

        for at in (0, 1):
            rep.check("restriction is a chain map").expect(xi.d().restrict(at) == xi.restrict(at).d(),
                                                           {"datum": D.name, "xi": repr(xi)}, W)
        rep.check("d squared").expect(not xi.d().d(), {"datum": D.name, "xi": repr(xi)}, W)

        eta = random_family(D, rng, 0, 0)
        if eta:
            left = xi.wedge(eta.lift(1)).pushforward()
            # xi carries the fiber orientation on its right, so eta passes it
            right = xi.pushforward().wedge(eta).scale(_sgn(eta.degree()))
            rep.check("projection formula (right)").expect(left == right, {"xi": repr(xi), "eta": repr(eta)}, W)
            rep.check("projection formula (left)").expect(
                eta.lift(1).wedge(xi).pushforward() == eta.wedge(xi.pushforward()),
                {"xi": repr(xi), "eta": repr(eta)}, W)

        zeta = FamilyElement.zero(D, 2)
        while not zeta:
            zeta = random_family(D, rng, 2, max_degree)
        u_then_t = zeta.pushforward(1).pushforward(0)
        t_then_u = zeta.pushforward(0).pushforward(0)
        wit = {"datum": D.name, "zeta": repr(zeta)}
        rep.check("Fubini: iterated equals square").expect(u_then_t == pushforward_square(zeta), wit, W)
        rep.check("Fubini: orders differ by the fiber swap").expect(t_then_u == -u_then_t, wit, W)
        rep.check("Fubini: swapped family").expect(
            t_then_u == zeta.swap().pushforward(1).pushforward(0), wit, W)
    rep.elapsed = time.perf_counter() - start
    return rep

