"""Orientation local system, the ring R_L, the field E, and twisted Poincare data.

The orientation line of L is modelled by a formal generator ``x`` of degree
-1; ``R_L`` is the Laurent ring in ``x`` with the plain (non-symmetrised)
product.  A twisted Poincare datum is a finite graded algebra standing in for
A*(L; R_L): its basis elements are forms ``omega * x^e`` with ``e`` in {0, 1},
higher even powers of ``x`` being scalars in E.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .novikov import Nov, Ring
from .report import Report
from .signs import sign


# ---------------------------------------------------------------------------
# the Lagrangian and its orientation character

@dataclass(frozen=True)
class LagrangianModel:
    n: int
    loops: tuple[str, ...] = ()
    w1: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.loops) != len(self.w1):
            raise ValueError("w1 needs one value per loop")

    @property
    def orientable(self) -> bool:
        return not any(w % 2 for w in self.w1)

    def character(self, loop: str) -> int:
        try:
            return self.w1[self.loops.index(loop)] % 2
        except ValueError:
            raise KeyError(f"unknown loop {loop!r}") from None


class RLElement:
    """Finite Laurent polynomial in x; x^k has degree -k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, Fraction] | None = None):
        self.coeffs = {k: Fraction(c) for k, c in (coeffs or {}).items() if c}

    @classmethod
    def x(cls, k: int = 1, c=1) -> "RLElement":
        return cls({k: c})

    def __mul__(self, other: "RLElement") -> "RLElement":
        # the product is the tensor product of lines: exponents add, no sign
        out: dict[int, Fraction] = {}
        for a, ca in self.coeffs.items():
            for b, cb in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + ca * cb
        return RLElement(out)

    def __add__(self, other: "RLElement") -> "RLElement":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return RLElement(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, RLElement) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*x^{k}" for k, c in sorted(self.coeffs.items()))


def rl_mul(a: RLElement, b: RLElement) -> RLElement:
    return a * b


def monodromy_act(model: LagrangianModel, loop: str, a: RLElement) -> RLElement:
    w = model.character(loop)
    return RLElement({k: c * sign(k * w) for k, c in a.coeffs.items()})


@dataclass(frozen=True)
class EField:
    """Monodromy invariants of R_L: all x-powers, or only even ones."""

    orientable: bool

    def contains_power(self, k: int) -> bool:
        return self.orientable or k % 2 == 0

    def contains(self, a: RLElement) -> bool:
        return all(self.contains_power(k) for k in a.coeffs)

    @property
    def fiber_rank(self) -> int:
        """Rank of a fiber of R_L over E."""
        return 1 if self.orientable else 2

    def basis_powers(self, lo: int, hi: int) -> list[int]:
        return [k for k in range(lo, hi + 1) if self.contains_power(k)]


def compute_efield(model: LagrangianModel) -> EField:
    return EField(orientable=model.orientable)


@dataclass(frozen=True)
class OSplit:
    """Result of splitting one orientation line off an R_L element."""

    line: RLElement        # E-coefficients that carry one split-off line
    plain: RLElement       # part with no line (zero in the odd variant)
    line_weight: int       # degree bookkeeping weight of the split line, 1 - n


def o_split(a: RLElement, odd_only: bool, n: int = 0) -> OSplit:
    line, plain = {}, {}
    for k, c in a.coeffs.items():
        if k % 2:
            line[k - 1] = c
        elif not odd_only:
            plain[k] = c
    return OSplit(RLElement(line), RLElement(plain), 1 - n)


# ---------------------------------------------------------------------------
# graded spaces and their elements

@dataclass
class Basis:
    name: str
    form_degree: int
    e: int = 0

    @property
    def degree(self) -> int:
        return self.form_degree - self.e


class Cochain:
    """A sum of scalar * basis vector over a graded space; scalars sit on the left."""

    __slots__ = ("space", "ring", "terms")

    def __init__(self, space, ring: Ring, terms: Mapping[tuple, Fraction] | None = None, *, truncate: bool = True):
        self.space = space
        self.ring = ring
        self.terms: dict[tuple, Fraction] = {}
        if terms:
            for (b, m), c in terms.items():
                if c and (not truncate or ring.keeps(m)):
                    self.terms[(b, m)] = Fraction(c)

    @classmethod
    def basis(cls, space, ring: Ring, b: int, coeff=1) -> "Cochain":
        return cls(space, ring, {(b, ring.one_mono()): Fraction(coeff)})

    @classmethod
    def from_scalar(cls, space, b: int, a: Nov) -> "Cochain":
        return cls(space, a.ring, {(b, m): c for m, c in a.terms.items()}, truncate=False)

    @classmethod
    def zero(cls, space, ring: Ring) -> "Cochain":
        return cls(space, ring)

    def _new(self, terms) -> "Cochain":
        return Cochain(self.space, self.ring, terms, truncate=False)

    def __add__(self, other: "Cochain") -> "Cochain":
        if not isinstance(other, Cochain):
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._new(out)

    def __neg__(self) -> "Cochain":
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, c) -> "Cochain":
        c = Fraction(c)
        if not c:
            return self._new({})
        return self._new({k: c * v for k, v in self.terms.items()})

    def lmul(self, a: Nov) -> "Cochain":
        """a * self, with a a scalar acting from the left."""
        ring = self.ring
        out: dict = {}
        for m1, c1 in a.terms.items():
            for (b, m2), c2 in self.terms.items():
                r = ring.mono_mul(m1, m2)
                if r is None:
                    continue
                sgn, m = r
                if not ring.keeps(m):
                    continue
                key = (b, m)
                v = out.get(key, 0) + sgn * c1 * c2
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return self._new(out)

    def __eq__(self, other) -> bool:
        if isinstance(other, Cochain):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.terms)

    def term_degree(self, key) -> int:
        b, m = key
        return self.space.degree(b) + self.ring.mono_degree(m)

    def homogeneous_parts(self) -> dict[int, "Cochain"]:
        parts: dict[int, dict] = {}
        for k, c in self.terms.items():
            parts.setdefault(self.term_degree(k), {})[k] = c
        return {d: self._new(t) for d, t in parts.items()}

    def degree(self) -> int:
        degs = {self.term_degree(k) for k in self.terms}
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop() if degs else 0

    def valuation(self):
        if not self.terms:
            return float("inf")
        return min(self.ring.mono_valuation(m) for _, m in self.terms)

    def components(self) -> dict[int, Nov]:
        """Scalar coefficient of each basis vector."""
        out: dict[int, dict] = {}
        for (b, m), c in self.terms.items():
            out.setdefault(b, {})[m] = c
        return {b: Nov(self.ring, t, truncate=False) for b, t in out.items()}

    def map_scalars(self, f) -> "Cochain":
        out = Cochain.zero(self.space, self.ring)
        for b, a in self.components().items():
            out = out + Cochain.from_scalar(self.space, b, f(a))
        return out

    def restrict(self, at: int) -> "Cochain":
        return self.map_scalars(lambda a: a.restrict(at))

    def ideal_reduce(self) -> "Cochain":
        return self.map_scalars(lambda a: a.ideal_reduce())

    def beta_part(self, beta) -> "Cochain":
        return self._new({(b, m): c for (b, m), c in self.terms.items() if m[3] == beta})

    def dt_derivative(self, i: int) -> "Cochain":
        return self.map_scalars(lambda a: a.dt_derivative(i))

    def d(self) -> "Cochain":
        """Total differential d(a*b) = da*b + (-1)^|a| a*db."""
        out = Cochain.zero(self.space, self.ring)
        for b, a in self.components().items():
            da = a.d()
            if da:
                out = out + Cochain.from_scalar(self.space, b, da)
            db = self.space.d_basis(b, self.ring)
            if db:
                for deg, part in a.homogeneous_parts().items():
                    out = out + db.lmul(part).scale(sign(deg))
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        from .novikov import format_mono
        names = self.space.names
        return " + ".join(f"{c}*{format_mono(self.ring, m)}*{names[b]}"
                          for (b, m), c in sorted(self.terms.items()))


class GradedSpace:
    """Shared plumbing for the datum and the ambient model."""

    basis: list[Basis]
    dtable: dict[int, dict[int, Fraction]]

    @property
    def names(self) -> list[str]:
        return [b.name for b in self.basis]

    @property
    def size(self) -> int:
        return len(self.basis)

    def degree(self, b: int) -> int:
        return self.basis[b].degree

    def index(self, name: str) -> int:
        return self.names.index(name)

    def d_basis(self, b: int, ring: Ring) -> Cochain:
        one = ring.one_mono()
        return Cochain(self, ring, {(c, one): v for c, v in self.dtable.get(b, {}).items()})

    def element(self, ring: Ring, coeffs: Mapping[str, object]) -> Cochain:
        """Build an element from {basis name: rational or scalar}."""
        out = Cochain.zero(self, ring)
        for name, c in coeffs.items():
            b = self.index(name)
            if isinstance(c, Nov):
                out = out + Cochain.from_scalar(self, b, c)
            else:
                out = out + Cochain.basis(self, ring, b, c)
        return out


@dataclass(eq=False)
class TwistedPoincareDatum(GradedSpace):
    """Finite model of A*(L; R_L) with differential, product and odd trace.

    ``wedge[(b1, b2)]`` maps to {(b, p): coeff} meaning coeff * x^p * basis b;
    ``trace[b]`` is defined on basis elements of form degree n with e = 1.
    ``form_trace`` optionally records integrals of untwisted top forms
    (orientable models only), used by the full pairing.
    """

    name: str
    model: LagrangianModel
    basis: list[Basis]
    dtable: dict[int, dict[int, Fraction]] = field(default_factory=dict)
    wedge: dict[tuple[int, int], dict[tuple[int, int], Fraction]] = field(default_factory=dict)
    trace: dict[int, Fraction] = field(default_factory=dict)
    form_trace: dict[int, Fraction] = field(default_factory=dict)
    unit_index: int = 0

    @property
    def n(self) -> int:
        return self.model.n

    def form_degree(self, b: int) -> int:
        return self.basis[b].form_degree

    def unit(self, ring: Ring) -> Cochain:
        return Cochain.basis(self, ring, self.unit_index)

    def wedge_basis(self, b1: int, b2: int, ring: Ring) -> Cochain:
        terms = {}
        for (b, p), c in self.wedge.get((b1, b2), {}).items():
            terms[(b, (0, (0,) * ring.tvars.count, p, ring.group.zero, 0))] = c
        return Cochain(self, ring, terms)

    def wedge_elems(self, xi: Cochain, eta: Cochain) -> Cochain:
        """(S1 b1)(S2 b2) = (-1)^{|b1||S2|} S1 S2 (b1 b2)."""
        ring = xi.ring
        out = Cochain.zero(self, ring)
        eta_parts = eta.components()
        for b1, s1 in xi.components().items():
            for b2, s2 in eta_parts.items():
                prod = self.wedge_basis(b1, b2, ring)
                if not prod:
                    continue
                for deg2, p2 in s2.homogeneous_parts().items():
                    coeff = (s1 * p2).scale(sign(self.degree(b1) * deg2))
                    if coeff:
                        out = out + prod.lmul(coeff)
        return out

    def int_odd(self, xi: Cochain) -> Nov:
        """Zero on parity-n components; the trace (left-linear) on parity n-1."""
        out = Nov.zero(xi.ring)
        for b, a in xi.components().items():
            t = self.trace.get(b)
            if t:
                out = out + a.scale(t)
        return out

    def int_full(self, xi: Cochain) -> Nov:
        """Integration after the full split O: also integrates untwisted top forms."""
        out = self.int_odd(xi)
        for b, a in xi.components().items():
            t = self.form_trace.get(b)
            if t:
                out = out + a.scale(t)
        return out

    def pairing(self, xi: Cochain, eta: Cochain, variant: str = "odd") -> Nov:
        out = Nov.zero(xi.ring)
        for dx, x_part in xi.homogeneous_parts().items():
            for de, e_part in eta.homogeneous_parts().items():
                prod = self.wedge_elems(x_part, e_part)
                if variant == "odd":
                    out = out + self.int_odd(prod).scale(sign(de))
                elif variant == "full":
                    # (-1)^{|eta|} agrees with (-1)^{|xi| + n(|xi| + |eta|)} on untwisted top
                    # forms and with the odd pairing on twisted ones
                    out = out + self.int_full(prod).scale(sign(de))
                else:
                    raise ValueError(f"unknown pairing variant {variant!r}")
        return out

    # -- validation -------------------------------------------------------
    def validate(self, ring: Ring | None = None) -> Report:
        ring = ring or Ring()
        rep = Report(f"datum {self.name}")
        B = range(self.size)
        el = [Cochain.basis(self, ring, b) for b in B]
        for b in B:
            db = self.d_basis(b, ring)
            for (c, _), _v in db.terms.items():
                rep.check("degree-of-d").expect(self.degree(c) == self.degree(b) + 1, (b, c))
            rep.check("d-squared").expect(db.d() == 0, self.names[b])
            rep.check("trace-d").expect(self.int_odd(db) == 0, self.names[b])
            rep.check("trace-parity").expect(
                b not in self.trace or (self.degree(b) - self.n + 1) % 2 == 0, self.names[b])
            rep.check("unit").expect(self.wedge_elems(el[self.unit_index], el[b]) == el[b]
                                     and self.wedge_elems(el[b], el[self.unit_index]) == el[b], self.names[b])
        for b1, b2 in itertools.product(B, B):
            prod = self.wedge_elems(el[b1], el[b2])
            for (c, m), _v in prod.terms.items():
                rep.check("degree-of-wedge").expect(
                    self.degree(c) + ring.mono_degree(m) == self.degree(b1) + self.degree(b2), (b1, b2))
            lhs = prod.d()
            rhs = self.wedge_elems(el[b1].d(), el[b2]) + self.wedge_elems(el[b1], el[b2].d()).scale(
                sign(self.degree(b1)))
            rep.check("leibniz").expect(lhs == rhs, (self.names[b1], self.names[b2]))
            t12 = self.int_odd(prod)
            t21 = self.int_odd(self.wedge_elems(el[b2], el[b1]))
            rep.check("trace-graded-symmetry").expect(
                t12 == t21.scale(sign(self.degree(b1) * self.degree(b2))), (self.names[b1], self.names[b2]))
        for b1, b2, b3 in itertools.product(B, B, B):
            lhs = self.wedge_elems(self.wedge_elems(el[b1], el[b2]), el[b3])
            rhs = self.wedge_elems(el[b1], self.wedge_elems(el[b2], el[b3]))
            rep.check("associativity").expect(lhs == rhs, (b1, b2, b3))
        return rep


def datum_from_forms(name: str, model: LagrangianModel, forms: Sequence[tuple[str, int, int]],
                     fwedge: Mapping[tuple[str, str], Mapping[str, int]],
                     fd: Mapping[str, Mapping[str, int]] | None = None,
                     ftrace: Mapping[str, int] | None = None) -> TwistedPoincareDatum:
    """Build a datum from a form algebra.

    ``forms`` lists (name, form degree, twist), twist 1 meaning the form takes
    values in the orientation local system.  Orientable models get every form
    in both x^0 and x^1 versions; otherwise a twisted form appears as
    ``omega x`` and an untwisted one as ``omega``.  Products follow
    (w1 x^e1)(w2 x^e2) = (-1)^{e1 f2} (w1 w2) x^{e1+e2}.
    """
    fd = fd or {}
    ftrace = ftrace or {}
    basis: list[Basis] = []
    lookup: dict[tuple[str, int], int] = {}
    fdeg = {f: deg for f, deg, _ in forms}
    for fname, deg, tw in forms:
        exps = (0, 1) if model.orientable else (tw,)
        for e in exps:
            label = fname if e == 0 else (f"{fname}x" if fname != "1" else "x")
            lookup[(fname, e)] = len(basis)
            basis.append(Basis(label, deg, e))

    wedge: dict = {}
    for (f1, e1), b1 in lookup.items():
        for (f2, e2), b2 in lookup.items():
            prod = fwedge.get((f1, f2), {})
            out: dict = {}
            for f, c in prod.items():
                e = e1 + e2
                key = (lookup[(f, e % 2)], e - e % 2)
                out[key] = out.get(key, 0) + Fraction(c) * sign(e1 * fdeg[f2])
            out = {k: v for k, v in out.items() if v}
            if out:
                wedge[(b1, b2)] = out
    dtable: dict = {}
    for (f, e), b in lookup.items():
        img = {lookup[(g, e)]: Fraction(c) for g, c in fd.get(f, {}).items() if c}
        if img:
            dtable[b] = img
    trace, form_trace = {}, {}
    for (f, e), b in lookup.items():
        if f in ftrace and fdeg[f] == model.n:
            if e == 1:
                trace[b] = Fraction(ftrace[f])
            elif model.orientable:
                form_trace[b] = Fraction(ftrace[f])
    return TwistedPoincareDatum(name, model, basis, dtable, wedge, trace, form_trace, lookup[("1", 0)])


def _unit_products(names: Iterable[str]) -> dict:
    out = {}
    for f in names:
        out[("1", f)] = {f: 1}
        out[(f, "1")] = {f: 1}
    return out


def point_datum() -> TwistedPoincareDatum:
    model = LagrangianModel(0)
    return datum_from_forms("point", model, [("1", 0, 0)], _unit_products(["1"]), ftrace={"1": 1})


def circle_datum() -> TwistedPoincareDatum:
    """S^1 with trivial character, plus a square-zero acyclic pair (y, dy).

    Form algebra: span{1, th, y, dy}, th = angular form with trace 1, y of
    degree 0 with d y = dy; all products among {th, y, dy} vanish.  The pair
    makes the differential non-trivial without changing cohomology.
    """
    model = LagrangianModel(1, ("a",), (0,))
    forms = [("1", 0, 0), ("th", 1, 0), ("y", 0, 0), ("dy", 1, 0)]
    return datum_from_forms("circle", model, forms, _unit_products([f for f, _, _ in forms]),
                            fd={"y": {"dy": 1}}, ftrace={"th": 1})


def klein_datum() -> TwistedPoincareDatum:
    """Klein-bottle type datum: n = 2 with one orientation-reversing loop.

    Forms 1 and a are untwisted, b and the volume form v are twisted, with
    a b = v = -b a and the twisted trace of v equal to 1.
    """
    model = LagrangianModel(2, ("a", "b"), (0, 1))
    forms = [("1", 0, 0), ("a", 1, 0), ("b", 1, 1), ("v", 2, 1)]
    prods = _unit_products([f for f, _, _ in forms])
    prods[("a", "b")] = {"v": 1}
    prods[("b", "a")] = {"v": -1}
    return datum_from_forms("klein", model, forms, prods, ftrace={"v": 1})


def builtin_models() -> dict[str, TwistedPoincareDatum]:
    return {"point": point_datum(), "circle": circle_datum(), "klein": klein_datum()}


def int_odd(datum: TwistedPoincareDatum, xi: Cochain) -> Nov:
    return datum.int_odd(xi)


def pairing(datum: TwistedPoincareDatum, xi: Cochain, eta: Cochain, variant: str = "odd") -> Nov:
    return datum.pairing(xi, eta, variant)
