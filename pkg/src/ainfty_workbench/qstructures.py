"""Structure constants q^beta_{k,l}, their relations, and their structural properties.

A :class:`QStructure` stores sparse tables

    tables[(k, l, beta)][(interior basis tuple, boundary basis tuple)] -> datum element
    qm1[(l, beta)][interior basis tuple]                                -> scalar
    sphere[(l, beta)][interior basis tuple]                             -> scalar

where ``sphere`` holds the closed-sector contribution already paired with the
unit, <i^* q_{empty,l}(gamma), 1>.  Bulk inputs live in an :class:`AmbientModel`.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .ainfty import AInftyStructure, build_energy_zero, conjugate
from .coefficients import Basis, Cochain, GradedSpace, TwistedPoincareDatum
from .multilinear import apply_table, scalar_d_term, terms_of
from .novikov import Beta, Cutoff, DegreeGroup, Nov, Ring, TVariables
from .report import Report
from .sampling import random_element, random_scalar
from .signs import (interior_splits, iota_sign, iota_sign_interior, partitions3, permute, shuffle_sign,
                    sign)

QKey = tuple[int, int, Beta]
Entry = tuple[tuple[int, ...], tuple[int, ...]]


class DegreeGateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ambient model

@dataclass(eq=False)
class AmbientModel(GradedSpace):
    """Finite model of relative forms on X with restriction to L and periods.

    ``restriction[b]`` maps to {datum basis: coeff}.  ``periods[b]`` gives the
    period of a closed degree-2 class on each free generator of the degree
    group; periods are extended additively and vanish on torsion.
    """

    name: str
    basis: list[Basis]
    dtable: dict[int, dict[int, Fraction]] = field(default_factory=dict)
    restriction: dict[int, dict[int, Fraction]] = field(default_factory=dict)
    periods: dict[int, tuple[Fraction, ...]] = field(default_factory=dict)
    unit_index: int | None = 0

    def restrict_to_L(self, g: Cochain, datum: TwistedPoincareDatum) -> Cochain:
        out = Cochain.zero(datum, g.ring)
        for b, a in g.components().items():
            for c, v in self.restriction.get(b, {}).items():
                out = out + Cochain.from_scalar(datum, c, a.scale(v))
        return out

    def period(self, beta: Beta, b: int) -> Fraction:
        vals = self.periods.get(b)
        if not vals:
            return Fraction(0)
        return sum((Fraction(v) * beta[i] for i, v in enumerate(vals)), Fraction(0))

    def divisor_classes(self) -> list[int]:
        return sorted(self.periods)

    def validate(self, datum: TwistedPoincareDatum, ring: Ring, rank: int | None = None) -> Report:
        rep = Report(f"ambient model {self.name}")
        for b in range(self.size):
            db = self.d_basis(b, ring)
            for (c, _m) in db.terms:
                rep.check("degree-of-d").expect(self.degree(c) == self.degree(b) + 1, (self.names[b], self.names[c]))
            rep.check("d-squared").expect(db.d() == 0, self.names[b])
            x = Cochain.basis(self, ring, b)
            lhs = self.restrict_to_L(db, datum)
            rhs = self.restrict_to_L(x, datum).d()
            rep.check("restriction-chain-map").expect(lhs == rhs, self.names[b])
            for c in self.restriction.get(b, {}):
                rep.check("restriction-degree").expect(datum.degree(c) == self.degree(b), (self.names[b], c))
        for b, vals in self.periods.items():
            ok = self.degree(b) == 2 and not self.d_basis(b, ring) and not self.restriction.get(b)
            rep.check("periods-on-closed-relative-degree-2").expect(ok, self.names[b])
            if rank is not None:
                rep.check("periods-length").expect(len(vals) == rank, self.names[b])
        for b in range(self.size):
            img = self.dtable.get(b, {})
            if not img:
                continue
            width = max((len(v) for v in self.periods.values()), default=0)
            for i in range(width):
                total = sum(Fraction(c) * (self.periods.get(g, ()) + (0,) * width)[i] for g, c in img.items())
                rep.check("periods-vanish-on-exact").expect(total == 0, (self.names[b], i))
        return rep


def standard_ambient(datum: TwistedPoincareDatum, periods: Sequence = (1,), name: str | None = None) -> AmbientModel:
    """1_X (restricting to the unit), closed g1, g2 with equal periods, and h with dh = g2 - g1."""
    basis = [Basis("1X", 0), Basis("g1", 2), Basis("g2", 2), Basis("h", 1)]
    per = tuple(Fraction(p) for p in periods)
    return AmbientModel(name or f"standard ambient over {datum.name}", basis,
                        dtable={3: {2: Fraction(1), 1: Fraction(-1)}},
                        restriction={0: {datum.unit_index: Fraction(1)}},
                        periods={1: per, 2: per}, unit_index=0)


def standard_ring(energy=3, t_order=3, *, mu: int = 1, torsion: int = 0) -> Ring:
    """Degree group Z (omega = 1, given Maslov index) and t-variables t0, t1 of degrees 2 and 0."""
    return Ring(DegreeGroup(1, torsion, (mu,), (Fraction(1),), Fraction(1)), TVariables((2, 0)),
                Cutoff(Fraction(energy), t_order))


# ---------------------------------------------------------------------------
# the structure

@dataclass(eq=False)
class QStructure:
    datum: TwistedPoincareDatum
    ambient: AmbientModel
    ring: Ring
    tables: dict[QKey, dict[Entry, Cochain]] = field(default_factory=dict)
    qm1: dict[tuple[int, Beta], dict[tuple[int, ...], Nov]] = field(default_factory=dict)
    sphere: dict[tuple[int, Beta], dict[tuple[int, ...], Nov]] = field(default_factory=dict)
    rho_variant: str = "c"
    delta: int = 0
    name: str = ""

    def __post_init__(self):
        self.tables = {(k, l, tuple(b)): {e: v for e, v in t.items() if v}
                       for (k, l, b), t in self.tables.items()}
        self.tables = {key: t for key, t in self.tables.items() if t}
        self.qm1 = {(l, tuple(b)): {g: v for g, v in t.items() if v} for (l, b), t in self.qm1.items()}
        self.qm1 = {key: t for key, t in self.qm1.items() if t}
        self.sphere = {(l, tuple(b)): {g: v for g, v in t.items() if v} for (l, b), t in self.sphere.items()}
        self.sphere = {key: t for key, t in self.sphere.items() if t}
        self._wrapped: dict = {}

    # -- construction -----------------------------------------------------
    @classmethod
    def minimal(cls, datum: TwistedPoincareDatum, ambient: AmbientModel, ring: Ring,
                name: str | None = None) -> "QStructure":
        """Only the energy-zero entries: d, the signed product, and minus restriction."""
        b0 = ring.group.zero
        S = build_energy_zero(datum, ring, native=False)
        tables = {
            (1, 0, b0): {((), key): v for key, v in S.table(1).items()},
            (2, 0, b0): {((), key): v for key, v in S.table(2).items()},
            (0, 1, b0): {},
        }
        for g in range(ambient.size):
            r = ambient.restrict_to_L(Cochain.basis(ambient, ring, g), datum)
            if r:
                tables[(0, 1, b0)][((g,), ())] = -r
        return cls(datum, ambient, ring, tables, name=name or f"minimal q over {datum.name}")

    def copy(self, **changes) -> "QStructure":
        base = dict(tables={k: dict(t) for k, t in self.tables.items()},
                    qm1={k: dict(t) for k, t in self.qm1.items()},
                    sphere={k: dict(t) for k, t in self.sphere.items()})
        base.update(changes)
        return replace(self, **base)

    def with_entry(self, key: QKey, entry: Entry, value: Cochain | None) -> "QStructure":
        tables = {k: dict(t) for k, t in self.tables.items()}
        t = tables.setdefault((key[0], key[1], tuple(key[2])), {})
        if value is None or not value:
            t.pop(entry, None)
        else:
            t[entry] = value
        return self.copy(tables=tables)

    @property
    def beta0(self) -> Beta:
        return self.ring.group.zero

    def keys(self) -> list[QKey]:
        return sorted(self.tables)

    # -- evaluation -------------------------------------------------------
    def eval(self, k: int, l: int, beta: Beta, gammas: Sequence[Cochain], alphas: Sequence[Cochain]) -> Cochain:
        if len(gammas) != l or len(alphas) != k:
            raise ValueError(f"q_{{{k},{l}}} takes {l} interior and {k} boundary inputs")
        key = (k, l, tuple(beta))
        zero = Cochain.zero(self.datum, self.ring)
        tbl = self.tables.get(key)
        out = apply_table(tbl, gammas, alphas, self.ambient.degree, self.datum.degree, zero) if tbl else zero
        if key == (1, 0, self.beta0):
            out = out + scalar_d_term(alphas[0])
        return out

    def _scalar_table(self, store: dict, l: int, beta: Beta) -> dict:
        wkey = (id(store), l, tuple(beta))
        if wkey not in self._wrapped:
            self._wrapped[wkey] = {(g, ()): v for g, v in store.get((l, tuple(beta)), {}).items()}
        return self._wrapped[wkey]

    def eval_m1(self, l: int, beta: Beta, gammas: Sequence[Cochain]) -> Nov:
        tbl = self._scalar_table(self.qm1, l, beta)
        return apply_table(tbl, gammas, (), self.ambient.degree, self.datum.degree, Nov.zero(self.ring))

    def eval_sphere(self, l: int, beta: Beta, gammas: Sequence[Cochain]) -> Nov:
        tbl = self._scalar_table(self.sphere, l, beta)
        return apply_table(tbl, gammas, (), self.ambient.degree, self.datum.degree, Nov.zero(self.ring))

    def native_eval(self, k: int, l: int, beta: Beta, gammas, alphas) -> Cochain | None:
        """Independent formulas for the energy-zero entries (None elsewhere)."""
        if tuple(beta) != self.beta0:
            return None
        if (k, l) == (1, 0):
            return alphas[0].d()
        if (k, l) == (2, 0):
            out = Cochain.zero(self.datum, self.ring)
            for deg, part in alphas[0].homogeneous_parts().items():
                out = out + self.datum.wedge_elems(part, alphas[1]).scale(sign(deg))
            return out
        if (k, l) == (0, 1):
            return -self.ambient.restrict_to_L(gammas[0], self.datum)
        return None

    # -- degree bookkeeping -----------------------------------------------
    def degree_problems(self) -> list[dict]:
        out = []
        n = self.datum.n
        for (k, l, beta), t in self.tables.items():
            for (gk, ak), v in t.items():
                want = sum(self.ambient.degree(g) for g in gk) + sum(self.datum.degree(a) for a in ak) + 2 - k - 2 * l
                found = sorted(v.homogeneous_parts())
                if found != [want]:
                    out.append({"table": "q", "k": k, "l": l, "beta": beta, "entry": self._entry_names(gk, ak),
                                "expected": want, "found": found})
        # the sphere constants are stored already paired with 1 on L, so they share the q_-1 shift
        for store, label, shift in ((self.qm1, "q_-1", 4 - n), (self.sphere, "sphere", 4 - n)):
            for (l, beta), t in store.items():
                for gk, v in t.items():
                    want = sum(self.ambient.degree(g) for g in gk) + shift - 2 * l
                    found = sorted(v.homogeneous_parts())
                    if found != [want]:
                        out.append({"table": label, "l": l, "beta": beta, "entry": self._entry_names(gk, ()),
                                    "expected": want, "found": found})
        return out

    def _entry_names(self, gk, ak) -> str:
        g = ",".join(self.ambient.names[i] for i in gk)
        a = ",".join(self.datum.names[i] for i in ak)
        return f"({g}; {a})"


def q_eval(Q: QStructure, k: int, l: int, beta: Beta, gammas, alphas) -> Cochain:
    return Q.eval(k, l, beta, gammas, alphas)


# ---------------------------------------------------------------------------
# relations for k >= 0

def _output_basis(v) -> set[int]:
    return {b for b, _ in v.terms}


def _q_relation_candidates(Q: QStructure, max_k: int, max_l: int, betas: set[Beta]) -> dict[QKey, set[Entry]]:
    group = Q.ring.group
    amb = Q.ambient
    cands: dict[QKey, set[Entry]] = {}

    def add(k, l, beta, g, a):
        if k <= max_k and l <= max_l and beta in betas:
            cands.setdefault((k, l, beta), set()).add((tuple(g), tuple(a)))

    dpre: dict[int, list[int]] = {}
    for c in range(amb.size):
        for b in amb.dtable.get(c, {}):
            dpre.setdefault(b, []).append(c)
    for (k, l, beta), t in Q.tables.items():
        for (gk, ak) in t:
            for j, g in enumerate(gk):
                for c in dpre.get(g, ()):
                    add(k, l, beta, gk[:j] + (c,) + gk[j + 1:], ak)
    items = list(Q.tables.items())
    for (k2, l2, b2), inner in items:
        for (k1, l1, b1), outer in items:
            k, l = k1 + k2 - 1, l1 + l2
            if k > max_k or l > max_l:
                continue
            beta = group.add(b1, b2)
            if beta not in betas:
                continue
            positions = list(itertools.combinations(range(l), l2))
            for (gJ, a23), v in inner.items():
                outs = _output_basis(v)
                for (gI, o), _w in outer.items():
                    for i in range(k1):
                        if o[i] not in outs:
                            continue
                        alpha = o[:i] + a23 + o[i + 1:]
                        for pos in positions:
                            g = [None] * l
                            it_j, it_i = iter(gJ), iter(gI)
                            for r in range(l):
                                g[r] = next(it_j) if r in pos else next(it_i)
                            add(k, l, beta, g, alpha)
    return cands


def q_relation_residual(Q: QStructure, k: int, l: int, beta: Beta, gk: tuple, ak: tuple) -> Cochain:
    ring, datum, amb = Q.ring, Q.datum, Q.ambient
    gdegs = [amb.degree(g) for g in gk]
    adegs = [datum.degree(a) for a in ak]
    gb = [Cochain.basis(amb, ring, g) for g in gk]
    ab = [Cochain.basis(datum, ring, a) for a in ak]
    total = Cochain.zero(datum, ring)
    if (k, l, beta) in Q.tables:
        for j in range(l):
            dg = gb[j].d()
            if not dg:
                continue
            args = list(gb)
            args[j] = dg
            val = Q.eval(k, l, beta, args, ab)
            total = total + val.scale(sign(sum(gdegs[:j]) + 1))
    present = Q.tables
    for b1, b2 in Q.ring.group.decompositions(beta):
        for P in partitions3(k):
            for split in interior_splits(l):
                nI, nJ = len(split.I), len(split.J)
                inner_t = present.get((P.k2, nJ, b2))
                if not inner_t or (P.k1, nI, b1) not in present:
                    continue
                gI, gJ = split.pick(gk)
                a13, a23, a33 = P.blocks(ak)
                inner = inner_t.get((gJ, a23))
                if not inner:
                    continue
                args = ([Cochain.basis(datum, ring, a) for a in a13] + [inner]
                        + [Cochain.basis(datum, ring, a) for a in a33])
                val = Q.eval(P.k1, nI, b1, [Cochain.basis(amb, ring, g) for g in gI], args)
                if val:
                    total = total + val.scale(sign(iota_sign(adegs, gdegs, P, split)))
    return total


def _gate(Q: QStructure, rep: Report) -> bool:
    problems = Q.degree_problems()
    c = rep.check("degree gate")
    c.count += sum(len(t) for t in Q.tables.values()) + sum(len(t) for t in Q.qm1.values())
    for p in problems:
        c.fail(p)
    if problems:
        c.note = "degree bookkeeping failed: relations not evaluated"
    return not problems


def check_q_relations(Q: QStructure, max_k: int = 3, max_l: int = 2, E=None, *, dense: bool = False,
                      max_witnesses: int = 20) -> Report:
    start = time.perf_counter()
    E = Q.ring.cutoff.energy if E is None else Fraction(E)
    rep = Report(f"q-relations (k >= 0): {Q.name}", {"max_k": max_k, "max_l": max_l, "E": E, "dense": dense})
    if not _gate(Q, rep):
        rep.elapsed = time.perf_counter() - start
        return rep
    betas = Q.ring.group.enumerate(E)
    chk = rep.check("q-relations")
    if dense:
        todo = {}
        for k in range(max_k + 1):
            for l in range(max_l + 1):
                for beta in betas:
                    todo[(k, l, beta)] = set(itertools.product(
                        itertools.product(range(Q.ambient.size), repeat=l),
                        itertools.product(range(Q.datum.size), repeat=k)))
    else:
        todo = _q_relation_candidates(Q, max_k, max_l, set(betas))
    for (k, l, beta) in sorted(todo):
        for gk, ak in sorted(todo[(k, l, beta)]):
            res = q_relation_residual(Q, k, l, beta, gk, ak)
            chk.expect(res == 0, {"k": k, "l": l, "beta": beta, "entry": Q._entry_names(gk, ak),
                                  "residual": repr(res)}, max_witnesses)
    if not dense:
        chk.note = "sparse: inputs with no nonzero term are skipped"
    rep.elapsed = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# the k = -1 relation

def sphere_term_applies(Q: QStructure, beta: Beta) -> bool:
    """Sphere classes have even Maslov index, so for odd mu(beta) on a non-orientable L there are none."""
    return Q.datum.model.orientable or Q.ring.group.mu_of(beta) % 2 == 0


def km1_residual(Q: QStructure, l: int, beta: Beta, gk: tuple) -> Nov:
    """d q_{-1} + dgamma terms + (1/2) pairing sum + sphere term (zero when the relation holds)."""
    ring, amb, datum = Q.ring, Q.ambient, Q.datum
    gdegs = [amb.degree(g) for g in gk]
    gb = [Cochain.basis(amb, ring, g) for g in gk]
    total = Q.eval_m1(l, beta, gb).d()
    for j in range(l):
        dg = gb[j].d()
        if dg:
            args = list(gb)
            args[j] = dg
            total = total + Q.eval_m1(l, beta, args).scale(sign(sum(gdegs[:j]) + 1))
    half = Nov.zero(ring)
    for b1, b2 in ring.group.decompositions(beta):
        for split in interior_splits(l):
            tI = Q.tables.get((0, len(split.I), b1))
            tJ = Q.tables.get((0, len(split.J), b2))
            if not tI or not tJ:
                continue
            gI, gJ = split.pick(gk)
            x, y = tI.get((gI, ())), tJ.get((gJ, ()))
            if not x or not y:
                continue
            p = datum.pairing(x, y, "full")
            half = half + p.scale(sign(iota_sign_interior(gdegs, split)))
    total = total + half.scale(Fraction(1, 2))
    if sphere_term_applies(Q, beta):
        total = total + Q.eval_sphere(l, beta, gb).scale(sign(sum(gdegs) + 1))
    return total


def check_q_relations_km1(Q: QStructure, max_l: int = 2, E=None, *, dense: bool = False,
                          max_witnesses: int = 20) -> Report:
    start = time.perf_counter()
    E = Q.ring.cutoff.energy if E is None else Fraction(E)
    rep = Report(f"q-relations (k = -1): {Q.name}", {"max_l": max_l, "E": E, "dense": dense})
    if not _gate(Q, rep):
        rep.elapsed = time.perf_counter() - start
        return rep
    betas = Q.ring.group.enumerate(E)
    chk = rep.check("q-relations k=-1")
    amb = Q.ambient
    group = Q.ring.group
    todo: dict[tuple[int, Beta], set] = {}
    if dense:
        for l in range(max_l + 1):
            for beta in betas:
                todo[(l, beta)] = set(itertools.product(range(amb.size), repeat=l))
    else:
        bset = set(betas)

        def add(l, beta, g):
            if l <= max_l and beta in bset:
                todo.setdefault((l, beta), set()).add(tuple(g))
        dpre: dict[int, list[int]] = {}
        for c in range(amb.size):
            for b in amb.dtable.get(c, {}):
                dpre.setdefault(b, []).append(c)
        for store in (Q.qm1, Q.sphere):
            for (l, beta), t in store.items():
                for gk in t:
                    add(l, beta, gk)
                    for j, g in enumerate(gk):
                        for c in dpre.get(g, ()):
                            add(l, beta, gk[:j] + (c,) + gk[j + 1:])
        zero_k = [(key, t) for key, t in Q.tables.items() if key[0] == 0]
        for (_, l1, b1), t1 in zero_k:
            for (_, l2, b2), t2 in zero_k:
                l = l1 + l2
                beta = group.add(b1, b2)
                for pos in itertools.combinations(range(l), l2):
                    for (gI, _), _v in t1.items():
                        for (gJ, _), _w in t2.items():
                            g, it_i, it_j = [None] * l, iter(gI), iter(gJ)
                            for r in range(l):
                                g[r] = next(it_j) if r in pos else next(it_i)
                            add(l, beta, g)
    omitted = []
    for (l, beta) in sorted(todo):
        if not sphere_term_applies(Q, beta) and Q.sphere.get((l, beta)):
            omitted.append((l, beta))
        for gk in sorted(todo[(l, beta)]):
            res = km1_residual(Q, l, beta, gk)
            chk.expect(res == 0, {"l": l, "beta": beta, "entry": Q._entry_names(gk, ()), "residual": repr(res)},
                       max_witnesses)
    notes = [] if dense else ["sparse: inputs with no nonzero term are skipped"]
    if omitted:
        notes.append(f"sphere data ignored where mu(beta) is odd on a non-orientable L: {omitted}")
    chk.note = "; ".join(notes)
    rep.elapsed = time.perf_counter() - start
    return rep


def fit_qm1(Q: QStructure, l: int, beta: Beta) -> QStructure:
    """Solve the k = -1 relation at (l, beta) for q_{-1} on closed interior inputs.

    Unknowns are one coefficient per closed input tuple, on the single even
    x-power allowed by the degree; raises ValueError if the linear system is
    inconsistent.
    """
    import sympy

    ring, amb = Q.ring, Q.ambient
    beta = tuple(beta)
    closed = [b for b in range(amb.size) if not amb.dtable.get(b)]
    unknowns = []
    for gk in itertools.product(closed, repeat=l):
        deg = sum(amb.degree(g) for g in gk) + 4 - Q.datum.n - 2 * l
        if deg % 2 == 0:
            unknowns.append((gk, Nov.monomial(ring, 1, p=-deg)))
    if not unknowns:
        return Q
    tuples = list(itertools.product(range(amb.size), repeat=l))

    def residuals(values):
        trial = Q.copy()
        trial.qm1[(l, beta)] = {gk: m.scale(v) for (gk, m), v in zip(unknowns, values) if v}
        trial.__post_init__()
        out = {}
        for gk in tuples:
            for mono, c in km1_residual(trial, l, beta, gk).terms.items():
                out[(gk, mono)] = c
        return out

    base = residuals([0] * len(unknowns))
    cols = []
    for i in range(len(unknowns)):
        vec = [0] * len(unknowns)
        vec[i] = 1
        r = residuals(vec)
        cols.append({key: r.get(key, 0) - base.get(key, 0) for key in set(r) | set(base)})
    rows = sorted(set(base).union(*[set(c) for c in cols]), key=repr)
    A = sympy.Matrix([[sympy.Rational(c.get(r, 0)) for c in cols] for r in rows])
    rhs = sympy.Matrix([-sympy.Rational(base.get(r, 0)) for r in rows])
    sol, params = A.gauss_jordan_solve(rhs)
    sol = sol.subs({p: 0 for p in params})
    fitted = Q.copy()
    fitted.qm1[(l, beta)] = {gk: m.scale(Fraction(int(v.p), int(v.q)))
                             for (gk, m), v in zip(unknowns, sol) if v != 0}
    fitted.__post_init__()
    return fitted


# ---------------------------------------------------------------------------
# structural properties

PROPERTIES = ("degree", "linearity", "unit", "fundamental_class", "energy_zero", "divisor", "symmetry",
              "top_degree", "cyclic", "antisymmetry", "admissibility")


def _exceptional(Q: QStructure) -> set[QKey]:
    b0 = Q.beta0
    return {(1, 0, b0), (0, 1, b0), (2, 0, b0)}


def check_properties(Q: QStructure, which: Iterable[str] | str = "all", *, trials: int = 30, seed: int = 0,
                     max_witnesses: int = 20) -> Report:
    start = time.perf_counter()
    sel = list(PROPERTIES) if which == "all" else ([which] if isinstance(which, str) else list(which))
    if not sel:
        raise ValueError("select at least one property")
    unknown = [s for s in sel if s not in PROPERTIES]
    if unknown:
        raise ValueError(f"unknown properties {unknown}; choose from {PROPERTIES}")
    rng = random.Random(seed)
    rep = Report(f"q properties: {Q.name}", {"which": sel, "trials": trials, "seed": seed})
    ring, datum, amb = Q.ring, Q.datum, Q.ambient
    b0 = Q.beta0
    W = max_witnesses

    def basis_d(b):
        return Cochain.basis(datum, ring, b)

    def basis_a(g):
        return Cochain.basis(amb, ring, g)

    def value(key, entry):
        return Q.tables.get(key, {}).get(entry) or Cochain.zero(datum, ring)

    if "degree" in sel:
        c = rep.check("degree")
        c.count += sum(len(t) for t in Q.tables.values()) + sum(len(t) for t in Q.qm1.values())
        for p in Q.degree_problems():
            c.fail(p, W)

    if "linearity" in sel:
        c = rep.check("linearity")
        keys = [key for key in Q.keys() if key[0] + key[1] > 0]
        for _ in range(trials if keys else 0):
            k, l, beta = key = rng.choice(keys)
            gk, ak = rng.choice(list(Q.tables[key]))
            gammas = [random_element(amb, ring, rng, basis=g) for g in gk]
            alphas = [random_element(datum, ring, rng, basis=a) for a in ak]
            a = random_scalar(ring, rng)
            if a is None or not a.is_homogeneous():
                continue
            da = a.degree()
            slot = rng.randrange(k + l)
            g2, a2 = list(gammas), list(alphas)
            if slot < l:
                g2[slot] = gammas[slot].lmul(a)
                par = da * sum(x.degree() for x in gammas[:slot])
            else:
                i = slot - l
                a2[i] = alphas[i].lmul(a)
                par = da * (i + 1 + sum(x.degree() for x in alphas[:i]) + sum(x.degree() for x in gammas))
            native = Q.native_eval(k, l, beta, g2, a2)
            lhs = native if native is not None else Q.eval(k, l, beta, g2, a2)
            base = Q.native_eval(k, l, beta, gammas, alphas)
            base = base if base is not None else Q.eval(k, l, beta, gammas, alphas)
            rhs = base.lmul(a).scale(sign(par))
            if key == (1, 0, b0):
                rhs = rhs + alphas[0].lmul(a.d())
            c.expect(lhs == rhs, {"key": key, "slot": slot, "scalar": repr(a)}, W)
        # consistency with the A-infinity rule once interior inputs have even total degree
        for _ in range(trials):
            k = rng.randint(1, 5)
            i = rng.randint(1, k)
            adeg = [rng.randint(-3, 3) for _ in range(k)]
            gdeg = 2 * rng.randint(0, 3)
            a = rng.randint(-3, 3)
            q_rule = a * (i + sum(adeg[: i - 1]) + gdeg)
            m_rule = a * (1 + sum(d + 1 for d in adeg[: i - 1]))
            c.expect((q_rule - m_rule) % 2 == 0, {"k": k, "i": i, "degrees": adeg, "|gamma|": gdeg}, W)
        c.note = "energy-zero entries compared against d, the product and restriction directly"

    if "unit" in sel:
        c = rep.check("unit")
        fs = [b for b in range(datum.size) if datum.form_degree(b) == 0]
        for (k, l, beta), t in Q.tables.items():
            if (k, l, beta) in ((1, 0, b0), (2, 0, b0)):
                continue
            for (gk, ak), v in t.items():
                if any(a in fs for a in ak):
                    c.fail({"key": (k, l, beta), "entry": Q._entry_names(gk, ak), "value": repr(v)}, W)
                c.count += 1
        for f in fs:
            fe = basis_d(f)
            c.expect(Q.eval(1, 0, b0, [], [fe]) == fe.d(), {"key": "(1,0,beta0)", "f": datum.names[f]}, W)
            for a in range(datum.size):
                ae = basis_d(a)
                left = Q.eval(2, 0, b0, [], [fe, ae])
                right = Q.eval(2, 0, b0, [], [ae, fe])
                c.expect(left == datum.wedge_elems(fe, ae).scale(sign(datum.degree(f))),
                         {"f": datum.names[f], "alpha": datum.names[a], "slot": 1}, W)
                c.expect(right == datum.wedge_elems(ae, fe).scale(sign(datum.degree(a))),
                         {"f": datum.names[f], "alpha": datum.names[a], "slot": 2}, W)

    if "fundamental_class" in sel:
        c = rep.check("fundamental_class")
        u = amb.unit_index
        if u is None:
            c.note = "ambient model declares no fundamental class"
        else:
            unit = datum.unit(ring)
            c.expect(value((0, 1, b0), ((u,), ())) == -unit, {"key": (0, 1, b0), "expected": "-1"}, W)
            for (k, l, beta), t in Q.tables.items():
                for (gk, ak), v in t.items():
                    if u in gk and (k, l, beta) != (0, 1, b0):
                        c.fail({"key": (k, l, beta), "entry": Q._entry_names(gk, ak)}, W)
                    c.count += 1
            for (l, beta), t in Q.qm1.items():
                for gk in t:
                    if u in gk:
                        c.fail({"key": (-1, l, beta), "entry": Q._entry_names(gk, ())}, W)
                    c.count += 1

    if "energy_zero" in sel:
        c = rep.check("energy_zero")
        for b in range(datum.size):
            x = basis_d(b)
            c.expect(value((1, 0, b0), ((), (b,))) == x.d(), {"q_1,0": datum.names[b]}, W)
            for b2 in range(datum.size):
                want = datum.wedge_elems(x, basis_d(b2)).scale(sign(datum.degree(b)))
                c.expect(value((2, 0, b0), ((), (b, b2))) == want,
                         {"q_2,0": (datum.names[b], datum.names[b2])}, W)
        for g in range(amb.size):
            want = -amb.restrict_to_L(basis_a(g), datum)
            c.expect(value((0, 1, b0), ((g,), ())) == want, {"q_0,1": amb.names[g]}, W)
        for (k, l, beta), t in Q.tables.items():
            if beta == b0 and (k, l, beta) not in _exceptional(Q):
                for entry in t:
                    c.fail({"key": (k, l, beta), "entry": Q._entry_names(*entry)}, W)

    if "divisor" in sel:
        c = rep.check("divisor")
        divs = [g for g in amb.divisor_classes()
                if amb.degree(g) == 2 and not amb.dtable.get(g) and not amb.restriction.get(g)]
        stores = [((k, l, beta), {e: v for e, v in t.items()}) for (k, l, beta), t in Q.tables.items()]
        stores += [((-1, l, beta), {(gk, ()): v for gk, v in t.items()}) for (l, beta), t in Q.qm1.items()]
        lookup = dict(stores)
        todo = set()
        for (k, l, beta), t in stores:
            for (gk, ak) in t:
                if l >= 1 and gk[0] in divs:
                    todo.add((k, l, beta, gk, ak))
                for g in divs:
                    todo.add((k, l + 1, beta, (g,) + gk, ak))
        top = max((key[1] for key, _ in stores), default=0)
        for (k, l, beta, gk, ak) in sorted(todo, key=repr):
            if l > top:
                continue
            lhs = lookup.get((k, l, beta), {}).get((gk, ak))
            rest = lookup.get((k, l - 1, beta), {}).get((gk[1:], ak))
            per = amb.period(beta, gk[0])
            zero = Nov.zero(ring) if k == -1 else Cochain.zero(datum, ring)
            lhs = lhs if lhs is not None else zero
            rhs = rest.scale(per) if rest is not None else zero
            c.expect(lhs == rhs, {"key": (k, l, beta), "entry": Q._entry_names(gk, ak), "period": per}, W)
        c.note = f"divisor classes: {[amb.names[g] for g in divs]}; checked up to l = {top}"

    if "symmetry" in sel:
        c = rep.check("symmetry")
        stores = list(Q.tables.items()) + [((-1, l, b), {(g, ()): v for g, v in t.items()})
                                           for (l, b), t in Q.qm1.items()]
        for key, t in stores:
            l = key[1]
            for (gk, ak), v in t.items():
                gdegs = [amb.degree(g) for g in gk]
                for sigma in itertools.permutations(range(l)):
                    other = t.get((permute(gk, sigma), ak))
                    other = other if other is not None else v.scale(0)
                    c.expect(v == other.scale(sign(shuffle_sign(gdegs, sigma))),
                             {"key": key, "entry": Q._entry_names(gk, ak), "sigma": sigma}, W)

    if "top_degree" in sel:
        c = rep.check("top_degree")
        n = datum.n
        for key, t in Q.tables.items():
            if key in _exceptional(Q):
                continue
            for entry, v in t.items():
                top = [datum.names[b] for b in v.components() if datum.form_degree(b) == n]
                c.expect(not top, {"key": key, "entry": Q._entry_names(*entry), "top components": top}, W)

    if "cyclic" in sel:
        c = rep.check("cyclic")
        for (k, l, beta), t in Q.tables.items():
            if k < 1:
                continue
            cands = set()
            for (gk, ak) in t:
                for x in range(datum.size):
                    cands.add((gk, ak + (x,)))
                    cands.add((gk, ak[1:] + (x,) + ak[:1]))
            for gk, full in sorted(cands):
                gam = [basis_a(g) for g in gk]
                args = [basis_d(b) for b in full]
                degs = [datum.degree(b) for b in full]
                lhs = datum.pairing(Q.eval(k, l, beta, gam, args[:k]), args[k])
                rhs = datum.pairing(Q.eval(k, l, beta, gam, [args[k]] + args[: k - 1]), args[k - 1])
                par = (degs[k] + 1) * sum(d + 1 for d in degs[:k])
                rhs = rhs.scale(sign(par))
                if (k, l, beta) == (1, 0, b0):
                    rhs = rhs + datum.pairing(args[0], args[1]).d()
                c.expect(lhs == rhs, {"key": (k, l, beta), "entry": Q._entry_names(gk, full[:k]),
                                      "last": datum.names[full[k]]}, W)

    if "antisymmetry" in sel:
        c = rep.check("antisymmetry")
        for b1 in range(datum.size):
            for b2 in range(datum.size):
                x, y = basis_d(b1), basis_d(b2)
                par = (1 + datum.degree(b1)) * (1 + datum.degree(b2)) + 1
                c.expect(datum.pairing(x, y) == datum.pairing(y, x).scale(sign(par)),
                         (datum.names[b1], datum.names[b2]), W)

    if "admissibility" in sel:
        c = rep.check("admissibility")
        for (l, beta), t in Q.qm1.items():
            ok = datum.model.orientable or Q.ring.group.mu_of(beta) % 2 == 1
            c.expect(ok or not t, {"l": l, "beta": beta, "mu": Q.ring.group.mu_of(beta)}, W)
        for (l, beta), t in Q.sphere.items():
            c.expect(sphere_term_applies(Q, beta) or not t, {"sphere": (l, beta)}, W)

    rep.elapsed = time.perf_counter() - start
    return rep


def _exp_scalar(ring: Ring, t_index: int, rate: Fraction) -> Nov:
    """exp(rate * t_index) as a cutoff-truncated series (t_index must have even degree)."""
    total, term = Nov.zero(ring), Nov.const(ring)
    for j in range(ring.cutoff.t_order + 1):
        total = total + term
        term = (term * Nov.t(ring, t_index)).scale(Fraction(rate) / (j + 1))
    return total


def check_divisor_axiom(Q: QStructure, divisor: int, gamma_rest: Cochain | None = None, t_index: int = 1,
                        max_k: int | None = None, *, max_witnesses: int = 20) -> Report:
    """m^{gamma}_k = sum_beta T^beta exp(t * period(beta)) m^{gamma_rest, beta}_k for gamma = gamma_rest + t * divisor.

    Both sides are assembled from Q and compared termwise in (k, beta) after
    truncation to the ring's cutoff.
    """
    from .ainfty import assemble_m_from_q

    start = time.perf_counter()
    ring, amb = Q.ring, Q.ambient
    if ring.tvars.degrees[t_index] % 2:
        raise ValueError("the divisor parameter must have even degree")
    if amb.degree(divisor) != 2 or amb.dtable.get(divisor) or amb.restriction.get(divisor):
        raise ValueError(f"{amb.names[divisor]} is not a closed degree-2 class vanishing on L")
    rest = gamma_rest if gamma_rest is not None else Cochain.zero(amb, ring)
    gamma = rest + Cochain.from_scalar(amb, divisor, Nov.t(ring, t_index))
    full = assemble_m_from_q(Q, gamma, max_k)
    base = assemble_m_from_q(Q, rest, max_k) if rest else _assemble_without_gamma(Q, max_k)
    rep = Report(f"divisor axiom: {Q.name}", {"divisor": amb.names[divisor], "t_index": t_index,
                                              "t_order": ring.cutoff.t_order})
    c = rep.check("m^gamma = exp(t * period) m^rest")
    betas = ring.group.enumerate(ring.cutoff.energy)
    exps = {beta: _exp_scalar(ring, t_index, amb.period(beta, divisor)) for beta in betas}
    for k in sorted(set(full.arities()) | set(base.arities())):
        for key in sorted(set(full.table(k)) | set(base.table(k))):
            lhs, rhs = full.entry(k, key), base.entry(k, key)
            for beta in betas:
                want = rhs.beta_part(beta).lmul(exps[beta])
                got = lhs.beta_part(beta)
                c.expect(got == want, {"k": k, "inputs": full._names(key), "beta": beta,
                                       "period": amb.period(beta, divisor)}, max_witnesses)
    rep.elapsed = time.perf_counter() - start
    return rep


def _assemble_without_gamma(Q: QStructure, max_k: int | None):
    from .ainfty import AInftyStructure

    ring = Q.ring
    m: dict[int, dict] = {}
    for (k, l, beta), t in Q.tables.items():
        if l or (max_k is not None and k > max_k):
            continue
        for (_g, ak), v in t.items():
            cur = m.setdefault(k, {}).get(ak, Cochain.zero(Q.datum, ring))
            m[k][ak] = cur + v.lmul(Nov.T(ring, beta))
    return AInftyStructure(Q.datum, ring, m, name=f"energy expansion of {Q.name}")


# ---------------------------------------------------------------------------
# generators

def build_divisor_extension(Q0: QStructure, classes: Sequence[int] | None = None, max_l: int = 3,
                            name: str | None = None) -> QStructure:
    """q_{k,l}^beta(g_1..g_l; .) = prod period(beta, g_j) * q_{k,0}^beta(.) for divisor classes g_j.

    Every other bulk input is left as in Q0 (typically zero).  Entries of
    zero energy are unchanged since periods vanish there.
    """
    amb = Q0.ambient
    classes = amb.divisor_classes() if classes is None else list(classes)
    for g in classes:
        if amb.degree(g) != 2 or amb.dtable.get(g):
            raise ValueError(f"{amb.names[g]} is not a closed degree-2 class")
    tables = {k: dict(t) for k, t in Q0.tables.items()}
    qm1 = {k: dict(t) for k, t in Q0.qm1.items()}
    b0 = Q0.beta0
    for (k, l0, beta), t in Q0.tables.items():
        if l0 != 0 or beta == b0:
            continue
        for l in range(1, max_l + 1):
            for gk in itertools.product(classes, repeat=l):
                per = Fraction(1)
                for g in gk:
                    per *= amb.period(beta, g)
                if not per:
                    continue
                dest = tables.setdefault((k, l, beta), {})
                for (_, ak), v in t.items():
                    dest[(gk, ak)] = v.scale(per)
    for (l0, beta), t in Q0.qm1.items():
        if l0 != 0 or beta == b0:
            continue
        for l in range(1, max_l + 1):
            for gk in itertools.product(classes, repeat=l):
                per = Fraction(1)
                for g in gk:
                    per *= amb.period(beta, g)
                if per:
                    qm1.setdefault((l, beta), {})[gk] = t[()].scale(per)
    return Q0.copy(tables=tables, qm1=qm1, name=name or f"divisor extension of {Q0.name}")


def add_curvature(Q: QStructure, beta: Beta, coeff=1) -> QStructure:
    """Add coeff * x^{-2} * 1 to q_{0,0}^beta: a central curvature term of degree 2."""
    ring, datum = Q.ring, Q.datum
    val = datum.unit(ring).lmul(Nov.monomial(ring, coeff, p=-2))
    tables = {k: dict(t) for k, t in Q.tables.items()}
    entry = tables.setdefault((0, 0, tuple(beta)), {})
    entry[((), ())] = entry.get(((), ()), Cochain.zero(datum, ring)) + val
    return Q.copy(tables=tables)


def q_from_structure(S: AInftyStructure, ambient: AmbientModel, name: str) -> QStructure:
    """Split the T-expansion of an A-infinity structure into l = 0 tables q_{k,0}^beta."""
    ring, datum = S.ring, S.datum
    b0 = ring.group.zero
    base = QStructure.minimal(datum, ambient, ring)
    tables = {k: dict(t) for k, t in base.tables.items() if k[1] != 0 or k[0] not in (1, 2)}
    for k, t in S.m.items():
        for key, v in t.items():
            for (b, (e, tt, p, beta, s)), c in v.terms.items():
                mono = (e, tt, p, b0, s)
                dest = tables.setdefault((k, 0, beta), {})
                cur = dest.get(((), key), Cochain.zero(datum, ring))
                dest[((), key)] = cur + Cochain(datum, ring, {(b, mono): c})
    return QStructure(datum, ambient, ring, tables, name=name)


def random_gauge(datum: TwistedPoincareDatum, ring: Ring, rng: random.Random, density: float = 0.5) -> dict:
    """Random degree-zero phi = id + sum_beta T^beta phi^beta with phi(1) = 1."""
    betas = [b for b in ring.group.enumerate(ring.cutoff.energy) if b != ring.group.zero]
    images: dict[int, Cochain] = {}
    for b in range(datum.size):
        if b == datum.unit_index:
            continue
        total = Cochain.basis(datum, ring, b)
        for beta in betas:
            if rng.random() > density:
                continue
            for c in range(datum.size):
                shift = datum.degree(c) - datum.degree(b)
                if shift % 2 or abs(shift) > 2 or rng.random() > 0.5:
                    continue
                coeff = rng.choice((1, -1, 2, Fraction(1, 2), -3))
                total = total + Cochain.basis(datum, ring, c).lmul(Nov.monomial(ring, coeff, beta=beta, p=shift))
        images[b] = total
    return images


def _inverse(datum, ring, fwd: Mapping[int, Cochain]) -> dict[int, Cochain]:
    """Inverse of id + N with N of positive valuation, as a truncated geometric series."""
    step = {b: v - Cochain.basis(datum, ring, b) for b, v in fwd.items()}
    inv = {}
    for b in range(datum.size):
        term = Cochain.basis(datum, ring, b)
        total = term
        for j in range(1, 64):
            nxt = Cochain.zero(datum, ring)
            for c, a in term.components().items():
                img = step.get(c)
                if img:
                    nxt = nxt + img.lmul(a)
            term = nxt
            if not term:
                break
            total = total + (term.scale(-1) if j % 2 else term)
        inv[b] = total
    return inv


def random_admissible_q(datum: TwistedPoincareDatum, seed: int = 0, bounds: Mapping | None = None,
                        ring: Ring | None = None) -> QStructure:
    """Seeded q-data that satisfies the q-relations by construction.

    Built from a random gauge transform of the energy-zero structure (which
    keeps the strict unit), a central curvature term, a divisor extension
    with random periods, and the fundamental class 1_X.
    """
    bounds = dict(bounds or {})
    rng = random.Random(seed)
    ring = ring or standard_ring(bounds.get("energy", 3), bounds.get("t_order", 3))
    period = Fraction(rng.choice((-2, -1, 1, 2, 3)), rng.choice((1, 2)))
    ambient = standard_ambient(datum, (period,) * ring.group.rank)
    S = build_energy_zero(datum, ring, native=False)
    fwd = random_gauge(datum, ring, rng, bounds.get("density", 0.5))
    inv = _inverse(datum, ring, fwd)
    conj = conjugate(S, fwd, inv, family=False, name="gauge transform")
    Q = q_from_structure(conj, ambient, name=f"random q (seed {seed}) over {datum.name}")
    betas = [b for b in ring.group.enumerate(ring.cutoff.energy) if b != ring.group.zero]
    if betas:
        Q = add_curvature(Q, rng.choice(betas), rng.choice((1, -1, 2, Fraction(1, 3))))
    Q = build_divisor_extension(Q, max_l=bounds.get("max_l", 3), name=Q.name)
    return Q


PERTURBATIONS = ("bulk", "sign", "curvature", "degree")


def _twin_entries(Q: QStructure) -> list[tuple[QKey, Entry]]:
    """Positive-energy entries with a g1 input whose g2 twin (same slot) is stored with the same value.

    The relation at the tuple with h in that slot reads q(..g2..) - q(..g1..) = 0
    whenever no stored entry takes h, so changing only one twin breaks it.
    """
    amb = Q.ambient
    try:
        g1, g2, h = amb.index("g1"), amb.index("g2"), amb.index("h")
    except ValueError:
        return []
    if amb.dtable.get(h) != {g2: Fraction(1), g1: Fraction(-1)}:
        return []
    if any(h in e[0] for t in Q.tables.values() for e in t):
        return []
    out = []
    for key, t in Q.tables.items():
        if key[2] == Q.beta0:
            continue
        for (gk, ak), v in t.items():
            for j, g in enumerate(gk):
                twin = (gk[:j] + (g2,) + gk[j + 1:], ak)
                if g == g1 and t.get(twin) == v:
                    out.append((key, (gk, ak)))
                    break
    return sorted(out, key=repr)


def perturb_q(Q: QStructure, seed: int = 0, kind: str | None = None, *, max_k: int | None = None,
              max_l: int | None = None) -> tuple[QStructure, dict]:
    """Inject one change that provably breaks a relation; returns the copy and a description.

    ``bulk`` adds a multiple of a g1-entry to itself and ``sign`` flips it, both
    leaving its g2 twin alone (see :func:`_twin_entries`); ``curvature`` adds a
    non-closed degree-2 term to q_{0,0} at a minimal positive energy, so
    d(m_0) no longer vanishes there; ``degree`` shifts the x-power of an entry,
    which the degree gate rejects.  Kinds that do not apply to Q fall back to
    ``bulk`` and then ``degree``; the description records the kind used.
    ``max_k`` and ``max_l`` keep the change inside the range a checker will visit.
    """
    if kind is not None and kind not in PERTURBATIONS:
        raise ValueError(f"unknown perturbation {kind!r}; choose from {PERTURBATIONS}")
    rng = random.Random(seed)
    kind = kind or rng.choice(PERTURBATIONS)
    ring, datum = Q.ring, Q.datum
    if kind == "curvature":
        options = [b for b in range(datum.size)
                   if datum.degree(b) % 2 == 0 and datum.degree(b) <= 2 and datum.d_basis(b, ring)]
        group = ring.group
        betas = [b for b in group.enumerate(ring.cutoff.energy) if b != Q.beta0]
        minimal = [b for b in betas if not any(c != b and group.is_effective(group.sub(b, c))
                                               for c in betas)]
        if options and minimal:
            b, beta = rng.choice(options), rng.choice(minimal)
            extra = Cochain.basis(datum, ring, b).lmul(
                Nov.monomial(ring, rng.choice((1, -1, 2)), p=datum.degree(b) - 2))
            key = (0, 0, beta)
            cur = Q.tables.get(key, {}).get(((), ()), Cochain.zero(datum, ring))
            return Q.with_entry(key, ((), ()), cur + extra), {"kind": kind, "key": key, "basis": datum.names[b]}
        kind = "bulk"
    def inside(key):
        return (max_k is None or key[0] <= max_k) and (max_l is None or key[1] <= max_l)

    if kind in ("bulk", "sign"):
        cands = [c for c in _twin_entries(Q) if inside(c[0])]
        if cands:
            key, entry = rng.choice(cands)
            v = Q.tables[key][entry]
            new = -v if kind == "sign" else v + v.scale(rng.choice((1, -2, 3)))
            return Q.with_entry(key, entry, new), {"kind": kind, "key": key, "entry": Q._entry_names(*entry)}
    key, entry = rng.choice(sorted(((k, e) for k, t in Q.tables.items() if inside(k) for e in t), key=repr))
    v = Q.tables[key][entry]
    shifted = v.lmul(Nov.monomial(ring, 1, p=2))
    return Q.with_entry(key, entry, shifted), {"kind": "degree", "key": key, "entry": Q._entry_names(*entry)}
