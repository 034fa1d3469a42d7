"""Cyclic unital A-infinity structures on a twisted Poincare datum.

An :class:`AInftyStructure` stores each m_k as a sparse table from datum basis
k-tuples to outputs; evaluation on general elements is the multilinear
extension with the graded linearity rule (including the ``da * alpha_1``
summand for k = 1, which only matters for interval families).
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .coefficients import Cochain, TwistedPoincareDatum
from .multilinear import apply_table, scalar_d_term
from .novikov import Nov, Ring
from .report import Report
from .sampling import random_element, random_scalar
from .signs import partitions3, sign

Key = tuple[int, ...]


class StructureError(ValueError):
    pass


class AssemblyError(ValueError):
    def __init__(self, failures: list[str]):
        super().__init__("; ".join(failures))
        self.failures = failures


class GammaTildeError(ValueError):
    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(eq=False)
class AInftyStructure:
    datum: TwistedPoincareDatum
    ring: Ring
    m: dict[int, dict[Key, Cochain]] = field(default_factory=dict)
    unit: Cochain | None = None
    m_minus1: Nov | None = None
    pairing_variant: str = "odd"
    family: bool = False
    name: str = ""
    native: dict[int, Callable] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.unit is None:
            self.unit = self.datum.unit(self.ring)
        self.m = {k: {key: v for key, v in t.items() if v} for k, t in self.m.items()}
        self._wrapped: dict[int, dict] = {}

    @property
    def dim(self) -> int:
        """Dimension parameter of the pairing: n - 1."""
        return self.datum.n - 1

    def table(self, k: int) -> dict[Key, Cochain]:
        return self.m.get(k, {})

    def arities(self) -> list[int]:
        return sorted(k for k, t in self.m.items() if t)

    def zero(self) -> Cochain:
        return Cochain.zero(self.datum, self.ring)

    def basis(self, b: int) -> Cochain:
        return Cochain.basis(self.datum, self.ring, b)

    def entry(self, k: int, key: Key) -> Cochain:
        return self.m.get(k, {}).get(key) or self.zero()

    def eval(self, k: int, args: Sequence[Cochain], *, use_native: bool = True) -> Cochain:
        if len(args) != k:
            raise StructureError(f"m_{k} takes {k} arguments, got {len(args)}")
        if use_native and k in self.native:
            return self.native[k](*args)
        if k not in self._wrapped:
            self._wrapped[k] = {((), key): v for key, v in self.table(k).items()}
        deg = self.datum.degree
        out = apply_table(self._wrapped[k], (), args, deg, deg, self.zero())
        if k == 1:
            out = out + scalar_d_term(args[0])
        return out

    def pairing(self, x: Cochain, y: Cochain) -> Nov:
        return self.datum.pairing(x, y, self.pairing_variant)

    def with_entry(self, k: int, key: Key, value: Cochain | None) -> "AInftyStructure":
        """Copy with one table entry replaced (None deletes it); native ops are dropped."""
        tables = {kk: dict(t) for kk, t in self.m.items()}
        tables.setdefault(k, {})
        if value is None or not value:
            tables[k].pop(tuple(key), None)
        else:
            tables[k][tuple(key)] = value
        return replace(self, m=tables, native={})

    def degree_problems(self) -> list:
        out = []
        for k, t in self.m.items():
            for key, v in t.items():
                expected = sum(self.datum.degree(b) for b in key) + 2 - k
                bad = [d for d in v.homogeneous_parts() if d != expected]
                if bad:
                    out.append((k, self._names(key), expected, bad))
        return out

    def _names(self, key: Key) -> tuple[str, ...]:
        names = self.datum.names
        return tuple(names[b] for b in key)


def eval_m(S: AInftyStructure, k: int, args: Sequence[Cochain]) -> Cochain:
    return S.eval(k, args)


# ---------------------------------------------------------------------------
# energy zero

def build_energy_zero(datum: TwistedPoincareDatum, ring: Ring | None = None, *,
                      native: bool = True, name: str | None = None) -> AInftyStructure:
    """m_1 = d, m_2(a1, a2) = (-1)^{|a1|} a1 a2, nothing else; unit 1; odd pairing."""
    ring = ring or Ring()
    m1 = {}
    m2 = {}
    for b in range(datum.size):
        db = datum.d_basis(b, ring)
        if db:
            m1[(b,)] = db
        for c in range(datum.size):
            w = datum.wedge_basis(b, c, ring)
            if w:
                m2[(b, c)] = w.scale(sign(datum.degree(b)))
    ops = {}
    if native:
        def m2_native(x: Cochain, y: Cochain) -> Cochain:
            out = Cochain.zero(datum, ring)
            for deg, part in x.homogeneous_parts().items():
                out = out + datum.wedge_elems(part, y).scale(sign(deg))
            return out
        ops = {1: lambda x: x.d(), 2: m2_native}
    return AInftyStructure(datum, ring, {1: m1, 2: m2}, name=name or f"energy-zero {datum.name}", native=ops)


# ---------------------------------------------------------------------------
# A-infinity relations

def _relation_candidates(S: AInftyStructure, k: int) -> set[Key]:
    cands: set[Key] = set()
    for k2 in range(0, k + 1):
        k1 = k + 1 - k2
        inner = S.table(k2)
        if not inner:
            continue
        if k1 == 1 and S.family:
            for key, val in inner.items():
                if any(a.has_interval_dependence() for a in val.components().values()):
                    cands.add(key)
        outer = S.table(k1)
        if not outer:
            continue
        for key2, val in inner.items():
            outs = {b for b, _ in val.terms}
            for key1 in outer:
                for i in range(k1):
                    if key1[i] in outs:
                        cands.add(key1[:i] + key2 + key1[i + 1:])
    return cands


def relation_residual(S: AInftyStructure, key: Key) -> Cochain:
    """Left side of the k-th A-infinity relation on a basis tuple."""
    deg = S.datum.degree
    degs = [deg(b) for b in key]
    total = S.zero()
    for P in partitions3(len(key)):
        if not S.table(P.k1) and not (P.k1 == 1 and S.family):
            continue
        a13, a23, a33 = P.blocks(key)
        inner = S.table(P.k2).get(a23)
        if not inner:
            continue
        args = [S.basis(b) for b in a13] + [inner] + [S.basis(b) for b in a33]
        val = S.eval(P.k1, args, use_native=False)
        if val:
            par = sum(degs[: P.i - 1]) + P.i - 1
            total = total + (val.scale(-1) if par % 2 else val)
    return total


def check_relations(S: AInftyStructure, max_k: int = 6, *, dense: bool = False,
                    max_witnesses: int = 20) -> Report:
    if max_k < 0:
        raise ValueError("max_k must be non-negative")
    start = time.perf_counter()
    rep = Report(f"A-infinity relations: {S.name}", {"max_k": max_k, "dense": dense})
    chk = rep.check("relations")
    vacuous = []
    for k in range(max_k + 1):
        live = any(S.table(k2) and (S.table(k + 1 - k2) or (k + 1 - k2 == 1 and S.family))
                   for k2 in range(k + 1))
        if not live:
            vacuous.append(k)
            continue
        if dense:
            tuples = itertools.product(range(S.datum.size), repeat=k)
        else:
            tuples = sorted(_relation_candidates(S, k))
        for key in tuples:
            res = relation_residual(S, tuple(key))
            chk.expect(res == 0, {"k": k, "args": S._names(tuple(key)), "residual": repr(res)}, max_witnesses)
    notes = []
    if not dense:
        notes.append("sparse: tuples with no nonzero composition are skipped")
    if vacuous:
        notes.append(f"no nonzero composition for k in {vacuous}")
    chk.note = "; ".join(notes)
    rep.elapsed = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# cyclic unital A-infinity properties

DEF11_CHECKS = (
    "(1) multilinearity", "(2) pairing bilinearity", "(3) relations", "(4) valuation of m",
    "(5) valuation of pairing", "(6) antisymmetry", "(7) cyclicity", "(8) unit annihilates m_k, k != 0,2",
    "(9) <m_0, e> = 0", "(10) m_2 unit identities", "degree of m_k", "degree of pairing",
)


def _random_args(S: AInftyStructure, rng: random.Random, key: Key, positive: bool = False) -> list[Cochain]:
    return [random_element(S.datum, S.ring, rng, family=S.family, positive=positive and rng.random() < 0.5,
                           basis=b) for b in key]


def _random_key(S: AInftyStructure, rng: random.Random, k: int) -> Key:
    keys = list(S.table(k))
    if keys and rng.random() < 0.8:
        return rng.choice(keys)
    return tuple(rng.randrange(S.datum.size) for _ in range(k))


def _cyclic_candidates(S: AInftyStructure, k: int) -> set[Key]:
    size = S.datum.size
    cands = set()
    for key in S.table(k):
        for c in range(size):
            cands.add(key + (c,))
            cands.add(key[1:] + (c,) + key[:1])
    return cands


def cyclic_residual(S: AInftyStructure, args: Sequence[Cochain]) -> Nov:
    k = len(args) - 1
    lhs = S.pairing(S.eval(k, args[:k]), args[k])
    degs = [a.degree() for a in args]
    par = (degs[k] + 1) * sum(d + 1 for d in degs[:k])
    rhs = S.pairing(S.eval(k, [args[k]] + list(args[: k - 1])), args[k - 1])
    rhs = rhs.scale(sign(par))
    if k == 1:
        rhs = rhs + S.pairing(args[0], args[1]).d()
    return lhs - rhs


def check_def11(S: AInftyStructure, max_k: int = 6, *, trials: int = 40, seed: int = 0,
                dense: bool = False, max_witnesses: int = 20) -> Report:
    """Run all ten properties of a cyclic unital A-infinity structure."""
    start = time.perf_counter()
    rng = random.Random(seed)
    rep = Report(f"cyclic unital A-infinity properties: {S.name}", {"max_k": max_k, "trials": trials, "seed": seed})
    for name in DEF11_CHECKS:
        rep.check(name)
    ring, datum = S.ring, S.datum
    size = datum.size
    deg = datum.degree
    arities = [k for k in S.arities() if k <= max_k]
    fam = S.family

    # (1) multilinearity
    c = rep.check("(1) multilinearity")
    ks = sorted(set(k for k in arities if k >= 1) | set(k for k in S.native if 1 <= k <= max_k))
    for _ in range(trials if ks else 0):
        k = rng.choice(ks)
        args = _random_args(S, rng, _random_key(S, rng, k))
        i = rng.randrange(k)
        a = random_scalar(ring, rng, family=fam)
        if a is None or not a.is_homogeneous():
            continue
        da = a.degree()
        scaled = list(args)
        scaled[i] = args[i].lmul(a)
        lhs = S.eval(k, scaled)
        par = da * (i + 1 + sum(x.degree() for x in args[:i]))
        rhs = S.eval(k, args).lmul(a).scale(sign(par))
        if k == 1:
            rhs = rhs + args[0].lmul(a.d())
        c.expect(lhs == rhs, {"k": k, "slot": i + 1, "scalar": repr(a), "diff": repr(lhs - rhs)}, max_witnesses)
    if not S.native:
        c.note = "table-defined operations: the rule holds by construction of the extension"

    # (2) pairing bilinearity
    c = rep.check("(2) pairing bilinearity")
    for _ in range(trials):
        x = random_element(datum, ring, rng, family=fam)
        y = random_element(datum, ring, rng, family=fam)
        a = random_scalar(ring, rng, family=fam)
        if a is None or not a.is_homogeneous():
            continue
        base = a * S.pairing(x, y)
        left = S.pairing(x.lmul(a), y)
        right = S.pairing(x, y.lmul(a)).scale(sign(a.degree() * (x.degree() + 1)))
        c.expect(base == left == right, {"x": repr(x), "y": repr(y), "a": repr(a)}, max_witnesses)

    # (3) relations
    rel = check_relations(S, max_k, dense=dense, max_witnesses=max_witnesses)
    rc = rel.checks["relations"]
    c = rep.check("(3) relations")
    c.count, c.violations, c.witnesses, c.note = rc.count, rc.violations, rc.witnesses, rc.note

    # (4) valuation of m
    c = rep.check("(4) valuation of m")
    m0 = S.entry(0, ())
    c.expect(m0.valuation() > 0, {"m_0": repr(m0)}, max_witnesses)
    for k in arities:
        for key, v in S.table(k).items():
            c.expect(v.valuation() >= 0, {"k": k, "args": S._names(key)}, max_witnesses)
    for _ in range(trials if arities else 0):
        k = rng.choice(arities)
        args = _random_args(S, rng, _random_key(S, rng, k), positive=True)
        out = S.eval(k, args)
        bound = sum((x.valuation() for x in args), Fraction(0))
        c.expect(out.valuation() >= bound, {"k": k, "args": [repr(x) for x in args]}, max_witnesses)

    # (5) valuation of pairing
    c = rep.check("(5) valuation of pairing")
    for _ in range(trials):
        x = random_element(datum, ring, rng, family=fam, positive=True)
        y = random_element(datum, ring, rng, family=fam, positive=rng.random() < 0.5)
        c.expect(S.pairing(x, y).valuation() >= x.valuation() + y.valuation(),
                 {"x": repr(x), "y": repr(y)}, max_witnesses)

    # (6) antisymmetry, and the degree of the pairing
    c = rep.check("(6) antisymmetry")
    cd = rep.check("degree of pairing")
    basis = [S.basis(b) for b in range(size)]
    pairs = [(x, y) for x in basis for y in basis]
    pairs += [(random_element(datum, ring, rng, family=fam), random_element(datum, ring, rng, family=fam))
              for _ in range(trials)]
    for x, y in pairs:
        p12 = S.pairing(x, y)
        p21 = S.pairing(y, x)
        dx, dy = x.degree(), y.degree()
        c.expect(p21 == p12.scale(sign((dx + 1) * (dy + 1) + 1)), {"x": repr(x), "y": repr(y)}, max_witnesses)
        for d in p12.homogeneous_parts():
            cd.expect(d == dx + dy - S.dim, {"x": repr(x), "y": repr(y), "degree": d}, max_witnesses)

    # (7) cyclicity
    c = rep.check("(7) cyclicity")
    cyc_ks = [k for k in arities if k >= 1]
    for k in cyc_ks:
        for key in sorted(_cyclic_candidates(S, k)):
            res = cyclic_residual(S, [S.basis(b) for b in key])
            c.expect(res == 0, {"k": k, "args": S._names(key), "residual": repr(res)}, max_witnesses)
    for _ in range(trials if cyc_ks else 0):
        k = rng.choice(cyc_ks)
        base, free = _random_key(S, rng, k), rng.randrange(size)
        key = base + (free,) if rng.random() < 0.5 else base[1:] + (free,) + base[:1]
        args = _random_args(S, rng, key)
        res = cyclic_residual(S, args)
        c.expect(res == 0, {"k": k, "args": [repr(x) for x in args], "residual": repr(res)}, max_witnesses)
    c.note = f"checked for k in {cyc_ks}; m_k = 0 for the remaining k <= {max_k}"

    # (8) unit annihilates m_k for k != 0, 2
    c = rep.check("(8) unit annihilates m_k, k != 0,2")
    e = S.unit
    if max_k >= 1:
        c.expect(S.eval(1, [e]) == 0, {"k": 1, "value": repr(S.eval(1, [e]))}, max_witnesses)
    for k in arities:
        if k in (0, 2):
            continue
        for key in S.table(k):
            for i in range(k):
                args = [S.basis(b) for b in key]
                args[i] = e
                out = S.eval(k, args)
                c.expect(out == 0, {"k": k, "args": S._names(key), "slot": i + 1, "value": repr(out)},
                         max_witnesses)

    # (9) <m_0, e> = 0
    rep.check("(9) <m_0, e> = 0").expect(S.pairing(m0, e) == 0, {"m_0": repr(m0)}, max_witnesses)

    # (10) m_2(e, a) = a = (-1)^{|a|} m_2(a, e)
    c = rep.check("(10) m_2 unit identities")
    elems = basis + [random_element(datum, ring, rng, family=fam) for _ in range(trials)]
    for x in elems:
        left = S.eval(2, [e, x])
        right = S.eval(2, [x, e]).scale(sign(x.degree()))
        c.expect(left == x and right == x, {"a": repr(x), "m2(e,a)": repr(left)}, max_witnesses)

    # degree bookkeeping
    c = rep.check("degree of m_k")
    c.count += sum(len(t) for t in S.m.values())
    for w in S.degree_problems():
        c.fail({"k": w[0], "args": w[1], "expected": w[2], "found": w[3]}, max_witnesses)

    rep.elapsed = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# assembly from q-data

def _gamma_preconditions(Q, gamma: Cochain) -> list[str]:
    failures = []
    dg = gamma.d()
    if dg:
        failures.append(f"gamma is not closed: d(gamma) = {dg!r}")
    parts = gamma.homogeneous_parts()
    if gamma and set(parts) != {2}:
        failures.append(f"gamma must have degree 2, found degrees {sorted(parts)}")
    if gamma and not gamma.valuation() > 0:
        failures.append("gamma must lie in the positive-valuation ideal")
    restricted = Q.ambient.restrict_to_L(gamma, Q.datum)
    off_unit = {b for b in restricted.components() if b != Q.datum.unit_index}
    if off_unit:
        names = [Q.datum.names[b] for b in sorted(off_unit)]
        failures.append(f"gamma restricted to L leaves the span of the unit (components {names})")
    return failures


def assemble_m_from_q(Q, gamma: Cochain, max_k: int | None = None, *, name: str | None = None) -> AInftyStructure:
    """m_k = sum_beta T^beta sum_l (1/l!) q^beta_{k,l}(gamma^l; .), and likewise m_{-1}."""
    failures = _gamma_preconditions(Q, gamma)
    if failures:
        raise AssemblyError(failures)
    ring = Q.ring
    datum = Q.datum
    by_k: dict[int, dict[tuple, set[int]]] = {}
    for (k, l, beta), table in Q.tables.items():
        if max_k is not None and k > max_k:
            continue
        for (_g, akey) in table:
            by_k.setdefault(k, {}).setdefault(akey, set()).add((l, beta))
    m: dict[int, dict[Key, Cochain]] = {}
    fact = [1]
    for i in range(1, 64):
        fact.append(fact[-1] * i)
    for k, keys in by_k.items():
        out_k = {}
        for akey, lbs in keys.items():
            args = [Cochain.basis(datum, ring, b) for b in akey]
            total = Cochain.zero(datum, ring)
            for l, beta in sorted(lbs):
                val = Q.eval(k, l, beta, [gamma] * l, args)
                if val:
                    total = total + val.lmul(Nov.T(ring, beta)).scale(Fraction(1, fact[l]))
            if total:
                out_k[akey] = total
        m[k] = out_k
    m_minus1 = Nov.zero(ring)
    for (l, beta) in Q.qm1:
        val = Q.eval_m1(l, beta, [gamma] * l)
        if val:
            m_minus1 = m_minus1 + (Nov.T(ring, beta) * val).scale(Fraction(1, fact[l]))
    family = any(a.has_interval_dependence() for a in gamma.components().values())
    return AInftyStructure(datum, ring, m, m_minus1=m_minus1, family=family,
                           name=name or f"assembled from {Q.name}")


def _below_cutoff(ring: Ring, mono, t_index: int) -> bool:
    """True when multiplying the monomial by t_index keeps it: the derivative is then exact there."""
    e, l, p, b, s = mono
    bumped = (e, l[:t_index] + (l[t_index] + 1,) + l[t_index + 1:], p, b, s)
    return ring.keeps(bumped)


def check_fundamental_class(S: AInftyStructure, t_index: int = 0, *, max_witnesses: int = 20) -> Report:
    """d/dt_{t_index} m_k = -delta_{0,k} * unit, coefficient by coefficient.

    Monomials whose t-antiderivative falls outside the cutoff are skipped,
    since truncation has already discarded the terms they would come from.
    """
    start = time.perf_counter()
    ring = S.ring
    rep = Report(f"fundamental class: {S.name}", {"t_index": t_index})
    c = rep.check("d/dt0 m_k = -delta_{0k} unit")
    unit = S.unit
    for k in sorted(set(S.arities()) | {0}):
        for key, v in sorted(S.table(k).items()):
            want = -unit if k == 0 else S.zero()
            got = v.dt_derivative(t_index)
            got = Cochain(S.datum, ring, {bm: x for bm, x in got.terms.items()
                                          if _below_cutoff(ring, bm[1], t_index)}, truncate=False)
            want = Cochain(S.datum, ring, {bm: x for bm, x in want.terms.items()
                                           if _below_cutoff(ring, bm[1], t_index)}, truncate=False)
            c.expect(got == want, {"k": k, "inputs": S._names(key), "derivative": repr(got)}, max_witnesses)
        if k == 0 and () not in S.table(0):
            c.fail({"k": 0, "inputs": (), "derivative": "0"}, max_witnesses)
    rep.elapsed = time.perf_counter() - start
    return rep


# ---------------------------------------------------------------------------
# families

@dataclass(eq=False)
class PseudoisotopyData:
    """A structure over interval-family scalars (s and dt) with the datum's pairing and unit."""

    structure: AInftyStructure
    name: str = ""

    def __post_init__(self):
        self.structure.family = True

    def restrict(self, at: int) -> AInftyStructure:
        S = self.structure
        tables = {k: {key: v.restrict(at) for key, v in t.items()} for k, t in S.m.items()}
        return AInftyStructure(S.datum, S.ring, tables, unit=S.unit.restrict(at), family=False,
                               pairing_variant=S.pairing_variant, name=f"{self.name} at s={at}")


def constant_family(S: AInftyStructure, name: str | None = None) -> PseudoisotopyData:
    fam = AInftyStructure(S.datum, S.ring, {k: dict(t) for k, t in S.m.items()}, unit=S.unit,
                          pairing_variant=S.pairing_variant, family=True, name=name or f"constant {S.name}")
    return PseudoisotopyData(fam, fam.name)


def build_gamma_tilde(gamma: Cochain, gamma_prime: Cochain, eta: Cochain) -> Cochain:
    """gamma + s (gamma' - gamma) + dt * eta, after checking d(eta) = gamma' - gamma."""
    ring = gamma.ring
    residual = eta.d() - (gamma_prime - gamma)
    if residual:
        raise GammaTildeError(f"d(eta) differs from gamma' - gamma by {residual!r}", residual)
    for label, x, want in (("gamma", gamma, 2), ("gamma'", gamma_prime, 2), ("eta", eta, 1)):
        degs = set(x.homogeneous_parts())
        if degs and degs != {want}:
            raise GammaTildeError(f"{label} must have degree {want}, found {sorted(degs)}")
    s = Nov.monomial(ring, s=1)
    dt = Nov.monomial(ring, dt=1)
    return gamma + (gamma_prime - gamma).lmul(s) + eta.lmul(dt)


def _apply_linear(space, ring, images: Mapping[int, Cochain], x: Cochain) -> Cochain:
    """Apply the degree-zero R-linear map b -> images[b] (identity when absent)."""
    out = Cochain.zero(space, ring)
    for b, a in x.components().items():
        img = images.get(b)
        out = out + (Cochain.from_scalar(space, b, a) if img is None else img.lmul(a))
    return out


def gauge_maps(S: AInftyStructure, X: Mapping[int, Cochain], beta, family: bool) -> tuple[dict, dict]:
    """phi = id + c T^beta X and its inverse, where c is s in a family and 1 otherwise."""
    ring, datum = S.ring, S.datum
    coeff = Nov.monomial(ring, beta=beta, s=1 if family else 0)
    step = {b: x.lmul(coeff) for b, x in X.items()}
    fwd = {b: Cochain.basis(datum, ring, b) + step.get(b, Cochain.zero(datum, ring)) for b in range(datum.size)}
    inv = {}
    for b in range(datum.size):
        term = Cochain.basis(datum, ring, b)
        total = term
        for j in range(1, 64):
            term = _nilpotent_step(datum, ring, step, term)
            if not term:
                break
            total = total + (term.scale(-1) if j % 2 else term)
        inv[b] = total
    return fwd, inv


def _nilpotent_step(space, ring, step, x: Cochain) -> Cochain:
    out = Cochain.zero(space, ring)
    for b, a in x.components().items():
        img = step.get(b)
        if img is not None:
            out = out + img.lmul(a)
    return out


def conjugate(S: AInftyStructure, fwd: Mapping[int, Cochain], inv: Mapping[int, Cochain], *,
              family: bool, name: str) -> AInftyStructure:
    """Tables of phi o m o (phi^{-1})^{tensor k}; in a family the k = 1 rule adds dt-terms."""
    datum, ring = S.datum, S.ring
    base = AInftyStructure(datum, ring, S.m, unit=S.unit, family=family, pairing_variant=S.pairing_variant)
    pre: dict[int, set[int]] = {c: set() for c in range(datum.size)}
    for b, img in inv.items():
        for c in img.components():
            pre[c].add(b)
    tables: dict[int, dict[Key, Cochain]] = {}
    for k, t in S.m.items():
        cands: set[Key] = set()
        for key in t:
            cands.update(itertools.product(*(sorted(pre[c]) for c in key)))
        if k == 1:
            cands.update((b,) for b, img in inv.items() if img != Cochain.basis(datum, ring, b))
        out = {}
        for key in cands:
            val = base.eval(k, [inv[b] for b in key], use_native=False)
            val = _apply_linear(datum, ring, fwd, val)
            if val:
                out[key] = val
        tables[k] = out
    return AInftyStructure(datum, ring, tables, unit=_apply_linear(datum, ring, fwd, S.unit),
                           pairing_variant=S.pairing_variant, family=family, name=name)


def build_gauge_family(S: AInftyStructure, X: Mapping[int, Cochain], beta) -> tuple[PseudoisotopyData, AInftyStructure]:
    """Family phi_s o m o phi_s^{-1} with phi_s = id + s T^beta X, and its s = 1 endpoint."""
    fwd, inv = gauge_maps(S, X, beta, family=True)
    fam = conjugate(S, fwd, inv, family=True, name=f"gauge family of {S.name}")
    fwd1, inv1 = gauge_maps(S, X, beta, family=False)
    end = conjugate(S, fwd1, inv1, family=False, name=f"gauge transform of {S.name}")
    return PseudoisotopyData(fam, fam.name), end


def check_pseudoisotopy(P: PseudoisotopyData, S0: AInftyStructure, S1: AInftyStructure, max_k: int = 4, *,
                        trials: int = 30, seed: int = 0, max_witnesses: int = 20) -> Report:
    start = time.perf_counter()
    rng = random.Random(seed)
    F = P.structure
    rep = Report(f"pseudoisotopy: {P.name}", {"max_k": max_k, "trials": trials, "seed": seed})
    for at, S in ((0, S0), (1, S1)):
        c = rep.check(f"j{at}^* m~ = m{'' if at == 0 else chr(39)}")
        if S.datum.names != F.datum.names or S.ring != F.ring:
            c.fail({"reason": "endpoint lives on a different datum or coefficient ring"})
            continue
        for k in range(max_k + 1):
            keys = set(F.table(k)) | set(S.table(k))
            for key in sorted(keys):
                lhs = F.entry(k, key).restrict(at)
                rhs = S.entry(k, key)
                c.expect(lhs == rhs, {"k": k, "args": F._names(key), "diff": repr(lhs - rhs)}, max_witnesses)
        ks = [k for k in range(max_k + 1) if F.table(k) or S.table(k)]
        for _ in range(trials if ks else 0):
            k = rng.choice(ks)
            key = _random_key(F, rng, k)
            args = _random_args(F, rng, key)
            lhs = F.eval(k, args).restrict(at)
            rhs = S.eval(k, [a.restrict(at) for a in args])
            c.expect(lhs == rhs, {"k": k, "args": [repr(a) for a in args], "diff": repr(lhs - rhs)}, max_witnesses)
        c = rep.check(f"j{at}^* pairing")
        for _ in range(trials):
            x = random_element(F.datum, F.ring, rng, family=True)
            y = random_element(F.datum, F.ring, rng, family=True)
            lhs = F.pairing(x, y).restrict(at)
            rhs = S.pairing(x.restrict(at), y.restrict(at))
            c.expect(lhs == rhs, {"x": repr(x), "y": repr(y)}, max_witnesses)
        rep.check(f"j{at}^* unit").expect(F.unit.restrict(at) == S.unit,
                                          {"family unit": repr(F.unit), "endpoint unit": repr(S.unit)},
                                          max_witnesses)
    rep.merge(check_def11(F, max_k, trials=trials, seed=seed, max_witnesses=max_witnesses), prefix="family ")
    rep.elapsed = time.perf_counter() - start
    return rep
