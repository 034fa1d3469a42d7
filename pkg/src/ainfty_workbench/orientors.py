"""A finite symbolic model of orientors and their calculus.

Graded local systems are finite graded spaces whose monodromy around each
loop of the base is a degree-0 automorphism.  A map symbol ``g`` carries a
relative dimension and a Z/2 character; its orientation line is a formal
generator o_g of degree -rdim(g).  An orientor G along g from Q to K is stored
as the graded matrix M with

    G(q) = o_{g_1} (x) ... (x) o_{g_r} (x) M(q)

where g = g_r o ... o g_1 is recorded as the path (g_1, ..., g_r); the
composition isomorphism of lines is the identification of o_f (x) o_g with
o_{g o f}.  Signs follow the conventions

    (F (x) G)(a (x) b) = (-1)^{|G||a|} F a (x) G b,   tau(a (x) b) = (-1)^{|a||b|} b (x) a.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .report import Report

MUTATIONS = ("composition", "tensor", "tau")


class OrientorTypeError(TypeError):
    pass


class MissingOrientationData(ValueError):
    pass


# ---------------------------------------------------------------------------
# graded spaces and maps

@dataclass(frozen=True)
class GradedLocalSystem:
    """Basis names and degrees, plus a monodromy matrix {(row, col): coeff} per loop."""

    names: tuple[str, ...]
    degrees: tuple[int, ...]
    monodromy: tuple[tuple[str, tuple], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.names)

    def mono(self, loop: str) -> "GradedMap":
        for name, entries in self.monodromy:
            if name == loop:
                return GradedMap(self, self, 0, dict(entries))
        return identity(self)

    @property
    def loops(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.monodromy)

    def validate(self) -> Report:
        rep = Report(f"local system {self.names}")
        for loop in self.loops:
            m = self.mono(loop)
            rep.check("degree-preserving monodromy").expect(
                all(self.degrees[i] == self.degrees[j] for (i, j) in m.entries), loop)
            rep.check("invertible monodromy").expect(_det(m) != 0, loop)
        return rep


def trivial_system(loops: Sequence[str] = ()) -> GradedLocalSystem:
    """The constant rank-one system Z/2 (x) A in degree 0."""
    return GradedLocalSystem(("1",), (0,), tuple((l, (((0, 0), Fraction(1)),)) for l in loops))


def tensor_system(A: GradedLocalSystem, B: GradedLocalSystem) -> GradedLocalSystem:
    names = tuple(f"{a}*{b}" for a in A.names for b in B.names)
    degrees = tuple(da + db for da in A.degrees for db in B.degrees)
    loops = sorted(set(A.loops) | set(B.loops))
    mono = []
    for loop in loops:
        # monodromies have degree 0, so their tensor product carries no sign
        ma, mb = A.mono(loop).entries, B.mono(loop).entries
        entries = {(c * B.dim + d, a * B.dim + b): x * y for (c, a), x in ma.items() for (d, b), y in mb.items()}
        mono.append((loop, tuple(sorted(entries.items()))))
    return GradedLocalSystem(names, degrees, tuple(mono))


@dataclass
class GradedMap:
    src: GradedLocalSystem
    tgt: GradedLocalSystem
    degree: int
    entries: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.entries = {k: Fraction(v) for k, v in self.entries.items() if v}

    def __call__(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (i, j), c in self.entries.items():
            if j in vec:
                out[i] = out.get(i, 0) + c * vec[j]
        return {i: c for i, c in out.items() if c}

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMap) and self.src == other.src and self.tgt == other.tgt
                and self.entries == other.entries)

    def scale(self, c) -> "GradedMap":
        return GradedMap(self.src, self.tgt, self.degree, {k: v * c for k, v in self.entries.items()})

    def is_homogeneous(self) -> bool:
        return all(self.tgt.degrees[i] - self.src.degrees[j] == self.degree for (i, j) in self.entries)


def identity(A: GradedLocalSystem) -> GradedMap:
    return GradedMap(A, A, 0, {(i, i): Fraction(1) for i in range(A.dim)})


def compose_maps(G: GradedMap, F: GradedMap) -> GradedMap:
    """G o F (no sign: plain composition)."""
    if F.tgt != G.src:
        raise OrientorTypeError("target of the first map differs from the source of the second")
    out: dict[tuple[int, int], Fraction] = {}
    for (k, j), c in F.entries.items():
        for (i, k2), d in G.entries.items():
            if k2 == k:
                out[(i, j)] = out.get((i, j), 0) + d * c
    return GradedMap(F.src, G.tgt, F.degree + G.degree, out)


def tensor_maps(F: GradedMap, G: GradedMap, *, mutate: str | None = None) -> GradedMap:
    """(F (x) G)(a (x) b) = (-1)^{|G||a|} Fa (x) Gb."""
    A, B = F.src, G.src
    C, D = F.tgt, G.tgt
    out = {}
    for (c, a), x in F.entries.items():
        for (d, b), y in G.entries.items():
            s = -1 if (G.degree * A.degrees[a]) % 2 and mutate != "tensor" else 1
            out[(c * D.dim + d, a * B.dim + b)] = s * x * y
    return GradedMap(tensor_system(A, B), tensor_system(C, D), F.degree + G.degree, out)


def tau(A: GradedLocalSystem, B: GradedLocalSystem, *, mutate: str | None = None) -> GradedMap:
    out = {}
    for a in range(A.dim):
        for b in range(B.dim):
            s = -1 if (A.degrees[a] * B.degrees[b]) % 2 and mutate != "tau" else 1
            out[(b * A.dim + a, a * B.dim + b)] = Fraction(s)
    return GradedMap(tensor_system(A, B), tensor_system(B, A), 0, out)


def _det(m: GradedMap) -> Fraction:
    n = m.src.dim
    rows = [[m.entries.get((i, j), Fraction(0)) for j in range(n)] for i in range(n)]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if rows[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, n):
            f = rows[r][c] / rows[c][c]
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return det


# ---------------------------------------------------------------------------
# map symbols and orientors

@dataclass(frozen=True)
class MapSymbol:
    """A formal map with relative dimension and orientation character per loop (+1 or -1)."""

    name: str
    rdim: int
    character: tuple[tuple[str, int], ...] = ()

    @property
    def line_degree(self) -> int:
        return -self.rdim

    def char(self, loop: str) -> int:
        return dict(self.character).get(loop, 1)


@dataclass
class Orientor:
    path: tuple[MapSymbol, ...]
    matrix: GradedMap

    @property
    def src(self) -> GradedLocalSystem:
        return self.matrix.src

    @property
    def tgt(self) -> GradedLocalSystem:
        return self.matrix.tgt

    @property
    def line_degree(self) -> int:
        return sum(g.line_degree for g in self.path)

    @property
    def degree(self) -> int:
        return self.matrix.degree + self.line_degree

    def line_char(self, loop: str) -> int:
        out = 1
        for g in self.path:
            out *= g.char(loop)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Orientor) and self.path == other.path and self.matrix == other.matrix

    def equivariance_defects(self) -> list[str]:
        bad = []
        for loop in sorted(set(self.src.loops) | set(self.tgt.loops)):
            lhs = compose_maps(self.matrix, self.src.mono(loop))
            rhs = compose_maps(self.tgt.mono(loop), self.matrix).scale(self.line_char(loop))
            if lhs != rhs:
                bad.append(loop)
        return bad


def identity_orientor(K: GradedLocalSystem, name: str = "id") -> Orientor:
    return Orientor((MapSymbol(name, 0),), identity(K))


def compose_orientors(G: Orientor, F: Orientor, *, mutate: str | None = None) -> Orientor:
    """G . F: apply F, then Id_{line(f)} (x) G, then the composition isomorphism of lines."""
    if F.tgt != G.src:
        raise OrientorTypeError("target system of F differs from source system of G")
    exp = G.degree * F.line_degree + (G.degree if mutate == "composition" else 0)
    M = compose_maps(G.matrix, F.matrix)
    return Orientor(_drop_identities(F.path + G.path), M.scale(-1 if exp % 2 else 1))


def _drop_identities(path: tuple[MapSymbol, ...]) -> tuple[MapSymbol, ...]:
    """Identity lines are canonically trivial; keep one symbol for an all-identity path."""
    kept = tuple(g for g in path if not (g.name == "id" and g.rdim == 0 and not g.character))
    return kept or path[:1]


def extend(G: Orientor, T: GradedLocalSystem, side: str = "right") -> Orientor:
    """Right extension G (x) Id_T, or left extension (tau (x) Id) o (Id_T (x) G)."""
    if side == "right":
        return Orientor(G.path, tensor_maps(G.matrix, identity(T)))
    if side != "left":
        raise ValueError("side must be 'left' or 'right'")
    out = {}
    Q, K = G.src, G.tgt
    for t in range(T.dim):
        dt = T.degrees[t]
        s = (dt * G.degree + dt * G.line_degree) % 2
        for (k, q), c in G.matrix.entries.items():
            out[(t * K.dim + k, t * Q.dim + q)] = -c if s else c
    return Orientor(G.path, GradedMap(tensor_system(T, Q), tensor_system(T, K), G.matrix.degree, out))


def orientation_orientor(f: MapSymbol, K: GradedLocalSystem, sign: int | None) -> Orientor:
    """(phi^{O^f})^K: the K-extension of 1 -> O^f, where O^f = sign * o_f."""
    if sign is None:
        raise MissingOrientationData(f"no relative orientation supplied for {f.name}")
    if f.character and any(c == -1 for _, c in f.character):
        raise MissingOrientationData(f"{f.name} is not relatively orientable")
    return Orientor((f,), identity(K).scale(sign))


def pullback_orientor(G: Orientor, along: MapSymbol, *, orientation: int | None = None,
                      square: tuple[MapSymbol, int] | None = None) -> Orientor:
    """Pull G back along a relatively oriented map, or along a pullback square.

    ``orientation`` is the sign of O^f against o_f and gives
    (-1)^{|f||G|} G . (phi^{O^f})^K.  ``square = (q, s)`` names the pulled-back
    map q and the sign s of the isomorphism r^* line(g) -> line(q) sending
    o_g to s * o_q; the result is then an orientor along q.
    """
    if square is not None:
        q, s = square
        if q.rdim != sum(g.rdim for g in G.path):
            raise OrientorTypeError("a pullback square preserves relative dimension")
        return Orientor((q,), G.matrix.scale(s))
    phi = orientation_orientor(along, G.src, orientation)
    out = compose_orientors(G, phi)
    exp = along.rdim * G.degree
    return Orientor(out.path, out.matrix.scale(-1 if exp % 2 else 1))


def boundary_orientor(G: Orientor, iota: MapSymbol, f_parity: int = 0) -> Orientor:
    """dG = (-1)^{|G|} G . d_g^Q with d_g(1) = (-1)^f O_c of degree 1 along the boundary inclusion."""
    if iota.rdim != -1:
        raise OrientorTypeError("the boundary inclusion has relative dimension -1")
    d = Orientor((iota,), identity(G.src).scale(-1 if f_parity % 2 else 1))
    out = compose_orientors(G, d)
    return Orientor(out.path, out.matrix.scale(-1 if G.degree % 2 else 1))


def same_up_to_trivial_lines(A: Orientor, B: Orientor) -> bool:
    """Equality after identifying lines of relative dimension 0 with trivial character."""
    def core(path):
        return tuple(g for g in path if g.rdim or any(c == -1 for _, c in g.character))
    return (A.matrix == B.matrix and A.line_degree == B.line_degree
            and [g.rdim for g in core(A.path)] == [g.rdim for g in core(B.path)])


# ---------------------------------------------------------------------------
# random instances

LOOP = "l"


def random_system(rng: random.Random, max_dim: int = 3, degrees=(-3, 3), even_only: bool = False,
                  loops: Sequence[str] = (LOOP,)) -> GradedLocalSystem:
    n = rng.randint(1, max_dim)
    lo, hi = degrees
    degs = tuple(rng.choice([d for d in range(lo, hi + 1) if not even_only or d % 2 == 0]) for _ in range(n))
    names = tuple(f"e{i}" for i in range(n))
    mono = tuple((loop, tuple(((i, i), Fraction(rng.choice((1, -1)))) for i in range(n))) for loop in loops)
    return GradedLocalSystem(names, degs, mono)


def random_symbol(rng: random.Random, name: str, even_only: bool = False, loops=(LOOP,)) -> MapSymbol:
    r = rng.choice((-2, 0, 2) if even_only else (-2, -1, 0, 1, 2, 3))
    return MapSymbol(name, r, tuple((l, rng.choice((1, -1))) for l in loops))


def _coeff(rng):
    return Fraction(rng.choice((1, -1, 2, -3, 5)), rng.choice((1, 1, 2, 3)))


def random_orientor(rng: random.Random, Q: GradedLocalSystem, K: GradedLocalSystem, g: MapSymbol,
                    degree: int | None = None) -> Orientor:
    """A random monodromy-equivariant orientor of the requested degree (chosen at random if None)."""
    if degree is None:
        options = sorted({K.degrees[k] - Q.degrees[q] - g.rdim for k in range(K.dim) for q in range(Q.dim)})
        degree = rng.choice(options)
    mdeg = degree + g.rdim
    loops = sorted(set(Q.loops) | set(K.loops))
    entries = {}
    for k in range(K.dim):
        for q in range(Q.dim):
            if K.degrees[k] - Q.degrees[q] != mdeg:
                continue
            ok = all(Q.mono(l).entries.get((q, q)) == g.char(l) * K.mono(l).entries.get((k, k)) for l in loops)
            if ok and rng.random() < 0.8:
                entries[(k, q)] = _coeff(rng)
    return Orientor((g,), GradedMap(Q, K, mdeg, entries))


def random_map(rng: random.Random, A: GradedLocalSystem, B: GradedLocalSystem, degree: int | None = None) -> GradedMap:
    if degree is None:
        degree = rng.choice(sorted({B.degrees[b] - A.degrees[a] for a in range(A.dim) for b in range(B.dim)}))
    entries = {(b, a): _coeff(rng) for a in range(A.dim) for b in range(B.dim)
               if B.degrees[b] - A.degrees[a] == degree and rng.random() < 0.8}
    return GradedMap(A, B, degree, entries)


# ---------------------------------------------------------------------------
# verification

LAWS = ("associativity", "right distributivity", "left distributivity", "Koszul tau identity",
        "Koszul composition identity", "tau distributivity")


def verify_orientor_laws(trials: int = 1000, seed: int = 0, *, mutate: str | None = None, max_dim: int = 3,
                         degrees=(-3, 3), even_only: bool = False, max_witnesses: int = 10) -> Report:
    """Randomized exact verification of the orientor calculus laws.

    Every law is checked on ``trials`` fresh instances; ``mutate`` swaps in a
    broken sign rule (one of ``MUTATIONS``) to show the checks have teeth.
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}; choose from {MUTATIONS}")
    start = time.perf_counter()
    rng = random.Random(seed)
    rep = Report("orientor calculus laws", {"trials": trials, "seed": seed, "mutate": mutate,
                                             "max_dim": max_dim, "degrees": list(degrees), "even_only": even_only})
    W = max_witnesses

    def system():
        return random_system(rng, max_dim, degrees, even_only)

    def symbol(name):
        return random_symbol(rng, name, even_only)

    def deg():
        lo, hi = degrees
        return rng.choice([d for d in range(lo, hi + 1) if not even_only or d % 2 == 0])

    def orientor(Q, K, g):
        if even_only:
            options = sorted({d for k in range(K.dim) for q in range(Q.dim)
                              for d in [K.degrees[k] - Q.degrees[q] - g.rdim] if d % 2 == 0})
            return random_orientor(rng, Q, K, g, rng.choice(options))
        return random_orientor(rng, Q, K, g)

    for _ in range(trials):
        A, B, C, D = system(), system(), system(), system()
        f, g, h = symbol("f"), symbol("g"), symbol("h")
        F, G, H = orientor(A, B, f), orientor(B, C, g), orientor(C, D, h)
        wit = {"degrees": (F.degree, G.degree, H.degree), "rdims": (f.rdim, g.rdim, h.rdim)}

        lhs = compose_orientors(compose_orientors(H, G, mutate=mutate), F, mutate=mutate)
        rhs = compose_orientors(H, compose_orientors(G, F, mutate=mutate), mutate=mutate)
        rep.check("associativity").expect(lhs == rhs, wit, W)
        rep.check("degree additivity").expect(compose_orientors(G, F).degree == F.degree + G.degree, wit, W)
        rep.check("equivariance").expect(not compose_orientors(G, F).equivariance_defects(), wit, W)

        T = system()
        lhs = extend(compose_orientors(G, F, mutate=mutate), T, "right")
        rhs = compose_orientors(extend(G, T, "right"), extend(F, T, "right"), mutate=mutate)
        rep.check("right distributivity").expect(lhs == rhs, dict(wit, T=T.degrees), W)
        lhs = extend(compose_orientors(G, F, mutate=mutate), T, "left")
        rhs = compose_orientors(extend(G, T, "left"), extend(F, T, "left"), mutate=mutate)
        rep.check("left distributivity").expect(lhs == rhs, dict(wit, T=T.degrees), W)

        A2, B2, C2, D2 = system(), system(), system(), system()
        Fm, Gm = random_map(rng, A2, C2, None), random_map(rng, B2, D2, None)
        if even_only and (Fm.degree % 2 or Gm.degree % 2):
            Fm, Gm = Fm.scale(0), Gm.scale(0)
        lhs = compose_maps(tensor_maps(Gm, Fm, mutate=mutate), tau(A2, B2, mutate=mutate))
        rhs = compose_maps(tau(C2, D2, mutate=mutate), tensor_maps(Fm, Gm, mutate=mutate))
        rhs = rhs.scale(-1 if (Fm.degree * Gm.degree) % 2 else 1)
        rep.check("Koszul tau identity").expect(lhs == rhs, {"|F|": Fm.degree, "|G|": Gm.degree}, W)

        C3, D3 = system(), system()
        Fp, Gp = random_map(rng, C2, C3, None), random_map(rng, D2, D3, None)
        lhs = compose_maps(tensor_maps(Fp, Gp, mutate=mutate), tensor_maps(Fm, Gm, mutate=mutate))
        rhs = tensor_maps(compose_maps(Fp, Fm), compose_maps(Gp, Gm), mutate=mutate)
        rhs = rhs.scale(-1 if (Fm.degree * Gp.degree) % 2 else 1)
        rep.check("Koszul composition identity").expect(
            lhs == rhs, {"|F|": Fm.degree, "|G|": Gm.degree, "|F'|": Fp.degree, "|G'|": Gp.degree}, W)

        lhs = tau(A2, tensor_system(B2, C2), mutate=mutate)
        rhs = compose_maps(tensor_maps(identity(B2), tau(A2, C2, mutate=mutate), mutate=mutate),
                           tensor_maps(tau(A2, B2, mutate=mutate), identity(C2), mutate=mutate))
        # (B (x) C) (x) A and B (x) (C (x) A) share the lexicographic basis order
        rep.check("tau distributivity").expect(lhs.entries == rhs.entries,
                                               {"A": A2.degrees, "B": B2.degrees, "C": C2.degrees}, W)

        if even_only:
            rep.check("all signs +1").expect(
                compose_orientors(G, F).matrix == compose_maps(G.matrix, F.matrix), wit, W)

    rep.elapsed = time.perf_counter() - start
    return rep


def verify_pullback_examples(trials: int = 200, seed: int = 0) -> Report:
    """Trivial-square pullback, diffeomorphism pullback, and degree bookkeeping."""
    rng = random.Random(seed)
    rep = Report("orientor pullbacks", {"trials": trials, "seed": seed})
    for _ in range(trials):
        K, R = random_system(rng), random_system(rng)
        g = random_symbol(rng, "g")
        G = random_orientor(rng, K, R, g)
        idsq = MapSymbol("id", 0)
        plain = Orientor((idsq,), random_map(rng, K, R))
        rep.check("identity square gives plain pullback").expect(
            pullback_orientor(plain, MapSymbol("f", 1), square=(idsq, 1)).matrix == plain.matrix, None)
        diffeo = MapSymbol("f", 0)
        via_square = pullback_orientor(G, diffeo, square=(MapSymbol("g.f", g.rdim, g.character), 1))
        direct = pullback_orientor(G, diffeo, orientation=1)
        rep.check("diffeomorphism pullback matches square form").expect(
            same_up_to_trivial_lines(via_square, direct), {"rdim": g.rdim})
        rep.check("square pullback preserves degree").expect(via_square.degree == G.degree, None)
        f = MapSymbol("f", rng.randint(-2, 2))
        P = pullback_orientor(G, f, orientation=rng.choice((1, -1)))
        rep.check("oriented pullback degree").expect(P.degree == G.degree - f.rdim, {"rdim f": f.rdim})
        dG = boundary_orientor(G, MapSymbol("iota", -1))
        rep.check("boundary raises degree by one").expect(dG.degree == G.degree + 1, None)
    try:
        pullback_orientor(G, MapSymbol("f", 1))
        rep.check("missing orientation rejected").fail("accepted")
    except MissingOrientationData:
        rep.check("missing orientation rejected").expect(True)
    return rep
