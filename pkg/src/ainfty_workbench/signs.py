"""Sign and parity functions for the q-operators, plus exhaustive lemma checks.

Degrees are kept as full integers everywhere; parities are taken at the
point of use.  Every formula is affine in the parities of its inputs, so the
lemma verifier only needs to range over degree lists with entries in {0, 1}.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterator, Sequence

from .report import Report

DegreeList = Sequence[int]


class UnsupportedField(ValueError):
    """Raised when a sign needs sqrt(-1) but the scalar field lacks it."""


@dataclass(frozen=True)
class SignValue:
    """A fourth root of unity, stored as the exponent of sqrt(-1) mod 4."""

    exp: int = 0

    def __post_init__(self):
        object.__setattr__(self, "exp", self.exp % 4)

    @classmethod
    def from_parity(cls, parity: int) -> "SignValue":
        return cls(2 * (parity % 2))

    @property
    def is_real(self) -> bool:
        return self.exp % 2 == 0

    @property
    def value(self) -> complex | int:
        return (1, 1j, -1, -1j)[self.exp]

    def __mul__(self, other: "SignValue") -> "SignValue":
        return SignValue(self.exp + other.exp)

    def __neg__(self) -> "SignValue":
        return SignValue(self.exp + 2)

    def __int__(self) -> int:
        if not self.is_real:
            raise ValueError(f"{self} is not real")
        return 1 if self.exp == 0 else -1

    def __eq__(self, other) -> bool:
        if isinstance(other, SignValue):
            return self.exp == other.exp
        if isinstance(other, (int, complex)):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.exp)

    def __repr__(self) -> str:
        return ("+1", "+i", "-1", "-i")[self.exp]


PLUS = SignValue(0)
MINUS = SignValue(2)
I_UNIT = SignValue(1)


def sign(parity: int) -> int:
    """(-1)**parity as a Python int."""
    return -1 if parity % 2 else 1


# ---------------------------------------------------------------------------
# index bookkeeping

@dataclass(frozen=True)
class Partition3:
    """Ordered 3-partition of (1..k): blocks (1..i-1), (i..i+k2-1), (i+k2..k)."""

    k: int
    i: int
    k2: int

    def __post_init__(self):
        if not (1 <= self.i <= self.k + 1 and 0 <= self.k2 <= self.k - self.i + 1):
            raise ValueError(f"invalid 3-partition {self}")

    @property
    def k1(self) -> int:
        return self.k - self.k2 + 1

    def blocks(self, seq: Sequence) -> tuple[tuple, tuple, tuple]:
        a = self.i - 1
        b = a + self.k2
        return tuple(seq[:a]), tuple(seq[a:b]), tuple(seq[b:])


def partitions3(k: int) -> Iterator[Partition3]:
    for i in range(1, k + 2):
        for k2 in range(0, k - i + 2):
            yield Partition3(k, i, k2)


@dataclass(frozen=True)
class InteriorSplit:
    """Disjoint I, J covering 1..l, each stored in increasing order (1-based)."""

    I: tuple[int, ...]
    J: tuple[int, ...]

    def __post_init__(self):
        l = len(self.I) + len(self.J)
        if sorted(self.I + self.J) != list(range(1, l + 1)):
            raise ValueError(f"I, J do not partition [1..{l}]")
        object.__setattr__(self, "I", tuple(sorted(self.I)))
        object.__setattr__(self, "J", tuple(sorted(self.J)))

    def pick(self, seq: Sequence) -> tuple[tuple, tuple]:
        return tuple(seq[j - 1] for j in self.I), tuple(seq[j - 1] for j in self.J)


def interior_splits(l: int) -> Iterator[InteriorSplit]:
    for mask in range(1 << l):
        I = tuple(j + 1 for j in range(l) if mask >> j & 1)
        J = tuple(j + 1 for j in range(l) if not mask >> j & 1)
        yield InteriorSplit(I, J)


# ---------------------------------------------------------------------------
# elementary signs

def koszul_swap_sign(d1: int, d2: int) -> SignValue:
    return SignValue.from_parity(d1 * d2)


def map_tensor_sign(degF: int, degG: int, degA: int) -> SignValue:
    """Sign in (F (x) G)(a (x) b) = (-1)^{|G||a|} Fa (x) Gb."""
    return SignValue.from_parity(degG * degA)


def epsilon(a: DegreeList, c: DegreeList) -> int:
    k = len(a)
    total = 1 + sum(j * (aj + 1) for j, aj in enumerate(a, start=1))
    total += k * (sum(a) + sum(c))
    return total % 2


def epsilon_interior(n: int, c: DegreeList) -> int:
    return n * sum(c) % 2


def zeta(P: Partition3, gammaI_deg: int, gammaJ_deg: int, alpha13_deg: int) -> int:
    i, k2, k = P.i, P.k2, P.k
    return ((i - 1) * gammaJ_deg + i * k2 + k + (k2 + 1) * (alpha13_deg + gammaI_deg)) % 2


def alpha_tilde(alpha: DegreeList, P: Partition3, gammaJ_deg: int) -> tuple[int, ...]:
    """Replace the middle block by one entry of degree |gamma^J| + |alpha^(2:3)| - k2."""
    a1, a2, a3 = P.blocks(alpha)
    return a1 + (gammaJ_deg + sum(a2) - P.k2,) + a3


def split_sign(gamma: DegreeList, split: InteriorSplit) -> int:
    """sgn(sigma_{I,J}): pairs j < i with i in I, j in J contribute |g_i||g_j|."""
    total = 0
    for i in split.I:
        for j in split.J:
            if j < i:
                total += gamma[i - 1] * gamma[j - 1]
    return total % 2


def iota_sign(alpha: DegreeList, gamma: DegreeList, P: Partition3, split: InteriorSplit) -> int:
    a1, _, _ = P.blocks(alpha)
    gI, gJ = split.pick(gamma)
    return ((sum(a1) + P.i - 1) * (1 + sum(gJ)) + sum(gI) + split_sign(gamma, split)) % 2


def iota_sign_interior(gamma: DegreeList, split: InteriorSplit) -> int:
    gI, _ = split.pick(gamma)
    return (sum(gI) + split_sign(gamma, split)) % 2


def shuffle_sign(gamma: DegreeList, sigma: Sequence[int]) -> int:
    """Parity of the sum of |g_i||g_j| over inversions of sigma (0-based images)."""
    if len(sigma) != len(gamma):
        raise ValueError("permutation and degree list differ in length")
    total = 0
    for a in range(len(sigma)):
        for b in range(a + 1, len(sigma)):
            if sigma[a] > sigma[b]:
                total += gamma[a] * gamma[b]
    return total % 2


def permute(gamma: Sequence, sigma: Sequence[int]) -> tuple:
    """gamma_sigma, with gamma_sigma[sigma[a]] = gamma[a]."""
    out = [None] * len(gamma)
    for a, s in enumerate(sigma):
        out[s] = gamma[a]
    return tuple(out)


def _rho_exp(variant: str, delta: int, mu: int, eps: int) -> int:
    """rho as an exponent of sqrt(-1), given the epsilon parity."""
    dm = delta * mu
    if variant == "c":
        return 2 * ((eps + binom2(dm)) % 2)
    if variant == "i":
        return (2 * eps + dm % 2) % 4
    raise ValueError(f"unknown rho variant {variant!r}")


def _rho_from_eps(variant: str, delta: int, mu: int, eps: int) -> SignValue:
    return SignValue(_rho_exp(variant, delta, mu, eps))


def rho(variant: str, delta: int, mu: int, a: DegreeList, c: DegreeList,
        *, field_has_i: bool = True) -> SignValue:
    if variant == "i" and not field_has_i:
        raise UnsupportedField("the imaginary rho variant needs sqrt(-1) in the scalar field")
    return _rho_from_eps(variant, delta, mu, epsilon(a, c))


def rho_interior(variant: str, delta: int, mu: int, n: int, c: DegreeList,
                 *, field_has_i: bool = True) -> SignValue:
    """rho(beta; gamma) for the k = -1 operators, where epsilon(gamma) = n|gamma|."""
    if variant == "i" and not field_has_i:
        raise UnsupportedField("the imaginary rho variant needs sqrt(-1) in the scalar field")
    return _rho_from_eps(variant, delta, mu, epsilon_interior(n, c))


def intro_m_sign(k: int, alpha: DegreeList) -> SignValue:
    if len(alpha) != k:
        raise ValueError("alpha must have length k")
    return SignValue.from_parity(1 + sum((k - j) * (aj + 1) for j, aj in enumerate(alpha, start=1)))


def binom2(a: int) -> int:
    return a * (a - 1) // 2


# ---------------------------------------------------------------------------
# exhaustive lemma verification

MUTATIONS = ("zeta", "epsilon", "alpha_tilde", "binomial", "rho", "rho_km1")


def verify_sign_lemmas(max_k: int = 5, max_l: int = 3, mutate: str | None = None,
                       max_witnesses: int = 20) -> Report:
    """Check the epsilon, rho, k=-1 rho and binomial identities exhaustively.

    ``mutate`` corrupts one formula on purpose so the suite can prove it is
    able to fail.
    """
    if max_k < 0 or max_l < 0:
        raise ValueError("bounds must be non-negative")
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}; choose from {MUTATIONS}")

    eps = epsilon
    if mutate == "epsilon":
        eps = lambda a, c: (epsilon(a, c) + 1) % 2  # noqa: E731
    zet = zeta
    if mutate == "zeta":
        zet = lambda *args: (zeta(*args) + 1) % 2  # noqa: E731
    atil = alpha_tilde
    if mutate == "alpha_tilde":
        atil = lambda alpha, P, gj: alpha_tilde(alpha, P, gj + 1)  # noqa: E731
    rho_eps = _rho_exp
    if mutate == "rho":
        # drop the Maslov-dependent factor from both variants
        def rho_eps(variant, delta, mu, e):
            return 2 * (e % 2)
    km1_factor = (lambda n, g: n * g % 2) if mutate != "rho_km1" else (lambda n, g: 0)

    report = Report("sign-lemmas", params={"max_k": max_k, "max_l": max_l, "mutate": mutate})
    start = time.perf_counter()
    mus = [(m1, m2) for m1 in range(4) for m2 in range(4)]

    # rho depends on its list arguments only through epsilon, so the 64
    # (variant, delta, mu1, mu2) cases are evaluated once per epsilon pattern
    rho_cache: dict[tuple[int, int, int, int], list] = {}
    eps_check = report.check("epsilon-lemma")
    rho_check = report.check("rho-lemma")
    for k in range(max_k + 1):
        parts = list(partitions3(k))
        for alpha in itertools.product((0, 1), repeat=k):
            for l in range(max_l + 1):
                splits = list(interior_splits(l))
                for gamma in itertools.product((0, 1), repeat=l):
                    e_full = eps(alpha, gamma)
                    for P in parts:
                        a1, a2, _ = P.blocks(alpha)
                        for sp in splits:
                            gI, gJ = sp.pick(gamma)
                            dJ, dI = sum(gJ), sum(gI)
                            at = atil(alpha, P, dJ)
                            e_inner = eps(a2, gJ)
                            e_outer = eps(at, gI)
                            z = zet(P, dI, dJ, sum(a1))
                            eps_check.count += 1
                            if (e_inner + e_outer - e_full - z) % 2:
                                eps_check.fail({"alpha": alpha, "gamma": gamma, "P": (P.i, P.k2),
                                                "I": sp.I}, max_witnesses)
                            key = (e_outer, e_inner, e_full, z)
                            if key not in rho_cache:
                                rho_cache[key] = [
                                    (variant, delta, m1, m2)
                                    for variant in ("c", "i") for delta in (0, 1) for m1, m2 in mus
                                    if (rho_eps(variant, delta, m1, e_outer) + rho_eps(variant, delta, m2, e_inner)
                                        - 2 * (delta * m1 * m2 + z) - rho_eps(variant, delta, m1 + m2, e_full)) % 4
                                ]
                            rho_check.count += 4 * len(mus)
                            for variant, delta, m1, m2 in rho_cache[key]:
                                rho_check.fail({"alpha": alpha, "gamma": gamma, "P": (P.i, P.k2), "I": sp.I,
                                                "variant": variant, "delta": delta, "mu": (m1, m2)}, max_witnesses)

    km1 = report.check("rho-lemma-k=-1")
    for l in range(max_l + 1):
        splits = list(interior_splits(l))
        for gamma in itertools.product((0, 1), repeat=l):
            for n in (0, 1):
                for sp in splits:
                    gI, gJ = sp.pick(gamma)
                    for variant in ("c", "i"):
                        for delta in (0, 1):
                            for m1, m2 in mus:
                                # the identity is claimed only when mu(beta) is odd or delta = 0
                                if delta and (m1 + m2) % 2 == 0:
                                    continue
                                lhs = rho_eps(variant, delta, m1 + m2, km1_factor(n, sum(gamma)))
                                rhs = 2 * n * sum(gamma) + rho_eps(variant, delta, m1, eps((), gI)) \
                                    + rho_eps(variant, delta, m2, eps((), gJ))
                                km1.count += 1
                                if (lhs - rhs) % 4:
                                    km1.fail({"gamma": gamma, "n": n, "I": sp.I, "variant": variant,
                                              "delta": delta, "mu": (m1, m2)}, max_witnesses)

    bino = report.check("binomial-identity")
    for a in range(9):
        for b in range(9):
            lhs = binom2(a + b)
            rhs = binom2(a) + binom2(b) + (a * b if mutate != "binomial" else 0)
            bino.count += 1
            if lhs != rhs:
                bino.fail({"a": a, "b": b, "lhs": lhs, "rhs": rhs}, max_witnesses)
            # mod-2 form used inside the rho lemmas
            if (lhs - rhs) % 2:
                bino.fail({"a": a, "b": b, "mod2": True}, max_witnesses)

    report.elapsed = time.perf_counter() - start
    return report
