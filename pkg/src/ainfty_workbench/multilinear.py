"""Multilinear extension of sparse basis tables.

Tables are keyed by ``(interior basis tuple, boundary basis tuple)``.  Scalars
are pulled out of the arguments one slot at a time with the graded rule

    interior slot i:  (-1)^{|a| * sum_{j<i} |gamma_j|}
    boundary slot i:  (-1)^{|a| * (i + sum_{j<i} |alpha_j| + |gamma|)}

and the extracted scalars multiply on the left in slot order.  With no
interior inputs this is exactly the A-infinity multilinearity rule.
"""

from __future__ import annotations

import itertools
from typing import Callable, Mapping, Sequence

from .coefficients import Cochain
from .novikov import Nov

Term = tuple[int, Nov, int]   # (basis index, homogeneous scalar, scalar degree)


def terms_of(x: Cochain) -> list[Term]:
    out = []
    for b, a in x.components().items():
        for deg, part in a.homogeneous_parts().items():
            out.append((b, part, deg))
    return out


def _is_one(a: Nov) -> bool:
    return len(a.terms) == 1 and a.terms.get(a.ring.one_mono()) == 1


def scalar_d_term(x: Cochain) -> Cochain:
    """da * b summed over the terms of x: the extra summand of the k = 1 rule."""
    out = Cochain.zero(x.space, x.ring)
    for b, a in x.components().items():
        da = a.d()
        if da:
            out = out + Cochain.from_scalar(x.space, b, da)
    return out


def apply_table(table: Mapping[tuple, object], gammas: Sequence[Cochain], alphas: Sequence[Cochain],
                gdeg: Callable[[int], int], adeg: Callable[[int], int], zero):
    """Evaluate a sparse table on arbitrary elements.

    Values are Cochains (boundary outputs) or Nov scalars (k = -1 tables);
    ``zero`` fixes the output type.
    """
    out = zero
    if not table:
        return out
    gterms = [terms_of(g) for g in gammas]
    aterms = [terms_of(a) for a in alphas]
    for gsel in itertools.product(*gterms):
        gkey = tuple(t[0] for t in gsel)
        par = 0
        acc = 0
        for b, _a, da in gsel:
            par += da * acc
            acc += gdeg(b)
        gtot = acc
        for asel in itertools.product(*aterms):
            akey = tuple(t[0] for t in asel)
            val = table.get((gkey, akey))
            if val is None:
                continue
            p = par
            acc2 = 0
            for i, (b, _a, da) in enumerate(asel, 1):
                p += da * (i + acc2 + gtot)
                acc2 += adeg(b)
            coeff = None
            for _b, a, _d in itertools.chain(gsel, asel):
                if _is_one(a):
                    continue
                coeff = a if coeff is None else coeff * a
            if isinstance(val, Cochain):
                piece = val if coeff is None else val.lmul(coeff)
            else:
                piece = val if coeff is None else coeff * val
            out = out + (piece.scale(-1) if p % 2 else piece)
    return out
