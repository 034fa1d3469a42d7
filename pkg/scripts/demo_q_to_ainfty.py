"""
From q-operators to A-infinity operations
=========================================

Random admissible q-data, the assembled operations at a bulk class gamma, and
the fundamental class and divisor identities.
"""

from ainfty_workbench import (Cochain, Nov, assemble_m_from_q, builtin_models, check_divisor_axiom,
                              check_fundamental_class, check_q_relations, check_relations, perturb_q,
                              random_admissible_q, standard_ring)

klein = builtin_models()["klein"]
R = standard_ring(5, 4)
Q = random_admissible_q(klein, seed=2, bounds={"max_l": 4, "density": 0.3}, ring=R)
amb = Q.ambient
print(Q.name, "with", sum(len(t) for t in Q.tables.values()), "stored entries")


def insert(**coeffs):
    """gamma = sum over names of t_i times the named ambient class."""
    out = Cochain.zero(amb, R)
    for name, i in coeffs.items():
        out = out + Cochain.from_scalar(amb, amb.index(name), Nov.t(R, i))
    return out


# %%
print(check_q_relations(Q, max_k=3, max_l=2).to_human())

# %%
# gamma = t0 1X + t1 g1: t0 inserts the fundamental class, t1 a divisor.
gamma = insert(**{"1X": 0, "g1": 1})
S = assemble_m_from_q(Q, gamma, max_k=5)
print(check_relations(S, 4).to_human())
print(check_fundamental_class(S, 0).to_human())

# %%
# Inserting t1 g1 multiplies each energy-beta part by exp(t1 * period(beta)).
print(check_divisor_axiom(Q, amb.index("g1"), insert(**{"1X": 0}), t_index=1).to_human())

# %%
# Perturbations are designed so that some relation must fail.
for kind in ("bulk", "sign", "curvature", "degree"):
    bad, info = perturb_q(Q, seed=0, kind=kind, max_k=3, max_l=2)
    print(kind, "->", info["kind"], "caught:", not check_q_relations(bad, 3, 2).ok)
