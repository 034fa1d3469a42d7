"""
Pseudoisotopies from cohomologous bulk classes
==============================================

g1 and g2 = g1 + dh are cohomologous.  The family built from
gamma + s (gamma' - gamma) + dt * eta, with d(eta) = gamma' - gamma, connects the two
assembled structures.
"""

from ainfty_workbench import (Cochain, Nov, PseudoisotopyData, assemble_m_from_q, build_gamma_tilde,
                              check_pseudoisotopy, standard_ring)
from ainfty_workbench.fixtures import homotopy_example_q

R = standard_ring(3, 3)
Q = homotopy_example_q(R)
amb = Q.ambient


def insert(**coeffs):
    out = Cochain.zero(amb, R)
    for name, i in coeffs.items():
        out = out + Cochain.from_scalar(amb, amb.index(name), Nov.t(R, i))
    return out


gamma, gamma_prime, eta = insert(**{"1X": 0, "g1": 1}), insert(**{"1X": 0, "g2": 1}), insert(h=1)
S0, S1 = assemble_m_from_q(Q, gamma), assemble_m_from_q(Q, gamma_prime)
print("endpoints differ:", S0.m != S1.m)

# %%
family = assemble_m_from_q(Q, build_gamma_tilde(gamma, gamma_prime, eta))
P = PseudoisotopyData(family, "gamma-tilde family")
print(check_pseudoisotopy(P, S0, S1, max_k=3, trials=10).to_human())

# %%
# Swapping the endpoints breaks the restriction equations.
rep = check_pseudoisotopy(P, S1, S0, max_k=3, trials=5)
print("swapped:", "PASS" if rep.ok else f"FAIL ({rep.violations} violations)")
