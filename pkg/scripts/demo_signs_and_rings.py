"""
Signs and Novikov coefficients
==============================

Koszul signs, the Novikov-type coefficient ring, and its valuation.
"""

# %%
# Signs are elements of the fourth roots of unity; most are just +1 or -1.
from ainfty_workbench import koszul_swap_sign, rho, verify_sign_lemmas

print("swap two odd elements:", koszul_swap_sign(1, 1))
print("rho, complex variant, mu = 3:", rho("i", 1, 3, [], []))

# %%
# The exhaustive lemma suite enumerates every parity assignment.
rep = verify_sign_lemmas(4, 2)
print(rep.to_human())

# %%
# A ring with one energy generator of Maslov index 1, cut off at energy 3 and
# t-order 3.  t0 has degree 2, t1 degree 0.
from ainfty_workbench import Nov, standard_ring, valuation

R = standard_ring(3, 3)
a = Nov.T(R, (1,)) + Nov.t(R, 1)
b = Nov.T(R, (2,)).scale(3)
print("a =", a)
print("a * b =", a * b)
print("valuation(a), valuation(b), valuation(a*b):", valuation(a), valuation(b), valuation(a * b))

# %%
# Terms above the energy cutoff are dropped as soon as they are produced.
print("T^2 * T^2 =", Nov.T(R, (2,)) * Nov.T(R, (2,)))
