"""
Classical structures at energy zero
===================================

m1 = d and m2 = signed wedge on the three bundled data, checked against all
ten structure properties.
"""

from ainfty_workbench import build_energy_zero, builtin_models, check_def11, standard_ring

R = standard_ring(3, 3)
data = builtin_models()

# %%
# Each datum is a small Poincare model: a point, a circle, and a
# non-orientable surface with a twisted coefficient system.
for name, datum in data.items():
    print(f"{name}: n = {datum.n}, basis = {datum.names}")

# %%
for name, datum in data.items():
    S = build_energy_zero(datum, R)
    print(check_def11(S, max_k=4, trials=20).to_human(), "\n")

# %%
# Flip one product sign and the unit identity breaks.
S = build_energy_zero(data["circle"], R)
th, one = S.datum.index("th"), S.datum.unit_index
bad = S.with_entry(2, (th, one), -S.entry(2, (th, one)))
rep = check_def11(bad, max_k=3, trials=10)
print(rep.checks["(10) m_2 unit identities"])
