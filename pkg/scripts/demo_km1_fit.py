"""
Solving the k = -1 relation
===========================

On the non-orientable datum, pairings of two q_{0,1} terms leave a scalar
residual at energy 3.  The only unknowns that can absorb it are the values
of q_{-1,2}, and fit_qm1 solves for them exactly.
"""

from ainfty_workbench import check_q_relations, check_q_relations_km1, fit_qm1
from ainfty_workbench.fixtures import km1_example_q

Q = km1_example_q()
print(check_q_relations(Q, 3, 2).to_human())
print(check_q_relations_km1(Q, 2).to_human())

# %%
F = fit_qm1(Q, 2, (3,))
names = F.ambient.names
for gk, value in sorted(F.qm1[(2, (3,))].items()):
    print(f"q_-1,2({', '.join(names[g] for g in gk)}) = {value}")
print(check_q_relations_km1(F, 2).to_human())

# %%
# With an odd Maslov index on a non-orientable L, sphere classes cannot
# contribute, so no sphere data is needed here.
from ainfty_workbench.qstructures import sphere_term_applies

print("sphere term at beta = (3,):", sphere_term_applies(F, (3,)))
