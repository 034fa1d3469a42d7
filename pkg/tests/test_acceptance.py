"""The nine primary acceptance criteria, one test each, all checked exactly.

Each test prints a PASS/FAIL line (also collected in the terminal summary).
"""

import time

import pytest

from ainfty_workbench.ainfty import (PseudoisotopyData, assemble_m_from_q, build_energy_zero, build_gamma_tilde,
                                     check_def11, check_fundamental_class, check_pseudoisotopy, check_relations)
from ainfty_workbench.coefficients import builtin_models
from ainfty_workbench.fiber_forms import verify_stokes_interval
from ainfty_workbench.fixtures import _gamma, homotopy_example_q
from ainfty_workbench.novikov import verify_valuation_laws
from ainfty_workbench.orientors import LAWS, verify_orientor_laws
from ainfty_workbench.qstructures import (PERTURBATIONS, add_curvature, build_divisor_extension,
                                          check_divisor_axiom, check_q_relations, perturb_q, random_admissible_q,
                                          standard_ambient, standard_ring, QStructure)
from ainfty_workbench.signs import MUTATIONS, verify_sign_lemmas

pytestmark = pytest.mark.slow

DATA = builtin_models()


def test_sign_lemma_suite(criterion):
    start = time.perf_counter()
    rep = verify_sign_lemmas(5, 3)
    elapsed = time.perf_counter() - start
    caught = {m: verify_sign_lemmas(5, 3, mutate=m).violations for m in MUTATIONS}
    checked = sum(c.count for c in rep.checks.values())
    ok = rep.ok and elapsed < 60 and all(v >= 1 for v in caught.values())
    criterion("[1] sign lemmas, k <= 5, l <= 3", ok,
              f"{checked} cases, {rep.violations} violations, {elapsed:.1f}s; mutations caught: {caught}")


def test_orientor_laws(criterion):
    rep = verify_orientor_laws(1000, seed=0, max_dim=3)
    counts = {law: rep.check(law).count for law in LAWS}
    ok = rep.ok and all(c == 1000 for c in counts.values())
    criterion("[2] orientor laws, 1000 instances per law", ok, f"{rep.violations} violations")


def test_energy_zero_structures(criterion):
    ring = standard_ring(3, 3)
    needed = ("(6) antisymmetry", "(7) cyclicity", "(10) m_2 unit identities", "(3) relations")
    results = {}
    for name, datum in DATA.items():
        rep = check_def11(build_energy_zero(datum, ring), 6, trials=60)
        results[name] = rep.ok and all(rep.checks[n].count > 0 for n in needed)
    criterion("[3] all ten structure properties on point, circle, klein (k <= 6)", all(results.values()),
              str(results))


def test_q_implies_ainfty(criterion):
    ring = standard_ring(3, 3)
    seeds = range(100)
    relation_failures, ainfty_failures, missed = [], [], []
    for seed in seeds:
        datum = DATA["point" if seed % 2 else "klein"]
        Q = random_admissible_q(datum, seed, {"max_l": 2}, ring=ring)
        gamma = _gamma(Q.ambient, ring, **{"1X": 0, "g1": 1})
        if not check_q_relations(Q, 3, 2).ok:
            relation_failures.append(seed)
        if not check_relations(assemble_m_from_q(Q, gamma, 5), 4).ok:
            ainfty_failures.append(seed)
        bad, info = perturb_q(Q, seed, PERTURBATIONS[seed % len(PERTURBATIONS)], max_k=3, max_l=2)
        caught = not check_q_relations(bad, 3, 2).ok
        if not caught and not bad.degree_problems():
            caught = not check_relations(assemble_m_from_q(bad, gamma, 5), 4).ok
        if not caught:
            missed.append((seed, info["kind"]))
    ok = not (relation_failures or ainfty_failures or missed)
    criterion("[4] q-relations imply A-infinity relations on 100 seeds (E = 3, t-order 3)", ok,
              f"q-relation failures {relation_failures}, assembled failures {ainfty_failures}, "
              f"perturbations missed {missed}")


def _extended(name, ring):
    datum = DATA[name]
    base = add_curvature(QStructure.minimal(datum, standard_ambient(datum), ring), (1,))
    return build_divisor_extension(base, max_l=4)


def test_fundamental_class(criterion):
    ring = standard_ring(5, 4)
    cases = {f"{n} extension": _extended(n, ring) for n in DATA}
    for seed in range(4):
        name = "point" if seed % 2 else "klein"
        cases[f"random {name} {seed}"] = random_admissible_q(DATA[name], seed, {"max_l": 4, "density": 0.3},
                                                             ring=ring)
    results = {}
    for label, Q in cases.items():
        S = assemble_m_from_q(Q, _gamma(Q.ambient, ring, **{"1X": 0, "g1": 1}))
        rep = check_fundamental_class(S, 0)
        results[label] = rep.ok and rep.checks["d/dt0 m_k = -delta_{0k} unit"].count > 0
    criterion("[5] fundamental class: d/dt0 m_k = -delta_{0k} unit", all(results.values()), str(results))


def test_divisor_axiom(criterion):
    ring = standard_ring(5, 4)
    cases = {f"{n} extension": _extended(n, ring) for n in DATA}
    for seed in range(4):
        name = "point" if seed % 2 else "klein"
        cases[f"random {name} {seed}"] = random_admissible_q(DATA[name], seed, {"max_l": 4, "density": 0.3},
                                                             ring=ring)
    results = {}
    for label, Q in cases.items():
        amb = Q.ambient
        rep = check_divisor_axiom(Q, amb.index("g1"), _gamma(amb, ring, **{"1X": 0}), t_index=1)
        results[label] = rep.ok and rep.checks["m^gamma = exp(t * period) m^rest"].count > 0
    criterion("[6] divisor axiom to t-order 4", all(results.values()), str(results))


def test_stokes_and_fubini(criterion):
    rep = verify_stokes_interval(1000, seed=0, max_degree=6)
    mutated = verify_stokes_interval(1000, seed=0, max_degree=6, mutate=True)
    ok = rep.ok and rep.check("Stokes").count == 1000 and mutated.check("Stokes").violations > 0
    criterion("[7] interval Stokes and Fubini, 1000 families", ok,
              f"{rep.violations} violations; mutation caught {mutated.check('Stokes').violations} times")


def test_pseudoisotopy(criterion):
    ring = standard_ring(3, 3)
    Q = homotopy_example_q(ring)
    amb = Q.ambient
    gamma = _gamma(amb, ring, **{"1X": 0, "g1": 1})
    gamma_prime = _gamma(amb, ring, **{"1X": 0, "g2": 1})
    S0, S1 = assemble_m_from_q(Q, gamma), assemble_m_from_q(Q, gamma_prime)
    P = PseudoisotopyData(assemble_m_from_q(Q, build_gamma_tilde(gamma, gamma_prime, _gamma(amb, ring, h=1))),
                          "gamma-tilde family")
    rep = check_pseudoisotopy(P, S0, S1, 4, trials=30)
    swapped = check_pseudoisotopy(P, S1, S0, 4, trials=5)
    key = next(iter(S0.table(2)))
    mutated = check_pseudoisotopy(P, S0.with_entry(2, key, -S0.entry(2, key)), S1, 4, trials=5)
    ok = rep.ok and S0.m != S1.m and not swapped.ok and not mutated.ok
    criterion("[8] pseudoisotopy from gamma + s(gamma' - gamma) + dt eta", ok,
              f"family {rep.violations} violations; swapped endpoints {swapped.violations}, "
              f"mutated endpoint {mutated.violations}")


def test_valuation_laws(criterion):
    rep = verify_valuation_laws(1000, seed=0)
    eq = (rep.check("monomial product additive").count, rep.check("monomial sum attains minimum").count)
    ok = rep.ok and all(eq)
    criterion("[9] valuation laws, 1000 random pairs", ok,
              f"{rep.violations} violations; equality cases {eq[0]} products, {eq[1]} sums")
