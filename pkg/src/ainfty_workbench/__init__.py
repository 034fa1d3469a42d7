"""Exact, finite-dimensional checks for curved cyclic unital A-infinity structures.

The package models Novikov-type coefficient rings, twisted Poincare data for
small Lagrangian examples, structure constants of q-operators and of the
A-infinity operations built from them, and verifies the algebraic identities
they satisfy with exact rational arithmetic.
"""

from .ainfty import (AInftyStructure, PseudoisotopyData, assemble_m_from_q, build_energy_zero, build_gamma_tilde,
                     build_gauge_family, check_def11, check_fundamental_class, check_pseudoisotopy, check_relations,
                     constant_family, eval_m)
from .coefficients import (Cochain, LagrangianModel, RLElement, TwistedPoincareDatum, builtin_models, compute_efield,
                           int_odd, monodromy_act, o_split, pairing, rl_mul)
from .fiber_forms import (FamilyElement, family_d, pushforward_interval, restrict, verify_stokes_interval)
from .files import FileError, dump_q, dump_structure, load, load_document, save
from .novikov import (Cutoff, DegreeGroup, Nov, Ring, TVariables, enumerate_degrees, ideal_reduce, nov_add, nov_mul,
                      valuation, verify_valuation_laws)
from .orientors import (GradedLocalSystem, MapSymbol, Orientor, compose_orientors, extend, pullback_orientor,
                        verify_orientor_laws)
from .qstructures import (QStructure, build_divisor_extension, check_divisor_axiom, check_properties,
                          check_q_relations, check_q_relations_km1, fit_qm1, perturb_q, random_admissible_q,
                          standard_ambient, standard_ring)
from .report import Report
from .signs import (InteriorSplit, Partition3, SignValue, epsilon, intro_m_sign, iota_sign, koszul_swap_sign,
                    map_tensor_sign, rho, shuffle_sign, verify_sign_lemmas, zeta)

__version__ = "0.1.0"

__all__ = [
    # signs
    "SignValue", "Partition3", "InteriorSplit", "koszul_swap_sign", "map_tensor_sign", "epsilon", "zeta",
    "iota_sign", "shuffle_sign", "rho", "intro_m_sign", "verify_sign_lemmas",
    # coefficient rings
    "DegreeGroup", "TVariables", "Cutoff", "Ring", "Nov", "nov_add", "nov_mul", "valuation", "ideal_reduce",
    "enumerate_degrees", "verify_valuation_laws",
    # local coefficient systems
    "RLElement", "LagrangianModel", "TwistedPoincareDatum", "Cochain", "rl_mul", "monodromy_act",
    "compute_efield", "o_split", "int_odd", "pairing", "builtin_models",
    # orientors
    "GradedLocalSystem", "MapSymbol", "Orientor", "compose_orientors", "extend", "pullback_orientor",
    "verify_orientor_laws",
    # interval families
    "FamilyElement", "restrict", "family_d", "pushforward_interval", "verify_stokes_interval",
    # A-infinity structures
    "AInftyStructure", "PseudoisotopyData", "eval_m", "check_relations", "check_def11", "build_energy_zero",
    "assemble_m_from_q", "check_fundamental_class", "build_gamma_tilde", "constant_family", "build_gauge_family",
    "check_pseudoisotopy",
    # q-structures
    "QStructure", "standard_ring", "standard_ambient", "check_q_relations", "check_q_relations_km1",
    "check_properties", "check_divisor_axiom", "build_divisor_extension", "random_admissible_q", "perturb_q",
    "fit_qm1",
    # files and reports
    "Report", "FileError", "load", "load_document", "save", "dump_structure", "dump_q",
]
