"""Bundled example files and the manifest of their expected outcomes.

Everything here is deterministic, so the shipped JSON files can be
regenerated with :func:`write_fixtures` and compared byte for byte.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .ainfty import (assemble_m_from_q, build_energy_zero, build_gamma_tilde,
                     build_gauge_family, constant_family)
from .coefficients import Cochain, builtin_models
from .files import dump_q, dump_structure
from .novikov import Nov, Ring
from .qstructures import (QStructure, add_curvature, build_divisor_extension, fit_qm1, perturb_q,
                          standard_ambient, standard_ring)

MANIFEST = "manifest.json"


def data_dir() -> Path:
    return Path(str(resources.files(__package__) / "data"))


def homotopy_example_q(ring: Ring | None = None) -> QStructure:
    """Circle q-data on which the exact pair g1, g2 = g1 + dh act differently.

    On top of the curved divisor extension, q^beta_{0,1}(h) = x^-2 yx is
    non-closed, so the relation at h forces q^beta_{0,1}(g2) to pick up
    x^-2 dyx, and q^beta_{1,1}(g2; x) = -2y repairs the k = 1 relation.  The
    structures assembled at t1 g1 and t1 g2 therefore differ, which makes
    an endpoint swap of the connecting family detectable.
    """
    ring = ring or standard_ring(3, 3)
    datum = builtin_models()["circle"]
    amb = standard_ambient(datum)
    Q = build_divisor_extension(add_curvature(QStructure.minimal(datum, amb, ring), (1,)), max_l=2)
    beta = (1,)
    h, g2 = amb.index("h"), amb.index("g2")
    xm2 = Nov.monomial(ring, p=-2)
    tables = {k: dict(t) for k, t in Q.tables.items()}
    t01 = tables.setdefault((0, 1, beta), {})
    t11 = tables.setdefault((1, 1, beta), {})
    zero = Cochain.zero(datum, ring)
    t01[((h,), ())] = Cochain.basis(datum, ring, datum.index("yx")).lmul(xm2)
    t01[((g2,), ())] = t01.get(((g2,), ()), zero) + Cochain.basis(datum, ring, datum.index("dyx")).lmul(xm2)
    key = ((g2,), (datum.index("x"),))
    t11[key] = t11.get(key, zero) + Cochain.basis(datum, ring, datum.index("y"), -2)
    return Q.copy(tables=tables, name="circle q with an exact bulk pair")


def km1_example_q(ring: Ring | None = None) -> QStructure:
    """Klein q-data whose k = -1 relation fails at (l, beta) = (2, (3,)) until q_{-1} is fitted.

    q^(1)_{0,1}(h) = 2a and q^(2)_{0,1}(g1) = q^(2)_{0,1}(g2) = 3 x^-2 bx satisfy
    the k >= 0 relations, but their pairings leave a residual -6 x^-2 at
    energy 3 that only a q_{-1,2} term can absorb.
    """
    ring = ring or standard_ring(3, 3)
    datum = builtin_models()["klein"]
    amb = standard_ambient(datum)
    h, g1, g2 = amb.index("h"), amb.index("g1"), amb.index("g2")
    Q = QStructure.minimal(datum, amb, ring, name="klein q with an unfitted q_-1")
    Q = Q.with_entry((0, 1, (1,)), ((h,), ()), Cochain.basis(datum, ring, datum.index("a"), 2))
    bx = Cochain.basis(datum, ring, datum.index("bx"), 3).lmul(Nov.monomial(ring, p=-2))
    return Q.with_entry((0, 1, (2,)), ((g1,), ()), bx).with_entry((0, 1, (2,)), ((g2,), ()), bx)


def _gamma(amb, ring, **coeffs) -> Cochain:
    out = Cochain.zero(amb, ring)
    for name, t_index in coeffs.items():
        out = out + Cochain.from_scalar(amb, amb.index(name), Nov.t(ring, t_index))
    return out


def build_fixtures() -> tuple[dict[str, dict], list[dict]]:
    """All bundled documents by file name, plus the manifest of expected exit codes."""
    data = builtin_models()
    ring = standard_ring(3, 3)
    docs: dict[str, dict] = {}
    manifest: list[dict] = []

    def expect(command: str, files: list[str], status: int, note: str, **options):
        manifest.append({"command": command, "files": files, "options": options, "expect": status, "note": note})

    # energy-zero structures
    zero = {}
    for name, datum in data.items():
        S = build_energy_zero(datum, ring, native=False, name=f"energy-zero {name}")
        zero[name] = S
        docs[f"energy_zero_{name}.json"] = dump_structure(S)
        expect("check-structure", [f"energy_zero_{name}.json"], 0, "classical structure passes every property")

    circle = data["circle"]
    S = zero["circle"]
    th, one = circle.index("th"), circle.unit_index
    broken = S.with_entry(2, (th, one), -S.entry(2, (th, one)))
    broken.name = "energy-zero circle with one product sign flipped"
    docs["mutated_circle.json"] = dump_structure(broken)
    expect("check-structure", ["mutated_circle.json"], 1, "flipped product sign breaks the unit identity")

    curved = S.with_entry(0, (), S.unit)
    curved.name = "circle with curvature of valuation zero"
    docs["curvature_valuation_zero.json"] = dump_structure(curved)
    expect("check-structure", ["curvature_valuation_zero.json"], 1, "m0 = unit violates the positive-valuation axiom")

    # q-structures
    amb_c = standard_ambient(circle)
    Qmin = QStructure.minimal(circle, amb_c, ring, name="minimal q over circle")
    docs["q_minimal_circle.json"] = dump_q(Qmin, _gamma(amb_c, ring, **{"1X": 0}))
    expect("check-q", ["q_minimal_circle.json"], 0, "energy-zero q-data with the fundamental class insertion")

    klein = data["klein"]
    ring4 = standard_ring(5, 4)
    amb_k = standard_ambient(klein)
    Qcurv = add_curvature(QStructure.minimal(klein, amb_k, ring4), (1,))
    Qfund = build_divisor_extension(add_curvature(QStructure.minimal(circle, amb_c, ring4), (1,)), max_l=4,
                                    name="curved divisor extension over circle")
    docs["q_fundamental_circle.json"] = dump_q(Qfund, _gamma(amb_c, ring4, **{"1X": 0}))
    expect("check-q", ["q_fundamental_circle.json"], 0, "fundamental class identity at t-order 4")

    Qdiv = build_divisor_extension(Qcurv, max_l=4, name="divisor extension over klein")
    docs["q_divisor_klein.json"] = dump_q(Qdiv, _gamma(amb_k, ring4, **{"1X": 0, "g1": 1}))
    expect("check-q", ["q_divisor_klein.json"], 0, "divisor and fundamental class identities at t-order 4")

    Qbad, info = perturb_q(Qdiv, seed=0, kind="bulk")
    Qbad.name = f"perturbed divisor extension ({info['kind']})"
    docs["q_perturbed_klein.json"] = dump_q(Qbad, _gamma(amb_k, ring4, **{"1X": 0, "g1": 1}))
    expect("check-q", ["q_perturbed_klein.json"], 1, "one changed bulk entry breaks the q-relations")

    Qu = km1_example_q(ring)
    Qf = fit_qm1(Qu, 2, (3,))
    Qf.name = "klein q with q_-1 fitted"
    # g1 carries more than its period here, so only the fundamental class is inserted
    no_divisor = "degree,linearity,unit,fundamental_class,energy_zero,symmetry,top_degree,cyclic,antisymmetry," \
                 "admissibility"
    docs["q_km1_unfitted_klein.json"] = dump_q(Qu, _gamma(Qu.ambient, ring, **{"1X": 0}))
    docs["q_km1_fitted_klein.json"] = dump_q(Qf, _gamma(Qf.ambient, ring, **{"1X": 0}))
    expect("check-q", ["q_km1_unfitted_klein.json"], 1, "pairing terms leave a k=-1 residual at energy 3",
           properties=no_divisor)
    expect("check-q", ["q_km1_fitted_klein.json"], 0, "q_-1,2 solved from the k=-1 relation", properties=no_divisor)

    # pseudoisotopies
    P = constant_family(zero["circle"], name="constant family over circle")
    docs["isotopy_constant_circle.json"] = dump_structure(P.structure)
    expect("check-isotopy", ["energy_zero_circle.json", "energy_zero_circle.json", "isotopy_constant_circle.json"],
           0, "constant family restricts to the same structure at both ends")

    Qh = homotopy_example_q(ring)
    amb_h = Qh.ambient
    gamma = _gamma(amb_h, ring, **{"1X": 0, "g1": 1})
    gamma_prime = _gamma(amb_h, ring, **{"1X": 0, "g2": 1})
    eta = _gamma(amb_h, ring, h=1)
    S0 = assemble_m_from_q(Qh, gamma, name="circle assembled at gamma")
    S1 = assemble_m_from_q(Qh, gamma_prime, name="circle assembled at gamma'")
    F = assemble_m_from_q(Qh, build_gamma_tilde(gamma, gamma_prime, eta), name="gamma-tilde family over circle")
    F.family = True
    docs["endpoint_gamma_circle.json"] = dump_structure(S0)
    docs["endpoint_gamma_prime_circle.json"] = dump_structure(S1)
    docs["isotopy_gamma_tilde_circle.json"] = dump_structure(F)
    docs["q_exact_pair_circle.json"] = dump_q(Qh, gamma)
    files = ["endpoint_gamma_circle.json", "endpoint_gamma_prime_circle.json", "isotopy_gamma_tilde_circle.json"]
    expect("check-isotopy", files, 0, "family built from gamma + s(gamma' - gamma) + dt eta")
    expect("check-isotopy", [files[1], files[0], files[2]], 1, "endpoints swapped")
    expect("check-q", ["q_exact_pair_circle.json"], 0, "relations hold though g2 is no longer a pure divisor",
           properties="degree,linearity,fundamental_class,energy_zero,symmetry,cyclic,antisymmetry,admissibility")
    expect("check-structure", ["endpoint_gamma_prime_circle.json"], 0, "assembled endpoint passes every property")

    # y pairs to zero with everything, so id + s T X with X(thx) = y is an isometry
    X = {circle.index("thx"): Cochain.basis(circle, ring, circle.index("y"))}
    G, end = build_gauge_family(zero["circle"], X, (1,))
    G.structure.name = G.name = "gauge family over circle"
    end.name = "gauge transform of energy-zero circle"
    docs["isotopy_gauge_circle.json"] = dump_structure(G.structure)
    docs["endpoint_gauge_circle.json"] = dump_structure(end)
    expect("check-isotopy", ["energy_zero_circle.json", "endpoint_gauge_circle.json", "isotopy_gauge_circle.json"],
           0, "conjugation by the isometry id + s T^beta X")
    return docs, manifest


def write_fixtures(directory: str | Path | None = None) -> list[Path]:
    directory = Path(directory) if directory is not None else data_dir()
    directory.mkdir(parents=True, exist_ok=True)
    docs, manifest = build_fixtures()
    out = []
    for name, doc in sorted(docs.items()):
        path = directory / name
        path.write_text(json.dumps(doc, indent=1) + "\n")
        out.append(path)
    path = directory / MANIFEST
    path.write_text(json.dumps(manifest, indent=1) + "\n")
    out.append(path)
    return out


def load_manifest(directory: str | Path | None = None) -> list[dict]:
    directory = Path(directory) if directory is not None else data_dir()
    return json.loads((directory / MANIFEST).read_text())
