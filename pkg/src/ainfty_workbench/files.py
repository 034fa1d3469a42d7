"""JSON structure files: schema, loading and serialization.

Every rational is written as an exact string ``"p/q"`` (or an integer);
floats are rejected by the schema.  Basis elements are referenced by name,
and every name is resolved against the datum or ambient block, so a bad
reference fails with its location in the file.

Two kinds of file share one layout, and both embed the ``ring`` and
``datum`` blocks so that files are self-contained:

* ``structure``: an A-infinity structure given by m-tables
  (``"family": true`` turns it into a pseudoisotopy over the interval);
* ``q``: a q-structure with bulk inputs from an ambient model, plus the
  bulk class ``gamma`` used for assembly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema

from .ainfty import AInftyStructure, PseudoisotopyData
from .coefficients import Basis, Cochain, LagrangianModel, TwistedPoincareDatum, builtin_models
from .novikov import ConfigurationError, Cutoff, DegreeGroup, Nov, Ring, TVariables
from .qstructures import AmbientModel, QStructure

SCHEMA_VERSION = "ainfty-workbench/1"

_RATIONAL = {"oneOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+(/[1-9]\d*)?$"}]}
_INTS = {"type": "array", "items": {"type": "integer"}}
_NAME = {"type": "string", "minLength": 1}

_MONO_PROPS = {
    "coeff": _RATIONAL,
    "t": _INTS,
    "x": {"type": "integer", "multipleOf": 2},
    "beta": _INTS,
    "dt": {"enum": [0, 1]},
    "s": {"type": "integer", "minimum": 0},
}
_SCALAR = {"type": "array", "items": {"type": "object", "required": ["coeff"], "properties": _MONO_PROPS,
                                      "additionalProperties": False}}
_ELEMENT = {"type": "array", "items": {"type": "object", "required": ["basis", "coeff"],
                                       "properties": {"basis": _NAME, **_MONO_PROPS},
                                       "additionalProperties": False}}
_LINEAR = {"type": "object", "additionalProperties": {"type": "object", "additionalProperties": _RATIONAL}}

_RING = {
    "type": "object",
    "required": ["group", "t_degrees", "cutoff"],
    "additionalProperties": False,
    "properties": {
        "group": {
            "type": "object", "required": ["rank"], "additionalProperties": False,
            "properties": {"rank": {"type": "integer", "minimum": 0}, "torsion": {"type": "integer", "minimum": 0},
                           "mu": _INTS, "omega": {"type": "array", "items": _RATIONAL}, "gap": _RATIONAL,
                           "names": {"type": "array", "items": {"type": "string"}}},
        },
        "t_degrees": _INTS,
        "cutoff": {"type": "object", "required": ["energy", "t_order"], "additionalProperties": False,
                   "properties": {"energy": _RATIONAL, "t_order": {"type": "integer", "minimum": 0}}},
    },
}

_BASIS = {"type": "array", "minItems": 1,
          "items": {"type": "object", "required": ["name", "form_degree"], "additionalProperties": False,
                    "properties": {"name": _NAME, "form_degree": {"type": "integer"},
                                   "e": {"enum": [0, 1]}}}}

_DATUM = {
    "oneOf": [
        {"type": "object", "required": ["builtin"], "additionalProperties": False,
         "properties": {"builtin": {"enum": sorted(builtin_models())}}},
        {"type": "object", "required": ["name", "n", "basis"], "additionalProperties": False,
         "properties": {
             "name": {"type": "string"}, "n": {"type": "integer", "minimum": 0},
             "loops": {"type": "array", "items": {"type": "string"}}, "w1": _INTS,
             "basis": _BASIS, "d": _LINEAR,
             "wedge": {"type": "array", "items": {
                 "type": "object", "required": ["left", "right", "value"], "additionalProperties": False,
                 "properties": {"left": _NAME, "right": _NAME, "value": {"type": "array", "items": {
                     "type": "object", "required": ["basis", "coeff"], "additionalProperties": False,
                     "properties": {"basis": _NAME, "x": {"type": "integer", "multipleOf": 2},
                                    "coeff": _RATIONAL}}}}}},
             "trace": {"type": "object", "additionalProperties": _RATIONAL},
             "form_trace": {"type": "object", "additionalProperties": _RATIONAL},
             "unit": _NAME,
         }},
    ]
}

_AMBIENT = {
    "type": "object", "required": ["name", "basis"], "additionalProperties": False,
    "properties": {
        "name": {"type": "string"}, "basis": _BASIS, "d": _LINEAR, "restriction": _LINEAR,
        "periods": {"type": "object", "additionalProperties": {"type": "array", "items": _RATIONAL}},
        "unit": {"oneOf": [_NAME, {"type": "null"}]},
    },
}

_M_ENTRY = {"type": "object", "required": ["inputs", "value"], "additionalProperties": False,
            "properties": {"inputs": {"type": "array", "items": _NAME}, "value": _ELEMENT}}
_Q_ENTRY = {"type": "object", "required": ["k", "l", "beta", "interior", "boundary", "value"],
            "additionalProperties": False,
            "properties": {"k": {"type": "integer", "minimum": 0}, "l": {"type": "integer", "minimum": 0},
                           "beta": _INTS, "interior": {"type": "array", "items": _NAME},
                           "boundary": {"type": "array", "items": _NAME}, "value": _ELEMENT}}
_CLOSED_ENTRY = {"type": "object", "required": ["l", "beta", "interior", "value"], "additionalProperties": False,
                 "properties": {"l": {"type": "integer", "minimum": 0}, "beta": _INTS,
                                "interior": {"type": "array", "items": _NAME}, "value": _SCALAR}}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "kind", "ring", "datum"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "kind": {"enum": ["structure", "q"]},
        "name": {"type": "string"},
        "ring": _RING,
        "datum": _DATUM,
        "ambient": _AMBIENT,
        "m": {"type": "object", "patternProperties": {r"^\d+$": {"type": "array", "items": _M_ENTRY}},
              "additionalProperties": False},
        "unit": _ELEMENT,
        "m_minus1": _SCALAR,
        "family": {"type": "boolean"},
        "q": {"type": "array", "items": _Q_ENTRY},
        "qm1": {"type": "array", "items": _CLOSED_ENTRY},
        "sphere": {"type": "array", "items": _CLOSED_ENTRY},
        "gamma": _ELEMENT,
        "flags": {"type": "object", "additionalProperties": False,
                  "properties": {"rho_variant": {"enum": ["c", "i"]}, "delta": {"enum": [0, 1]},
                                 "pairing": {"enum": ["odd", "full"]}}},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "structure"}}},
         "then": {"required": ["m"], "not": {"anyOf": [{"required": ["q"]}, {"required": ["qm1"]}]}}},
        {"if": {"properties": {"kind": {"const": "q"}}},
         "then": {"required": ["ambient", "q"], "not": {"required": ["m"]}}},
    ],
    "additionalProperties": False,
}


class FileError(ValueError):
    """A structure file that fails validation; ``location`` is a JSON path like ``q/3/value/0/basis``."""

    def __init__(self, message: str, location: str = "", source: str = ""):
        self.message = message
        self.location = location
        self.source = source
        where = f"{source}: " if source else ""
        at = f" at {location}" if location else ""
        super().__init__(f"{where}{message}{at}")


@dataclass
class LoadedFile:
    kind: str
    name: str
    datum: TwistedPoincareDatum
    ring: Ring
    structure: AInftyStructure | None = None
    q: QStructure | None = None
    gamma: Cochain | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def is_family(self) -> bool:
        return self.structure is not None and self.structure.family

    def isotopy(self) -> PseudoisotopyData:
        if not self.is_family:
            raise FileError("not a family structure (set \"family\": true)", "family")
        return PseudoisotopyData(self.structure, self.name)


# ---------------------------------------------------------------------------
# decoding

def _rational(v) -> Fraction:
    return Fraction(v)


def _path(*parts) -> str:
    return "/".join(str(p) for p in parts)


def _index(space, name: str, where: str) -> int:
    try:
        return space.index(name)
    except ValueError:
        raise FileError(f"unknown basis element {name!r} (known: {space.names})", where) from None


def _valid_beta(ring: Ring, beta: tuple) -> bool:
    g = ring.group
    return (len(beta) == g.rank + g.torsion and g.is_effective(beta)
            and all(v in (0, 1) for v in beta[g.rank:]))


def _mono(ring: Ring, term: dict, where: str):
    t = tuple(term.get("t", (0,) * ring.tvars.count))
    if len(t) != ring.tvars.count:
        raise FileError(f"t needs {ring.tvars.count} exponents", _path(where, "t"))
    if any(v < 0 for v in t):
        raise FileError("t exponents must be non-negative", _path(where, "t"))
    width = ring.group.rank + ring.group.torsion
    beta = tuple(term.get("beta", (0,) * width))
    if len(beta) != width:
        raise FileError(f"beta needs {width} entries", _path(where, "beta"))
    if not _valid_beta(ring, beta):
        raise FileError(f"beta {beta} is not effective", _path(where, "beta"))
    return (term.get("dt", 0), t, term.get("x", 0), beta, term.get("s", 0))


def _scalar(ring: Ring, terms: list, where: str) -> Nov:
    out: dict = {}
    for i, term in enumerate(terms):
        m = _mono(ring, term, _path(where, i))
        out[m] = out.get(m, 0) + _rational(term["coeff"])
    return Nov(ring, out)


def _element(space, ring: Ring, terms: list, where: str) -> Cochain:
    out: dict = {}
    for i, term in enumerate(terms):
        b = _index(space, term["basis"], _path(where, i, "basis"))
        key = (b, _mono(ring, term, _path(where, i)))
        out[key] = out.get(key, 0) + _rational(term["coeff"])
    return Cochain(space, ring, out)


def _ring(block: dict) -> Ring:
    g = block["group"]
    rank = g["rank"]
    try:
        group = DegreeGroup(rank, g.get("torsion", 0), tuple(g.get("mu", (0,) * rank)),
                            tuple(_rational(w) for w in g.get("omega", (1,) * rank)),
                            _rational(g.get("gap", 1)), tuple(g.get("names", ())))
        group.validate()
        cut = block["cutoff"]
        return Ring(group, TVariables(tuple(block["t_degrees"])), Cutoff(_rational(cut["energy"]), cut["t_order"]))
    except ConfigurationError as exc:
        raise FileError(str(exc), "ring/group") from None


def _basis(block: list) -> list[Basis]:
    names = [b["name"] for b in block]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise FileError(f"duplicate basis names {sorted(dup)}", "basis")
    return [Basis(b["name"], b["form_degree"], b.get("e", 0)) for b in block]


def _linear(space, block: dict, target, where: str) -> dict[int, dict[int, Fraction]]:
    out = {}
    for src, img in block.items():
        b = _index(space, src, _path(where, src))
        row = {_index(target, dst, _path(where, src, dst)): _rational(c) for dst, c in img.items()}
        row = {c: v for c, v in row.items() if v}
        if row:
            out[b] = row
    return out


class _Names:
    """Stand-in space used to resolve names before the real space exists."""

    def __init__(self, names):
        self.names = list(names)

    def index(self, name):
        return self.names.index(name)


def _datum(block: dict) -> TwistedPoincareDatum:
    if "builtin" in block:
        return builtin_models()[block["builtin"]]
    try:
        model = LagrangianModel(block["n"], tuple(block.get("loops", ())), tuple(block.get("w1", ())))
    except ValueError as exc:
        raise FileError(str(exc), "datum/w1") from None
    basis = _basis(block["basis"])
    names = _Names(b.name for b in basis)
    dtable = _linear(names, block.get("d", {}), names, "datum/d")
    wedge: dict = {}
    for i, entry in enumerate(block.get("wedge", [])):
        where = _path("datum/wedge", i)
        key = (_index(names, entry["left"], _path(where, "left")), _index(names, entry["right"], _path(where, "right")))
        if key in wedge:
            raise FileError("repeated wedge entry", where)
        val = {}
        for j, term in enumerate(entry["value"]):
            b = _index(names, term["basis"], _path(where, "value", j, "basis"))
            val[(b, term.get("x", 0))] = val.get((b, term.get("x", 0)), 0) + _rational(term["coeff"])
        wedge[key] = {k: v for k, v in val.items() if v}
    trace = {_index(names, n, _path("datum/trace", n)): _rational(v) for n, v in block.get("trace", {}).items()}
    ftrace = {_index(names, n, _path("datum/form_trace", n)): _rational(v)
              for n, v in block.get("form_trace", {}).items()}
    unit = _index(names, block.get("unit", basis[0].name), "datum/unit")
    return TwistedPoincareDatum(block["name"], model, basis, dtable, wedge, trace, ftrace, unit)


def _ambient(block: dict, datum: TwistedPoincareDatum) -> AmbientModel:
    basis = _basis(block["basis"])
    names = _Names(b.name for b in basis)
    dtable = _linear(names, block.get("d", {}), names, "ambient/d")
    restriction = _linear(names, block.get("restriction", {}), datum, "ambient/restriction")
    periods = {_index(names, n, _path("ambient/periods", n)): tuple(_rational(v) for v in vals)
               for n, vals in block.get("periods", {}).items()}
    unit = block.get("unit", basis[0].name)
    unit_index = None if unit is None else _index(names, unit, "ambient/unit")
    return AmbientModel(block["name"], basis, dtable, restriction, periods, unit_index)


def validate_document(doc: Any, source: str = "") -> None:
    """Schema validation only; raises FileError pointing at the most specific failure."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = list(validator.iter_errors(doc))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise FileError(err.message, _path(*err.absolute_path), source)


def load_document(doc: dict, source: str = "") -> LoadedFile:
    validate_document(doc, source)
    try:
        return _load(doc)
    except FileError as exc:
        raise FileError(exc.message, exc.location, source) from None


def _load(doc: dict) -> LoadedFile:
    ring = _ring(doc["ring"])
    datum = _datum(doc["datum"])
    flags = doc.get("flags", {})
    name = doc.get("name", "")
    out = LoadedFile(doc["kind"], name, datum, ring, raw=doc)
    if doc["kind"] == "structure":
        m = {}
        for k_str, entries in doc["m"].items():
            k = int(k_str)
            table = {}
            for i, entry in enumerate(entries):
                where = _path("m", k_str, i)
                if len(entry["inputs"]) != k:
                    raise FileError(f"m_{k} entry needs {k} inputs", _path(where, "inputs"))
                key = tuple(_index(datum, n, _path(where, "inputs", j)) for j, n in enumerate(entry["inputs"]))
                if key in table:
                    raise FileError("repeated entry", where)
                table[key] = _element(datum, ring, entry["value"], _path(where, "value"))
            m[k] = table
        unit = _element(datum, ring, doc["unit"], "unit") if "unit" in doc else None
        mm1 = _scalar(ring, doc["m_minus1"], "m_minus1") if "m_minus1" in doc else None
        out.structure = AInftyStructure(datum, ring, m, unit=unit, m_minus1=mm1,
                                        pairing_variant=flags.get("pairing", "odd"),
                                        family=doc.get("family", False), name=name)
        return out
    amb = _ambient(doc["ambient"], datum)
    tables: dict = {}
    for i, entry in enumerate(doc["q"]):
        where = _path("q", i)
        if len(entry["interior"]) != entry["l"]:
            raise FileError(f"l = {entry['l']} but {len(entry['interior'])} interior inputs", _path(where, "interior"))
        if len(entry["boundary"]) != entry["k"]:
            raise FileError(f"k = {entry['k']} but {len(entry['boundary'])} boundary inputs", _path(where, "boundary"))
        beta = tuple(entry["beta"])
        if not _valid_beta(ring, beta):
            raise FileError(f"invalid degree {beta}", _path(where, "beta"))
        g = tuple(_index(amb, n, _path(where, "interior", j)) for j, n in enumerate(entry["interior"]))
        a = tuple(_index(datum, n, _path(where, "boundary", j)) for j, n in enumerate(entry["boundary"]))
        table = tables.setdefault((entry["k"], entry["l"], beta), {})
        if (g, a) in table:
            raise FileError("repeated entry", where)
        table[(g, a)] = _element(datum, ring, entry["value"], _path(where, "value"))
    closed = {}
    for block in ("qm1", "sphere"):
        closed[block] = {}
        for i, entry in enumerate(doc.get(block, [])):
            where = _path(block, i)
            if len(entry["interior"]) != entry["l"]:
                raise FileError(f"l = {entry['l']} but {len(entry['interior'])} interior inputs",
                                _path(where, "interior"))
            g = tuple(_index(amb, n, _path(where, "interior", j)) for j, n in enumerate(entry["interior"]))
            key = (entry["l"], tuple(entry["beta"]))
            if not _valid_beta(ring, key[1]):
                raise FileError(f"invalid degree {key[1]}", _path(where, "beta"))
            closed[block].setdefault(key, {})[g] = _scalar(ring, entry["value"], _path(where, "value"))
    out.q = QStructure(datum, amb, ring, tables, closed["qm1"], closed["sphere"],
                       rho_variant=flags.get("rho_variant", "c"), delta=flags.get("delta", 0), name=name)
    if "gamma" in doc:
        out.gamma = _element(amb, ring, doc["gamma"], "gamma")
    return out


def load(path: str | Path) -> LoadedFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise FileError(f"cannot read file: {exc.strerror}", "", str(path)) from None
    except json.JSONDecodeError as exc:
        raise FileError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", "", str(path)) from None
    return load_document(doc, str(path))


# ---------------------------------------------------------------------------
# encoding

def _frac(c: Fraction):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mono_fields(ring: Ring, m) -> dict:
    e, t, p, beta, s = m
    out = {}
    if any(t):
        out["t"] = list(t)
    if p:
        out["x"] = p
    if any(beta):
        out["beta"] = list(beta)
    if e:
        out["dt"] = e
    if s:
        out["s"] = s
    return out


def _dump_scalar(a: Nov) -> list:
    return [{"coeff": _frac(c), **_mono_fields(a.ring, m)} for m, c in sorted(a.terms.items())]


def _dump_element(x: Cochain) -> list:
    names = x.space.names
    return [{"basis": names[b], "coeff": _frac(c), **_mono_fields(x.ring, m)}
            for (b, m), c in sorted(x.terms.items())]


def _dump_ring(ring: Ring) -> dict:
    g = ring.group
    group = {"rank": g.rank, "torsion": g.torsion, "mu": list(g.mu), "omega": [_frac(w) for w in g.omega],
             "gap": _frac(g.gap)}
    if g.names:
        group["names"] = list(g.names)
    return {"group": group, "t_degrees": list(ring.tvars.degrees),
            "cutoff": {"energy": _frac(ring.cutoff.energy), "t_order": ring.cutoff.t_order}}


def _dump_basis(basis: list[Basis]) -> list:
    return [{"name": b.name, "form_degree": b.form_degree, **({"e": b.e} if b.e else {})} for b in basis]


def _dump_linear(space, table: dict, target) -> dict:
    return {space.names[b]: {target.names[c]: _frac(v) for c, v in sorted(row.items())}
            for b, row in sorted(table.items())}


def _dump_datum(datum: TwistedPoincareDatum, builtin: bool) -> dict:
    if builtin and datum.name in builtin_models():
        return {"builtin": datum.name}
    names = datum.names
    return {
        "name": datum.name, "n": datum.n, "loops": list(datum.model.loops), "w1": list(datum.model.w1),
        "basis": _dump_basis(datum.basis), "d": _dump_linear(datum, datum.dtable, datum),
        "wedge": [{"left": names[b1], "right": names[b2],
                   "value": [{"basis": names[b], **({"x": p} if p else {}), "coeff": _frac(c)}
                             for (b, p), c in sorted(val.items())]}
                  for (b1, b2), val in sorted(datum.wedge.items())],
        "trace": {names[b]: _frac(v) for b, v in sorted(datum.trace.items())},
        "form_trace": {names[b]: _frac(v) for b, v in sorted(datum.form_trace.items())},
        "unit": names[datum.unit_index],
    }


def _dump_ambient(amb: AmbientModel, datum: TwistedPoincareDatum) -> dict:
    return {
        "name": amb.name, "basis": _dump_basis(amb.basis), "d": _dump_linear(amb, amb.dtable, amb),
        "restriction": _dump_linear(amb, amb.restriction, datum),
        "periods": {amb.names[b]: [_frac(v) for v in vals] for b, vals in sorted(amb.periods.items())},
        "unit": None if amb.unit_index is None else amb.names[amb.unit_index],
    }


def dump_structure(S: AInftyStructure, *, builtin_datum: bool = False) -> dict:
    names = S.datum.names
    doc = {
        "schema": SCHEMA_VERSION, "kind": "structure", "name": S.name,
        "ring": _dump_ring(S.ring), "datum": _dump_datum(S.datum, builtin_datum),
        "m": {str(k): [{"inputs": [names[b] for b in key], "value": _dump_element(v)}
                       for key, v in sorted(S.m[k].items()) if v]
              for k in sorted(S.m)},
        "unit": _dump_element(S.unit),
        "family": S.family,
        "flags": {"pairing": S.pairing_variant},
    }
    if S.m_minus1:
        doc["m_minus1"] = _dump_scalar(S.m_minus1)
    return doc


def dump_q(Q: QStructure, gamma: Cochain | None = None, *, builtin_datum: bool = False) -> dict:
    amb, names = Q.ambient, Q.datum.names
    entries = []
    for (k, l, beta), table in sorted(Q.tables.items()):
        for (g, a), v in sorted(table.items()):
            if v:
                entries.append({"k": k, "l": l, "beta": list(beta), "interior": [amb.names[b] for b in g],
                                "boundary": [names[b] for b in a], "value": _dump_element(v)})
    doc = {
        "schema": SCHEMA_VERSION, "kind": "q", "name": Q.name,
        "ring": _dump_ring(Q.ring), "datum": _dump_datum(Q.datum, builtin_datum),
        "ambient": _dump_ambient(amb, Q.datum), "q": entries,
        "flags": {"rho_variant": Q.rho_variant, "delta": Q.delta},
    }
    for block, data in (("qm1", Q.qm1), ("sphere", Q.sphere)):
        rows = [{"l": l, "beta": list(beta), "interior": [amb.names[b] for b in g], "value": _dump_scalar(v)}
                for (l, beta), t in sorted(data.items()) for g, v in sorted(t.items()) if v]
        if rows:
            doc[block] = rows
    if gamma is not None:
        doc["gamma"] = _dump_element(gamma)
    return doc


def save(doc: dict, path: str | Path) -> None:
    validate_document(doc, str(path))
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


# ---------------------------------------------------------------------------
# comparison (used by the round-trip tests)

def same_structure(a: AInftyStructure, b: AInftyStructure) -> bool:
    def tables(S):
        return {k: {key: v.terms for key, v in t.items() if v} for k, t in S.m.items() if any(t.values())}
    mm1 = (a.m_minus1 or Nov.zero(a.ring)) == (b.m_minus1 or Nov.zero(b.ring))
    return (a.datum.names == b.datum.names and a.ring == b.ring and tables(a) == tables(b)
            and a.unit.terms == b.unit.terms and a.family == b.family
            and a.pairing_variant == b.pairing_variant and mm1)


def same_q(a: QStructure, b: QStructure) -> bool:
    def tables(Q):
        return {key: {e: v.terms for e, v in t.items()} for key, t in Q.tables.items()}

    def closed(d):
        return {key: {g: v.terms for g, v in t.items()} for key, t in d.items()}
    return (a.datum.names == b.datum.names and a.ambient.names == b.ambient.names and a.ring == b.ring
            and tables(a) == tables(b) and closed(a.qm1) == closed(b.qm1)
            and closed(a.sphere) == closed(b.sphere) and a.rho_variant == b.rho_variant
            and a.delta == b.delta and a.ambient.periods == b.ambient.periods
            and a.ambient.restriction == b.ambient.restriction and a.ambient.dtable == b.ambient.dtable)
