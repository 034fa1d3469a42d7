import copy
import json

import pytest

from ainfty_workbench.ainfty import build_energy_zero
from ainfty_workbench.coefficients import builtin_models
from ainfty_workbench.files import (SCHEMA, FileError, dump_q, dump_structure, load, load_document, same_q,
                                    same_structure, save, validate_document)
from ainfty_workbench.fixtures import build_fixtures, data_dir, load_manifest
from ainfty_workbench.qstructures import random_admissible_q, standard_ring

RING = standard_ring(3, 3)
DATA = builtin_models()


@pytest.fixture(scope="module")
def circle_doc():
    return json.loads((data_dir() / "energy_zero_circle.json").read_text())


@pytest.mark.parametrize("name", sorted(DATA))
@pytest.mark.parametrize("builtin", [False, True])
def test_structure_round_trip(name, builtin, tmp_path):
    S = build_energy_zero(DATA[name], RING, native=False)
    path = tmp_path / "s.json"
    save(dump_structure(S, builtin_datum=builtin), path)
    f = load(path)
    assert f.kind == "structure"
    assert same_structure(f.structure, S)
    assert dump_structure(f.structure, builtin_datum=builtin) == dump_structure(S, builtin_datum=builtin)


@pytest.mark.parametrize("seed", range(3))
def test_q_round_trip(seed):
    Q = random_admissible_q(DATA["klein"], seed, {"max_l": 2})
    doc = json.loads(json.dumps(dump_q(Q)))
    f = load_document(doc)
    assert f.kind == "q" and same_q(f.q, Q)


def test_shipped_files_match_the_generator():
    docs, manifest = build_fixtures()
    for name, doc in docs.items():
        assert json.loads((data_dir() / name).read_text()) == doc, name
    assert load_manifest() == manifest
    for entry in manifest:
        for name in entry["files"]:
            assert name in docs


def test_shipped_files_validate():
    for path in sorted(data_dir().glob("*.json")):
        if path.name != "manifest.json":
            validate_document(json.loads(path.read_text()), path.name)


def test_schema_is_a_draft_2020_12_document():
    assert SCHEMA["$schema"].endswith("2020-12/schema")


def expect_error(doc, location_part):
    with pytest.raises(FileError) as err:
        load_document(doc, "doc.json")
    assert location_part in err.value.location, (err.value.location, err.value.message)
    assert "doc.json" in str(err.value)
    return err.value


def test_unknown_basis_name_is_located(circle_doc):
    doc = copy.deepcopy(circle_doc)
    doc["m"]["2"][1]["inputs"][0] = "nope"
    expect_error(doc, "m/2/1/inputs/0")


def test_bad_rational_is_located(circle_doc):
    doc = copy.deepcopy(circle_doc)
    doc["m"]["1"][0]["value"][0]["coeff"] = "1/0"
    expect_error(doc, "m/1/0/value/0/coeff")


def test_missing_field_and_wrong_schema(circle_doc):
    doc = copy.deepcopy(circle_doc)
    del doc["ring"]
    with pytest.raises(FileError):
        load_document(doc)
    doc = copy.deepcopy(circle_doc)
    doc["schema"] = "something-else/9"
    with pytest.raises(FileError):
        load_document(doc)


def test_wrong_arity_is_rejected(circle_doc):
    doc = copy.deepcopy(circle_doc)
    doc["m"]["2"][0]["inputs"] = ["1"]
    with pytest.raises(FileError):
        load_document(doc)


def test_float_coefficients_are_rejected(circle_doc):
    doc = copy.deepcopy(circle_doc)
    doc["m"]["1"][0]["value"][0]["coeff"] = 0.5
    with pytest.raises(FileError):
        load_document(doc)


def test_unreadable_files(tmp_path):
    with pytest.raises(FileError):
        load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(FileError):
        load(bad)


def test_family_flag(circle_doc):
    f = load_document(circle_doc)
    assert not f.is_family
    with pytest.raises(FileError):
        f.isotopy()
    assert load(data_dir() / "isotopy_gamma_tilde_circle.json").isotopy().structure.family
