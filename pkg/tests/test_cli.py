import json
import subprocess
import sys

import pytest

from ainfty_workbench.cli import _option_argv, main
from ainfty_workbench.fixtures import data_dir, load_manifest

DATA = data_dir()
MANIFEST = load_manifest()


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    out = capsys.readouterr()
    return status, out.out, out.err


@pytest.mark.parametrize("entry", MANIFEST, ids=lambda e: f"{e['command']}:{'+'.join(e['files'])}")
def test_manifest_entry(capsys, entry):
    argv = [entry["command"], *(DATA / f for f in entry["files"]), *_option_argv(entry["options"])]
    status, out, _ = run(capsys, *argv)
    assert status == entry["expect"], out


def test_manifest_covers_every_command_and_outcome():
    assert {e["command"] for e in MANIFEST} == {"check-structure", "check-q", "check-isotopy"}
    assert {e["expect"] for e in MANIFEST} == {0, 1}


@pytest.mark.parametrize("mutation", ["zeta", "rho"])
def test_check_signs(capsys, mutation):
    assert run(capsys, "check-signs", "--max-k", 3, "--max-l", 1)[0] == 0
    assert run(capsys, "check-signs", "--max-k", 3, "--max-l", 1, "--mutate", mutation)[0] == 1


def test_check_orientors(capsys):
    assert run(capsys, "check-orientors", "--trials", 40)[0] == 0
    assert run(capsys, "check-orientors", "--trials", 40, "--mutate", "tau")[0] == 1


@pytest.mark.parametrize("kind", ["sign", "degree", "curvature"])
def test_check_q_mutations(capsys, kind):
    status, out, _ = run(capsys, "check-q", DATA / "q_divisor_klein.json", "--mutate", kind, "--properties", "none")
    assert status == 1, out


def test_json_output_and_report_file(capsys, tmp_path):
    report = tmp_path / "r.json"
    status, out, _ = run(capsys, "check-structure", DATA / "energy_zero_point.json", "--format", "json",
                         "--report", report, "--trials", 5)
    assert status == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert json.loads(report.read_text()) == doc


def test_cutoff_flags_lower_the_cutoff(capsys):
    path = DATA / "energy_zero_circle.json"
    status, out, _ = run(capsys, "check-structure", path, "--energy-cutoff", "2", "--t-order", 1, "--trials", 5)
    assert status == 0, out


@pytest.mark.parametrize("argv", [
    ["check-structure", DATA / "energy_zero_circle.json", "--energy-cutoff", "9"],
    ["check-structure", DATA / "missing.json"],
    ["check-structure", DATA / "q_minimal_circle.json"],
    ["check-q", DATA / "energy_zero_circle.json"],
    ["check-isotopy", DATA / "energy_zero_circle.json", DATA / "energy_zero_circle.json",
     DATA / "energy_zero_circle.json"],
])
def test_input_errors_exit_2(capsys, argv):
    status, _, err = run(capsys, *argv)
    assert status == 2
    assert err.startswith("error:")


def test_bad_json_and_bad_names_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "check-structure", bad)[0] == 2
    doc = json.loads((DATA / "energy_zero_circle.json").read_text())
    doc["m"]["2"][1]["inputs"][0] = "nope"
    named = tmp_path / "named.json"
    named.write_text(json.dumps(doc))
    status, _, err = run(capsys, "check-structure", named)
    assert status == 2 and "m/2/1/inputs/0" in err


@pytest.mark.parametrize("argv", [
    ["check-structure", "x.json", "--energy-cutoff", "2.5"],
    ["check-q", "x.json", "--properties", "nonsense"],
    ["check-orientors", "--trials", "0"],
    ["no-such-command"],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ainfty_workbench", "check-signs", "--max-k", "2", "--max-l", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout


@pytest.mark.slow
def test_selftest(capsys):
    status, out, _ = run(capsys, "selftest", "--trials", 30)
    assert status == 0, out
