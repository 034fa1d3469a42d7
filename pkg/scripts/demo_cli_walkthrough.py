"""
Command-line walkthrough
========================

Runs the command-line checker on the bundled files.  Exit status 0 means
every check passed, 1 means violations were found, 2 means bad input.
"""

import subprocess
import sys

from ainfty_workbench.fixtures import data_dir

DATA = data_dir()


def run(*args):
    cmd = [sys.executable, "-m", "ainfty_workbench", *map(str, args)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    print("$ python -m ainfty_workbench", " ".join(map(str, args[:1])), *(
        a.name if hasattr(a, "name") else a for a in args[1:]))
    print((proc.stdout or proc.stderr).strip().splitlines()[0], f"[exit {proc.returncode}]\n")


# %%
run("check-signs", "--max-k", 3, "--max-l", 2)
run("check-signs", "--max-k", 3, "--max-l", 2, "--mutate", "zeta")

# %%
run("check-structure", DATA / "energy_zero_klein.json")
run("check-structure", DATA / "mutated_circle.json")

# %%
run("check-q", DATA / "q_divisor_klein.json")
run("check-q", DATA / "q_divisor_klein.json", "--mutate", "sign")

# %%
run("check-isotopy", DATA / "endpoint_gamma_circle.json", DATA / "endpoint_gamma_prime_circle.json",
    DATA / "isotopy_gamma_tilde_circle.json")

# %%
# Raising a cutoff above the file's is an input error.
run("check-structure", DATA / "energy_zero_circle.json", "--energy-cutoff", 9)
