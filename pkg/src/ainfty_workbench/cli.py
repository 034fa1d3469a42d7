"""Command-line entry points: ``python -m ainfty_workbench <command> ...``.

Exit status is 0 when every check passes, 1 when any check reports a
violation, and 2 when the input cannot be used (bad file, bad flag value,
or a bulk class that fails the assembly preconditions).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import fiber_forms, novikov, orientors, qstructures, signs
from .ainfty import AssemblyError, assemble_m_from_q, check_def11, check_fundamental_class, check_pseudoisotopy, \
    check_relations
from .coefficients import Cochain
from .files import FileError, LoadedFile, load_document
from .fixtures import data_dir, load_manifest
from .novikov import Nov
from .report import Report

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# loading

def _read(path: str, args) -> LoadedFile:
    p = Path(path)
    try:
        doc = json.loads(p.read_text())
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    cutoff = doc.get("ring", {}).get("cutoff") if isinstance(doc, dict) else None
    if isinstance(cutoff, dict):
        energy = getattr(args, "energy_cutoff", None)
        t_order = getattr(args, "t_order", None)
        if energy is not None:
            if Fraction(energy) > Fraction(cutoff.get("energy", 0)):
                raise InputError(f"{path}: --energy-cutoff {energy} exceeds the file's cutoff {cutoff.get('energy')}")
            cutoff["energy"] = str(Fraction(energy))
        if t_order is not None:
            if t_order > cutoff.get("t_order", 0):
                raise InputError(f"{path}: --t-order {t_order} exceeds the file's t-order {cutoff.get('t_order')}")
            cutoff["t_order"] = t_order
    try:
        return load_document(doc, path)
    except FileError as exc:
        raise InputError(str(exc)) from None


def _expect_kind(f: LoadedFile, kind: str, path: str, *, family: bool | None = None) -> None:
    if f.kind != kind:
        raise InputError(f"{path}: expected a {kind!r} file, got {f.kind!r}")
    if family is not None and f.is_family != family:
        raise InputError(f"{path}: expected {'a family' if family else 'a non-family'} structure")


# ---------------------------------------------------------------------------
# commands

def cmd_check_signs(args) -> Report:
    return signs.verify_sign_lemmas(args.max_k, args.max_l, mutate=args.mutate)


def cmd_check_orientors(args) -> Report:
    rep = orientors.verify_orientor_laws(args.trials, args.seed, mutate=args.mutate)
    if args.mutate is None:
        rep.merge(orientors.verify_pullback_examples(min(args.trials, 200), args.seed), prefix="pullback ")
    return rep


def cmd_check_structure(args) -> Report:
    f = _read(args.file, args)
    _expect_kind(f, "structure", args.file)
    S = f.structure
    rep = Report(f"check-structure {args.file}", {"file": args.file, "max_k": args.max_k, "seed": args.seed})
    rep.merge(check_def11(S, args.max_k, trials=args.trials, seed=args.seed))
    return rep


def _default_gamma(f: LoadedFile) -> Cochain:
    """t0 times the ambient unit, plus t1 times the first divisor class when the ring allows it."""
    Q, ring = f.q, f.ring
    amb = Q.ambient
    gamma = Cochain.zero(amb, ring)
    degs = ring.tvars.degrees
    if amb.unit_index is not None and degs and degs[0] == 2:
        gamma = gamma + Cochain.from_scalar(amb, amb.unit_index, Nov.t(ring, 0))
    if amb.divisor_classes() and len(degs) > 1 and degs[1] == 0:
        gamma = gamma + Cochain.from_scalar(amb, amb.divisor_classes()[0], Nov.t(ring, 1))
    return gamma


def _identities(Q, gamma: Cochain):
    """Which of the fundamental class and divisor identities the bulk class sets up.

    The fundamental class identity applies when gamma contains t0 times the
    ambient unit; the divisor identity when it contains t_i times a divisor
    class for a degree-0 parameter t_i.
    """
    ring, amb = Q.ring, Q.ambient
    comps = gamma.components()
    fundamental = None
    if amb.unit_index is not None:
        for i, d in enumerate(ring.tvars.degrees):
            if d == 2 and comps.get(amb.unit_index) == Nov.t(ring, i):
                fundamental = i
                break
    divisor = None
    for b in amb.divisor_classes():
        for i, d in enumerate(ring.tvars.degrees):
            if d == 0 and comps.get(b) == Nov.t(ring, i):
                divisor = (b, i)
                break
        if divisor:
            break
    return fundamental, divisor


def cmd_check_q(args) -> Report:
    f = _read(args.file, args)
    _expect_kind(f, "q", args.file)
    Q = f.q
    info = None
    if args.mutate:
        Q, info = qstructures.perturb_q(Q, args.seed, args.mutate, max_k=args.max_k, max_l=args.max_l)
    gamma = f.gamma if f.gamma is not None else _default_gamma(f)
    rep = Report(f"check-q {args.file}", {"file": args.file, "max_k": args.max_k, "max_l": args.max_l,
                                           "energy": Q.ring.cutoff.energy, "t_order": Q.ring.cutoff.t_order,
                                           "seed": args.seed, "gamma": repr(gamma), "perturbation": info})
    rep.merge(qstructures.check_q_relations(Q, args.max_k, args.max_l), prefix="k>=0 ")
    rep.merge(qstructures.check_q_relations_km1(Q, args.max_l), prefix="k=-1 ")
    if args.properties != "none":
        which = "all" if args.properties == "all" else args.properties.split(",")
        rep.merge(qstructures.check_properties(Q, which, seed=args.seed), prefix="property ")
    if Q.degree_problems():
        return rep
    try:
        S = assemble_m_from_q(Q, gamma, args.max_k + 1)
    except AssemblyError as exc:
        raise InputError(f"{args.file}: gamma cannot be used for assembly: {exc}") from None
    rep.merge(check_relations(S, args.max_k), prefix="assembled ")
    fundamental, divisor = _identities(Q, gamma)
    if fundamental is not None:
        rep.merge(check_fundamental_class(S, fundamental), prefix="assembled ")
    if divisor is not None:
        b, i = divisor
        rest = gamma - Cochain.from_scalar(Q.ambient, b, Nov.t(Q.ring, i))
        rep.merge(qstructures.check_divisor_axiom(Q, b, rest, i, args.max_k), prefix="assembled ")
    return rep


def cmd_check_isotopy(args) -> Report:
    f0, f1, fam = _read(args.file0, args), _read(args.file1, args), _read(args.isotopy, args)
    _expect_kind(f0, "structure", args.file0, family=False)
    _expect_kind(f1, "structure", args.file1, family=False)
    _expect_kind(fam, "structure", args.isotopy, family=True)
    rep = Report(f"check-isotopy {args.isotopy}", {"file0": args.file0, "file1": args.file1,
                                                    "isotopy": args.isotopy, "max_k": args.max_k, "seed": args.seed})
    rep.merge(check_pseudoisotopy(fam.isotopy(), f0.structure, f1.structure, args.max_k,
                                  trials=args.trials, seed=args.seed))
    return rep


def _run_manifest(args, rep: Report) -> None:
    directory = Path(args.data) if args.data else data_dir()
    for entry in load_manifest(directory):
        paths = [str(directory / name) for name in entry["files"]]
        argv = [entry["command"], *paths, *_option_argv(entry.get("options", {}))]
        sub = build_parser().parse_args(argv)
        sub.seed = args.seed
        label = f"{entry['command']} {' '.join(entry['files'])}"
        try:
            status = _status(sub.func(sub))
        except InputError as exc:
            status = EXIT_INPUT
            label += f" ({exc})"
        rep.check("bundled files").expect(status == entry["expect"],
                                          {"run": label, "expected": entry["expect"], "got": status})


def _option_argv(options: dict) -> list[str]:
    out = []
    for k, v in options.items():
        out += [f"--{k.replace('_', '-')}", str(v)]
    return out


def cmd_selftest(args) -> Report:
    rep = Report("selftest", {"seed": args.seed, "trials": args.trials})
    rep.merge(signs.verify_sign_lemmas(), prefix="signs ")
    for target in signs.MUTATIONS:
        mutated = signs.verify_sign_lemmas(3, 2, mutate=target)
        rep.check("sign mutations detected").expect(not mutated.ok, target)
    rep.merge(orientors.verify_orientor_laws(args.trials, args.seed), prefix="orientors ")
    rep.merge(fiber_forms.verify_stokes_interval(args.trials, args.seed), prefix="stokes ")
    rep.merge(novikov.verify_valuation_laws(args.trials, args.seed), prefix="valuation ")
    _run_manifest(args, rep)
    return rep


# ---------------------------------------------------------------------------
# argument parsing

def _status(rep: Report) -> int:
    return EXIT_PASS if rep.ok else EXIT_FAIL


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None
    if "." in text or "e" in text.lower():
        raise argparse.ArgumentTypeError("give the cutoff as an integer or p/q")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m ainfty_workbench",
                                     description="Exact checks for curved cyclic A-infinity structures.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized check (default 0)")
    common.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")
    common.add_argument("--format", choices=("human", "json"), default="human", help="stdout format")

    cut = argparse.ArgumentParser(add_help=False)
    cut.add_argument("--energy-cutoff", type=_rational, metavar="E",
                     help="truncate the file's ring to energy <= E (may only lower the cutoff)")
    cut.add_argument("--t-order", type=_non_negative, metavar="N", help="truncate to total t-order <= N")

    p = sub.add_parser("check-signs", parents=[common], help="exhaustive sign-lemma suite")
    p.add_argument("--max-k", type=_non_negative, default=5)
    p.add_argument("--max-l", type=_non_negative, default=3)
    p.add_argument("--mutate", choices=signs.MUTATIONS, help="corrupt one formula on purpose")
    p.set_defaults(func=cmd_check_signs)

    p = sub.add_parser("check-orientors", parents=[common], help="randomized orientor-law suite")
    p.add_argument("--trials", type=_positive, default=1000)
    p.add_argument("--mutate", choices=orientors.MUTATIONS, help="swap in a broken sign rule")
    p.set_defaults(func=cmd_check_orientors)

    p = sub.add_parser("check-structure", parents=[common, cut], help="all ten structure properties of a file")
    p.add_argument("file")
    p.add_argument("--max-k", type=_non_negative, default=6)
    p.add_argument("--trials", type=_positive, default=40, help="random samples per property")
    p.set_defaults(func=cmd_check_structure)

    p = sub.add_parser("check-q", parents=[common, cut],
                       help="q-relations, properties, and the assembled structure of a q file")
    p.add_argument("file")
    p.add_argument("--max-k", type=_non_negative, default=3)
    p.add_argument("--max-l", type=_non_negative, default=2)
    p.add_argument("--mutate", choices=qstructures.PERTURBATIONS, help="inject a perturbation before checking")
    p.add_argument("--properties", default="all",
                   help=f"'all', 'none', or a comma list of {', '.join(qstructures.PROPERTIES)}")
    p.set_defaults(func=cmd_check_q)

    p = sub.add_parser("check-isotopy", parents=[common, cut], help="check a family against two endpoints")
    p.add_argument("file0")
    p.add_argument("file1")
    p.add_argument("isotopy")
    p.add_argument("--max-k", type=_non_negative, default=4)
    p.add_argument("--trials", type=_positive, default=30)
    p.set_defaults(func=cmd_check_isotopy)

    p = sub.add_parser("selftest", parents=[common], help="all suites plus the bundled files")
    p.add_argument("--trials", type=_positive, default=200, help="random instances per law (default 200)")
    p.add_argument("--data", metavar="DIR", help="directory with manifest.json (default: bundled data)")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "properties", "all") not in ("all", "none"):
        unknown = set(args.properties.split(",")) - set(qstructures.PROPERTIES)
        if unknown:
            parser.error(f"unknown properties: {', '.join(sorted(unknown))}")
    start = time.perf_counter()
    try:
        rep = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    rep.elapsed = time.perf_counter() - start
    if args.report:
        try:
            Path(args.report).write_text(rep.to_json() + "\n")
        except OSError as exc:
            print(f"error: cannot write report: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    print(rep.to_json() if args.format == "json" else rep.to_human())
    return _status(rep)
