"""Command-line front end.

Every command prints one JSON report ``{command, verdicts, elapsed_ms}`` on
stdout.  Exit status: 0 all gating verdicts pass, 1 verification failure,
2 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .bimodule import DaggerBimodule, check_bimodule, compose_bimodules, composite_idempotent
from .cpstar import CPMap, cp_witness, is_completely_positive, reconstruct
from .frobenius import FrobeniusAlgebra, check_frobenius, classical_structure, matrix_algebra
from .groupoid import (
    FiniteGroupoid,
    GroupoidError,
    algebra_to_groupoid,
    cyclic_group,
    find_isomorphism,
    groupoid_to_algebra,
    validate_groupoid,
)
from .linalg import (
    DEFAULT_TOL,
    ShapeError,
    TwoCPError,
    Verdict,
    VerificationError,
    idempotent_deviation,
    isometry_deviation,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    split_projection,
)
from .protocols import (
    TeleportationData,
    check_security,
    check_teleportation,
    one_time_pad,
    standard_qubit_teleportation,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _parse(loader, obj):
    try:
        return loader(obj)
    except ShapeError as exc:
        raise InputError(str(exc)) from exc
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed input: {exc!r}") from exc


def _emit(artifact: dict, out: str | None, extra: dict) -> None:
    if out:
        Path(out).write_text(json.dumps(artifact))
        extra["written"] = out
    else:
        extra["artifact"] = artifact


def _require_algebra(f: FrobeniusAlgebra, tol: float, label: str) -> None:
    rep = check_frobenius(f, tol)
    if not rep.structural:
        bad = [v.name for v in rep.verdicts()[:4] if not v.passed]
        raise VerificationError(f"{label} algebra fails {', '.join(bad)}",
                                max(v.deviation for v in rep.verdicts()[:4]))


# -- commands; each returns (verdicts, gating names or None for all, extras) ---

def cmd_verify_frobenius(args):
    f = _parse(FrobeniusAlgebra.from_json, _load(args.path))
    rep = check_frobenius(f, args.tol)
    vs = rep.verdicts()
    return vs, [v.name for v in vs if v.name != "commutative"], {}


def cmd_verify_cp(args):
    f = _parse(CPMap.from_json, _load(args.path))
    rep = is_completely_positive(f, args.tol)
    vs = [Verdict("completely_positive", rep.passed, rep.deviation)]
    extra = {"min_eigenvalue": rep.min_eigenvalue}
    if rep.passed:
        w = cp_witness(f, args.tol)
        dev = max_abs(reconstruct(w, f.dom, f.cod).map - f.map)
        vs.append(Verdict("witness_roundtrip", dev <= max(args.tol, 1e-8), dev))
        extra["ancilla_dim"] = w.ancilla_dim
    return vs, None, extra


def cmd_compose(args):
    mb = _parse(DaggerBimodule.from_json, _load(args.left))
    nb = _parse(DaggerBimodule.from_json, _load(args.right))
    for label, b in (("left", mb), ("right", nb)):
        _require_algebra(b.left, args.tol, f"{label} bimodule's left")
        _require_algebra(b.right, args.tol, f"{label} bimodule's right")
        rep = check_bimodule(b, args.tol)
        if not rep:
            return [Verdict(f"{label}_{v.name}", v.passed, v.deviation) for v in rep.verdicts()], None, {}
    p = composite_idempotent(mb, nb, args.tol)
    comp, i = compose_bimodules(mb, nb, args.tol)
    vs = [Verdict("idempotent", True, idempotent_deviation(p)),
          Verdict("isometry", isometry_deviation(i) <= args.tol, isometry_deviation(i))]
    vs += [Verdict(f"composite_{v.name}", v.passed, v.deviation)
           for v in check_bimodule(comp, args.tol).verdicts()]
    extra = {"carrier_dim": comp.carrier_dim}
    _emit(comp.to_json(), args.out, extra)
    return vs, None, extra


def cmd_split(args):
    p = _parse(matrix_from_json, _load(args.path))
    if p.shape[0] != p.shape[1]:
        raise InputError(f"projection must be square, got {p.shape}")
    i = split_projection(p, args.tol)
    dev_iso = isometry_deviation(i)
    dev_p = max_abs(i @ i.conj().T - p)
    vs = [Verdict("isometry", dev_iso <= args.tol, dev_iso),
          Verdict("splits", dev_p <= args.tol, dev_p)]
    extra = {"rank": i.shape[1]}
    _emit(matrix_to_json(i), args.out, extra)
    return vs, None, extra


def cmd_groupoid_roundtrip(args):
    g = _parse(FiniteGroupoid.from_json, _load(args.path))
    rep = validate_groupoid(g)
    if not rep:
        return [Verdict("valid", False, float(len(rep.violations)))], None, {"violations": list(rep.violations)}
    alg = groupoid_to_algebra(g)
    back = algebra_to_groupoid(alg, args.tol)
    iso = find_isomorphism(g, back)
    fr = check_frobenius(alg, args.tol)
    vs = [Verdict("valid", True, 0.0),
          Verdict("roundtrip_isomorphic", iso is not None, 0.0 if iso is not None else 1.0),
          Verdict("entrywise_positive", bool(np.all(alg.mult.real >= 0) and np.all(alg.unit.real >= 0)), 0.0)]
    vs += fr.verdicts()
    # specialness and commutativity are reported, not required
    return vs, ["valid", "roundtrip_isomorphic", "entrywise_positive", "associative", "unital",
                "frobenius"], {}


def cmd_teleport_check(args):
    t = _parse(TeleportationData.from_json, _load(args.path))
    return [check_teleportation(t, args.tol)], None, {"outcomes": t.n}


def cmd_security_check(args):
    t = _parse(TeleportationData.from_json, _load(args.path))
    return [check_security(t, args.tol)], None, {"outcomes": t.n}


def builtin_artifact(name: str) -> dict:
    if name == "teleport-qubit":
        return standard_qubit_teleportation().to_json()
    if name in ("otp-z2", "otp-z3"):
        return one_time_pad(cyclic_group(int(name[-1]))).to_json()
    kind, _, size = name.partition("-")
    if kind in ("classical", "matrix") and size.isdigit() and int(size) > 0:
        make = classical_structure if kind == "classical" else matrix_algebra
        return make(int(size)).to_json()
    if kind == "groupoid" and size.startswith("z") and size[1:].isdigit():
        return cyclic_group(int(size[1:])).to_json()
    raise InputError(f"unknown builtin {name!r}; try teleport-qubit, otp-z2, otp-z3, "
                     "classical-<n>, matrix-<k>, groupoid-z<n>")


def cmd_builtin(args):
    extra: dict = {"name": args.name}
    _emit(builtin_artifact(args.name), args.out, extra)
    return [], None, extra


COMMANDS = {
    "verify-frobenius": cmd_verify_frobenius,
    "verify-cp": cmd_verify_cp,
    "compose": cmd_compose,
    "split": cmd_split,
    "groupoid-roundtrip": cmd_groupoid_roundtrip,
    "teleport-check": cmd_teleport_check,
    "security-check": cmd_security_check,
    "builtin": cmd_builtin,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--out", default=None, help="write generated JSON here")
    common.add_argument("--json", action="store_true", help="report as JSON (always on)")

    parser = argparse.ArgumentParser(prog="twocp", description="Verify CP*/bimodule artifacts.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify-frobenius", "verify-cp", "split", "groupoid-roundtrip",
                 "teleport-check", "security-check"):
        sub.add_parser(name, parents=[common]).add_argument("path")
    p = sub.add_parser("compose", parents=[common])
    p.add_argument("left")
    p.add_argument("right")
    sub.add_parser("builtin", parents=[common]).add_argument("name")
    return parser


def run(argv: list[str] | None = None) -> tuple[int, dict]:
    """Run a command and return ``(exit_code, report)`` without printing."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        code = EXIT_OK if exc.code == 0 else EXIT_INPUT
        return code, {"command": None, "verdicts": [], "elapsed_ms": 0.0,
                      "error": "bad command line"}
    start = time.perf_counter()
    report: dict = {"command": args.command, "verdicts": []}
    try:
        verdicts, gating, extra = COMMANDS[args.command](args)
        report["verdicts"] = [v.as_dict() for v in verdicts]
        report.update(extra)
        gate = [v for v in verdicts if gating is None or v.name in gating]
        code = EXIT_OK if all(v.passed for v in gate) else EXIT_FAIL
    except InputError as exc:
        report["error"] = str(exc)
        code = EXIT_INPUT
    except (VerificationError, GroupoidError, TwoCPError) as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_FAIL
    report["elapsed_ms"] = round((time.perf_counter() - start) * 1e3, 3)
    return code, report


def main(argv: list[str] | None = None) -> int:
    code, report = run(argv)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
