"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from .duflo import DEFAULT_ORDER, TruncationError, duflo_pairing, wheel_coefficients
from .enveloping import format_u
from .exactalg import DUAL, PRIMAL, format_poly, invariants_basis, is_invariant, parse_poly
from .liealg import PRESETS, JacobiError, StructureConstantsError, dump_json, load_json, preset
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _add_algebra(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", help="built-in algebra, e.g. sl2 or abelian(3)")
    g.add_argument("--file", help="structure-constants JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lieduflo", description="Exact Lie-algebra and Duflo-map computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jacobi", help="validate structure constants")
    _add_algebra(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("invariants", help="basis of S(g)^g (or S(g*)^g) in one degree")
    _add_algebra(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--dual", action="store_true", help="coadjoint invariants in S(g*)")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("wheels", help="wheel coefficients c_2n")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("duflo", help="Duflo image of an invariant polynomial")
    _add_algebra(p)
    p.add_argument("--poly", required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--no-wheels", action="store_true", help="control mode: bare symmetrization")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("suite", choices=("all",) + SUITES)
    _add_algebra(p)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-wheels", action="store_true", help="control mode: bare symmetrization")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("presets", help="list built-in algebras")
    p.add_argument("--json", action="store_true")
    return parser


def _algebra(args):
    if args.preset is not None:
        try:
            return preset(args.preset)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    try:
        return load_json(args.file)
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None


def _emit(args, out, text: str, data) -> None:
    out.write((json.dumps(data, ensure_ascii=False, sort_keys=True) if args.json else text) + "\n")


def cmd_jacobi(args, out) -> int:
    try:
        L = _algebra(args)
    except JacobiError as exc:
        data = {"passed": False, "violations": [
            {"i": i + 1, "j": j + 1, "k": k + 1, "component": m + 1, "value": str(v)}
            for i, j, k, m, v in exc.violations]}
        _emit(args, out, str(exc), data)
        return EXIT_FAIL
    _emit(args, out, f"PASS Jacobi identity holds for {L.name} (dim {L.dim})", {"passed": True, "name": L.name})
    return EXIT_OK


def cmd_invariants(args, out) -> int:
    L = _algebra(args)
    if args.degree < 0:
        raise UsageError("--degree must be nonnegative")
    basis = invariants_basis(L, DUAL if args.dual else PRIMAL, args.degree)
    lines = [format_poly(p, L.basis_names) for p in basis]
    _emit(args, out, "\n".join(lines) if lines else "(none)", {"degree": args.degree, "basis": lines})
    return EXIT_OK


def cmd_wheels(args, out) -> int:
    try:
        ws = wheel_coefficients(args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, out, str(ws), {f"c_{k}": str(c) for k, c in ws.coeffs.items()})
    return EXIT_OK


def cmd_duflo(args, out) -> int:
    L = _algebra(args)
    try:
        P = parse_poly(args.poly, L.basis_names, PRIMAL)
    except ValueError as exc:
        raise UsageError(f"cannot parse --poly: {exc}") from None
    if not is_invariant(L, P):
        print(f"warning: {args.poly} is not ad-invariant", file=sys.stderr)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            u = duflo_pairing(L, P, args.order, wheels=not args.no_wheels)
        except TruncationError as exc:
            raise UsageError(str(exc)) from None
    text = format_u(u)
    _emit(args, out, text, {"poly": format_poly(P, L.basis_names), "image": text})
    return EXIT_OK


def cmd_verify(args, out) -> int:
    L = _algebra(args)
    if args.order < 2 or args.order % 2:
        raise UsageError("--order must be an even integer >= 2")
    if args.threads < 1:
        raise UsageError("--threads must be positive")
    reports = run_suite(args.suite, L, order=args.order, wheels=not args.no_wheels, threads=args.threads)
    ok = all(r.passed for r in reports)
    summary = f"{sum(r.passed for r in reports)}/{len(reports)} checks passed for {L.name}"
    text = "\n".join([r.text() for r in reports] + [summary])
    _emit(args, out, text, {"algebra": L.name, "passed": ok, "reports": [r.as_dict() for r in reports]})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_presets(args, out) -> int:
    rows = [(name, preset(name)) for name in PRESETS]
    text = "\n".join(f"{name}\tdim {L.dim}\t{', '.join(L.basis_names)}" for name, L in rows)
    _emit(args, out, text, [json.loads(dump_json(L)) | {"preset": name} for name, L in rows])
    return EXIT_OK


COMMANDS = {
    "jacobi": cmd_jacobi, "invariants": cmd_invariants, "wheels": cmd_wheels,
    "duflo": cmd_duflo, "verify": cmd_verify, "presets": cmd_presets,
}


def run(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except JacobiError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, StructureConstantsError) as exc:
        print(f"lieduflo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
