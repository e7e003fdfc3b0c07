"""Command-line front end: ``geopack solve|validate|render|compare``.

Exit codes: 0 feasible / success, 1 infeasible, 2 usage or schema error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import __version__
from .kernels import BACKEND
from .models import ModelError, build, decode
from .registry import Registry, RegistryError, builtin_registry, compare, make_key
from .render import RenderError, render
from .solution import SchemaError, SolutionFile, fmt
from .solver import SolveOptions, solve
from .validator import DEFAULT_TOL, validate

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geopack", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"geopack {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="multi-start solve, validate and write a solution file")
    s.add_argument("--family", required=True, choices=["minmax", "circles", "hexagons"])
    s.add_argument("--n", required=True, type=_positive_int)
    s.add_argument("--d", type=_positive_int, default=None, help="dimension (minmax only)")
    s.add_argument("--variant", choices=["square", "rectangle"], default=None,
                   help="container shape (circles only)")
    s.add_argument("--formulation", choices=["primal", "dual"], default=None,
                   help="min-max model (default primal)")
    s.add_argument("--restarts", type=_positive_int, default=64)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--time-limit", type=_positive_float, default=None, help="seconds")
    s.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    s.add_argument("--out", default=None, help="solution path (default: stdout)")

    v = sub.add_parser("validate", help="re-certify a solution file from its geometry")
    v.add_argument("solution")
    v.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    r = sub.add_parser("render", help="draw a solution file as SVG")
    r.add_argument("solution")
    r.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    r.add_argument("--out", default=None, help="SVG path (default: stdout)")

    c = sub.add_parser("compare", help="compare a solution with best-known values")
    c.add_argument("solution", nargs="?")
    c.add_argument("--registry", default=None, help="registry JSON (default: built-in)")
    c.add_argument("--export-registry", metavar="PATH", default=None,
                   help="write the built-in registry to PATH and exit")
    c.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    return p


def _usage(msg: str) -> int:
    print(f"geopack: error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _print_verdict(verdict) -> None:
    status = "feasible" if verdict.feasible else "INFEASIBLE"
    print(f"status: {status}")
    print(f"max_violation: {verdict.max_violation:.3e}")
    if verdict.feasible:
        print(f"certified_objective: {fmt(verdict.certified_objective)}")
        print(f"reported_value: {verdict.reported_value}")
    for name, amount in verdict.worst(5):
        print(f"violation: {name} {amount:.3e}")


def cli_solve(args) -> int:
    fam = args.family
    if args.d is not None and fam != "minmax":
        return _usage("--d applies to --family minmax only")
    if args.formulation is not None and fam != "minmax":
        return _usage("--formulation applies to --family minmax only")
    if args.variant is not None and fam != "circles":
        return _usage("--variant applies to --family circles only")
    d = 2 if args.d is None else args.d
    variant = args.variant or "square"
    try:
        problem = build(fam, args.n, d=d, variant=variant,
                        formulation=args.formulation or "primal")
    except ModelError as exc:
        return _usage(str(exc))
    opts = SolveOptions(restarts=args.restarts, seed=args.seed,
                        time_limit=args.time_limit, feas_tol=args.tol)
    report = solve(problem, opts)
    verdict = validate(decode(problem, report.best_x), args.tol)
    if not verdict.feasible:
        print(f"geopack: no feasible solution found (max violation "
              f"{verdict.max_violation:.3e})", file=sys.stderr)
        for name, amount in verdict.worst(5):
            print(f"  {name}: {amount:.3e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    sol = SolutionFile.from_verdict(verdict, {
        "seed": args.seed,
        "restarts": args.restarts,
        "best_restart": report.best_restart,
        "wall_time": round(report.wall_time, 3),
        "backend": BACKEND,
    })
    _write(sol.dumps(), args.out)
    print(f"{fam} n={args.n}: reported_value {sol.reported_value}", file=sys.stderr)
    return EXIT_OK


def cli_validate(args) -> int:
    try:
        sol = SolutionFile.load(args.solution)
    except SchemaError as exc:
        return _usage(str(exc))
    verdict = validate(sol.config, args.tol)
    _print_verdict(verdict)
    if verdict.feasible and verdict.repaired:
        worse = (verdict.certified_objective < verdict.claimed_objective
                  if verdict.sense == "max"
                  else verdict.certified_objective > verdict.claimed_objective)
        if worse:
            print(f"warning: repair changed the objective from "
                  f"{fmt(verdict.claimed_objective)} to {fmt(verdict.certified_objective)}",
                  file=sys.stderr)
    if verdict.feasible and verdict.reported_value != sol.reported_value:
        print(f"warning: file reports {sol.reported_value}, certified "
              f"{verdict.reported_value}", file=sys.stderr)
    return EXIT_OK if verdict.feasible else EXIT_INFEASIBLE


def cli_render(args) -> int:
    try:
        sol = SolutionFile.load(args.solution)
    except SchemaError as exc:
        return _usage(str(exc))
    try:
        svg = render(sol, args.tol)
    except RenderError as exc:
        print(f"geopack: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write(svg, args.out)
    return EXIT_OK


def cli_compare(args) -> int:
    if args.export_registry is not None:
        builtin_registry().dump(args.export_registry)
        return EXIT_OK
    if args.solution is None:
        return _usage("compare needs a solution file or --export-registry")
    try:
        sol = SolutionFile.load(args.solution)
        registry = builtin_registry() if args.registry is None else Registry.load(args.registry)
    except (SchemaError, RegistryError, OSError) as exc:
        return _usage(str(exc))
    verdict = validate(sol.config, args.tol)
    if not verdict.feasible:
        _print_verdict(verdict)
        return EXIT_INFEASIBLE
    p = sol.params
    key = make_key(sol.family, p["n"], p.get("d"), p.get("variant"))
    row = compare(verdict, key, registry)
    print(json.dumps(row.as_dict(), indent=2))
    return EXIT_OK


COMMANDS = {"solve": cli_solve, "validate": cli_validate, "render": cli_render,
            "compare": cli_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
