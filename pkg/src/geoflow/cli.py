"""Command line interface: ``geoflow <command> ...``.

Failures print one line ``error[E_CODE]: message`` to stderr.  Exit status is
0 on success, 1 when a run or check fails, and 2 for usage errors and
requests that are outside the scope of a command.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
import warnings
from pathlib import Path

from . import checks
from .geodesic import EQUATIONS, EquationConfig, SolverOptions, hopf_blowup_estimate, simulate
from .io import (ConfigError, ExpressionError, RunConfig, compile_expression,
                 load_run_config, trajectory_summary, write_json, write_trajectory_csv)
from .jet import catalog
from .jet.calculus import closure_check, invariance_check
from .jet.syntax import JetSyntaxError, parse_expression, parse_generator, parse_pde
from .spectral import GridField, PeriodicGrid
from .symmetry import (GridIncompatible, find_symmetry, printed_variant,
                       symmetry_consistency_test)

DEFAULT_IC = "sin(x) + 0.3*cos(2*x)"


class CliError(Exception):
    def __init__(self, code, message, status=1):
        super().__init__(message)
        self.code = code
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError("E_USAGE", message, 2)


def _prefix_path(prefix, suffix):
    path = Path(f"{prefix}.{suffix}")
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _out(msg):
    print(msg, file=sys.stdout)


# --- simulate -----------------------------------------------------------------

def cmd_simulate(args):
    overrides = {
        "equation": args.equation, "ic": args.ic, "n": args.n, "length": args.length,
        "dt": args.dt, "t_end": args.t_end, "scheme": args.scheme, "eps": args.eps,
        "store_every": args.store_every,
        "dealias": False if args.no_dealias else None,
    }
    try:
        if args.config:
            run = load_run_config(args.config, overrides)
        else:
            run = RunConfig(**{k: v for k, v in overrides.items() if v is not None})
            run.validate()
    except ConfigError as exc:
        status = 2
        raise CliError("E_CONFIG", str(exc), status) from None
    except OSError as exc:
        raise CliError("E_IO", f"cannot read config: {exc}", 2) from None

    config = run.equation_config()
    u0 = run.initial_field()
    if not u0.values.size or not all(map(math.isfinite, u0.values)):
        raise CliError("E_CONFIG", "ic: initial condition is not finite on the grid", 2)
    extra = {}
    if config.is_hopf:
        t_star = hopf_blowup_estimate(u0)
        extra["hopf_blowup_estimate"] = t_star
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        traj = simulate(config, u0, run.t_end, run.solver_options())
    wall = time.perf_counter() - start
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    csv_path = write_trajectory_csv(traj, _prefix_path(args.out, "traj.csv"))
    json_path = write_json(trajectory_summary(run, traj, wall, extra),
                           _prefix_path(args.out, "summary.json"))
    if traj.blew_up:
        raise CliError("E_BLOWUP", f"solution blew up at t = {traj.failure_time:.6g}; "
                                   f"partial output in {csv_path}", 1)
    status = " (truncated before the Hopf shock)" if traj.truncated else ""
    _out(f"wrote {csv_path} and {json_path}: {len(traj.times)} snapshots up to "
         f"t = {traj.times[-1]:.6g}{status}")
    return 0


# --- symmetry-check --------------------------------------------------------------

def cmd_symmetry_check(args):
    if args.equation not in EQUATIONS:
        raise CliError("E_USAGE", f"unknown equation {args.equation!r}", 2)
    config = EquationConfig.named(args.equation, args.eps)
    try:
        spec = (printed_variant(config, args.generator) if args.printed
                else find_symmetry(config, args.generator))
    except ValueError as exc:
        code = "E_HOPF" if config.is_hopf else "E_USAGE"
        raise CliError(code, str(exc), 2) from None
    except KeyError as exc:
        raise CliError("E_USAGE", str(exc.args[0]), 2) from None
    if not spec.grid_compatible:
        raise CliError("E_GRID", f"grid-incompatible: {spec.generator_id} rescales x; "
                                 "verified symbolically via invariance-check", 2)
    try:
        func = compile_expression(args.ic)
    except ExpressionError as exc:
        raise CliError("E_CONFIG", f"ic: {exc}", 2) from None
    grid = PeriodicGrid(args.n)
    u0 = GridField(grid, func(grid.points))
    opts = SolverOptions(dt=args.dt, scheme=args.scheme)
    start = time.perf_counter()
    report = symmetry_consistency_test(spec, args.s, u0, args.t_end, opts)
    wall = time.perf_counter() - start
    data = report.as_dict()
    data.update({"ic": args.ic, "n": args.n, "dt": args.dt, "t_end": args.t_end,
                 "threshold": args.threshold, "wall_time_s": wall,
                 "passed": (not report.blew_up) and report.discrepancy <= args.threshold})
    path = write_json(data, _prefix_path(args.out, "report.json"))
    if report.blew_up:
        raise CliError("E_BLOWUP", "a trajectory blew up during the consistency test", 1)
    _out(f"{spec.generator_id} s={args.s}: discrepancy {report.discrepancy:.3e} "
         f"(threshold {args.threshold:.1e}); report in {path}")
    if not data["passed"]:
        raise CliError("E_THRESHOLD", f"discrepancy {report.discrepancy:.3e} exceeds "
                                      f"{args.threshold:.1e}", 1)
    return 0


# --- symbolic checks ----------------------------------------------------------------

def _parse_or_fail(fn, text, what):
    try:
        return fn(text)
    except JetSyntaxError as exc:
        raise CliError("E_PARSE", f"{what}: {exc}", 2) from None
    except ValueError as exc:
        raise CliError("E_PARSE", f"{what}: {exc}", 2) from None


def cmd_invariance_check(args):
    if args.pde or args.generator:
        if not (args.pde and args.generator):
            raise CliError("E_USAGE", "--pde and --generator must be given together", 2)
        pde = _parse_or_fail(parse_pde, args.pde, "pde")
        results = []
        for text in args.generator:
            v = _parse_or_fail(parse_generator, text, "generator")
            res = invariance_check(v, pde)
            results.append({"name": text, "field": str(v), "residual": str(res.remainder),
                            "tolerance": "exact zero", "passed": res.holds})
    else:
        results = checks.invariance(include_mutants=not args.no_mutants)
        if args.equation:
            results = [r for r in results if r["name"].startswith(args.equation + ".")]
    return _finish_records("invariance-check", results, args.out)


def cmd_closure_check(args):
    if args.generator:
        fields = [_parse_or_fail(parse_generator, g, "generator") for g in args.generator]
        try:
            res = closure_check(fields)
        except ValueError as exc:
            raise CliError("E_USAGE", str(exc), 2) from None
        results = [{"name": "custom algebra closes", "dimension": res.dimension,
                    "structure_constants": checks._constants(res),
                    "witness": None if res.witness is None else str(res.witness),
                    "passed": res.closed}]
    elif args.equation or args.F1 or args.F2:
        names = [args.equation] if args.equation else list(catalog.SYMMETRIC_EQUATIONS)
        F1 = _parse_or_fail(parse_expression, args.F1, "F1") if args.F1 else None
        F2 = _parse_or_fail(parse_expression, args.F2, "F2") if args.F2 else None
        results = []
        for name in names:
            try:
                gens = catalog.generators(name, F1=F1, F2=F2)
            except ValueError as exc:
                code = "E_HOPF" if name.startswith("hopf") else "E_USAGE"
                raise CliError(code, str(exc), 2) from None
            res = closure_check([g.field for g in gens])
            results.append({"name": f"{name} algebra closes", "dimension": res.dimension,
                            "structure_constants": checks._constants(res),
                            "witness": None if res.witness is None else str(res.witness),
                            "passed": res.closed})
    else:
        results = checks.closure()
    return _finish_records("closure-check", results, args.out)


def _finish_records(title, results, out):
    failed = [r for r in results if not r["passed"]]
    for r in results:
        mark = "PASS" if r["passed"] else "FAIL"
        detail = ""
        if isinstance(r.get("residual"), float):
            detail = f" residual={r['residual']:.3e} tol={r['tolerance']:.0e}"
        elif "residual" in r:
            detail = f" remainder={r['residual']}"
        elif "dimension" in r:
            detail = f" dimension={r['dimension']}"
        _out(f"{mark} {r['name']}{detail}")
    if out:
        write_json({"suite": title, "results": results, "passed": not failed},
                   _prefix_path(out, "report.json"))
    if failed:
        raise CliError("E_CHECK_FAILED", f"{len(failed)} of {len(results)} {title} "
                                         "checks failed", 1)
    return 0


def cmd_algebra_check(args):
    rng = checks.rng_from_env(args.seed)
    return _finish_records(f"algebra-check {args.suite}",
                           checks.run_suite(args.suite, rng=rng), args.out)


def cmd_cocycle_check(args):
    rng = checks.rng_from_env(args.seed)
    results = checks.cocycles(gf_samples=args.samples, bt_samples=args.bt_samples,
                              n=args.n, rng=rng)
    return _finish_records("cocycle-check", results, args.out)


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="geoflow", description="Geodesic flows on circle diffeomorphism "
                "groups and their Lie point symmetries.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    equations = list(EQUATIONS)

    s = sub.add_parser("simulate", help="integrate one geodesic equation")
    s.add_argument("--equation", choices=equations)
    s.add_argument("--ic", help="initial condition, an expression in x")
    s.add_argument("--n", type=int)
    s.add_argument("--length", type=float)
    s.add_argument("--dt", type=float)
    s.add_argument("--t-end", dest="t_end", type=float)
    s.add_argument("--scheme", choices=["auto", "rk4", "ifrk4"])
    s.add_argument("--eps", type=float)
    s.add_argument("--store-every", dest="store_every", type=int)
    s.add_argument("--no-dealias", action="store_true")
    s.add_argument("--config", help="file of key = value lines; flags override it")
    s.add_argument("--out", default="geoflow", help="output prefix")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("symmetry-check", help="transform-and-resimulate consistency test")
    s.add_argument("--equation", required=True, choices=equations)
    s.add_argument("--generator", required=True, help="generator id, e.g. v3 or kdv.v3")
    s.add_argument("--s", "--epsilon", dest="s", type=float, default=0.3,
                   help="group parameter")
    s.add_argument("--ic", default=DEFAULT_IC)
    s.add_argument("--n", type=int, default=256)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--t-end", dest="t_end", type=float, default=0.5)
    s.add_argument("--scheme", choices=["auto", "rk4", "ifrk4"], default="auto")
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--threshold", type=float, default=1e-4)
    s.add_argument("--printed", action="store_true",
                   help="use the commonly printed (incorrect) form of the generator")
    s.add_argument("--out", default="geoflow")
    s.set_defaults(func=cmd_symmetry_check)

    s = sub.add_parser("invariance-check", help="exact symbolic invariance test")
    s.add_argument("--equation", choices=list(catalog.SYMMETRIC_EQUATIONS))
    s.add_argument("--pde", help="e.g. 'u_t + 3*u*u_x + eps*u_xxx = 0'")
    s.add_argument("--generator", action="append",
                   help="e.g. 'v = x*d_x + 3*t*d_t - 2*u*d_u' (repeatable)")
    s.add_argument("--no-mutants", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_invariance_check)

    s = sub.add_parser("closure-check", help="closure of the symmetry algebras")
    s.add_argument("--equation", choices=list(catalog.SYMMETRIC_EQUATIONS))
    s.add_argument("--F1", help="free function of t in the Hunter-Saxton algebras")
    s.add_argument("--F2", help="second free function of t")
    s.add_argument("--generator", action="append", help="custom generators (repeatable)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_closure_check)

    s = sub.add_parser("algebra-check", help="randomised algebraic property suites")
    s.add_argument("suite", choices=list(checks.SUITES))
    s.add_argument("--seed", type=int, help="overrides GEOFLOW_SEED")
    s.add_argument("--out")
    s.set_defaults(func=cmd_algebra_check)

    s = sub.add_parser("cocycle-check", help="Gel'fand-Fuchs and Bott-Thurston identities")
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--bt-samples", type=int, default=20)
    s.add_argument("--n", type=int, default=128)
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_cocycle_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.status
    except OSError as exc:
        print(f"error[E_IO]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
