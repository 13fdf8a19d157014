"""Command line: ``pinchlab {gen, analyze, sweep, verify}``.

Exit codes: 0 ok, 2 configuration error, 3 numeric failure, 4 I/O error.
Errors print a single ``error[<kind>]: <message>`` line on stderr.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import PinchLabError
from .mesh import (make_clifford_torus, make_geodesic_sphere, make_perturbed_sphere, north_pole, read_s4off,
                   write_s4off)
from .operators import assemble, dump_coo
from .pinching import DEFAULT_TOL, analyze
from .report import report_json, sweep, sweep_csv

EXIT_KIND = {0: "ok", 2: "config", 3: "numeric", 4: "io"}


class ConfigError(PinchLabError):
    exit_code = 2


def _add_family(p, deltas_many=False):
    p.add_argument("--family", choices=["sphere", "clifford", "perturbed"], default="sphere")
    p.add_argument("--radius", type=float, default=np.pi / 4, help="geodesic radius in radians")
    if deltas_many:
        p.add_argument("--delta", type=float, nargs="+", default=[0.1, 0.05, 0.025, 0.0125])
    else:
        p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--mode", type=int, default=2)
    p.add_argument("--res", type=int, nargs=2, metavar=("A", "B"), default=[64, 64])
    p.add_argument("--refine", type=int, default=4)


def _add_numerics(p):
    p.add_argument("--q", type=float, default=4.0, help="exponent of ||B||_q (must exceed n = 2)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative slack for inequality verdicts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mass", choices=["lumped", "consistent"], default="lumped")
    p.add_argument("--sphere-samples", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="pinchlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a family mesh as S4OFF")
    _add_family(g)
    g.add_argument("--out", required=True)

    a = sub.add_parser("analyze", help="full pinching report as JSON")
    _add_family(a)
    _add_numerics(a)
    a.add_argument("--mesh", help="S4OFF file; overrides --family")
    a.add_argument("--out", help="report path (stdout if omitted)")
    a.add_argument("--dump-matrices", metavar="PREFIX", help="also write PREFIX.stiffness.coo and PREFIX.mass.coo")

    s = sub.add_parser("sweep", help="perturbation sweep as CSV")
    _add_family(s, deltas_many=True)
    _add_numerics(s)
    s.add_argument("--out", help="CSV path (stdout if omitted)")

    v = sub.add_parser("verify", help="run the acceptance checks")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL,
                   help="discretization tolerance; scales every discretization-bound check by tol / 0.05")
    v.add_argument("--mesh", action="append", default=[], help="also validate this S4OFF file")
    v.add_argument("--only", nargs="+", help="run only the named checks")
    return parser


def _validate(args):
    if getattr(args, "q", 3.0) <= 2:
        raise ConfigError(f"cli: --q must exceed n = 2, got {args.q}")
    if getattr(args, "tol", 1.0) <= 0:
        raise ConfigError("cli: --tol must be positive")
    if getattr(args, "refine", 0) < 0:
        raise ConfigError("cli: --refine must be >= 0")


def make_mesh(args):
    c = north_pole()
    if args.family == "sphere":
        return make_geodesic_sphere(c, args.radius, args.refine)
    if args.family == "clifford":
        return make_clifford_torus(1, 1, *args.res)
    return make_perturbed_sphere(c, args.radius, args.delta, args.mode, args.refine)


def _emit(text, path):
    if path:
        tmp = path + ".part"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    else:
        sys.stdout.write(text)


def cmd_gen(args):
    write_s4off(make_mesh(args), args.out)
    return 0


def cmd_analyze(args):
    mesh = read_s4off(args.mesh) if args.mesh else make_mesh(args)
    result = analyze(mesh, q=args.q, tol=args.tol, mass=args.mass, seed=args.seed,
                     sphere_samples=args.sphere_samples)
    if args.dump_matrices:
        ops = result.ops if result.ops.mass_kind == args.mass else assemble(mesh, args.mass)
        dump_coo(ops.stiffness, args.dump_matrices + ".stiffness.coo")
        dump_coo(ops.mass, args.dump_matrices + ".mass.coo")
    _emit(report_json(result.report) + "\n", args.out)
    return 0


def cmd_sweep(args):
    if args.family != "perturbed" and args.family != "sphere":
        raise ConfigError("cli: sweep perturbs a geodesic sphere; use --family perturbed")
    rows, summary = sweep(args.delta, R=args.radius, mode=args.mode, refine=args.refine, q=args.q,
                          tol=args.tol, mass=args.mass, seed=args.seed)
    _emit(sweep_csv(rows, summary), args.out)
    return 0


def cmd_verify(args):
    from .acceptance import CHECKS, run_all

    unknown = [n for n in (args.only or []) if n not in CHECKS]
    if unknown:
        raise ConfigError(f"cli: unknown check(s) {unknown}; available: {list(CHECKS)}")
    results = run_all(args.tol / DEFAULT_TOL, args.only, args.mesh)
    for r in results:
        print(r.line(), flush=True)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return 3 if failed else 0


COMMANDS = {"gen": cmd_gen, "analyze": cmd_analyze, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except PinchLabError as exc:
        code, msg = exc.exit_code, str(exc)
    except OSError as exc:
        code, msg = 4, f"{exc.strerror or exc}: {exc.filename}" if exc.filename else str(exc)
    except (ValueError, ArithmeticError) as exc:
        code, msg = 3, str(exc)
    msg = msg.replace("\n", " ")
    print(f"error[{EXIT_KIND[code]}]: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
