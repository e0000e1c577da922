"""Command-line front end: ``herglotz-sl {spectrum,greens,resolvent,verify,fd} FILE``.

Exit codes: 0 success, 1 a verified invariant failed, 2 invalid input,
3 numerical failure (including a spectral parameter that is an eigenvalue).
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path

import numpy as np

from .errors import EigenvalueLambda, HerglotzSLError, NumericalFailure, ProblemValidationError
from .problemfile import load_problem_file, load_rhs_file

EXIT_OK, EXIT_INVARIANT, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3
OUT_ENV = "HERGLOTZ_SL_OUT"


def _fmt(x, precision):
    s = format(float(x) + 0.0, f".{precision}g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def _out_dir(args, pf):
    """Flag, then problem file, then environment, then the working directory."""
    path = args.out_dir or pf.output_directory or os.environ.get(OUT_ENV) or "."
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_lambda(text):
    try:
        val = complex(text.replace(" ", ""))
    except ValueError:
        raise ProblemValidationError("--lambda", f"cannot parse {text!r}") from None
    return val.real if val.imag == 0 else val


def _scan_options(args, pf):
    from .spectrum import ScanOptions

    opts = pf.scan
    changes = {}
    if args.window is not None:
        changes["window"] = tuple(args.window)
    if args.grid is not None:
        changes["grid_points_per_unit"] = args.grid
    if args.tol is not None:
        changes["refine_tol"] = args.tol
    if getattr(args, "parallel", None):
        changes["workers"] = args.parallel
    if not changes:
        return opts
    fields = dict(window=opts.window, grid_points_per_unit=opts.grid_points_per_unit,
                  refine_tol=opts.refine_tol, pole_exclusion_radius=opts.pole_exclusion_radius,
                  workers=opts.workers)
    fields.update(changes)
    try:
        return ScanOptions(**fields)
    except ValueError as exc:
        raise ProblemValidationError("scan", str(exc)) from None


def cmd_spectrum(args, pf):
    from .spectrum import find_spectrum

    opts = _scan_options(args, pf)
    records = find_spectrum(pf.problem, opts)
    p = pf.precision
    path = _out_dir(args, pf) / "spectrum.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "multiplicity", "classification", "residual"])
        for r in records:
            w.writerow([_fmt(r.lam, p), r.multiplicity, r.classification.value,
                        format(r.residual, ".3e")])
    print(f"{len(records)} eigenvalue(s) in window {opts.window}:")
    for r in records:
        flag = "  (ambiguous pole case)" if r.ambiguous else ""
        print(f"  {_fmt(r.lam, p):>22}  mult {r.multiplicity}  {r.classification.value}{flag}")
    print(f"wrote {path}")
    return EXIT_OK


def _interface_free_points(problem, n):
    left = np.linspace(-problem.a, 0.0, n + 1)[:-1]
    right = np.linspace(0.0, problem.b, n + 1)[1:]
    return np.concatenate([left, right])


def cmd_greens(args, pf):
    from .greens import greens_matrix

    lam = _parse_lambda(args.lam)
    if args.grid_n < 2:
        raise ProblemValidationError("--grid-n", "need at least 2 points per side")
    xs = _interface_free_points(pf.problem, args.grid_n)
    G = greens_matrix(pf.problem, lam, xs, xs)
    p = pf.precision
    path = _out_dir(args, pf) / "greens.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "t", "re_G", "im_G"])
        for i, x in enumerate(xs):
            for j, t in enumerate(xs):
                w.writerow([_fmt(x, p), _fmt(t, p), _fmt(G[i, j].real, p), _fmt(G[i, j].imag, p)])
    print(f"Green's function at lambda={lam} on {xs.size}x{xs.size} points; wrote {path}")
    return EXIT_OK


def cmd_resolvent(args, pf):
    from .grid import Mesh
    from .resolvent import resolvent_apply, round_trip_defect

    lam = _parse_lambda(args.lam)
    h = args.mesh_h or pf.mesh_h or 1e-3
    mesh = Mesh.for_problem(pf.problem, h=h)
    H = load_rhs_file(args.rhs, pf.problem, mesh)
    F = resolvent_apply(pf.problem, lam, H)
    defect = round_trip_defect(pf.problem, lam, H, F) if H.norm() > 0 else 0.0
    p = pf.precision
    out = _out_dir(args, pf)
    with open(out / "resolvent.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "re_f", "im_f"])
        xs, ys = F.f.values()
        for x, y in zip(xs, ys):
            w.writerow([_fmt(x, p), _fmt(y.real, p), _fmt(y.imag, p)])
    with open(out / "vectors.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["block", "index", "re", "im"])
        for name, vec in (("f1", F.f1), ("f2", F.f2)):
            for k, y in enumerate(vec):
                w.writerow([name, k + 1, _fmt(y.real, p), _fmt(y.imag, p)])
    print(f"resolvent at lambda={lam}: round-trip defect {defect:.3e}")
    print(f"wrote {out / 'resolvent.csv'} and {out / 'vectors.csv'}")
    return EXIT_OK


def cmd_fd(args, pf):
    from .fd import assemble_fd, fd_spectrum

    h = args.mesh_h or pf.mesh_h or math.pi / 200
    op = assemble_fd(pf.problem, h)
    vals = fd_spectrum(op, args.count)
    path = _out_dir(args, pf) / "fd_spectrum.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "lambda"])
        for k, v in enumerate(vals):
            w.writerow([k + 1, _fmt(v, pf.precision)])
    print(f"{vals.size} oracle eigenvalue(s), {op.size} unknowns; wrote {path}")
    return EXIT_OK


_INPUT_INVARIANTS = {
    "residue_squares": "residue squares positive",
    "poles": "poles strictly increasing",
    "slope": "slope nonnegative",
}


def cmd_verify(args, pf):
    from .checks import run_checks

    opts = _scan_options(args, pf)
    results = run_checks(pf.problem, opts.window, args.mesh_h or pf.mesh_h)
    return _print_table(results)


def _print_table(results):
    width = max(len(r.name) for r in results)
    print(f"{'invariant':<{width}}  {'value':>10}  {'tolerance':>10}  result")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        note = f"  {r.note}" if r.note else ""
        print(f"{r.name:<{width}}  {r.value:>10.3e}  {r.tolerance:>10.3e}  {status}{note}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failed: " + ", ".join(failed))
        return EXIT_INVARIANT
    print("all invariants hold")
    return EXIT_OK


def _verify_input_failure(exc):
    """Report a coupling-invariant violation found while loading, as a failed check."""
    from .checks import CheckResult

    key = exc.field.rsplit(".", 1)[-1]
    name = _INPUT_INVARIANTS[key]
    return _print_table([CheckResult(f"{name} ({exc.field})", math.nan, math.nan, False, str(exc))])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="herglotz-sl",
        description="Eigenvalues, Green's functions and resolvents for interface "
                    "Sturm-Liouville problems with rational eigenparameter couplings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="problem file (TOML)")
        p.add_argument("--out-dir", help=f"output directory (default: file setting, ${OUT_ENV}, or .)")
        p.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"))
        p.add_argument("--grid", type=int, help="scan samples per unit of lambda")
        p.add_argument("--tol", type=float, help="root refinement tolerance")
        p.add_argument("--mesh-h", type=float, help="mesh step for grids and the oracle")
        p.add_argument("--parallel", type=int, metavar="N", help="worker processes for scans")
        return p

    common(sub.add_parser("spectrum", help="eigenvalues with multiplicity")).set_defaults(func=cmd_spectrum)
    g = common(sub.add_parser("greens", help="Green's function on a product grid"))
    g.add_argument("--lambda", dest="lam", required=True)
    g.add_argument("--grid-n", type=int, default=20, help="points per side")
    g.set_defaults(func=cmd_greens)
    r = common(sub.add_parser("resolvent", help="apply the resolvent to a right-hand side"))
    r.add_argument("--lambda", dest="lam", required=True)
    r.add_argument("--rhs", required=True, help="right-hand side file (TOML)")
    r.set_defaults(func=cmd_resolvent)
    common(sub.add_parser("verify", help="run the invariant suite")).set_defaults(func=cmd_verify)
    f = common(sub.add_parser("fd", help="discrete-operator oracle spectrum"))
    f.add_argument("--count", type=int, default=20)
    f.set_defaults(func=cmd_fd)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        try:
            pf = load_problem_file(args.file)
        except ProblemValidationError as exc:
            key = exc.field.rsplit(".", 1)[-1]
            if args.command == "verify" and key in _INPUT_INVARIANTS:
                return _verify_input_failure(exc)
            raise
        return args.func(args, pf)
    except ProblemValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EigenvalueLambda, NumericalFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except HerglotzSLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(exc, ValueError) else EXIT_NUMERICAL
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
