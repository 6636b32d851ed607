"""Command-line entry point: ``ssplab <subcommand> ...``.

Exit codes: 0 success, 2 usage/validation error, 3 numerical failure.
Errors are reported on stderr as ``ssplab: error: kind=<Name> message=<text>``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import NumericalFailure, NotSspAtZero, UsageError

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3

DEFAULT_RESOLUTIONS = {
    "vdp": list(range(15, 44, 4)),
    "decay": [10, 20, 40, 80, 160],
    "adv-spectral": list(range(9, 20, 2)),
    "adv-weno5": list(range(31, 92, 10)),
    "burgers-weno5": list(range(101, 202, 20)),
}

EXAMPLES = {
    "coeff": [
        "ssplab coeff --method ssprk104",
        "ssplab coeff --method plin_eq_s_minus_1/6 --certificate cert.json --format json",
    ],
    "verify": [
        "ssplab verify --method ssprk33 --linear-order 5",
        "ssplab verify --method ssprk104 --format json",
    ],
    "construct": [
        "ssplab construct --family plin-eq-s-1 --stages 6 --out m.json",
        "ssplab construct --named ssprk54 --shu-osher",
    ],
    "optimize": [
        "ssplab optimize --stages 3 --linear-order 3 --order 3 --restarts 2 --seed 1 --out opt.json",
    ],
    "stability": [
        "ssplab stability --method ssprk33 --n-theta 16",
    ],
    "converge": [
        "ssplab converge --problem decay --methods plin_eq_s/1,ssprk33",
        "ssplab converge --problem adv-spectral --methods plin_eq_s/8 --n 9,11,13,15",
    ],
    "tvd-step": [
        "ssplab tvd-step --problem adv-upwind --methods ssprk33 --functional tv",
    ],
    "catalog": [
        "ssplab catalog",
        "ssplab catalog --format json",
    ],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"ssplab: error: kind=UsageError message={message}\n")
        raise SystemExit(EXIT_USAGE)


def _epilog(name):
    return "examples:\n" + "\n".join(f"  {e}" for e in EXAMPLES[name])


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text):
    return [v for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", type=Path, help="write the primary output to this file (atomically)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    method = argparse.ArgumentParser(add_help=False)
    group = method.add_mutually_exclusive_group(required=True)
    group.add_argument("--method", help="catalog method name (see `ssplab catalog`)")
    group.add_argument("--file", type=Path, help="tableau JSON file")

    parser = _Parser(prog="ssplab", description="Explicit SSP Runge-Kutta toolkit.")
    parser.add_argument("--version", action="version", version=f"ssplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help, parents):
        return sub.add_parser(
            name, help=help, description=help, parents=parents, epilog=_epilog(name),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )

    p = add("coeff", "SSP coefficient (radius of absolute monotonicity) of a method.", [common, method])
    p.add_argument("--certificate", type=Path, help="write the canonical Shu-Osher form here")
    p.add_argument("--tol", type=float, default=1e-10, help="bisection tolerance")

    p = add("verify", "Order-condition residuals and certified orders.", [common, method])
    p.add_argument("--linear-order", type=int, default=None, help="highest linear order to check (default s+1)")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("construct", "Write a family or named method as a tableau file.", [common])
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--family", choices=("plin-eq-s", "plin-eq-s-1"))
    g.add_argument("--named", help="ssprk22, ssprk33, ssprk54 or ssprk104")
    p.add_argument("--stages", type=int, help="stage count for --family")
    p.add_argument("--shu-osher", action="store_true", help="write the Shu-Osher form instead of Butcher")

    p = add("optimize", "Search for a method with maximal SSP coefficient.", [common])
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--linear-order", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--inner-iters", type=int, default=3000)

    p = add("stability", "Stability-region boundary as CSV (theta, re, im).", [common, method])
    p.add_argument("--n-theta", type=int, default=256)

    p = add("converge", "Convergence study: error vs. resolution and observed order.", [common])
    p.add_argument("--problem", required=True, choices=sorted(DEFAULT_RESOLUTIONS))
    p.add_argument("--methods", type=_str_list, required=True, help="comma-separated catalog names")
    p.add_argument("--n", type=_int_list, help="comma-separated resolutions")
    p.add_argument("--norm", choices=("l2", "l2-grid", "linf", "first", "pointwise"))
    p.add_argument("--cfl", type=float, help="dt / dx for PDE problems")
    p.add_argument("--t-final", type=float)
    p.add_argument("--error-floor", type=float, default=0.0, help="drop errors at or below this value")

    p = add("tvd-step", "Largest step preserving TV and/or positivity.", [common])
    p.add_argument("--problem", required=True, choices=("adv-upwind", "buckley-leverett"))
    p.add_argument("--methods", type=_str_list, required=True)
    p.add_argument("--functional", choices=("tv", "positivity", "both"), default="both")
    p.add_argument("--n-points", type=int)

    add("catalog", "List built-in methods with (s, p_lin, p, C).", [common])
    return parser


def _load_method(args):
    from .catalog import get_method
    from .tableau import read_tableau

    if args.file is not None:
        tab = read_tableau(args.file)
        return tab.label or args.file.stem, tab
    return args.method, get_method(args.method)


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".10g") if abs(v) >= 1e-3 or v == 0 else format(v, ".6e")
    return "" if v is None else str(v)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, text):
    from .tableau import atomic_write_text

    if args.out is not None:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_coeff(args):
    from .monotonicity import ssp_radius
    from .tableau import write_shu_osher

    name, tab = _load_method(args)
    try:
        res = ssp_radius(tab, tol_bisect=args.tol)
    except NotSspAtZero as exc:
        sys.stderr.write(f"ssplab: diagnostic: {exc}\n")
        radius, effective, cert = 0.0, 0.0, None
    else:
        radius, effective, cert = res.radius, res.effective, res.certificate
    if args.certificate is not None and cert is not None:
        write_shu_osher(cert, args.certificate)
    if args.format == "json":
        text = _json({"method": name, "s": tab.s, "radius": radius, "effective": effective})
    else:
        text = _csv(("method", "s", "radius", "effective"), [(name, tab.s, f"{radius:.6f}", f"{effective:.6f}")])
    _emit(args, text)


def cmd_verify(args):
    from .conditions import order_report

    name, tab = _load_method(args)
    q_max = args.linear_order or tab.s + 1
    rep = order_report(tab, q_max, args.tol)
    rep.label = name
    if args.format == "json":
        text = _json(rep.to_dict())
    else:
        rows = [(f"linear q={q}", r) for q, r in rep.linear_residuals]
        rows += list(rep.nonlinear_residuals.items())
        rows += [
            ("certified_linear_order", rep.certified_linear_order),
            ("certified_nonlinear_order", rep.certified_nonlinear_order),
        ]
        text = _csv(("condition", "value"), rows)
    _emit(args, text)


def cmd_construct(args):
    from .errors import InvalidStageCount
    from .tableau import (
        make_linear_family,
        make_named_shu_osher,
        shu_osher_to_butcher,
        shu_osher_to_json,
        tableau_to_json,
    )

    if args.family:
        if args.stages is None:
            raise InvalidStageCount("--family requires --stages")
        kind = "plin_eq_s" if args.family == "plin-eq-s" else "plin_eq_s_minus_1"
        form = make_linear_family(args.stages, kind)
    else:
        form = make_named_shu_osher(args.named)
    text = shu_osher_to_json(form) if args.shu_osher else tableau_to_json(shu_osher_to_butcher(form))
    _emit(args, text)


def cmd_optimize(args):
    from .optimizer import OptimizationConfig, optimize
    from .tableau import MethodSpec, write_tableau

    spec = MethodSpec(args.stages, args.linear_order, args.order)
    out = optimize(OptimizationConfig(spec, restarts=args.restarts, inner_iters=args.inner_iters, seed=args.seed))
    if args.out is not None:
        write_tableau(out.best, args.out)
    sys.stdout.write(_json(out.to_dict()))


def cmd_stability(args):
    from .stability import boundary_csv, region_boundary, stability_polynomial

    _, tab = _load_method(args)
    theta, z = region_boundary(stability_polynomial(tab), args.n_theta)
    if args.format == "json":
        text = _json({"theta": theta.tolist(), "re": z.real.tolist(), "im": z.imag.tolist()})
    else:
        text = boundary_csv(theta, z)
    _emit(args, text)


def cmd_converge(args):
    from .experiments import ConvergenceStudy, run_convergence

    study = ConvergenceStudy(
        methods=args.methods,
        problem=args.problem,
        resolutions=args.n or DEFAULT_RESOLUTIONS[args.problem],
        norm=args.norm,
        cfl=args.cfl,
        t_final=args.t_final,
        error_floor=args.error_floor,
    )
    res = run_convergence(study)
    for m, order in res.orders.items():
        sys.stderr.write(f"observed order {m}: {order:.3f}\n")
    _emit(args, _json(res.to_dict()) if args.format == "json" else res.to_csv())


def cmd_tvd_step(args):
    from .experiments import step_csv, step_sweep

    functionals = ("tv", "positivity") if args.functional == "both" else (args.functional,)
    results = step_sweep(args.methods, args.problem, functionals, n_points=args.n_points)
    for r in results:
        if not r.bracket_valid:
            sys.stderr.write(f"warning: {r.method}/{r.functional}: upper bracket preserves; result is a lower bound\n")
    text = _json([r.to_dict() for r in results]) if args.format == "json" else step_csv(results)
    _emit(args, text)


def cmd_catalog(args):
    from .catalog import catalog

    entries = catalog()
    if args.format == "json":
        text = _json([e.to_dict() for e in entries])
    else:
        text = _csv(
            ("name", "s", "p_lin", "p", "C", "reference", "source"),
            [(e.name, e.s, e.p_lin, e.p, f"{e.C:.6f}", e.reference, e.source) for e in entries],
        )
    _emit(args, text)


COMMANDS = {
    "coeff": cmd_coeff,
    "verify": cmd_verify,
    "construct": cmd_construct,
    "optimize": cmd_optimize,
    "stability": cmd_stability,
    "converge": cmd_converge,
    "tvd-step": cmd_tvd_step,
    "catalog": cmd_catalog,
}


def _resolved_config(args) -> str:
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())}
    return json.dumps(cfg, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    sys.stderr.write(f"# ssplab {__version__} {args.command} {_resolved_config(args)}\n")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"ssplab: error: kind={type(exc).__name__} message={exc}\n")
        return EXIT_USAGE
    except NumericalFailure as exc:
        sys.stderr.write(f"ssplab: error: kind={type(exc).__name__} message={exc}\n")
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"ssplab: error: kind={type(exc).__name__} message={exc}\n")
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
