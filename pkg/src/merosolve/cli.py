"""Command-line front end.

Subcommands cover the full pipeline: ``analyze`` (balance + series +
closed-form + claims), ``series``, ``closed-form``, ``integrate``,
``probe``, ``verify-exact`` and ``report`` (everything, including the
exact-solution lab and numeric probes).  Output is deterministic JSON by
default; ``--format text`` gives a summary, and ``integrate`` also offers
CSV.  Exit codes: 0 success, 2 input error, 3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import report as rpt
from .errors import (
    DegenerateFamilyError,
    InternalInconsistencyError,
    MerosolveError,
)
from .numeric import ComplexPath, EpWidthOde, LinearOscillatorOde, integrate
from .scalars import parse_complex_literal


def _add_ode_options(p):
    p.add_argument("--ode", default=None,
                   help="ODE text, or @file to read it from a file "
                        f"(default: {rpt.DEFAULT_ODE_TEXT!r})")
    p.add_argument("--param", action="append", default=[],
                   metavar="NAME=VALUE",
                   help="bind a parameter (repeatable); integer/fraction "
                        "values stay exact")
    p.add_argument("--order", type=int, default=12, metavar="K",
                   help="series truncation order (default 12)")
    p.add_argument("--branch-max", type=int, default=4, metavar="N",
                   help="largest branch order searched (default 4)")
    p.add_argument("--window", type=int, default=6, metavar="M",
                   help="numerator window for candidate exponents (default 6)")
    p.add_argument("--free", action="append", default=[], metavar="R=VALUE",
                   help="free-parameter value injected at resonance R "
                        "(repeatable)")


def _add_output_options(p, formats=("json", "text")):
    p.add_argument("--format", choices=formats, default="json")
    p.add_argument("--out", default=None, help="output file (default stdout)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="merosolve",
        description="Movable-singularity analysis and exact-solution "
                    "verification for autonomous nonlinear ODEs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, doc in (
        ("analyze", "balance families, series, candidates and claims"),
        ("series", "local series per family"),
        ("closed-form", "closed-form candidates and the period formula"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_ode_options(p)
        _add_output_options(p)

    p = sub.add_parser("integrate", help="integrate along a complex path")
    p.add_argument("--system", choices=("ep", "linear"), default="ep")
    p.add_argument("--omega", default="1")
    p.add_argument("--ic", default="1,0", metavar="VALUE,SLOPE")
    p.add_argument("--path", default="0:10", metavar="A:B[:C...]")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_output_options(p, formats=("json", "csv", "text"))

    p = sub.add_parser("probe", help="locate a singular time and fit the "
                                     "local exponent")
    p.add_argument("--omega", default="1")
    p.add_argument("--ic", default="1,0", metavar="VALUE,SLOPE")
    p.add_argument("--path", default="0:0.999i", metavar="A:B[:C...]")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_output_options(p)

    p = sub.add_parser("verify-exact", help="closed-form laboratory checks")
    p.add_argument("--case",
                   choices=("pinney", "from-ic", "invariant", "third-order",
                            "riccati", "all"),
                   default="all")
    p.add_argument("--A", default="2")
    p.add_argument("--B", default="1")
    p.add_argument("--C", default="1")
    p.add_argument("--omega", default="1")
    p.add_argument("--alpha0", default="1")
    p.add_argument("--dalpha0", default="0")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_output_options(p)

    p = sub.add_parser("report", help="full pipeline report")
    _add_ode_options(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--ic", default="1,0", metavar="VALUE,SLOPE",
                   help="initial data for the numeric probes")
    _add_output_options(p)
    return parser


def _parse_params(pairs):
    env = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--param needs NAME=VALUE, got {pair!r}")
        name, _, value = pair.partition("=")
        env[name.strip()] = parse_complex_literal(value)
    return env


def _parse_free(pairs):
    free = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--free needs R=VALUE, got {pair!r}")
        key, _, value = pair.partition("=")
        free[Fraction(key.strip())] = parse_complex_literal(value)
    return free


def _parse_ic(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--ic needs VALUE,SLOPE, got {text!r}")
    return (
        complex(parse_complex_literal(parts[0])),
        complex(parse_complex_literal(parts[1])),
    )


def _parse_path(text):
    parts = [p for p in text.split(":") if p.strip()]
    if len(parts) < 2:
        raise ValueError(f"--path needs at least two waypoints, got {text!r}")
    return ComplexPath([complex(parse_complex_literal(p)) for p in parts])


def _resolve_ode(args):
    ode_text = args.ode
    env = _parse_params(args.param)
    if ode_text is None:
        ode_text = rpt.DEFAULT_ODE_TEXT
        env.setdefault("omega", parse_complex_literal("1"))
    elif ode_text.startswith("@"):
        ode_text = Path(ode_text[1:]).read_text(encoding="utf-8").strip()
    return ode_text, env


def _emit(args, text):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _render(payload, fmt):
    if fmt == "json":
        return rpt.to_json(payload) + "\n"
    return render_text(payload) + "\n"


def render_text(payload, indent: int = 0) -> str:
    """Plain-text summary of any payload section."""
    lines = []
    pad = "  " * indent

    def walk(obj, key, depth):
        prefix = "  " * depth
        if isinstance(obj, dict):
            if key is not None:
                lines.append(f"{prefix}{key}:")
            for k, v in obj.items():
                walk(v, k, depth + (0 if key is None else 1))
        elif isinstance(obj, list):
            if not obj:
                lines.append(f"{prefix}{key}: []")
                return
            lines.append(f"{prefix}{key}:")
            for item in obj:
                if isinstance(item, (dict, list)):
                    walk(item, "-", depth + 1)
                else:
                    lines.append(f"{prefix}  - {item}")
        else:
            lines.append(f"{prefix}{key}: {obj}")

    walk(payload, None, indent)
    return pad + ("\n".join(lines) if lines else "")


def _cmd_analysis_like(args):
    ode_text, env = _resolve_ode(args)
    free = _parse_free(args.free)
    payload = rpt.analyze_payload(
        ode_text, env, K=args.order, n_max=args.branch_max,
        window=args.window, free=free,
    )
    if args.command == "series":
        payload = {
            "schema_version": rpt.SCHEMA_VERSION,
            "command": "series",
            "ode": payload["ode"],
            "series": payload["series"],
        }
    elif args.command == "closed-form":
        payload = {
            "schema_version": rpt.SCHEMA_VERSION,
            "command": "closed-form",
            "ode": payload["ode"],
            "closed_form": payload["closed_form"],
        }
    return payload


def _cmd_integrate(args):
    omega = complex(parse_complex_literal(args.omega))
    ode = EpWidthOde(omega) if args.system == "ep" else LinearOscillatorOde(omega)
    traj = integrate(ode, _parse_ic(args.ic), _parse_path(args.path),
                     tol=args.tol)
    if args.format == "csv":
        rows = ["re_t,im_t,re_value,im_value,re_slope,im_slope"]
        rows += [",".join(format(v, ".17g") for v in row)
                 for row in traj.to_rows()]
        return "\n".join(rows) + "\n"
    payload = {
        "schema_version": rpt.SCHEMA_VERSION,
        "command": "integrate",
        "system": ode.name,
        "omega": rpt.complex_json(omega),
        "tol": args.tol,
        "halted": traj.halted,
        "halt_reason": traj.halt_reason,
        "stats": {
            "accepted": traj.stats["accepted"],
            "rejected": traj.stats["rejected"],
            "rhs_evals": traj.stats["rhs_evals"],
        },
        "samples": traj.to_rows(),
    }
    return payload


def _cmd_probe(args):
    omega = parse_complex_literal(args.omega)
    payload = rpt.probe_payload(
        complex(omega), _parse_ic(args.ic), _parse_path(args.path),
        tol=args.tol,
    )
    return {
        "schema_version": rpt.SCHEMA_VERSION,
        "command": "probe",
        "omega": rpt.complex_json(complex(omega)),
        **payload,
    }


def _cmd_verify_exact(args):
    omega = complex(parse_complex_literal(args.omega))
    results = rpt.exactlab_results(
        omega=omega,
        params=(
            complex(parse_complex_literal(args.A)),
            complex(parse_complex_literal(args.B)),
            complex(parse_complex_literal(args.C)),
        ),
        tol=args.tol,
    )
    claims = rpt.exactlab_claims(results)
    case_map = {
        "pinney": ("pinney",),
        "from-ic": ("width_from_ics",),
        "invariant": ("invariant",),
        "third-order": ("third_order",),
        "riccati": ("riccati",),
    }
    if args.case != "all":
        keys = ("omega",) + case_map[args.case]
        results = {k: results[k] for k in keys}
    return {
        "schema_version": rpt.SCHEMA_VERSION,
        "command": "verify-exact",
        "case": args.case,
        "results": results,
        "claims": claims,
    }


def _cmd_report(args):
    ode_text, env = _resolve_ode(args)
    free = _parse_free(args.free)
    return rpt.full_report_payload(
        ode_text, env, K=args.order, n_max=args.branch_max,
        window=args.window, free=free, tol=args.tol, ic=_parse_ic(args.ic),
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.command in ("analyze", "series", "closed-form"):
            payload = _cmd_analysis_like(args)
        elif args.command == "integrate":
            payload = _cmd_integrate(args)
            if isinstance(payload, str):  # csv already rendered
                _emit(args, payload)
                return 0
        elif args.command == "probe":
            payload = _cmd_probe(args)
        elif args.command == "verify-exact":
            payload = _cmd_verify_exact(args)
        elif args.command == "report":
            payload = _cmd_report(args)
        else:  # pragma: no cover
            raise ValueError(f"unknown command {args.command!r}")
        _emit(args, _render(payload, args.format))
        return 0
    except (InternalInconsistencyError, DegenerateFamilyError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 3
    except (MerosolveError, ValueError, OSError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
