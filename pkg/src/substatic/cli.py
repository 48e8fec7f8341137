"""Command-line front end.

Exit codes: 0 when every check passed, 1 when at least one failed, 2 for
usage, configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import models as M
from .config import load_config, model_spec_from_dict, run_check
from .errors import ConfigError, SubstaticError
from .report import CheckReport
from .serialize import emit_series, reports_csv, to_json, write_text

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

SINGLE_CHECKS = ("substatic", "nec", "cd01", "laplacian", "uniformity", "pinching", "lagrange", "heintze-karcher",
                 "first-variation", "boundary-minimizing", "avr", "small-t")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--config", help="JSON config; its model block is used, flags override it")
    g.add_argument("--family", choices=M.FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--m", "--mass", dest="mass", type=float)
    g.add_argument("--q", "--charge", dest="charge", type=float)
    g.add_argument("--lam", "--lambda", dest="lam", type=float)
    g.add_argument("--unit-area", type=float, help="cross-section area (non-round Einstein slice)")


def _surface_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--sphere", type=float, metavar="R", help="coordinate sphere r = R")
    g.add_argument("--coeffs", type=float, nargs="+", metavar="C", help="cosine graph R(theta) = sum c_j cos(j theta)")


def _output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="substatic", description="Checks for rotationally symmetric substatic triples.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("model", help="build a model and print its domain")
    _model_args(p)

    p = sub.add_parser("check", help="run one check on a model")
    p.add_argument("name", choices=SINGLE_CHECKS)
    _model_args(p)
    p.add_argument("--r0", type=float, help="base sphere radius")
    p.add_argument("--grid", type=float, nargs=2, metavar=("START", "STOP"))
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--k", type=float, default=0.5, help="pinching exponent")
    p.add_argument("--sphere", type=float, metavar="R")
    p.add_argument("--coeffs", type=float, nargs="+", metavar="C")
    p.add_argument("--tol", type=float)
    _output_args(p)

    p = sub.add_parser("compare", help="area/volume comparison series along optical level sets")
    _model_args(p)
    base = p.add_mutually_exclusive_group()
    base.add_argument("--r0", type=float, help="coordinate sphere base")
    base.add_argument("--point", action="store_true", help="centre of a capped model")
    p.add_argument("--eta0", type=float)
    p.add_argument("--t-max", type=float, default=1e3)
    p.add_argument("--t-min", type=float, default=1e-2)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--k", type=float, help="volume exponent (default n)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o")

    for name in ("willmore", "isoperimetric"):
        p = sub.add_parser(name, help=f"{name} inequality on a surface")
        _model_args(p)
        _surface_args(p)
        p.add_argument("--avr", help="number, 'closed-form', or omit for a certified estimate")
        _output_args(p)

    p = sub.add_parser("ends", help="end classification, uniformity and pinching")
    _model_args(p)
    p.add_argument("--k", type=float, default=0.5)
    _output_args(p)

    p = sub.add_parser("geodesic", help="integrate an optical geodesic")
    _model_args(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True, help="angle from the radial direction")
    p.add_argument("--length", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--every", type=int, default=100, help="keep every k-th sample in the table")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o")

    p = sub.add_parser("suite", help="run the acceptance suite, or the checks listed in a config")
    p.add_argument("--config")
    p.add_argument("--criteria", type=int, nargs="+")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--output", "-o")
    return parser


def _model(args) -> M.ProfileTriple:
    doc: dict = {}
    if getattr(args, "config", None):
        doc = dict(_config_model_doc(args.config))
    for key, attr in (("family", "family"), ("n", "n"), ("mass", "mass"), ("charge", "charge"), ("lambda", "lam")):
        val = getattr(args, attr, None)
        if val is not None:
            doc[key] = val
    if getattr(args, "unit_area", None) is not None:
        doc["cross_section"] = {"kind": "einstein", "unit_area": args.unit_area}
    if "family" not in doc:
        raise ConfigError("a model needs --family (or a config)")
    return M.build_model(model_spec_from_dict(doc))


def _config_model_doc(path: str) -> dict:
    import json
    from pathlib import Path

    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    load_config(path)  # full validation
    return doc["model"]


def _surface(args):
    from .surfaces import RadialGraphSurface

    if args.sphere is not None:
        return RadialGraphSurface.sphere(args.sphere)
    if args.coeffs:
        return RadialGraphSurface.cosine(args.coeffs)
    raise ConfigError("a surface is needed (--sphere or --coeffs)")


def _avr_arg(text):
    if text is None or text == "closed-form":
        return text
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"--avr must be a number or 'closed-form', got {text!r}") from exc


def _emit_reports(reports: list[CheckReport], fmt: str, path: str | None, extra: dict | None = None) -> int:
    if fmt == "csv":
        text = reports_csv(reports)
    else:
        payload = {"passed": all(r.passed for r in reports), "reports": reports}
        if extra:
            payload.update(extra)
        text = to_json(payload)
    if path:
        write_text(text, path)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _cmd_model(args) -> int:
    tr = _model(args)
    info = {
        "family": tr.family,
        "n": tr.n,
        "r_min": tr.r_min,
        "r_max": tr.r_max,
        "has_horizon": tr.has_horizon,
        "capped": tr.capped,
        "boundary_area": tr.boundary_area(),
        "unit_area": tr.unit_area,
    }
    sys.stdout.write(to_json(info))
    return EXIT_OK


def _cmd_check(args) -> int:
    tr = _model(args)
    name = args.name
    doc: dict = {}
    if args.grid:
        doc["grid"] = {"start": args.grid[0], "stop": args.grid[1], "num": args.points}
    if args.r0 is not None:
        doc["r0"] = args.r0
    if args.sphere is not None:
        doc["surface"] = {"type": "sphere", "r": args.sphere}
    elif args.coeffs:
        doc["surface"] = {"type": "cosine", "coeffs": args.coeffs}
    mapping = {
        "laplacian": "laplacian_comparison",
        "pinching": "f_pinching",
        "lagrange": "lagrange_multiplier",
        "heintze-karcher": "heintze_karcher",
        "first-variation": "first_variation",
        "boundary-minimizing": "boundary_minimizing",
        "small-t": "small_t_limit",
    }
    cname = mapping.get(name, name)
    doc["name"] = cname
    if cname == "f_pinching":
        doc["k"] = args.k
        if args.grid:
            doc["window"] = list(args.grid)
    if cname == "boundary_minimizing":
        doc["surfaces"] = [doc.pop("surface")] if "surface" in doc else []
    tolerances = {cname: args.tol} if args.tol else {}
    reports, _ = run_check(tr, doc, tolerances)
    return _emit_reports(reports, args.format, args.output)


def _cmd_compare(args) -> int:
    from .functionals import Base, volume_functional

    tr = _model(args)
    if args.point:
        base = Base.point()
    elif args.r0 is not None:
        base = Base.sphere(args.r0, args.eta0)
    else:
        base = Base.point() if tr.capped else Base.sphere(max(2.0 * tr.r_min, 1.0), args.eta0)
    t = np.geomspace(args.t_min, args.t_max, args.points) if args.points > 0 else np.empty(0)
    if t.size:
        series = volume_functional(tr, base, t, args.k)
    else:
        from .functionals import ComparisonSeries

        series = ComparisonSeries(base, t, t, t, args.k, t, t, True, 0.0, tr)
    text = emit_series(series, args.format, args.output)
    if not args.output:
        sys.stdout.write(text)
    return EXIT_OK if series.monotone else EXIT_FAIL


def _cmd_inequality(args) -> int:
    from .inequalities import isoperimetric_check, willmore_check

    tr = _model(args)
    fn = willmore_check if args.command == "willmore" else isoperimetric_check
    rep = fn(tr, _surface(args), avr=_avr_arg(args.avr))
    return _emit_reports([rep], args.format, args.output)


def _cmd_ends(args) -> int:
    tr = _model(args)
    end = M.classify_end(tr)
    reports = [CheckReport.build("classify_end", 0.0 if end.kind == "undetermined" else 1.0, 1.0, 0.0,
                                 context={"kind": end.kind, "rho_total": end.rho_total})]
    if end.kind == "f-complete":
        reports.append(M.check_uniformity_criteria(tr))
        lo = 2.0 * max(tr.r_min, 1.0)
        reports.append(M.check_f_pinching(tr, args.k, (lo, 50.0 * lo)))
    return _emit_reports(reports, args.format, args.output, {"end": end.kind})


def _cmd_geodesic(args) -> int:
    from .conformal import GeodesicState, geodesic_integrate
    from .errors import LeftDomain

    tr = _model(args)
    start = GeodesicState.from_angle(tr, args.r, 0.0, args.alpha)
    left = False
    try:
        traj = geodesic_integrate(tr, start, args.length, args.step)
    except LeftDomain as exc:
        traj, left = exc.trajectory, True
    e = traj.energy()
    keep = slice(None, None, max(1, args.every))
    cols = {
        "rho": traj.rho[keep],
        "r": traj.r[keep],
        "phi": traj.phi[keep],
        "eta": traj.eta[keep],
        "h_over_f": traj.h_over_f()[keep],
    }
    if args.format == "csv":
        from .serialize import _csv, fmt_float

        rows = ([fmt_float(cols[c][i]) for c in cols] for i in range(cols["rho"].size))
        text = _csv(tuple(cols), rows)
    else:
        text = to_json({"left_domain": left, "energy_drift": float(np.max(np.abs(e - e[0]))), "samples": cols})
    if args.output:
        write_text(text, args.output)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_suite(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        tr = M.build_model(cfg.model)
        reports: list[CheckReport] = []
        series_out = None
        for check in cfg.checks:
            reps, series = run_check(tr, check, cfg.tolerances)
            reports.extend(reps)
            series_out = series if series is not None else series_out
        fmt = args.format or cfg.output.get("format", "json")
        path = args.output or cfg.output.get("path")
        if fmt == "csv" and series_out is not None:
            emit_series(series_out, "csv", path)
            if not path:
                sys.stdout.write(emit_series(series_out, "csv"))
            return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
        return _emit_reports(reports, fmt, path)

    from .acceptance import REGISTRY, run_suite

    unknown = [k for k in (args.criteria or []) if k not in REGISTRY]
    if unknown:
        raise ConfigError(f"unknown criteria {unknown}")
    results = run_suite(args.criteria)
    for res in results:
        sys.stderr.write(res.line() + "\n")
    ok = all(r.passed for r in results)
    if args.format == "csv":
        text = reports_csv([rep for res in results for rep in res.reports])
    else:
        text = to_json({"passed": ok, "criteria": [r.to_dict() for r in results]})
    if args.output:
        write_text(text, args.output)
    elif args.format:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "model": _cmd_model,
    "check": _cmd_check,
    "compare": _cmd_compare,
    "willmore": _cmd_inequality,
    "isoperimetric": _cmd_inequality,
    "ends": _cmd_ends,
    "geodesic": _cmd_geodesic,
    "suite": _cmd_suite,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (SubstaticError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())

