"""Suite configuration: schema, parsing into model specs, and check dispatch.

A config is a JSON document::

    {
      "schema": 1,
      "model": {"family": "schwarzschild", "n": 3, "mass": 0.5},
      "checks": [{"name": "willmore", "surface": {"type": "sphere", "r": 3.0}}],
      "tolerances": {"willmore": 1e-9},
      "output": {"format": "json", "path": "report.json"}
    }

Unknown keys and check names are rejected when the document is parsed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import models as M
from .errors import ConfigError
from .report import CheckReport

CHECK_NAMES = (
    "substatic",
    "nec",
    "cd01",
    "laplacian_comparison",
    "area_series",
    "volume_series",
    "avr",
    "avr_base_independence",
    "small_t_limit",
    "willmore",
    "isoperimetric",
    "heintze_karcher",
    "boundary_minimizing",
    "lagrange_multiplier",
    "isoperimetric_profile",
    "first_variation",
    "classify_end",
    "uniformity",
    "f_pinching",
)

_number = {"type": "number"}
_surface = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"type": {"const": "sphere"}, "r": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["type", "r"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "cosine"},
                "coeffs": {"type": "array", "items": _number, "minItems": 1},
            },
            "required": ["type", "coeffs"],
            "additionalProperties": False,
        },
    ]
}
_base = {
    "oneOf": [
        {"type": "string", "const": "point"},
        {"type": "number", "exclusiveMinimum": 0},
        {
            "type": "object",
            "properties": {"r0": {"type": "number", "exclusiveMinimum": 0}, "eta0": {"type": "number", "exclusiveMinimum": 0}},
            "required": ["r0"],
            "additionalProperties": False,
        },
    ]
}

MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "family": {"enum": list(M.FAMILIES)},
        "n": {"type": "integer", "minimum": 3},
        "lambda": _number,
        "mass": {"type": "number", "minimum": 0},
        "charge": _number,
        "cross_section": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["round-sphere", "einstein"]},
                "unit_area": {"type": "number", "exclusiveMinimum": 0},
                "einstein_const": _number,
            },
            "additionalProperties": False,
        },
        "profile_table": {
            "type": "array",
            "items": {"type": "array", "items": _number, "minItems": 3, "maxItems": 3},
        },
    },
    "required": ["family"],
    "additionalProperties": False,
}

CHECK_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"enum": list(CHECK_NAMES)},
        "surface": _surface,
        "surfaces": {"type": "array", "items": _surface, "minItems": 1},
        "bump": {"type": "array", "items": _number, "minItems": 1},
        "grid": {
            "type": "object",
            "properties": {
                "start": {"type": "number", "exclusiveMinimum": 0},
                "stop": {"type": "number", "exclusiveMinimum": 0},
                "num": {"type": "integer", "minimum": 2},
            },
            "required": ["start", "stop"],
            "additionalProperties": False,
        },
        "r": {"type": "array", "items": _number, "minItems": 1},
        "r0": {"type": "number", "exclusiveMinimum": 0},
        "base": _base,
        "bases": {"type": "array", "items": _base, "minItems": 2},
        "t_grid": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "k": {"type": "number", "exclusiveMinimum": 0},
        "V_grid": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "avr": {"oneOf": [{"type": "number", "minimum": 0}, {"const": "closed-form"}]},
        "window": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 2, "maxItems": 2},
        "path": {"enum": ["closed", "fd"]},
        "samples": {"type": "integer", "minimum": 1},
    },
    "required": ["name"],
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "properties": {
        "schema": {"const": 1},
        "model": MODEL_SCHEMA,
        "checks": {"type": "array", "items": CHECK_SCHEMA},
        "tolerances": {
            "type": "object",
            "propertyNames": {"enum": list(CHECK_NAMES)},
            "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
        },
        "output": {
            "type": "object",
            "properties": {"format": {"enum": ["csv", "json"]}, "path": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "required": ["schema", "model"],
    "additionalProperties": False,
}


@dataclass(frozen=True)
class SuiteConfig:
    model: M.ModelSpec
    checks: list[dict[str, Any]] = field(default_factory=list)
    tolerances: dict[str, float] = field(default_factory=dict)
    output: dict[str, str] = field(default_factory=dict)


def model_spec_from_dict(doc: dict[str, Any]) -> M.ModelSpec:
    try:
        jsonschema.validate(doc, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"model: {exc.message}") from exc
    n = int(doc.get("n", 3))
    cs = doc.get("cross_section")
    cross = None
    if cs is not None:
        kind = cs.get("kind", "round-sphere" if "unit_area" not in cs else "einstein")
        if kind == "round-sphere":
            cross = M.CrossSection.round(n - 1)
        else:
            cross = M.CrossSection(n - 1, float(cs["unit_area"]), float(cs.get("einstein_const", 1.0)), "einstein")
    table = doc.get("profile_table")
    return M.ModelSpec(
        family=doc["family"],
        n=n,
        lam=float(doc.get("lambda", 0.0)),
        mass=float(doc.get("mass", 0.0)),
        charge=float(doc.get("charge", 0.0)),
        cross_section=cross,
        profile_table=None if table is None else tuple(tuple(map(float, row)) for row in table),
    )


def parse_config(doc: dict[str, Any]) -> SuiteConfig:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from exc
    return SuiteConfig(
        model_spec_from_dict(doc["model"]),
        list(doc.get("checks", [])),
        dict(doc.get("tolerances", {})),
        dict(doc.get("output", {})),
    )


def load_config(path: str | Path) -> SuiteConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)


# ---------------------------------------------------------------------------
# dispatch


def make_surface(doc: dict[str, Any]):
    from .surfaces import RadialGraphSurface

    if doc["type"] == "sphere":
        return RadialGraphSurface.sphere(float(doc["r"]))
    return RadialGraphSurface.cosine([float(c) for c in doc["coeffs"]])


def make_base(doc):
    from .functionals import Base

    if doc == "point":
        return Base.point()
    if isinstance(doc, dict):
        return Base.sphere(float(doc["r0"]), doc.get("eta0"))
    return Base.sphere(float(doc))


def _grid(triple: M.ProfileTriple, check: dict[str, Any]) -> np.ndarray:
    from .curvature import default_grid

    g = check.get("grid")
    if g is None:
        return default_grid(triple)
    return np.geomspace(g["start"], g["stop"], g.get("num", 100))


def _kw(check_name: str, tolerances: dict[str, float], **extra) -> dict[str, Any]:
    if check_name in tolerances:
        extra["tol"] = tolerances[check_name]
    return extra


def run_check(triple: M.ProfileTriple, check: dict[str, Any], tolerances: dict[str, float] | None = None):
    """Run one configured check; returns a list of reports and an optional series."""
    from . import conformal, curvature, functionals, inequalities, surfaces

    tolerances = tolerances or {}
    name = check["name"]
    if name not in CHECK_NAMES:
        raise ConfigError(f"unknown check {name!r}")
    kw = _kw(name, tolerances)
    avr = check.get("avr")

    if name == "substatic":
        return [curvature.check_substatic(triple, _grid(triple, check), verify_oracle=True, **kw)], None
    if name == "nec":
        return [curvature.nec_check(triple, samples=check.get("samples", 1000), grid=_grid(triple, check), **kw)], None
    if name == "cd01":
        radii = check.get("r") or list(_grid(triple, check)[::5])
        return [curvature.cd01_identity_check(triple, float(r), check.get("path", "closed"), kw.get("tol")) for r in radii], None
    if name == "laplacian_comparison":
        r0 = check.get("r0", 2.0 * triple.r_min if triple.r_min > 0 else 1.0)
        grid = _grid(triple, check)
        return [conformal.laplacian_comparison_check(triple, r0, grid[grid >= r0], **kw)], None
    if name in ("area_series", "volume_series"):
        base = make_base(check.get("base", "point" if triple.capped else max(2.0 * triple.r_min, 1.0)))
        t = check.get("t_grid") or list(np.geomspace(1e-2, 1e3, 50))
        if name == "area_series":
            series = functionals.area_functional(triple, base, t)
        else:
            series = functionals.volume_functional(triple, base, t, check.get("k"))
        rep = CheckReport.build(
            f"{name}_monotone",
            -series.max_increase,
            0.0,
            tolerances.get(name, 1e-9),
            context={"base": base.describe(), "points": len(t)},
        )
        return [rep], series
    if name == "avr":
        base = make_base(check["base"]) if "base" in check else None
        est = functionals.avr_estimate(triple, base)
        rep = CheckReport.build(
            "avr",
            float(est.certified),
            1.0,
            0.0,
            context={"value": est.value, "error_bar": est.error_bar, "volume_limit": est.volume_limit, **est.context},
        )
        return [rep], None
    if name == "avr_base_independence":
        bases = [make_base(b) for b in check.get("bases", [2.0 * triple.r_min, 3.0 * triple.r_min])]
        return [functionals.avr_base_independence(triple, bases, **kw)], None
    if name == "small_t_limit":
        return [functionals.small_t_limit_check(triple, **kw)], None
    if name in ("willmore", "isoperimetric", "heintze_karcher", "lagrange_multiplier", "first_variation"):
        surfs = [make_surface(s) for s in check.get("surfaces", [check["surface"]] if "surface" in check else [])]
        if not surfs:
            raise ConfigError(f"{name} needs a surface")
        out = []
        for s in surfs:
            if name == "willmore":
                out.append(inequalities.willmore_check(triple, s, avr=avr, **kw))
            elif name == "isoperimetric":
                out.append(inequalities.isoperimetric_check(triple, s, avr=avr, **kw))
            elif name == "heintze_karcher":
                out.append(inequalities.heintze_karcher_check(triple, s, **kw))
            elif name == "lagrange_multiplier":
                out.append(inequalities.lagrange_multiplier_check(triple, s))
            else:
                bump = surfaces.Bump(tuple(check.get("bump", [1.0])))
                out.append(surfaces.first_variation_oracle(triple, s, bump, **kw))
        return out, None
    if name == "boundary_minimizing":
        surfs = [make_surface(s) for s in check.get("surfaces", [])]
        return [inequalities.boundary_minimizing_check(triple, surfs, **kw)], None
    if name == "isoperimetric_profile":
        V = check.get("V_grid") or list(np.geomspace(0.1, 1e3, 10))
        return [inequalities.isoperimetric_profile_check(triple, V, avr=avr, **kw)], None
    if name == "classify_end":
        end = M.classify_end(triple)
        rep = CheckReport.build(
            "classify_end",
            0.0 if end.kind == "undetermined" else 1.0,
            1.0,
            0.0,
            context={"kind": end.kind, "rho_total": end.rho_total},
        )
        return [rep], None
    if name == "uniformity":
        return [M.check_uniformity_criteria(triple)], None
    # f_pinching
    window = check.get("window", [2.0 * max(triple.r_min, 1.0), 100.0 * max(triple.r_min, 1.0)])
    return [M.check_f_pinching(triple, check.get("k", 0.5), tuple(window))], None
