"""Sharp geometric inequalities checked on model triples and radial graphs:
Willmore-type, f-isoperimetric, Heintze-Karcher, outward minimizing horizon,
and the constant-multiplier condition.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import AvrUncertified, NotMeanConvex, NotUniform
from .functionals import avr_estimate, closed_form_avr
from .models import ProfileTriple
from .numerics import sphere_area
from .report import CheckReport
from .surfaces import RadialGraphSurface, area, area_element, f_volume, mean_curvature

SPHERE_EQUALITY_TOL = 1e-8
QUADRATURE_EQUALITY_TOL = 1e-5

AvrSource = float | str | None


def resolve_avr(triple: ProfileTriple, avr: AvrSource = None) -> float:
    """AVR used by the checks.

    ``None`` asks for a certified extrapolated estimate, ``"closed-form"``
    uses the cross-section area ratio of a b = r model, and a number is
    taken as given.
    """
    if avr is None:
        try:
            return avr_estimate(triple, strict=True).value
        except NotUniform as exc:
            raise AvrUncertified(str(exc)) from exc
    if isinstance(avr, str):
        if avr != "closed-form":
            raise ValueError(f"unknown AVR source {avr!r}")
        return closed_form_avr(triple)
    return float(avr)


def _eq_tol(surface: RadialGraphSurface, equality_tol: float | None) -> float:
    if equality_tol is not None:
        return equality_tol
    return SPHERE_EQUALITY_TOL if surface.is_sphere else QUADRATURE_EQUALITY_TOL


def _positive_H(triple: ProfileTriple, surface: RadialGraphSurface):
    theta, dsig = area_element(triple, surface)
    H = mean_curvature(triple, surface, theta)
    if np.any(H <= 0):
        raise NotMeanConvex(f"H <= 0 at theta = {float(theta[np.argmin(H)]):.6g}")
    f = triple.lapse(surface.radius(theta))
    return theta, dsig, H, f


def willmore_check(
    triple: ProfileTriple,
    surface: RadialGraphSurface,
    avr: AvrSource = None,
    tol: float = 1e-9,
    equality_tol: float | None = None,
) -> CheckReport:
    """``int (H/((n-1) f))^{n-1} dsigma >= AVR |S^{n-1}|`` for mean-convex surfaces."""
    n = triple.n
    _, dsig, H, f = _positive_H(triple, surface)
    value = resolve_avr(triple, avr)
    lhs = float(np.sum((H / ((n - 1) * f)) ** (n - 1) * dsig))
    rhs = value * sphere_area(n - 1)
    return CheckReport.build(
        "willmore",
        lhs,
        rhs,
        tol,
        equality_tol=_eq_tol(surface, equality_tol),
        relative=True,
        context={"surface": surface.label, "avr": value},
    )


def isoperimetric_check(
    triple: ProfileTriple,
    surface: RadialGraphSurface,
    avr: AvrSource = None,
    tol: float = 1e-9,
    equality_tol: float | None = None,
) -> CheckReport:
    """``|S|^{n/(n-1)} - |dM|^{n/(n-1)} >= n (AVR |S^{n-1}|)^{1/(n-1)} |Omega|_f``."""
    n = triple.n
    p = n / (n - 1.0)
    value = resolve_avr(triple, avr)
    surf_area = area(triple, surface)
    vol = f_volume(triple, surface)
    boundary = triple.boundary_area()
    lhs = surf_area**p - boundary**p
    rhs = n * (value * sphere_area(n - 1)) ** (1.0 / (n - 1)) * vol
    return CheckReport.build(
        "isoperimetric",
        lhs,
        rhs,
        tol,
        equality_tol=_eq_tol(surface, equality_tol),
        relative=True,
        context={"surface": surface.label, "avr": value, "area": surf_area, "f_volume": vol, "boundary_area": boundary},
    )


def heintze_karcher_check(
    triple: ProfileTriple,
    surface: RadialGraphSurface,
    tol: float = 1e-9,
    equality_tol: float | None = None,
) -> CheckReport:
    """``((n-1)/n) int f/H dsigma >= |Omega|_f``.

    On a horizon model the enclosed region has the horizon as inner boundary
    and the inequality is strict even on coordinate spheres, with gap
    ``b(r_min)^n |Sigma| / n`` when b = r.
    """
    n = triple.n
    _, dsig, H, f = _positive_H(triple, surface)
    lhs = (n - 1.0) / n * float(np.sum(f / H * dsig))
    rhs = f_volume(triple, surface)
    ctx = {"surface": surface.label, "horizon": triple.has_horizon}
    if triple.has_horizon and triple.b_is_identity:
        ctx["horizon_gap"] = triple.r_min**n * triple.unit_area / n
    return CheckReport.build(
        "heintze_karcher", lhs, rhs, tol, equality_tol=_eq_tol(surface, equality_tol), relative=True, context=ctx
    )


def boundary_minimizing_check(
    triple: ProfileTriple, surfaces: Sequence[RadialGraphSurface], tol: float = 1e-9
) -> CheckReport:
    """Every enclosing surface has at least the horizon's area."""
    if not triple.has_horizon:
        raise ValueError("outward minimizing check needs a horizon")
    if not surfaces:
        raise ValueError("no surfaces given")
    areas = [area(triple, s) for s in surfaces]
    i = int(np.argmin(areas))
    return CheckReport.build(
        "boundary_minimizing",
        areas[i],
        triple.boundary_area(),
        tol,
        context={"worst_surface": surfaces[i].label, "count": len(surfaces)},
    )


def lagrange_multiplier_check(
    triple: ProfileTriple, surface: RadialGraphSurface, equality_tol: float = 1e-8
) -> CheckReport:
    """Is H/f constant on the surface? The multiplier is its mean and must be positive."""
    _, dsig, H, f = _positive_H(triple, surface)
    ratio = H / f
    w = dsig / np.sum(dsig)
    mean = float(np.sum(w * ratio))
    std = float(np.sqrt(np.sum(w * (ratio - mean) ** 2)))
    rep = CheckReport.build(
        "lagrange_multiplier",
        mean,
        0.0,
        0.0,
        context={"surface": surface.label, "multiplier": mean, "stddev": std, "relative_spread": std / mean},
    )
    return replace(rep, passed=mean > 0, equality=bool(mean > 0 and std / mean < equality_tol))


def _sphere_f_volume(triple: ProfileTriple, r: float) -> float:
    return f_volume(triple, RadialGraphSurface.sphere(r))


def isoperimetric_profile_check(
    triple: ProfileTriple, V_grid: Sequence[float], avr: AvrSource = None, tol: float = 1e-8
) -> CheckReport:
    """Along coordinate spheres, ``I(V)^{n/(n-1)} - n (AVR |S^{n-1}|)^{1/(n-1)} V``
    must equal ``|dM|^{n/(n-1)}`` for every enclosed weighted volume V.

    The deviation is measured relative to the largest ``I(V)^{n/(n-1)}``.
    """
    n = triple.n
    p = n / (n - 1.0)
    value = resolve_avr(triple, avr)
    const = n * (value * sphere_area(n - 1)) ** (1.0 / (n - 1))
    expected = triple.boundary_area() ** p
    lo = triple.r_min if triple.r_min > 0 else 0.0
    vals, scale = [], expected
    for V in V_grid:
        hi = max(2.0 * lo, 1.0)
        while _sphere_f_volume(triple, hi) < V:
            hi *= 2.0
            if not np.isfinite(triple.r_max) or hi < triple.r_max:
                continue
            raise ValueError(f"volume {V} exceeds the domain")
        r = brentq(lambda x: _sphere_f_volume(triple, x) - V, lo * (1 + 1e-14) + 1e-300, hi, xtol=1e-15, rtol=1e-15)
        I = float(triple.b(r)) ** (n - 1) * triple.unit_area
        vals.append(I**p - const * V)
        scale = max(scale, I**p)
    dev = float(np.max(np.abs(np.asarray(vals) - expected))) / scale
    return CheckReport.build(
        "isoperimetric_profile",
        0.0,
        dev,
        tol,
        equality_tol=tol,
        context={"expected": expected, "values": vals, "avr": value},
    )


def random_cosine_surfaces(
    triple: ProfileTriple,
    count: int,
    rng: np.random.Generator,
    radius: tuple[float, float] | None = None,
    amplitude: float = 0.08,
    modes: int = 4,
    nodes: int = 96,
) -> list[RadialGraphSurface]:
    """Mean-convex cosine graphs ``c0 (1 + sum_j a_j cos(j theta))`` enclosing ``r_min``.

    Mode amplitudes decay like ``1/j^2`` and their sum is bounded by
    ``amplitude``; candidates with H <= 0 somewhere are redrawn.
    """
    if radius is None:
        base = max(triple.r_min, 1.0)
        radius = (1.5 * base, 5.0 * base)
    out: list[RadialGraphSurface] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("could not draw enough mean-convex surfaces")
        c0 = rng.uniform(*radius)
        j = np.arange(1, modes + 1)
        a = rng.uniform(-1.0, 1.0, modes) / j**2
        a *= amplitude * rng.uniform(0.2, 1.0) / np.sum(np.abs(a))
        surf = RadialGraphSurface.cosine(c0 * np.concatenate([[1.0], a]), nodes=nodes, label=f"random #{len(out)}")
        theta, _ = surf.quadrature()
        if np.min(surf.radius(theta)) <= triple.r_min * 1.01:
            continue
        if np.any(mean_curvature(triple, surf, theta) <= 0):
            continue
        out.append(surf)
    return out
