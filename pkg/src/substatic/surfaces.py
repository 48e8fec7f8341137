"""Axisymmetric radial graphs ``r = R(theta)`` over the cross-section.

Area, enclosed f-weighted volume and mean curvature are one-dimensional
integrals in the polar angle, evaluated with Gauss-Legendre nodes. The mean
curvature formula is certified against a first-variation oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateTangent, OutOfDomain, SurfaceBelowHorizon
from .models import ProfileTriple
from .numerics import gauss_legendre, gl_nodes, richardson, sphere_area
from .report import CheckReport

Profile = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]


def _cosine_series(coeffs: np.ndarray) -> Profile:
    j = np.arange(coeffs.size, dtype=float)

    def profile(theta):
        th = np.asarray(theta, dtype=float)[..., None]
        c, s = np.cos(j * th), np.sin(j * th)
        return (
            np.sum(coeffs * c, axis=-1),
            np.sum(-j * coeffs * s, axis=-1),
            np.sum(-j * j * coeffs * c, axis=-1),
        )

    return profile


@dataclass(frozen=True)
class RadialGraphSurface:
    """Graph ``r = R(theta)``; ``R`` returns the value and two theta-derivatives."""

    profile: Profile
    nodes: int = 96
    coeffs: tuple[float, ...] | None = None
    label: str = "graph"

    @classmethod
    def sphere(cls, r: float, nodes: int = 96) -> "RadialGraphSurface":
        return cls.cosine([r], nodes=nodes, label=f"sphere r={r}")

    @classmethod
    def cosine(cls, coeffs: Sequence[float], nodes: int = 96, label: str | None = None) -> "RadialGraphSurface":
        """``R(theta) = sum_j c_j cos(j theta)``: smooth at both poles by construction."""
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("need at least one cosine coefficient")
        return cls(_cosine_series(c), nodes, tuple(float(x) for x in c), label or f"cosine {list(c)}")

    @property
    def is_sphere(self) -> bool:
        return self.coeffs is not None and all(x == 0.0 for x in self.coeffs[1:])

    def with_nodes(self, nodes: int) -> "RadialGraphSurface":
        return RadialGraphSurface(self.profile, nodes, self.coeffs, self.label)

    def quadrature(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = gauss_legendre(self.nodes)
        return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w

    def radius(self, theta):
        return self.profile(theta)[0]


def _check_surface(triple: ProfileTriple, surface: RadialGraphSurface, R: np.ndarray) -> None:
    if not triple.cross_section.is_round and not surface.is_sphere:
        raise ValueError("non-spherical graphs need a round cross-section")
    if np.any(R <= triple.r_min) and (triple.has_horizon or triple.r_min > 0):
        raise SurfaceBelowHorizon(f"graph reaches r = {float(np.min(R))} <= r_min = {triple.r_min}")
    if np.any(R <= 0) or np.any(R >= triple.r_max):
        raise OutOfDomain("graph leaves the domain")


def _scale(triple: ProfileTriple) -> float:
    # |S^{n-2}| times the cross-section area ratio
    return sphere_area(triple.n - 2) * triple.cross_section.area_ratio


def area_element(triple: ProfileTriple, surface: RadialGraphSurface) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes in theta and the weights of the induced surface measure."""
    theta, w = surface.quadrature()
    R, dR, _ = surface.profile(theta)
    _check_surface(triple, surface, R)
    F, b = triple.F(R), triple.b(R)
    line = np.sqrt(dR**2 / F + b**2)
    return theta, _scale(triple) * w * line * (b * np.sin(theta)) ** (triple.n - 2)


def area(triple: ProfileTriple, surface: RadialGraphSurface) -> float:
    return float(np.sum(area_element(triple, surface)[1]))


def _enclosed(triple: ProfileTriple, R: np.ndarray) -> np.ndarray:
    """``int_{r_min}^{R} b^{n-1} dr`` at each radius."""
    if triple.b_is_identity:
        return (R**triple.n - triple.r_min**triple.n) / triple.n
    # split in two so a graded panel sits next to r_min
    lo = np.full_like(R, triple.r_min)
    mid = 0.5 * (lo + R)
    total = 0.0
    for a, c in ((lo, mid), (mid, R)):
        nodes, w = gl_nodes(a, c, 32)
        total = total + np.sum(w * triple.b(nodes) ** (triple.n - 1), axis=-1)
    return total


def f_volume(triple: ProfileTriple, surface: RadialGraphSurface) -> float:
    """Weighted volume ``int f dmu`` of the region between ``r_min`` and the graph.

    Since ``f dmu = b^{n-1} dr dsigma`` the integrand stays regular at the horizon.
    """
    theta, w = surface.quadrature()
    R = surface.radius(theta)
    _check_surface(triple, surface, R)
    return float(_scale(triple) * np.sum(w * _enclosed(triple, R) * np.sin(theta) ** (triple.n - 2)))


def mean_curvature(triple: ProfileTriple, surface: RadialGraphSurface, theta) -> np.ndarray:
    """Mean curvature of the graph for the normal pointing to larger r.

    With ``W = sqrt(F + R'^2/b^2)`` (F = f^2) the unit normal is
    ``(F/W) d_r - R'/(b^2 W) d_theta`` and H is its divergence.
    """
    th = np.asarray(theta, dtype=float)
    R, d1, d2 = surface.profile(th)
    _check_surface(triple, surface, np.atleast_1d(R))
    n = triple.n
    F, F1 = triple.F(R), triple.F(R, 1)
    b, b1 = triple.b(R), triple.b(R, 1)
    W2 = F + d1**2 / b**2
    if np.any(W2 <= 0):
        raise DegenerateTangent("degenerate tangent plane")
    W = np.sqrt(W2)
    W_r = (F1 - 2.0 * d1**2 * b1 / b**3) / (2.0 * W)
    radial = F1 / W - F * W_r / W2 + (F / W) * (-F1 / (2.0 * F) + (n - 1) * b1 / b)
    with np.errstate(divide="ignore", invalid="ignore"):
        cot_term = np.where(np.sin(th) > 1e-12, d1 * np.cos(th) / np.sin(th), d2)
    angular = -d2 / (b**2 * W) + d1**2 * d2 / (b**4 * W**3) - (n - 2) * cot_term / (b**2 * W)
    return radial + angular


@dataclass(frozen=True)
class Bump:
    """Test function ``sin(theta)^power * sum_j a_j cos(j theta)`` on the surface."""

    coeffs: tuple[float, ...] = (1.0,)
    power: int = 4

    def __call__(self, theta) -> tuple[np.ndarray, np.ndarray]:
        th = np.asarray(theta, dtype=float)
        g, dg, _ = _cosine_series(np.asarray(self.coeffs, dtype=float))(th)
        s, c = np.sin(th), np.cos(th)
        p = self.power
        env = s**p
        denv = p * s ** (p - 1) * c if p > 0 else np.zeros_like(th)
        return env * g, denv * g + env * dg


def _normal_push(triple: ProfileTriple, surface: RadialGraphSurface, bump: Bump, eps: float) -> RadialGraphSurface:
    """Move the graph radially by ``eps * phi * W``: normal speed ``eps * phi``."""

    def profile(theta):
        R, d1, d2 = surface.profile(theta)
        F, F1 = triple.F(R), triple.F(R, 1)
        b, b1 = triple.b(R), triple.b(R, 1)
        W = np.sqrt(F + d1**2 / b**2)
        dW = (F1 * d1 + 2.0 * d1 * d2 / b**2 - 2.0 * d1**3 * b1 / b**3) / (2.0 * W)
        phi, dphi = bump(theta)
        return R + eps * phi * W, d1 + eps * (dphi * W + phi * dW), d2

    return RadialGraphSurface(profile, surface.nodes, None, f"{surface.label} pushed")


def first_variation_oracle(
    triple: ProfileTriple,
    surface: RadialGraphSurface,
    bump: Bump | None = None,
    eps: Sequence[float] = (1e-3, 5e-4),
    tol: float = 1e-6,
) -> CheckReport:
    """Compare finite-difference variations of area and f-volume with
    ``int H phi dsigma`` and ``int f phi dsigma``.

    Central differences at two step sizes are combined by Richardson. The
    report's rhs is the larger of the two relative gaps.
    """
    bump = Bump() if bump is None else bump
    theta, dsig = area_element(triple, surface)
    phi, _ = bump(theta)
    H = mean_curvature(triple, surface, theta)
    R = surface.radius(theta)
    pred_area = float(np.sum(H * phi * dsig))
    pred_vol = float(np.sum(triple.lapse(R) * phi * dsig))

    def central(fn, e):
        return (fn(triple, _normal_push(triple, surface, bump, e)) - fn(triple, _normal_push(triple, surface, bump, -e))) / (
            2.0 * e
        )

    e1, e2 = eps
    d_area = richardson(central(area, e1), central(area, e2), order=2)
    d_vol = richardson(central(f_volume, e1), central(f_volume, e2), order=2)
    scale_a = max(abs(pred_area), float(np.sum(np.abs(H * phi) * dsig)), 1e-300)
    scale_v = max(abs(pred_vol), float(np.sum(np.abs(triple.lapse(R) * phi) * dsig)), 1e-300)
    gap_a = abs(d_area - pred_area) / scale_a
    gap_v = abs(d_vol - pred_vol) / scale_v
    return CheckReport.build(
        "first_variation",
        0.0,
        max(gap_a, gap_v),
        tol,
        context={
            "surface": surface.label,
            "area_variation": float(d_area),
            "area_predicted": pred_area,
            "volume_variation": float(d_vol),
            "volume_predicted": pred_vol,
            "area_gap": float(gap_a),
            "volume_gap": float(gap_v),
        },
    )
