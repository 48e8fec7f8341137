"""Monotone area and volume functionals of optical-distance level sets, and the
asymptotic volume ratio they converge to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conformal import RadialFlow
from .errors import BaseInvalid, NotUniform
from .models import ProfileTriple, check_uniformity_criteria, classify_end
from .numerics import fit_inverse_powers, gl_nodes, sphere_area
from .report import CheckReport


@dataclass(frozen=True)
class Base:
    """Where the optical distance is measured from.

    ``kind='sphere'`` uses the coordinate sphere ``{r = r0}``; ``eta0``
    overrides the initial value ``b(r0)/b'(r0)`` (needed when b'(r0) = 0).
    ``kind='point'`` is the centre of a capped model.
    """

    kind: str = "sphere"
    r0: float | None = None
    eta0: float | None = None

    @classmethod
    def sphere(cls, r0: float, eta0: float | None = None) -> "Base":
        return cls("sphere", float(r0), eta0)

    @classmethod
    def point(cls) -> "Base":
        return cls("point")

    def describe(self) -> str:
        if self.kind == "point":
            return "point at centre"
        extra = f", eta0={self.eta0}" if self.eta0 is not None else ""
        return f"coordinate sphere r0={self.r0}{extra}"


def make_flow(triple: ProfileTriple, base: Base) -> RadialFlow:
    if base.kind == "point":
        return RadialFlow.from_point(triple)
    if base.kind != "sphere" or base.r0 is None:
        raise BaseInvalid(f"unusable base {base}")
    try:
        return RadialFlow.from_sphere(triple, base.r0, base.eta0)
    except BaseInvalid:
        raise
    except Exception as exc:  # not mean-convex, out of domain
        raise BaseInvalid(str(exc)) from exc


def default_base(triple: ProfileTriple) -> Base:
    if triple.capped:
        return Base.point()
    return Base.sphere(max(2.0 * triple.r_min, 1.0))


@dataclass(frozen=True)
class ComparisonSeries:
    base: Base
    t_grid: np.ndarray
    A: np.ndarray
    V: np.ndarray | None
    k: float | None
    r: np.ndarray
    eta: np.ndarray
    monotone: bool
    max_increase: float
    triple: ProfileTriple = field(repr=False, compare=False)


@dataclass(frozen=True)
class RigidityReport:
    is_constant: bool
    window: tuple[float, float]
    f_samples: list[float]
    eta_samples: list[float]
    warp_ratio: float
    warp_deviation: float
    phi_coeff: float = 0.0
    psi_coeff: float = 0.0


@dataclass(frozen=True)
class AvrEstimate:
    value: float
    error_bar: float
    certified: bool
    volume_limit: float
    context: dict = field(default_factory=dict)


def _area_values(triple: ProfileTriple, flow: RadialFlow, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = triple.n
    eta = flow.eta(r)
    b = triple.b(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        # eta = 0 only at the centre of a point base, where b/eta -> b'
        ratio = np.where(eta > 0, b / eta, triple.b(r, 1))
    return ratio ** (n - 1) * triple.cross_section.area_ratio, eta


def area_functional(triple: ProfileTriple, base: Base, t_grid: Sequence[float], tol: float = 1e-9) -> ComparisonSeries:
    """A(t) = b^{n-1} |Sigma| / (eta^{n-1} |S^{n-1}|) on the level set ``{rho = t}``."""
    flow = make_flow(triple, base)
    t = np.asarray(t_grid, dtype=float)
    r = flow.r_at(t) if t.size else np.empty(0)
    A, eta = _area_values(triple, flow, r)
    inc = float(np.max(np.diff(A))) if A.size > 1 else 0.0
    return ComparisonSeries(base, t, A, None, None, r, eta, inc <= tol, inc, triple)


class _VolumeIntegral:
    """Cumulative ``int rho^{k-1} b^{n-1} |Sigma| / (eta^{n-1} f^2) dr`` along a flow."""

    def __init__(self, triple: ProfileTriple, flow: RadialFlow, k: float):
        self.triple, self.flow, self.k = triple, flow, k
        self._cum = None
        self._n_edges = 0

    def _weight(self, r):
        """Everything but the ``rho^{k-1}`` factor; at a point base b/eta -> b'."""
        tr = self.triple
        eta = self.flow.eta(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(eta > 0, tr.b(r) / eta, tr.b(r, 1))
        return ratio ** (tr.n - 1) * tr.unit_area / tr.F(r)

    def _segments(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        out = np.zeros(a.shape)
        # segments starting on the base: rho is linear in r there and the
        # rho^{k-1} singularity is integrated exactly
        head = (a <= self.flow.r0) & (b > a)
        if np.any(head):
            ah, bh = a[head], b[head]
            F0 = self.triple.F(ah)
            out[head] = self._weight(ah) * F0 ** (1.0 - self.k) * (bh - ah) ** self.k / self.k
        rest = ~head & (b > a)
        if np.any(rest):
            nodes, w = gl_nodes(a[rest], b[rest])
            shape = nodes.shape
            r = nodes.ravel()
            vals = (self.flow.rho(r) ** (self.k - 1.0) * self._weight(r)).reshape(shape)
            out[rest] = np.sum(w * vals, axis=-1)
        return out

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        self.flow.rho(r)  # extends the table as needed
        edges = self.flow.edges
        if self._cum is None or self._n_edges != edges.size:
            seg = self._segments(edges[:-1], edges[1:])
            self._cum = np.concatenate([[0.0], np.cumsum(seg)])
            self._n_edges = edges.size
        idx = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, edges.size - 2)
        part = self._segments(edges[idx], r)
        return self._cum[idx] + part


def volume_functional(
    triple: ProfileTriple, base: Base, t_grid: Sequence[float], k: float | None = None, tol: float = 1e-9
) -> ComparisonSeries:
    """A(t) together with V(t) = (|B^n| t^k)^{-1} int_{rho<=t} rho^{k-1} f^{-1} eta^{1-n} dmu.

    The measure is ``dmu = f^{-1} b^{n-1} |Sigma| dr``; at t = 0 the limit
    ``(n/k) A(0)`` is returned.
    """
    n = triple.n
    k = float(n) if k is None else float(k)
    if not k > 0:
        raise ValueError("volume exponent k must be positive")
    series = area_functional(triple, base, t_grid, tol)
    flow = make_flow(triple, base)
    t = series.t_grid
    V = np.empty_like(t)
    pos = t > 0
    if np.any(pos):
        integral = _VolumeIntegral(triple, flow, k)
        V[pos] = integral(series.r[pos]) / (sphere_area(n - 1) * t[pos] ** k) * n
    V[~pos] = (n / k) * series.A[~pos]
    inc = max(series.max_increase, float(np.max(np.diff(V))) if V.size > 1 else 0.0)
    return ComparisonSeries(base, t, series.A, V, k, series.r, series.eta, inc <= tol, inc, triple)


def closed_form_avr(triple: ProfileTriple) -> float:
    """AVR of a triple with b = r and f -> 1: the cross-section area ratio."""
    if not triple.b_is_identity:
        raise ValueError("closed-form AVR needs b(r) = r")
    return triple.cross_section.area_ratio


def avr_estimate(
    triple: ProfileTriple,
    base: Base | None = None,
    T: float | None = None,
    strict: bool = False,
) -> AvrEstimate:
    """Extrapolate A(t) to t = infinity from ``t in {T, 2T, 4T, 8T}``.

    The limit comes from a fit ``a0 + a1/t + a2/t^2``; the error bar is its
    distance to the two-term fit. The same extrapolation of V (k = n) must
    agree. Certification requires an f-complete end passing one of the
    uniformity criteria; ``strict=True`` turns a failed certification into
    ``NotUniform``.
    """
    base = default_base(triple) if base is None else base
    flow = make_flow(triple, base)
    if T is None:
        T = 1e3 * max(1.0, flow.r0, flow.eta0)
    t = T * np.array([1.0, 2.0, 4.0, 8.0])
    series = volume_functional(triple, base, t, k=float(triple.n))
    a3 = fit_inverse_powers(t, series.A, 3)[0]
    a2 = fit_inverse_powers(t, series.A, 2)[0]
    v3 = fit_inverse_powers(t, series.V, 3)[0]
    err = abs(a3 - a2)

    end = classify_end(triple)
    uniform = None
    if end.kind == "f-complete":
        uniform = check_uniformity_criteria(triple)
    certified = bool(uniform is not None and uniform.passed)
    est = AvrEstimate(
        float(a3),
        float(err),
        certified,
        float(v3),
        {
            "base": base.describe(),
            "T": float(T),
            "end": end.kind,
            "uniformity": uniform.context.get("criterion") if uniform else None,
            "A_samples": series.A.tolist(),
            "volume_gap": float(abs(v3 - a3)),
        },
    )
    if strict and not certified:
        raise NotUniform(f"AVR not certified (end {end.kind}); uncertified estimate {a3:.10g}")
    return est


def avr_base_independence(triple: ProfileTriple, bases: Sequence[Base | float | None], tol: float = 1e-6) -> CheckReport:
    """Spread of AVR estimates across several bases."""
    if len(bases) < 2:
        raise ValueError("need at least two bases")
    resolved = [Base.point() if b is None else (Base.sphere(b) if not isinstance(b, Base) else b) for b in bases]
    values = [avr_estimate(triple, b).value for b in resolved]
    spread = max(values) - min(values)
    return CheckReport.build(
        "avr_base_independence",
        0.0,
        spread,
        tol,
        equality_tol=tol,
        context={"bases": [b.describe() for b in resolved], "values": values},
    )


def small_t_limit_check(triple: ProfileTriple, point: Base | None = None, tol: float = 1e-4) -> CheckReport:
    """A(t) -> f(p)^{1-n} as t -> 0 at the centre, and A(t) stays below that value."""
    base = Base.point() if point is None else point
    if base.kind != "point":
        raise BaseInvalid("small-t limit needs a point base")
    n = triple.n
    f0 = math.sqrt(float(triple.F(triple.r_min)))
    expected = triple.cross_section.area_ratio / f0 ** (n - 1)
    small = area_functional(triple, base, [1e-2, 1e-3])
    a1, a2 = small.A
    limit = a2 - 1e-3 * (a1 - a2) / (1e-2 - 1e-3)
    t_span = np.geomspace(1e-3, 1.0, 30)
    if math.isfinite(triple.r_max):
        t_span = t_span[t_span < 0.5 * float(make_flow(triple, base).rho(0.9 * triple.r_max))]
    wide = area_functional(triple, base, t_span)
    overshoot = float(np.max(wide.A) - expected)
    rep = CheckReport.build(
        "small_t_limit",
        0.0,
        abs(limit - expected),
        tol,
        equality_tol=tol,
        context={"expected": expected, "extrapolated": float(limit), "max_overshoot": overshoot},
    )
    if overshoot > 1e-12 * expected:
        from dataclasses import replace

        rep = replace(rep, passed=False, equality=False)
    return rep


def detect_rigidity(series: ComparisonSeries, tol: float = 1e-9) -> list[RigidityReport]:
    """Maximal windows of the grid on which A is constant to ``tol``.

    On each window the warped form is tested: ``b(r(t))/eta(t)`` must be
    constant to ``tol``. The angular coefficients of the rigid form vanish
    identically under rotational symmetry and are reported as 0.
    """
    tr = series.triple
    A = series.A
    out: list[RigidityReport] = []
    i = 0
    while i < A.size - 1:
        j = i
        while j + 1 < A.size and abs(A[j + 1] - A[i]) < tol:
            j += 1
        if j > i:
            r = series.r[i : j + 1]
            eta = series.eta[i : j + 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(eta > 0, tr.b(r) / eta, tr.b(r, 1))
            dev = float(np.max(np.abs(ratio - ratio[0])) / abs(ratio[0]))
            out.append(
                RigidityReport(
                    dev < tol,
                    (float(series.t_grid[i]), float(series.t_grid[j])),
                    tr.lapse(r).tolist(),
                    eta.tolist(),
                    float(np.mean(ratio)),
                    dev,
                )
            )
            i = j
        else:
            i += 1
    return out
