"""Optical geometry of ``g/f^2``: optical distance, the reparametrized distance eta,
geodesics of the reduced two-plane, and the Riccati equation for H/f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .curvature import check_substatic
from .errors import (
    BaseInvalid,
    HorizonDivergence,
    LeftDomain,
    NoArrival,
    NotMeanConvex,
    OutOfDomain,
    PrerequisiteFailed,
)
from .models import ProfileTriple
from .numerics import gl_nodes
from .report import CheckReport


@dataclass(frozen=True)
class GeodesicState:
    r: float
    phi: float
    p_r: float
    p_phi: float
    rho: float = 0.0
    eta: float = 0.0

    @classmethod
    def from_angle(cls, triple: ProfileTriple, r: float, phi: float, alpha: float, eta: float = 0.0) -> "GeodesicState":
        """Unit-speed state leaving (r, phi) at angle ``alpha`` from the outward radial direction."""
        F = float(triple.F(r))
        b = float(triple.b(r))
        return cls(r, phi, math.cos(alpha) / F, b * math.sin(alpha) / math.sqrt(F), 0.0, eta)


@dataclass(frozen=True)
class Trajectory:
    rho: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    p_r: np.ndarray
    p_phi: float
    eta: np.ndarray
    triple: ProfileTriple = field(repr=False)

    def energy(self) -> np.ndarray:
        F = self.triple.F(self.r)
        return 0.5 * (F**2 * self.p_r**2 + F / self.triple.b(self.r) ** 2 * self.p_phi**2)

    def cartesian(self) -> tuple[np.ndarray, np.ndarray]:
        return self.r * np.cos(self.phi), self.r * np.sin(self.phi)

    def h_over_f(self) -> np.ndarray:
        """H/f of the coordinate sphere through each sample point."""
        return (self.triple.n - 1) * self.triple.b(self.r, 1) / self.triple.b(self.r)


@dataclass(frozen=True)
class RiccatiState:
    rho: float
    h_over_f: float
    eta: float
    r: float


@dataclass(frozen=True)
class RiccatiEvent:
    kind: str  # "focal" (blow-up to -inf), "sign-change", "nonpositive-start"
    rho: float
    r: float


@dataclass(frozen=True)
class RiccatiResult:
    states: list[RiccatiState]
    events: list[RiccatiEvent]

    @property
    def blew_up(self) -> bool:
        return any(e.kind == "focal" for e in self.events)


# ---------------------------------------------------------------------------
# optical distance and eta along radial flows


def rho_radial(triple: ProfileTriple, r0: float, r: float) -> float:
    """Signed optical distance ``int_{r0}^{r} dr/f^2`` by adaptive quadrature."""
    triple.check_domain([r0, r])
    if triple.has_horizon and (r0 <= triple.r_min or r <= triple.r_min):
        raise HorizonDivergence("optical distance to the horizon is infinite")
    if r == r0:
        return 0.0
    val, _ = integrate.quad(lambda s: 1.0 / float(triple.F(s)), r0, r, epsabs=0.0, epsrel=1e-13, limit=400)
    return float(val)


def _sphere_eta0(triple: ProfileTriple, r0: float) -> float:
    b1 = float(triple.b(r0, 1))
    if not b1 > 0:
        raise NotMeanConvex(f"coordinate sphere r = {r0} is not strictly mean-convex")
    return float(triple.b(r0)) / b1


def eta_from_sphere(triple: ProfileTriple, r0: float, r: float, step: float = 1e-3) -> float:
    """eta at radius r for the flow leaving the sphere ``{r = r0}``.

    Integrates ``d(r, eta)/drho = (f^2, f^2)`` by RK4 from
    ``eta(r0) = b(r0)/b'(r0)``; a last partial step lands exactly on r.
    """
    eta = _sphere_eta0(triple, r0)
    triple.check_domain(r)
    if r == r0:
        return eta
    sgn = 1.0 if r > r0 else -1.0
    total = abs(rho_radial(triple, r0, r))
    nsteps = max(1, int(math.ceil(total / step)))
    h = sgn * total / nsteps
    x = float(r0)
    for _ in range(nsteps):
        k1 = float(triple.F(x))
        k2 = float(triple.F(x + 0.5 * h * k1))
        k3 = float(triple.F(x + 0.5 * h * k2))
        k4 = float(triple.F(x + h * k3))
        inc = h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        x += inc
        eta += inc
    return eta


class RadialFlow:
    """Level sets of the optical distance from a coordinate sphere or the centre.

    Stores a table of optical distance at geometrically spaced radii; values in
    between come from 16-point Gauss-Legendre sums, and the inverse map
    ``rho -> r`` from monotone cubic interpolation polished by Newton steps.
    """

    def __init__(self, triple: ProfileTriple, r0: float, eta0: float, point: bool = False, growth: float = 1.02):
        self.triple = triple
        self.r0 = float(r0)
        self.eta0 = float(eta0)
        self.point = point
        self.growth = growth
        edges = self._initial_edges()
        self._edges = edges
        self._rho = np.concatenate([[0.0], np.cumsum(self._segment_rho(edges[:-1], edges[1:]))])
        self._interp = None

    @classmethod
    def from_sphere(cls, triple: ProfileTriple, r0: float, eta0: float | None = None) -> "RadialFlow":
        triple.check_domain(r0)
        if triple.has_horizon and r0 <= triple.r_min:
            raise BaseInvalid("base sphere must lie outside the horizon")
        if eta0 is None:
            eta0 = _sphere_eta0(triple, r0)
        elif not eta0 > 0:
            raise BaseInvalid("initial eta must be positive")
        return cls(triple, r0, eta0)

    @classmethod
    def from_point(cls, triple: ProfileTriple) -> "RadialFlow":
        if not triple.capped or float(triple.b(triple.r_min)) != 0.0:
            raise BaseInvalid("point bases are only supported at the centre of a capped model")
        return cls(triple, triple.r_min, 0.0, point=True)

    # -- table management
    def _initial_edges(self) -> np.ndarray:
        d = self.growth - 1.0
        if self.point:
            scale = min(1.0, 0.25 * (self.triple.r_max - self.r0)) if math.isfinite(self.triple.r_max) else 1.0
            head = self.r0 + scale * d * 2.0 ** -np.arange(48, -1, -1.0)
        else:
            x0 = self.r0 - self.triple.r_min if self.triple.r_min < self.r0 else self.r0
            x0 = max(x0, 1e-3)
            head = self.r0 + x0 * d * 2.0 ** -np.arange(40, -1, -1.0)
        edges = np.concatenate([[self.r0], head])
        return self._grow(edges, count=200)

    def _next_edge(self, r: float) -> float:
        base = self.triple.r_min if self.triple.r_min < r else 0.0
        nxt = base + (r - base) * self.growth
        if math.isfinite(self.triple.r_max):
            nxt = min(nxt, r + 0.5 * (self.triple.r_max - r))
        return nxt

    def _grow(self, edges: np.ndarray, count: int) -> np.ndarray:
        out = list(edges)
        for _ in range(count):
            if math.isfinite(self.triple.r_max) and self.triple.r_max - out[-1] < 1e-12 * self.triple.r_max:
                break
            out.append(self._next_edge(out[-1]))
        return np.asarray(out)

    def _segment_rho(self, a, b) -> np.ndarray:
        nodes, w = gl_nodes(a, b)
        return np.sum(w / self.triple.F(nodes), axis=-1)

    def _extend(self, rho_target: float | None = None, r_target: float | None = None) -> None:
        while True:
            done_rho = rho_target is None or self._rho[-1] >= rho_target
            done_r = r_target is None or self._edges[-1] >= r_target
            if done_rho and done_r:
                return
            old = self._edges
            new = self._grow(old[-1:], count=200)[1:]
            if new.size == 0:
                raise OutOfDomain("requested level set lies beyond the end of the domain")
            seg = self._segment_rho(np.concatenate([old[-1:], new[:-1]]), new)
            self._edges = np.concatenate([old, new])
            self._rho = np.concatenate([self._rho, self._rho[-1] + np.cumsum(seg)])
            self._interp = None

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def rho_edges(self) -> np.ndarray:
        return self._rho

    # -- evaluation
    def eta(self, r):
        return np.asarray(r, dtype=float) - self.r0 + self.eta0

    def rho(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r0):
            raise OutOfDomain("radial flows run outward only")
        self._extend(r_target=float(np.max(r)))
        idx = np.clip(np.searchsorted(self._edges, r, side="right") - 1, 0, self._edges.size - 2)
        return self._rho[idx] + self._segment_rho(self._edges[idx], r)

    def r_at(self, t):
        """Radius of the level set ``{rho = t}``."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise OutOfDomain("optical distance must be nonnegative")
        self._extend(rho_target=float(np.max(t)) if t.size else 0.0)
        if self._interp is None:
            self._interp = PchipInterpolator(self._rho, self._edges)
        r = np.asarray(self._interp(t), dtype=float)
        idx = np.clip(np.searchsorted(self._rho, t, side="right") - 1, 0, self._edges.size - 2)
        lo, hi = self._edges[idx], self._edges[idx + 1]
        for _ in range(4):
            r = np.clip(r - (self.rho(r) - t) * self.triple.F(r), lo, hi)
        return r


# ---------------------------------------------------------------------------
# geodesics of the reduced optical plane


def _geo_rhs(triple: ProfileTriple, y: np.ndarray, p_phi: np.ndarray) -> np.ndarray:
    r, _, p_r, _ = y
    F, F1 = triple.F(r), triple.F(r, 1)
    b, b1 = triple.b(r), triple.b(r, 1)
    return np.array(
        [
            F**2 * p_r,
            F / b**2 * p_phi,
            -0.5 * (2.0 * F * F1 * p_r**2 + (F1 / b**2 - 2.0 * F * b1 / b**3) * p_phi**2),
            F,
        ]
    )


def _rk4_batch(triple: ProfileTriple, y0: np.ndarray, p_phi: np.ndarray, h: float, nsteps: int, guard: bool = True):
    """Fixed-step RK4 for a batch of states; returns the full history and exit flags."""
    hist = np.empty((nsteps + 1,) + y0.shape)
    hist[0] = y0
    y = y0.copy()
    alive = np.ones(y0.shape[1], dtype=bool)
    lo, hi = triple.r_min, triple.r_max
    with np.errstate(all="ignore"):
        for i in range(nsteps):
            k1 = _geo_rhs(triple, y, p_phi)
            k2 = _geo_rhs(triple, y + 0.5 * h * k1, p_phi)
            k3 = _geo_rhs(triple, y + 0.5 * h * k2, p_phi)
            k4 = _geo_rhs(triple, y + h * k3, p_phi)
            y = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            bad = ~np.isfinite(y[0]) | (y[0] <= lo) | (y[0] >= hi)
            if guard and np.any(bad & alive):
                alive &= ~bad
                y[:, bad] = hist[i][:, bad]
            hist[i + 1] = y
    return hist, alive


def geodesic_integrate(triple: ProfileTriple, initial: GeodesicState, length: float, step: float = 1e-3) -> Trajectory:
    """RK4 integration of the reduced Hamiltonian flow with rho and eta accumulated."""
    nsteps = max(1, int(math.ceil(length / step)))
    h = length / nsteps
    y0 = np.array([[initial.r], [initial.phi], [initial.p_r], [initial.eta]])
    p_phi = np.array([initial.p_phi])
    lo, hi = triple.r_min, triple.r_max
    hist = np.empty((nsteps + 1, 4))
    hist[0] = y0[:, 0]
    y = y0
    for i in range(nsteps):
        k1 = _geo_rhs(triple, y, p_phi)
        k2 = _geo_rhs(triple, y + 0.5 * h * k1, p_phi)
        k3 = _geo_rhs(triple, y + 0.5 * h * k2, p_phi)
        k4 = _geo_rhs(triple, y + h * k3, p_phi)
        y = y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        r = y[0, 0]
        if not np.isfinite(r) or r <= lo or r >= hi:
            part = _trajectory(triple, hist[: i + 1], initial, h)
            raise LeftDomain(f"geodesic left the domain after optical length {i * h:.6g}", part)
        hist[i + 1] = y[:, 0]
    return _trajectory(triple, hist, initial, h)


def _trajectory(triple, hist, initial: GeodesicState, h: float) -> Trajectory:
    rho = initial.rho + h * np.arange(hist.shape[0])
    return Trajectory(rho, hist[:, 0], hist[:, 1], hist[:, 2], initial.p_phi, hist[:, 3], triple)


def _chart_distance(triple: ProfileTriple, q: tuple[float, float], r, phi):
    """Optical distance to q in the flat chart frozen at q (exact to second order)."""
    rq, phq = q
    F = float(triple.F(rq))
    b = float(triple.b(rq))
    dphi = np.angle(np.exp(1j * (np.asarray(phi) - phq)))
    return np.sqrt((np.asarray(r) - rq) ** 2 / F**2 + b * b / F * dphi**2)


def _closest_approach(triple, q, hist: np.ndarray, p_phi: float, h: float, j: int) -> tuple[float, float]:
    """Arclength and miss distance of the point of shot ``j`` closest to q."""
    r, phi = hist[:, 0, j], hist[:, 1, j]
    d = _chart_distance(triple, q, r, phi)
    k = int(np.argmin(d))
    lo, hi = max(k - 1, 0), min(k + 1, hist.shape[0] - 1)
    if hi == lo:
        return k * h, float(d[k])
    # cubic Hermite interpolation between stored nodes using the flow's velocities
    vel = _geo_rhs(triple, hist[lo : hi + 1, :, j].T, np.array([p_phi]))
    best = (k * h, float(d[k]))
    for a in range(hi - lo):
        y0, y1 = hist[lo + a, :2, j], hist[lo + a + 1, :2, j]
        v0, v1 = vel[:2, a], vel[:2, a + 1]
        s = np.linspace(0.0, 1.0, 2001)
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        pts = np.outer(h00, y0) + np.outer(h10, h * v0) + np.outer(h01, y1) + np.outer(h11, h * v1)
        dd = _chart_distance(triple, q, pts[:, 0], pts[:, 1])
        i = int(np.argmin(dd))
        if dd[i] < best[1]:
            best = ((lo + a + s[i]) * h, float(dd[i]))
    return best


def distance_point(
    triple: ProfileTriple,
    p: tuple[float, float],
    q: tuple[float, float],
    fan: int = 32,
    nsteps: int = 800,
) -> float:
    """Upper bound on the optical distance between two points of a reduced plane.

    Points are given as ``(r, phi)``. A fan of unit-speed geodesics is shot
    from p; the best arrival is refined over the launch angle with a bounded
    scalar minimizer, and the bound is the arclength to the closest approach
    plus the remaining miss. The radial-then-circular path supplies a
    fallback bound.
    """
    if fan < 16:
        raise ValueError("fan must be at least 16")
    rp, php = p
    rq, phq = q
    triple.check_domain([rp, rq], allow_boundary=False)
    if rp == rq and math.isclose(math.remainder(php - phq, 2 * math.pi), 0.0, abs_tol=0.0):
        return 0.0
    dphi = abs(math.remainder(phq - php, 2 * math.pi))
    fallback = abs(rho_radial(triple, rp, rq)) + float(triple.b(rq)) / math.sqrt(float(triple.F(rq))) * dphi
    length = 1.05 * fallback
    h = length / nsteps

    def shoot(alphas: np.ndarray):
        states = [GeodesicState.from_angle(triple, rp, php, a) for a in alphas]
        y0 = np.array([[s.r for s in states], [s.phi for s in states], [s.p_r for s in states], [0.0] * len(states)])
        p_phi = np.array([s.p_phi for s in states])
        hist, alive = _rk4_batch(triple, y0, p_phi, h, nsteps)
        return hist, p_phi, alive

    alphas = np.linspace(-math.pi, math.pi, fan, endpoint=False)
    hist, p_phi, alive = shoot(alphas)
    results = [_closest_approach(triple, q, hist, p_phi[j], h, j) for j in range(fan)]
    if not np.any(alive):
        raise NoArrival("every shot left the domain")
    j = int(np.argmin([m for _, m in results]))

    def miss(a: float) -> float:
        hh, pp, _ = shoot(np.array([a]))
        return _closest_approach(triple, q, hh, pp[0], h, 0)[1]

    width = 2 * math.pi / fan
    opt = optimize.minimize_scalar(miss, bounds=(alphas[j] - width, alphas[j] + width), method="bounded", options={"xatol": 1e-11})
    hh, pp, _ = shoot(np.array([opt.x]))
    s, m = _closest_approach(triple, q, hh, pp[0], h, 0)
    best = min(s + m, results[j][0] + results[j][1])
    return float(min(best, fallback))


# ---------------------------------------------------------------------------
# Riccati equation for h = H/f along radial flows


def riccati_evolve(
    triple: ProfileTriple,
    r0: float,
    r_end: float,
    h0_over_f0: float,
    step: float = 1e-3,
    blowup: float | None = None,
) -> RiccatiResult:
    """Integrate ``dh/drho = -f^2 h^2/(n-1)`` for h = H/f along the radial flow.

    The state (r, eta, h) is advanced by RK4 in rho. Once ``|h|`` exceeds
    ``blowup`` (default ``0.02/step``, beyond which a fixed step no longer
    resolves the growth) the reciprocal ``1/h``, which stays regular, is
    integrated to its zero; that zero locates a focal point.
    """
    n = triple.n
    blowup = 0.02 / step if blowup is None else blowup
    c = 1.0 / (n - 1)
    total = rho_radial(triple, r0, r_end)
    if total < 0:
        raise ValueError("r_end must lie outside r0")
    nsteps = max(1, int(math.ceil(total / step)))
    dr = total / nsteps
    r, eta, hv = float(r0), float(_sphere_eta0(triple, r0)), float(h0_over_f0)
    states = [RiccatiState(0.0, hv, eta, r)]
    events: list[RiccatiEvent] = []
    if hv <= 0:
        events.append(RiccatiEvent("nonpositive-start", 0.0, r))

    def rhs(y):
        F = float(triple.F(y[0]))
        return np.array([F, F, -F * c * y[2] ** 2])

    def rhs_inv(y):
        F = float(triple.F(y[0]))
        return np.array([F, F, F * c])

    y = np.array([r, eta, hv])
    for i in range(nsteps):
        reciprocal = abs(y[2]) > blowup
        fun = rhs_inv if reciprocal else rhs
        z = y.copy()
        if reciprocal:
            z[2] = 1.0 / z[2]
        k1 = fun(z)
        k2 = fun(z + 0.5 * dr * k1)
        k3 = fun(z + 0.5 * dr * k2)
        k4 = fun(z + dr * k3)
        z_new = z + dr * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        rho = (i + 1) * dr
        if reciprocal:
            if z[2] * z_new[2] <= 0:
                frac = z[2] / (z[2] - z_new[2])
                events.append(RiccatiEvent("focal", i * dr + frac * dr, z[0] + frac * (z_new[0] - z[0])))
                return RiccatiResult(states, events)
            z_new[2] = 1.0 / z_new[2]
        if y[2] * z_new[2] < 0:
            events.append(RiccatiEvent("sign-change", rho, z_new[0]))
        y = z_new
        states.append(RiccatiState(rho, float(y[2]), float(y[1]), float(y[0])))
    return RiccatiResult(states, events)


def focal_distance_prediction(triple: ProfileTriple, r0: float, h0_over_f0: float) -> float:
    """Radius where the exact Riccati solution with negative data reaches -inf."""
    if h0_over_f0 >= 0:
        return math.inf
    return r0 - (triple.n - 1) / h0_over_f0


def coordinate_sphere_mean_curvature(triple: ProfileTriple, r):
    """H = (n-1) f b'/b for the sphere ``{r}`` with outward normal."""
    r = triple.check_domain(r)
    return (triple.n - 1) * triple.lapse(r) * triple.b(r, 1) / triple.b(r)


def laplacian_comparison_check(
    triple: ProfileTriple,
    r0: float,
    grid,
    tol: float = 1e-10,
    require_substatic: bool = True,
) -> CheckReport:
    """Check ``0 < H/f <= (n-1)/eta`` on coordinate spheres of the flow from r0."""
    grid = np.asarray(grid, dtype=float)
    if require_substatic:
        pre = check_substatic(triple, grid)
        if not pre.passed:
            raise PrerequisiteFailed(f"triple is not substatic on the grid (min Q = {pre.lhs:.3g})")
    flow = RadialFlow.from_sphere(triple, r0)
    grid = grid[grid >= r0]
    n = triple.n
    hf = (n - 1) * triple.b(grid, 1) / triple.b(grid)
    bound = (n - 1) / flow.eta(grid)
    slack = bound - hf
    i = int(np.argmin(slack))
    rep = CheckReport.build(
        "laplacian_comparison",
        float(bound[i]),
        float(hf[i]),
        tol,
        equality_tol=1e-10,
        context={
            "argmin_r": float(grid[i]),
            "max_slack": float(np.max(slack)),
            "min_h_over_f": float(np.min(hf)),
            "max_abs_h_eta_defect": float(np.max(np.abs(hf * flow.eta(grid) - (n - 1)))),
        },
    )
    if not np.all(hf > 0):
        from dataclasses import replace

        rep = replace(rep, passed=False, equality=False)
    return rep


def point_mean_curvature_product(triple: ProfileTriple, rho: float) -> float:
    """H * rho on the optical sphere of radius rho about the centre of a capped model."""
    flow = RadialFlow.from_point(triple)
    r = float(flow.r_at(rho))
    return float(coordinate_sphere_mean_curvature(triple, r)) * rho


def uniformity_ratio(triple: ProfileTriple, r1: float, r2: float, r_far: float) -> float:
    """Ratio of f^2-lengths of the radial geodesics from two spheres to a far point.

    Corroborates uniform ends; it is not a certificate.
    """
    a = RadialFlow.from_sphere(triple, r1)
    b = RadialFlow.from_sphere(triple, r2)
    return float((a.eta(r_far) - a.eta0) / (b.eta(r_far) - b.eta0))
