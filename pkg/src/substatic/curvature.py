"""Curvature of warped products ``dr^2/F + b^2 g_Sigma`` and the tensors built from it.

Every quantity has two routes: closed forms written in terms of the arclength
``s`` (``ds = dr/f``) and a finite-difference oracle that differentiates the
full n-dimensional metric in polar coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import qmc

from .errors import HorizonEvaluation, StepUnderflow
from .models import ProfileTriple, RadialFunction
from .numerics import richardson
from .report import CheckReport

ORACLE_GAP = 0.05  # FD oracle refuses radii within this fraction of r_min of a horizon


@dataclass(frozen=True)
class FrameTensor2:
    """Diagonal symmetric 2-tensor in the orthonormal frame ``(e_r, e_tan)``."""

    rad_rad: float | np.ndarray
    tan_tan: float | np.ndarray
    status: str = "closed-form"

    def __sub__(self, other: "FrameTensor2") -> "FrameTensor2":
        return FrameTensor2(self.rad_rad - other.rad_rad, self.tan_tan - other.tan_tan, "difference")

    def scaled(self, c) -> "FrameTensor2":
        return FrameTensor2(self.rad_rad * c, self.tan_tan * c, self.status)

    def min_eig(self):
        return np.minimum(self.rad_rad, self.tan_tan)

    def max_abs(self) -> float:
        return float(np.max(np.maximum(np.abs(self.rad_rad), np.abs(self.tan_tan))))

    def as_tuple(self) -> tuple[float, float]:
        return float(self.rad_rad), float(self.tan_tan)


@dataclass(frozen=True)
class StressEnergy:
    T_tt: float
    T_tan: float
    T_rad: float
    lam: float


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class _Warp:
    """Arclength data of a warped product at given radii."""

    n: int
    f: np.ndarray
    phi: np.ndarray  # warping b
    phi_s: np.ndarray  # db/ds
    phi_ss: np.ndarray
    f_s: np.ndarray  # df/ds
    f_ss: np.ndarray
    ric_rr: np.ndarray
    ric_tt: np.ndarray

    @property
    def hess_rr(self):
        return self.f_ss

    @property
    def hess_tt(self):
        return self.f_s * self.phi_s / self.phi

    @property
    def lap(self):
        return self.hess_rr + (self.n - 1) * self.hess_tt


def _warp_from_jet(n, lam, F, F1, F2, b, b1, b2) -> _Warp:
    f = np.sqrt(F)
    phi_s = f * b1
    phi_ss = 0.5 * F1 * b1 + F * b2
    f_s = 0.5 * F1
    f_ss = 0.5 * f * F2
    ric_rr = -(n - 1) * phi_ss / b
    ric_tt = (n - 2) * (lam - phi_s**2) / b**2 - phi_ss / b
    return _Warp(n, f, b, phi_s, phi_ss, f_s, f_ss, ric_rr, ric_tt)


def _interior(triple: ProfileTriple, r):
    r = triple.check_domain(r)
    if np.any(triple.F(r) <= 0):
        raise HorizonEvaluation("closed forms need f > 0")
    return r


def _warp(triple: ProfileTriple, r) -> _Warp:
    r = _interior(triple, r)
    return _warp_from_jet(
        triple.n,
        triple.einstein_const,
        triple.F(r),
        triple.F(r, 1),
        triple.F(r, 2),
        triple.b(r),
        triple.b(r, 1),
        triple.b(r, 2),
    )


def _near_horizon(triple: ProfileTriple, r) -> bool:
    return bool(triple.has_horizon and np.any(np.asarray(r) - triple.r_min < ORACLE_GAP * triple.r_min))


def ricci(triple: ProfileTriple, r, verify: bool = False, tol: float = 1e-6) -> FrameTensor2:
    """Frame Ricci components of the triple's metric.

    With ``verify=True`` the finite-difference oracle is consulted and an
    ``AssertionError`` raised on disagreement; near a horizon the result is
    returned with status ``unverified-by-oracle`` instead.
    """
    w = _warp(triple, r)
    out = FrameTensor2(w.ric_rr, w.ric_tt)
    if verify:
        if _near_horizon(triple, r):
            return replace(out, status="unverified-by-oracle")
        for rr in np.atleast_1d(r):
            fd = fd_curvature_oracle(triple, float(rr))
            cf = ricci(triple, float(rr))
            if _rel_gap(cf, fd) > tol:
                raise AssertionError(f"closed-form Ricci disagrees with FD oracle at r={rr}")
        out = replace(out, status="verified")
    return out


def substatic_tensor(triple: ProfileTriple, r) -> FrameTensor2:
    """Q = f Ric - Hess f + (Lap f) g in frame components."""
    w = _warp(triple, r)
    return FrameTensor2(w.f * w.ric_rr - w.hess_rr + w.lap, w.f * w.ric_tt - w.hess_tt + w.lap)


def conformal_triple(triple: ProfileTriple) -> ProfileTriple:
    """The optical metric g/f^2, itself a warped product with F^2 and b/f."""
    F, b = triple.F, triple.b

    def bt(r):
        return b(r) / np.sqrt(F(r))

    def bt1(r):
        Fr = F(r)
        return b(r, 1) / np.sqrt(Fr) - 0.5 * b(r) * F(r, 1) / Fr**1.5

    def bt2(r):
        Fr, F1 = F(r), F(r, 1)
        return (
            b(r, 2) / np.sqrt(Fr)
            - b(r, 1) * F1 / Fr**1.5
            - 0.5 * b(r) * F(r, 2) / Fr**1.5
            + 0.75 * b(r) * F1**2 / Fr**2.5
        )

    return ProfileTriple(
        n=triple.n,
        r_min=triple.r_min,
        r_max=triple.r_max,
        F=RadialFunction.squared(F),
        b=RadialFunction(bt, bt1, bt2),
        cross_section=triple.cross_section,
        has_horizon=triple.has_horizon,
        family="conformal",
        lam=triple.lam,
    )


def _cd01_sides_closed(triple: ProfileTriple, r) -> tuple[FrameTensor2, FrameTensor2]:
    """Both sides of the conformal CD(0,1) identity, in the frame of g."""
    n = triple.n
    q = substatic_tensor(triple, r)
    w = _warp(triple, r)
    lhs = q.scaled(1.0 / w.f)
    conf = _warp(conformal_triple(triple), r)
    F, F1, F2 = triple.F(r), triple.F(r, 1), triple.F(r, 2)
    # psi = -(n-1)/2 log F; conformal arclength has ds~ = dr/F
    psi_s = -(n - 1) * 0.5 * F1
    psi_ss = -(n - 1) * 0.5 * F * F2
    rr = conf.ric_rr + psi_ss + psi_s**2 / (n - 1)
    tt = conf.ric_tt + psi_s * conf.phi_s / conf.phi
    # a g-unit vector has g~-length 1/f
    return lhs, FrameTensor2(rr / F, tt / F)


def lixia_ricci(triple: ProfileTriple, r, alpha: float, gamma: float, u_coeff: float = 1.0) -> FrameTensor2:
    """Ricci tensor of the connection family built from ``u = u_coeff * log f``."""
    n = triple.n
    w = _warp(triple, r)
    F, F1, F2 = triple.F(r), triple.F(r, 1), triple.F(r, 2)
    u_s = u_coeff * F1 / (2.0 * w.f)
    u_ss = 0.5 * u_coeff * (F2 - F1**2 / (2.0 * F))
    hess_tt = u_s * w.phi_s / w.phi
    lap_u = u_ss + (n - 1) * hess_tt
    k1 = (n - 1) * alpha + gamma
    k2 = (n - 1) * alpha**2 - gamma**2
    k3 = gamma * lap_u + (gamma**2 + (n - 1) * alpha * gamma) * u_s**2
    return FrameTensor2(w.ric_rr - k1 * u_ss + k2 * u_s**2 + k3, w.ric_tt - k1 * hess_tt + k3)


def stress_energy(triple: ProfileTriple, r, lam: float) -> StressEnergy:
    """Stress-energy of the static spacetime ``-f^2 dt^2 + g`` (frame, with T_tt on d/dt)."""
    w = _warp(triple, r)
    scal = w.ric_rr + (triple.n - 1) * w.ric_tt
    T_tt = (-lam + 0.5 * scal) * w.f**2
    iso = lam - 0.5 * scal + w.lap / w.f
    return StressEnergy(T_tt, w.ric_rr - w.hess_rr / w.f + iso, w.ric_tt - w.hess_tt / w.f + iso, lam)


# ---------------------------------------------------------------------------
# finite-difference oracle


def _warped_metric(Ffun, bfun, n: int, lam: float):
    """Batch metric ``diag(1/F, b^2/lam, b^2 sin^2(th1)/lam, ...)`` in polar coordinates."""

    def metric(x: np.ndarray) -> np.ndarray:
        r = x[:, 0]
        diag = np.empty((x.shape[0], n))
        diag[:, 0] = 1.0 / Ffun(r)
        w = bfun(r) ** 2 / lam
        for k in range(1, n):
            diag[:, k] = w
            w = w * np.sin(x[:, k]) ** 2
        out = np.zeros((x.shape[0], n, n))
        idx = np.arange(n)
        out[:, idx, idx] = diag
        return out

    return metric


def _stencil(x0: np.ndarray, h: np.ndarray):
    n = x0.size
    pts = [x0]
    for k in range(n):
        for s in (1, -1):
            p = x0.copy()
            p[k] += s * h[k]
            pts.append(p)
    for k in range(n):
        for l in range(k + 1, n):
            for sk in (1, -1):
                for sl in (1, -1):
                    p = x0.copy()
                    p[k] += sk * h[k]
                    p[l] += sl * h[l]
                    pts.append(p)
    return np.array(pts)


def _derivs(vals: np.ndarray, h: np.ndarray):
    """First and second partials from values on ``_stencil`` points."""
    n = h.size
    v0 = vals[0]
    plus = [vals[1 + 2 * k] for k in range(n)]
    minus = [vals[2 + 2 * k] for k in range(n)]
    d1 = np.stack([(plus[k] - minus[k]) / (2 * h[k]) for k in range(n)])
    d2 = np.empty((n, n) + v0.shape)
    for k in range(n):
        d2[k, k] = (plus[k] - 2 * v0 + minus[k]) / h[k] ** 2
    i = 1 + 2 * n
    for k in range(n):
        for l in range(k + 1, n):
            pp, pm, mp, mm = vals[i : i + 4]
            i += 4
            d2[k, l] = d2[l, k] = (pp - pm - mp + mm) / (4 * h[k] * h[l])
    return v0, d1, d2


def _fd_pass(metric, scalar, x0: np.ndarray, h: np.ndarray):
    """One FD evaluation: metric, Ricci, and Hessian of ``scalar`` in coordinates."""
    pts = _stencil(x0, h)
    g, dg, ddg = _derivs(metric(pts), h)
    gi = np.linalg.inv(g)
    # Christoffel symbols Gamma^a_bc
    lower = 0.5 * (np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg)
    gam = np.einsum("ad,dbc->abc", gi, lower)
    dgi = -np.einsum("ad,edf,fc->eac", gi, dg, gi)
    dlower = 0.5 * (np.einsum("ebdc->edbc", ddg) + np.einsum("ecdb->edbc", ddg) - ddg)
    dgam = np.einsum("ead,dbc->eabc", dgi, lower) + np.einsum("ad,edbc->eabc", gi, dlower)
    ric = (
        np.einsum("aabc->bc", dgam)
        - np.einsum("caba->bc", dgam)
        + np.einsum("aad,dbc->bc", gam, gam)
        - np.einsum("acd,dba->bc", gam, gam)
    )
    hess = None
    if scalar is not None:
        _, du, ddu = _derivs(scalar(pts), h)
        hess = ddu - np.einsum("kij,k->ij", gam, du)
    return g, ric, hess


def _fd_tensors(triple_F, triple_b, n, lam, r, scalar=None):
    if not r > 0:
        raise StepUnderflow("FD oracle needs r > 0")
    h0 = 1e-4 * max(1.0, r)
    if r - 2 * h0 <= 0:
        raise StepUnderflow(f"step {h0} too large for r = {r}")
    metric = _warped_metric(triple_F, triple_b, n, lam)
    x0 = np.concatenate([[r], np.full(n - 1, 0.5 * math.pi)])
    hv = np.concatenate([[h0], np.full(n - 1, 1e-4)])
    g1, ric1, hess1 = _fd_pass(metric, scalar, x0, hv)
    _, ric2, hess2 = _fd_pass(metric, scalar, x0, 0.5 * hv)
    ric = richardson(ric1, ric2)
    hess = richardson(hess1, hess2) if scalar is not None else None
    return g1, ric, hess


def _frame(g: np.ndarray, t: np.ndarray) -> FrameTensor2:
    return FrameTensor2(t[0, 0] / g[0, 0], t[1, 1] / g[1, 1], "fd-oracle")


def _guard(triple: ProfileTriple, r: float) -> None:
    triple.check_domain(r)
    if _near_horizon(triple, r):
        raise HorizonEvaluation(f"r = {r} is within {ORACLE_GAP} r_min of the horizon")
    h0 = 1e-4 * max(1.0, r)
    if r - 2 * h0 <= triple.r_min and not triple.has_horizon and triple.capped:
        raise StepUnderflow(f"r = {r} too close to the centre for the FD stencil")
    if math.isfinite(triple.r_max) and r + 2 * h0 >= triple.r_max:
        raise StepUnderflow(f"r = {r} too close to r_max for the FD stencil")


def fd_curvature_oracle(triple: ProfileTriple, r: float) -> FrameTensor2:
    """Frame Ricci from central differences of the metric in polar coordinates.

    Uses only values of F and b (never their derivatives), steps
    ``h = 1e-4 max(1, r)`` and ``h/2`` combined by Richardson extrapolation, at
    the equatorial point of the angular chart.
    """
    _guard(triple, r)
    g, ric, _ = _fd_tensors(lambda x: triple.F(x), lambda x: triple.b(x), triple.n, triple.einstein_const, r)
    return _frame(g, ric)


def fd_substatic_tensor(triple: ProfileTriple, r: float) -> FrameTensor2:
    """Q computed from FD Ricci and FD Hessian of f."""
    _guard(triple, r)
    n = triple.n

    def lapse(x):
        return np.sqrt(triple.F(x[:, 0]))

    g, ric, hess = _fd_tensors(
        lambda x: triple.F(x), lambda x: triple.b(x), n, triple.einstein_const, r, scalar=lapse
    )
    f = math.sqrt(float(triple.F(r)))
    lap = np.trace(np.linalg.solve(g, hess))
    return _frame(g, f * ric - hess + lap * g)


def _cd01_rhs_fd(triple: ProfileTriple, r: float) -> FrameTensor2:
    _guard(triple, r)
    n = triple.n

    def psi(x):
        return -0.5 * (n - 1) * np.log(triple.F(x[:, 0]))

    gt, ric, hess = _fd_tensors(
        lambda x: triple.F(x) ** 2,
        lambda x: triple.b(x) / np.sqrt(triple.F(x)),
        n,
        triple.einstein_const,
        r,
        scalar=psi,
    )
    h = 1e-4 * max(1.0, r)
    dpsi_r = float((psi(np.array([[r + h]])) - psi(np.array([[r - h]])))[0] / (2 * h))
    dpsi_r2 = float((psi(np.array([[r + h / 2]])) - psi(np.array([[r - h / 2]])))[0] / h)
    dpsi = richardson(dpsi_r, dpsi_r2)
    t = ric + hess
    t[0, 0] += dpsi**2 / (n - 1)
    # convert to the frame of g = F * g~
    F = float(triple.F(r))
    return FrameTensor2(t[0, 0] / (gt[0, 0] * F), t[1, 1] / (gt[1, 1] * F), "fd-oracle")


def _rel_gap(cf: FrameTensor2, fd: FrameTensor2) -> float:
    return max(
        abs(float(cf.rad_rad) - float(fd.rad_rad)) / (1 + abs(float(fd.rad_rad))),
        abs(float(cf.tan_tan) - float(fd.tan_tan)) / (1 + abs(float(fd.tan_tan))),
    )


# ---------------------------------------------------------------------------
# checks


def oracle_gap(triple: ProfileTriple, grid, which: str = "ricci") -> float:
    """Largest relative closed-form/FD disagreement over radii outside the horizon gap."""
    worst = 0.0
    for r in np.atleast_1d(grid):
        r = float(r)
        if _near_horizon(triple, r):
            continue
        if which == "ricci":
            gap = _rel_gap(ricci(triple, r), fd_curvature_oracle(triple, r))
        else:
            gap = _rel_gap(substatic_tensor(triple, r), fd_substatic_tensor(triple, r))
        worst = max(worst, gap)
    return worst


def check_substatic(triple: ProfileTriple, grid, tol: float = 1e-10, verify_oracle: bool = False) -> CheckReport:
    """Minimum eigenvalue of Q over a radial grid must be >= -tol."""
    grid = np.asarray(grid, dtype=float)
    q = substatic_tensor(triple, grid)
    mins = np.minimum(q.rad_rad, q.tan_tan)
    i = int(np.argmin(mins))
    ctx = {
        "argmin_r": float(grid[i]),
        "max_abs_rad_rad": float(np.max(np.abs(q.rad_rad))),
        "min_tan_tan": float(np.min(q.tan_tan)),
        "max_abs_Q": q.max_abs(),
        "points": int(grid.size),
    }
    if verify_oracle:
        ctx["oracle_gap_ricci"] = oracle_gap(triple, grid, "ricci")
        ctx["oracle_gap_Q"] = oracle_gap(triple, grid, "Q")
    return CheckReport.build("substatic", float(mins[i]), 0.0, tol, equality_tol=1e-8, context=ctx)


def cd01_identity_check(triple: ProfileTriple, r: float, path: str = "closed", tol: float | None = None) -> CheckReport:
    """Compare the two sides of the CD(0,1) conformal identity at radius r.

    ``path='closed'`` evaluates the right side from the closed-form curvature of
    the optical metric; ``path='fd'`` from its finite-difference curvature.
    """
    lhs, rhs_cf = _cd01_sides_closed(triple, r)
    if path == "closed":
        rhs = rhs_cf
        diff = max(abs(float(lhs.rad_rad - rhs.rad_rad)), abs(float(lhs.tan_tan - rhs.tan_tan)))
        tol = 1e-10 if tol is None else tol
    elif path == "fd":
        rhs = _cd01_rhs_fd(triple, r)
        diff = _rel_gap(lhs, rhs)
        tol = 1e-6 if tol is None else tol
    else:
        raise ValueError(f"unknown path {path!r}")
    return CheckReport.build(
        f"cd01_{path}",
        0.0,
        diff,
        tol,
        equality_tol=tol,
        context={"r": float(r), "lhs": lhs.as_tuple(), "rhs": rhs.as_tuple()},
    )


def null_angles(samples: int) -> np.ndarray:
    """Deterministic low-discrepancy angles in [0, pi) between radial and tangential."""
    return math.pi * qmc.Halton(d=1, scramble=False).random(samples)[:, 0]


def null_energy(triple: ProfileTriple, r, lam: float, angles: np.ndarray) -> np.ndarray:
    """T(X, X) for X = d/dt + Y, g(Y, Y) = f^2, Y at the given angles from e_r."""
    T = stress_energy(triple, r, lam)
    F = triple.F(np.asarray(r, dtype=float))
    c2 = np.cos(angles) ** 2
    s2 = np.sin(angles) ** 2
    T_tt = np.asarray(T.T_tt)[..., None]
    return T_tt + np.asarray(F)[..., None] * (c2 * np.asarray(T.T_rad)[..., None] + s2 * np.asarray(T.T_tan)[..., None])


def nec_check(
    triple: ProfileTriple,
    lam: float | None = None,
    samples: int = 1000,
    grid=None,
    tol: float = 1e-10,
    sign_tol: float = 1e-9,
) -> CheckReport:
    """Null energy condition on sampled null directions, with the substatic sign test."""
    lam = triple.lam if lam is None else lam
    if grid is None:
        grid = default_grid(triple)
    grid = np.asarray(grid, dtype=float)
    vals = null_energy(triple, grid, lam, null_angles(samples))
    per_r = vals.min(axis=1)
    qmin = substatic_tensor(triple, grid).min_eig()

    def sign(x):
        return np.where(x > sign_tol, 1, np.where(x < -sign_tol, -1, 0))

    s_nec, s_q = sign(per_r), sign(qmin)
    agree = bool(np.all((s_nec == s_q) | (s_nec == 0) | (s_q == 0)))
    i = int(np.argmin(per_r))
    rep = CheckReport.build(
        "nec",
        float(per_r[i]),
        0.0,
        tol,
        equality_tol=1e-8,
        context={"argmin_r": float(grid[i]), "samples": samples, "sign_equivalent": agree, "lambda": lam},
    )
    if not agree:
        rep = replace(rep, passed=False, equality=False)
    return rep


def default_grid(triple: ProfileTriple, npts: int = 100) -> np.ndarray:
    """Log-spaced radii from just outside the inner boundary to a far radius."""
    if triple.has_horizon:
        lo, hi = 1.05 * triple.r_min, 50.0 * triple.r_min
    elif triple.capped:
        lo, hi = 0.05, 20.0
    else:
        lo, hi = triple.r_min + 0.05 * max(1.0, triple.r_min), 50.0 * max(1.0, triple.r_min)
    if math.isfinite(triple.r_max):
        hi = min(hi, 0.95 * triple.r_max)
    return np.geomspace(lo, hi, npts)
