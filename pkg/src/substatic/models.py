"""Rotationally symmetric triples ``g = dr^2/f^2 + b(r)^2 g_Sigma`` with lapse ``f``.

The lapse is stored through its square ``F = f^2``; ``F`` stays smooth at a
horizon where ``f`` itself has a square-root singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline

from .errors import BadProfile, DomainEmpty, InapplicableEnd, ModelError, NakedSingularity, OutOfDomain
from .numerics import fit_inverse_powers, sphere_area
from .report import CheckReport

FAMILIES = (
    "space-form",
    "schwarzschild",
    "reissner-nordstrom",
    "schwarzschild-de-sitter",
    "schwarzschild-ads",
    "custom",
)


class RadialFunction:
    """A scalar function of r bundled with its first two derivatives."""

    def __init__(self, f0: Callable, f1: Callable, f2: Callable):
        self._d = (f0, f1, f2)

    def __call__(self, r, nu: int = 0):
        return self._d[nu](r)

    @classmethod
    def constant(cls, c: float) -> "RadialFunction":
        return cls(
            lambda r: np.full_like(np.asarray(r, dtype=float), c),
            lambda r: np.zeros_like(np.asarray(r, dtype=float)),
            lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        )

    @classmethod
    def identity(cls) -> "RadialFunction":
        return cls(
            lambda r: np.asarray(r, dtype=float) * 1.0,
            lambda r: np.ones_like(np.asarray(r, dtype=float)),
            lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        )

    @classmethod
    def squared(cls, g: "RadialFunction") -> "RadialFunction":
        """Return g^2 with derivatives, e.g. to build F from a lapse f."""
        return cls(
            lambda r: g(r) ** 2,
            lambda r: 2.0 * g(r) * g(r, 1),
            lambda r: 2.0 * (g(r, 1) ** 2 + g(r) * g(r, 2)),
        )


@dataclass(frozen=True)
class CrossSection:
    dim: int
    unit_area: float
    einstein_const: float = 1.0
    kind: str = "round-sphere"

    def __post_init__(self):
        if self.dim < 2:
            raise ModelError("cross-section dimension must be at least 2")
        if not self.unit_area > 0:
            raise ModelError("unit_area must be positive")
        if self.einstein_const < 1:
            raise ModelError("einstein_const must be >= 1")
        if self.kind == "round-sphere":
            if abs(self.unit_area - sphere_area(self.dim)) > 1e-12 * sphere_area(self.dim):
                raise ModelError("round-sphere cross-section must have the unit sphere area")
            if self.einstein_const != 1.0:
                raise ModelError("round-sphere cross-section has einstein_const 1")
        elif self.kind != "einstein":
            raise ModelError(f"unknown cross-section kind {self.kind!r}")

    @classmethod
    def round(cls, dim: int) -> "CrossSection":
        return cls(dim, sphere_area(dim), 1.0, "round-sphere")

    @classmethod
    def scaled(cls, dim: int, ratio: float, einstein_const: float = 1.0) -> "CrossSection":
        """Einstein slice whose area is ``ratio`` times the round one (e.g. a quotient)."""
        return cls(dim, ratio * sphere_area(dim), einstein_const, "einstein")

    @property
    def is_round(self) -> bool:
        return self.einstein_const == 1.0

    @property
    def area_ratio(self) -> float:
        return self.unit_area / sphere_area(self.dim)


@dataclass(frozen=True)
class ModelSpec:
    family: str
    n: int = 3
    lam: float = 0.0
    mass: float = 0.0
    charge: float = 0.0
    cross_section: CrossSection | None = None
    profile_table: tuple | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ModelError(f"unknown family {self.family!r}")
        if self.n < 3:
            raise ModelError("dimension n must be at least 3")
        if self.mass < 0:
            raise ModelError("negative mass is not supported")
        if self.cross_section is None:
            object.__setattr__(self, "cross_section", CrossSection.round(self.n - 1))
        elif self.cross_section.dim != self.n - 1:
            raise ModelError("cross-section dimension must equal n - 1")
        if self.family == "custom" and self.profile_table is None:
            raise BadProfile("custom family needs a profile_table")
        if self.family != "custom" and self.profile_table is not None:
            raise ModelError("profile_table is only accepted for the custom family")


@dataclass(frozen=True)
class ProfileTriple:
    """Profiles and domain of a rotationally symmetric triple.

    ``F`` is the squared lapse ``f^2``; ``b`` the warping function. Both carry
    derivatives up to order two.
    """

    n: int
    r_min: float
    r_max: float
    F: RadialFunction
    b: RadialFunction
    cross_section: CrossSection
    has_horizon: bool
    family: str = "custom"
    lam: float = 0.0
    b_is_identity: bool = False
    capped: bool = False
    spec: ModelSpec | None = field(default=None, compare=False)

    @property
    def unit_area(self) -> float:
        return self.cross_section.unit_area

    @property
    def einstein_const(self) -> float:
        return self.cross_section.einstein_const

    def boundary_area(self) -> float:
        """Area of the inner boundary ``{r = r_min}``; zero for capped triples."""
        if self.capped:
            return 0.0
        return float(self.b(self.r_min)) ** (self.n - 1) * self.unit_area

    def check_domain(self, r, allow_boundary: bool = True):
        r = np.asarray(r, dtype=float)
        slack = 1e-13 * max(1.0, abs(self.r_min))
        lo = self.r_min - slack
        bad = r < lo if allow_boundary else r <= self.r_min
        if math.isfinite(self.r_max):
            hi = self.r_max + 1e-13 * max(1.0, self.r_max)
            bad = bad | (r > hi if allow_boundary else r >= self.r_max)
        if np.any(bad) or np.any(~np.isfinite(r)):
            raise OutOfDomain(f"radius outside [{self.r_min}, {self.r_max}]: {r}")
        return r

    def lapse(self, r):
        """f = sqrt(F), clipped at zero on the boundary."""
        return np.sqrt(np.maximum(self.F(r), 0.0))


# ---------------------------------------------------------------------------
# construction


def model_F(n: int, lam: float, m: float, q: float) -> RadialFunction:
    """Squared lapse of the charged, cosmological black-hole family with b = r."""
    a = 2.0 * lam / (n * (n - 1))
    p = n - 2
    s = 2 * n - 4

    def F0(r):
        r = np.asarray(r, dtype=float)
        return 1.0 - a * r**2 - 2.0 * m / r**p + q**2 / r**s

    def F1(r):
        r = np.asarray(r, dtype=float)
        return -2.0 * a * r + 2.0 * m * p / r ** (p + 1) - q**2 * s / r ** (s + 1)

    def F2(r):
        r = np.asarray(r, dtype=float)
        return -2.0 * a - 2.0 * m * p * (p + 1) / r ** (p + 2) + q**2 * s * (s + 1) / r ** (s + 2)

    if m == 0.0 and q == 0.0:
        # keep r = 0 finite for capped models
        return RadialFunction(
            lambda r: 1.0 - a * np.asarray(r, dtype=float) ** 2,
            lambda r: -2.0 * a * np.asarray(r, dtype=float),
            lambda r: np.full_like(np.asarray(r, dtype=float), -2.0 * a),
        )
    return RadialFunction(F0, F1, F2)


def _positive_roots(F: RadialFunction, lo: float = 1e-6, hi: float = 1e6, npts: int = 4000) -> list[float]:
    grid = np.geomspace(lo, hi, npts)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = F(grid)
    roots = []
    for i in range(npts - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0:
            r = optimize.brentq(lambda x: float(F(x)), grid[i], grid[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
            roots.append(_newton_polish(F, r))
    return roots


def _newton_polish(F: RadialFunction, r: float) -> float:
    for _ in range(3):
        d = float(F(r, 1))
        if d == 0.0:
            break
        step = float(F(r)) / d
        if abs(step) > 1e-6 * max(1.0, abs(r)):
            break
        r -= step
    # settle on the float neighbour with the smallest residual
    cands = [np.nextafter(r, -np.inf), r, np.nextafter(r, np.inf)]
    return float(min(cands, key=lambda x: abs(float(F(x)))))


def _build_closed_form(spec: ModelSpec) -> ProfileTriple:
    n, lam, m, q = spec.n, spec.lam, spec.mass, spec.charge
    F = model_F(n, lam, m, q)
    roots = _positive_roots(F)
    slopes = [float(F(r, 1)) for r in roots]
    horizons = [r for r, s in zip(roots, slopes) if s > 1e-10 * max(1.0, 1.0 / r)]
    needs_horizon = m > 0 or q != 0
    probe = np.geomspace(1e-6, 1e6, 4000)
    with np.errstate(over="ignore", invalid="ignore"):
        positive = np.any(F(probe) > 0)
    if needs_horizon:
        if not horizons:
            if not positive:
                raise DomainEmpty("f^2 is negative on (0, inf)")
            raise NakedSingularity(
                f"no non-degenerate horizon for m={m}, q={q}, Lambda={lam} (naked singularity or extremal horizon)"
            )
        r_min = max(horizons)
        has_horizon = True
        capped = False
    else:
        r_min = 0.0
        has_horizon = False
        capped = True
        if not float(F(0.0)) > 0:
            raise DomainEmpty("f^2 is not positive at the centre")
    upper = [r for r in roots if r > r_min * (1 + 1e-12)]
    r_max = min(upper) if upper else math.inf
    if not float(F(0.5 * (r_min + (r_max if math.isfinite(r_max) else 2 * r_min + 2)))) > 0:
        raise DomainEmpty("f^2 has no positive region above the horizon")
    return ProfileTriple(
        n=n,
        r_min=float(r_min),
        r_max=float(r_max),
        F=F,
        b=RadialFunction.identity(),
        cross_section=spec.cross_section,
        has_horizon=has_horizon,
        family=spec.family,
        lam=lam,
        b_is_identity=True,
        capped=capped,
        spec=spec,
    )


def _build_custom(spec: ModelSpec) -> ProfileTriple:
    table = np.asarray(spec.profile_table, dtype=float)
    if table.ndim != 2 or table.shape[1] != 3:
        raise BadProfile("profile_table must be a list of [r, f, b] rows")
    if table.shape[0] < 8:
        raise BadProfile("profile_table needs at least 8 samples")
    r, f, b = table.T
    if np.any(np.diff(r) <= 0):
        raise BadProfile("profile_table radii must be strictly increasing")
    if np.any(f < 0) or np.any(f[1:] == 0):
        raise BadProfile("lapse must be positive away from the first sample")
    if np.any(b < 0) or np.any(b[1:] == 0):
        raise BadProfile("warping function must be positive")
    Fs = CubicSpline(r, f**2, bc_type="natural")
    bs = CubicSpline(r, b, bc_type="natural")
    dF, d2F = Fs.derivative(1), Fs.derivative(2)
    db, d2b = bs.derivative(1), bs.derivative(2)
    has_horizon = bool(f[0] == 0.0)
    capped = bool(b[0] == 0.0 and not has_horizon)
    ident = bool(np.allclose(b, r, rtol=0, atol=1e-13 * max(1.0, float(r[-1]))))
    return ProfileTriple(
        n=spec.n,
        r_min=float(r[0]),
        r_max=float(r[-1]),
        F=RadialFunction(Fs, dF, d2F),
        b=RadialFunction(bs, db, d2b),
        cross_section=spec.cross_section,
        has_horizon=has_horizon,
        family="custom",
        lam=spec.lam,
        b_is_identity=ident,
        capped=capped,
        spec=spec,
    )


def build_model(spec: ModelSpec) -> ProfileTriple:
    """Turn a model spec into a triple with profiles and domain."""
    if spec.family == "custom":
        return _build_custom(spec)
    return _build_closed_form(spec)


def eval_f(triple: ProfileTriple, r):
    """Return ``(f, f', f'')`` at ``r``.

    At a horizon ``f`` is 0 and the derivatives of ``f`` diverge; quantities
    that stay finite there are computed from ``F = f^2`` elsewhere.
    """
    r = triple.check_domain(r)
    F0, F1, F2 = triple.F(r), triple.F(r, 1), triple.F(r, 2)
    at_horizon = triple.has_horizon & (r <= triple.r_min)
    F0 = np.where(at_horizon, 0.0, F0)
    f = np.sqrt(np.maximum(F0, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = np.where(f > 0, F1 / (2.0 * f), np.inf)
        f2 = np.where(f > 0, (0.5 * F2 - f1**2) / f, np.nan)
    if np.ndim(f) == 0:
        return float(f), float(f1), float(f2)
    return f, f1, f2


# ---------------------------------------------------------------------------
# catalogue of analytic triples used for tests and examples


def from_functions(
    n: int,
    F: RadialFunction,
    b: RadialFunction,
    r_min: float,
    r_max: float = math.inf,
    cross_section: CrossSection | None = None,
    has_horizon: bool = False,
    capped: bool = False,
    family: str = "custom",
    b_is_identity: bool = False,
    lam: float = 0.0,
) -> ProfileTriple:
    return ProfileTriple(
        n=n,
        r_min=float(r_min),
        r_max=float(r_max),
        F=F,
        b=b,
        cross_section=cross_section or CrossSection.round(n - 1),
        has_horizon=has_horizon,
        family=family,
        lam=lam,
        b_is_identity=b_is_identity,
        capped=capped,
    )


def schwarzschild(m: float, n: int = 3) -> ProfileTriple:
    return build_model(ModelSpec("schwarzschild", n=n, mass=m))


def reissner_nordstrom(m: float, q: float, n: int = 3) -> ProfileTriple:
    return build_model(ModelSpec("reissner-nordstrom", n=n, mass=m, charge=q))


def schwarzschild_ads(m: float, lam: float, n: int = 3) -> ProfileTriple:
    return build_model(ModelSpec("schwarzschild-ads", n=n, mass=m, lam=lam))


def euclidean(n: int = 3, area_ratio: float = 1.0) -> ProfileTriple:
    cs = CrossSection.round(n - 1) if area_ratio == 1.0 else CrossSection.scaled(n - 1, area_ratio)
    return build_model(ModelSpec("space-form", n=n, cross_section=cs))


def de_sitter(lam: float = 3.0, n: int = 3) -> ProfileTriple:
    return build_model(ModelSpec("schwarzschild-de-sitter", n=n, lam=lam))


def twisted_product(n: int = 3, radius: float = 1.0) -> ProfileTriple:
    """Cylinder ``[0, inf) x Sigma`` with constant warping and f = 1."""
    return from_functions(n, RadialFunction.constant(1.0), RadialFunction.constant(radius), r_min=0.0)


def sphere_cap(n: int = 3) -> ProfileTriple:
    """Round unit sphere written as ``dr^2 + sin(r)^2 g_S`` with f = 1."""
    b = RadialFunction(np.sin, np.cos, lambda r: -np.sin(r))
    return from_functions(n, RadialFunction.constant(1.0), b, r_min=0.0, r_max=math.pi, capped=True)


def power_lapse(p: float, n: int = 3, r_min: float = 1.0) -> ProfileTriple:
    """Lapse f = r^p on a flat warping, used for end classification tests."""
    F = RadialFunction(
        lambda r: np.asarray(r, dtype=float) ** (2 * p),
        lambda r: 2 * p * np.asarray(r, dtype=float) ** (2 * p - 1),
        lambda r: 2 * p * (2 * p - 1) * np.asarray(r, dtype=float) ** (2 * p - 2),
    )
    return from_functions(n, F, RadialFunction.identity(), r_min=r_min, b_is_identity=True)


def lapse_from_f(f0: Callable, f1: Callable, f2: Callable) -> RadialFunction:
    return RadialFunction.squared(RadialFunction(f0, f1, f2))


def oscillating_lapse(amplitude: float = 0.5, n: int = 3, r_min: float = 1.0) -> ProfileTriple:
    """f = 1 + amplitude * sin(log r): an end that is f-complete but not uniform."""
    a = amplitude
    f = lapse_from_f(
        lambda r: 1.0 + a * np.sin(np.log(r)),
        lambda r: a * np.cos(np.log(r)) / r,
        lambda r: -a * (np.sin(np.log(r)) + np.cos(np.log(r))) / r**2,
    )
    return from_functions(n, f, RadialFunction.identity(), r_min=r_min, b_is_identity=True)


def scaled_lapse(triple: ProfileTriple, c: float) -> ProfileTriple:
    """Replace f by c*f and b by b/c, a homothety of the underlying metric."""
    F0 = triple.F
    b0 = triple.b
    return ProfileTriple(
        n=triple.n,
        r_min=triple.r_min,
        r_max=triple.r_max,
        F=RadialFunction(lambda r: c * c * F0(r), lambda r: c * c * F0(r, 1), lambda r: c * c * F0(r, 2)),
        b=RadialFunction(lambda r: b0(r) / c, lambda r: b0(r, 1) / c, lambda r: b0(r, 2) / c),
        cross_section=triple.cross_section,
        has_horizon=triple.has_horizon,
        family="custom",
        lam=triple.lam,
        b_is_identity=False,
        capped=triple.capped,
    )


_BUMP_P2 = np.polynomial.Polynomial([1.0, 0.0, -1.0]) ** 4
_BUMP_P1 = _BUMP_P2.integ(lbnd=-1.0)
_BUMP_P0 = _BUMP_P1.integ(lbnd=-1.0)
BUMP_MASS = float(_BUMP_P1(1.0))


def _bump_antiderivs(x):
    """(1-x^2)^4 on [-1, 1] and its first two antiderivatives, extended outside."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    p2 = np.where(inside, _BUMP_P2(x), 0.0)
    p1 = np.where(x <= -1, 0.0, np.where(x >= 1, BUMP_MASS, _BUMP_P1(x)))
    p0 = np.where(x <= -1, 0.0, np.where(x >= 1, float(_BUMP_P0(1.0)) + BUMP_MASS * (x - 1.0), _BUMP_P0(x)))
    return p0, p1, p2


def bump_warp(base: ProfileTriple, center: float, width: float, depth: float) -> ProfileTriple:
    """Add ``-depth * bump`` to b'' on ``[center - width, center + width]``.

    Positive ``depth`` makes b concave there (radially substatic); negative
    makes it convex. The lapse is kept.
    """
    b0 = base.b
    c, w, e = center, width, depth

    def b_(r):
        p0, _, _ = _bump_antiderivs((np.asarray(r) - c) / w)
        return b0(r) - e * w * w * p0

    def db(r):
        _, p1, _ = _bump_antiderivs((np.asarray(r) - c) / w)
        return b0(r, 1) - e * w * p1

    def d2b(r):
        _, _, p2 = _bump_antiderivs((np.asarray(r) - c) / w)
        return b0(r, 2) - e * p2

    return ProfileTriple(
        n=base.n,
        r_min=base.r_min,
        r_max=base.r_max,
        F=base.F,
        b=RadialFunction(b_, db, d2b),
        cross_section=base.cross_section,
        has_horizon=base.has_horizon,
        family="custom",
        lam=base.lam,
        b_is_identity=False,
        capped=base.capped,
    )


def tabulate(triple: ProfileTriple, radii: Sequence[float]) -> list[list[float]]:
    """Sample ``(r, f, b)`` rows, e.g. to round-trip a model through a custom table."""
    radii = np.asarray(radii, dtype=float)
    f = triple.lapse(radii)
    if triple.has_horizon:
        f = np.where(radii <= triple.r_min, 0.0, f)
    return [[float(r), float(fv), float(bv)] for r, fv, bv in zip(radii, f, triple.b(radii))]


# ---------------------------------------------------------------------------
# ends


@dataclass(frozen=True)
class EndClass:
    kind: str
    rho_total: float
    evidence: str


def _inv_F(triple: ProfileTriple):
    return lambda s: 1.0 / float(triple.F(s))


def _default_ref(triple: ProfileTriple) -> float:
    return max(2.0 * triple.r_min, 1.0)


def _window_integral(triple: ProfileTriple, a: float, b: float) -> float:
    val, _ = integrate.quad(_inv_F(triple), a, b, epsabs=0.0, epsrel=1e-12, limit=200)
    return val


def classify_end(
    triple: ProfileTriple, r_ref: float | None = None, windows: int = 64, min_windows: int = 40
) -> EndClass:
    """Classify the end at r -> r_max from the optical length ``int dr/f^2``.

    Partial integrals over doubling windows are compared: sustained growth
    of the running total means divergence, increments below 1e-10 mean
    convergence. Divergence is only declared after ``min_windows`` doublings
    so that slowly converging tails reach the increment threshold first. A
    convergent end is conformally compact when ``r/f`` has a
    finite positive limit, i.e. 1/f vanishes to first order in 1/r.
    """
    if math.isfinite(triple.r_max):
        return EndClass("undetermined", math.nan, f"domain bounded above at r = {triple.r_max}")
    r_ref = _default_ref(triple) if r_ref is None else float(r_ref)
    total = 0.0
    ratios: list[float] = []
    small = 0
    edge = r_ref
    for k in range(windows):
        inc = _window_integral(triple, edge, 2.0 * edge)
        new_total = total + inc
        if total > 0:
            ratios.append(new_total / total)
        total = new_total
        edge *= 2.0
        small = small + 1 if inc < 1e-10 else 0
        if small >= 3:
            break
        if k >= min_windows and all(q > 1.0 + 1e-3 for q in ratios[-6:]):
            return EndClass(
                "f-complete",
                math.inf,
                f"partial optical lengths grow by ratio {ratios[-1]:.6g} per doubling up to r = {edge:.3g}",
            )
    if small < 3:
        return EndClass("undetermined", math.nan, f"no divergence or convergence verdict up to r = {edge:.3g}")
    radii = edge * np.array([1.0, 2.0, 4.0, 8.0])
    ratio = radii / triple.lapse(radii)
    slope_limit = fit_inverse_powers(radii, ratio, 3)[0]
    spread = abs(ratio[-1] - ratio[-2]) / max(abs(ratio[-1]), 1e-300)
    if slope_limit > 1e-8 and spread < 1e-3:
        return EndClass(
            "conformally-compact",
            total,
            f"optical length converges to {total:.12g}; d(1/f)/d(1/r) -> {slope_limit:.10g} at infinity",
        )
    return EndClass(
        "undetermined",
        total,
        f"optical length converges to {total:.12g} but 1/f does not vanish to first order (r/f -> {slope_limit:.3g})",
    )


def check_f_pinching(
    triple: ProfileTriple, k: float, window: tuple[float, float], npts: int = 400
) -> CheckReport:
    """Test ``c r^-k < f < C r^k`` on a window.

    The constants are reported as ``inf f r^k`` and ``sup f r^-k``. Because
    any finite window admits some constants, the verdict is taken from the
    logarithmic slope of f at the outer end, which must lie in ``(-k, k)``.
    """
    if not 0 < k < 1:
        raise ValueError("pinching exponent must lie in (0, 1)")
    ra, rb = window
    r = np.geomspace(ra, rb, npts)
    triple.check_domain(r)
    f = triple.lapse(r)
    c_low = float(np.min(f * r**k))
    c_high = float(np.max(f * r ** (-k)))
    slope = float(rb * triple.F(rb, 1) / (2.0 * triple.F(rb)))
    return CheckReport.build(
        "f_pinching",
        lhs=k,
        rhs=abs(slope),
        tol=0.0,
        context={"k": k, "window": [ra, rb], "c": c_low, "C": c_high, "tail_log_slope": slope},
    )


def check_uniformity_criteria(
    triple: ProfileTriple,
    r_far: float | None = None,
    tol: float = 1e-6,
    eps_min: float = 0.05,
    decades: int = 6,
) -> CheckReport:
    """Certify a uniform end through one of two sufficient criteria.

    (a) f -> 1: a fit ``f = a0 + a1/r + a2/r^2`` at ``r_far * {1,2,4,8}`` and at
    ``r_far * {2,4,8,16}`` must both give ``|a0 - 1| < tol``.
    (b) gradient decay: ``|grad f| rho^(1+eps_min)`` must not exceed its value on
    the first decade anywhere on ``decades`` further decades.
    """
    end = classify_end(triple)
    if end.kind != "f-complete":
        raise InapplicableEnd(f"end is {end.kind}; uniformity needs an f-complete end")
    r_ref = _default_ref(triple)
    r_far = 1e3 * max(triple.r_min, 1.0) if r_far is None else float(r_far)

    pts = r_far * np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    fv = triple.lapse(pts)
    a0 = fit_inverse_powers(pts[:4], fv[:4], 3)[0]
    a0b = fit_inverse_powers(pts[1:], fv[1:], 3)[0]
    limit_err = max(abs(a0 - 1.0), abs(a0b - 1.0))
    crit_a = limit_err < tol

    edges = r_far * 10.0 ** np.arange(decades + 1)
    rho_edges = np.concatenate([[_window_integral(triple, r_ref, edges[0])], np.zeros(decades)])
    for j in range(decades):
        rho_edges[j + 1] = rho_edges[j] + _window_integral(triple, edges[j], edges[j + 1])
    maxima = []
    for j in range(decades):
        r = np.geomspace(edges[j], edges[j + 1], 200)
        rho = rho_edges[j] + np.array([_window_integral(triple, edges[j], x) for x in r])
        grad = np.abs(triple.F(r, 1)) / 2.0
        maxima.append(float(np.max(grad * rho ** (1.0 + eps_min))))
    maxima = np.asarray(maxima)
    bound = float(maxima[0])
    crit_b = bool(np.all(maxima <= bound * (1.0 + 1e-9)))
    with np.errstate(divide="ignore"):
        logs = np.log(np.maximum(maxima, 1e-300))
    excess = float(-np.polyfit(np.log(rho_edges[:-1]), logs, 1)[0]) + eps_min if bound > 0 else math.inf

    fired = "f->1" if crit_a else ("gradient-decay" if crit_b else None)
    return CheckReport.build(
        "uniformity",
        lhs=1.0 if fired else 0.0,
        rhs=1.0,
        tol=0.0,
        context={
            "criterion": fired or "uniformity not certified",
            "f_limit": float(a0),
            "f_limit_error": float(limit_err),
            "gradient_bound_C": bound,
            "gradient_fit_eps": excess,
            "r_far": r_far,
        },
    )
