"""Registry of the acceptance criteria run by ``substatic suite``.

Every criterion returns a list of :class:`CheckReport`; it passes when all of
them pass.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import models as M
from .conformal import (
    GeodesicState,
    RadialFlow,
    focal_distance_prediction,
    geodesic_integrate,
    laplacian_comparison_check,
    riccati_evolve,
)
from .curvature import (
    cd01_identity_check,
    check_substatic,
    lixia_ricci,
    nec_check,
    substatic_tensor,
)
from .functionals import Base, area_functional, avr_base_independence, avr_estimate, volume_functional
from .inequalities import (
    heintze_karcher_check,
    isoperimetric_check,
    isoperimetric_profile_check,
    random_cosine_surfaces,
    resolve_avr,
    willmore_check,
)
from .report import CheckReport
from .surfaces import RadialGraphSurface, area, f_volume

SEED = 20240607


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    run: Callable[[], list[CheckReport]]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float
    reports: list[CheckReport] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title} ({self.seconds:.2f} s)"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "seconds": self.seconds,
            "reports": [r.to_dict() for r in self.reports],
        }


def _flag(name: str, ok: bool, value: float = 0.0, limit: float = 0.0, **ctx) -> CheckReport:
    """A boolean requirement recorded as a report (lhs = 1 when it holds)."""
    return CheckReport(name, 1.0 if ok else 0.0, 1.0, 0.0 if ok else -1.0, 0.0, bool(ok), False,
                       {"value": value, "limit": limit, **ctx})


def _below(name: str, value: float, limit: float, **ctx) -> CheckReport:
    return CheckReport.build(name, limit, value, 0.0, context=ctx)


def substatic_grid(triple: M.ProfileTriple) -> np.ndarray:
    return np.geomspace(1.05 * triple.r_min, 50.0 * triple.r_min, 100)


# ---------------------------------------------------------------------------


def criterion_substatic() -> list[CheckReport]:
    rn = M.reissner_nordstrom(1.0, 0.5)
    t0 = time.perf_counter()
    rep = check_substatic(rn, substatic_grid(rn), verify_oracle=True)
    elapsed = time.perf_counter() - t0
    ctx = rep.context
    return [
        rep,
        _below("rn_max_abs_Q_radial", ctx["max_abs_rad_rad"], 1e-8),
        CheckReport.build("rn_min_Q_tangential", ctx["min_tan_tan"], 0.0, 0.0),
        _below("rn_oracle_gap_ricci", ctx["oracle_gap_ricci"], 1e-6),
        _below("rn_oracle_gap_Q", ctx["oracle_gap_Q"], 1e-6),
        _below("rn_runtime_seconds", elapsed, 5.0),
    ]


def criterion_vacuum() -> list[CheckReport]:
    s = M.schwarzschild(1.0)
    rep = check_substatic(s, substatic_grid(s))
    return [rep, _below("schwarzschild_sup_Q", rep.context["max_abs_Q"], 1e-8)]


def criterion_bishop_gromov() -> list[CheckReport]:
    s = M.schwarzschild(1.0)
    n = s.n
    base = Base.sphere(2.0 * s.r_min)
    t = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 49)])
    vs = volume_functional(s, base, t, k=float(n))
    out = [
        _below("A_minus_1", float(np.max(np.abs(vs.A - 1.0))), 1e-6),
        CheckReport.build("A_monotone", -float(np.max(np.diff(vs.A))), 0.0, 1e-9),
        _below("V_minus_A", float(np.max(np.abs(vs.V - vs.A))), 1e-6),
    ]
    for k in (1.0, n / 2.0, float(n)):
        vk = volume_functional(s, base, t, k=k)
        out.append(CheckReport.build(f"V_ge_nA_over_k[k={k:g}]", float(np.min(vk.V - n / k * vk.A)), 0.0, 1e-9))
    return out


def criterion_avr() -> list[CheckReport]:
    s = M.schwarzschild(1.0)
    est = avr_estimate(s, strict=True)
    out = [
        CheckReport.build("schwarzschild_avr", est.value, 1.0, 1e-6, equality_tol=1e-6, context={"error_bar": est.error_bar}),
        _below("schwarzschild_avr_deviation", abs(est.value - 1.0), 1e-6),
        avr_base_independence(s, [2.0 * s.r_min, 3.0 * s.r_min, 5.0 * s.r_min]),
    ]
    tp = M.twisted_product()
    base = Base.sphere(1.0, eta0=1.0)
    tw = avr_estimate(tp, base)
    out.append(_below("twisted_avr", abs(tw.value), 1e-6))
    series = area_functional(tp, base, np.geomspace(1e-2, 1e3, 30))
    prod = series.A * series.eta ** (tp.n - 1)
    out.append(_below("twisted_A_eta_constant", float(np.max(np.abs(prod - prod[0])) / prod[0]), 1e-8))
    return out


def round_trip_model() -> M.ProfileTriple:
    s = M.schwarzschild(0.5)
    radii = np.concatenate([[s.r_min], np.geomspace(1.1, 40.0, 1500)])
    spec = M.ModelSpec("custom", profile_table=tuple(map(tuple, M.tabulate(s, radii))))
    return M.build_model(spec)


def criterion_willmore() -> list[CheckReport]:
    out = []
    s, rn, rt = M.schwarzschild(0.5), M.reissner_nordstrom(1.0, 0.5), round_trip_model()
    for label, tr, avr in (("schwarzschild", s, None), ("reissner_nordstrom", rn, None), ("custom_round_trip", rt, "closed-form")):
        value = resolve_avr(tr, avr)
        for r in (1.5 * tr.r_min, 3.0 * tr.r_min, 10.0 * tr.r_min):
            rep = willmore_check(tr, RadialGraphSurface.sphere(r), avr=value)
            out.append(rep)
            out.append(_flag(f"willmore_equality[{label}, r={r:g}]", rep.equality, abs(rep.margin) / rep.rhs, 1e-8))
    rep = willmore_check(s, RadialGraphSurface.cosine([3.0, 0.3]))
    out.append(CheckReport.build("willmore_strict[R=3(1+0.1cos)]", rep.margin, 1e-6, 0.0, context={"report": rep.to_dict()}))
    return out


def criterion_isoperimetric() -> list[CheckReport]:
    out = []
    s, rn = M.schwarzschild(0.5), M.reissner_nordstrom(1.0, 0.5)
    for label, tr in (("schwarzschild", s), ("reissner_nordstrom", rn), ("schwarzschild_n4", M.schwarzschild(0.5, n=4))):
        value = resolve_avr(tr)
        for r in (1.2 * tr.r_min, 2.0 * tr.r_min, 8.0 * tr.r_min):
            rep = isoperimetric_check(tr, RadialGraphSurface.sphere(r), avr=value)
            out.append(rep)
            out.append(_flag(f"isoperimetric_equality[{label}, r={r:g}]", rep.equality, abs(rep.margin) / rep.rhs, 1e-8))
    value = resolve_avr(rn)
    surfaces = random_cosine_surfaces(rn, 50, np.random.default_rng(SEED))
    margins = [isoperimetric_check(rn, x, avr=value).margin for x in surfaces]
    out.append(CheckReport.build("isoperimetric_random_50", min(margins), 0.0, 1e-9, context={"count": len(margins)}))
    for label, tr in (("schwarzschild", s), ("reissner_nordstrom", rn)):
        V = np.geomspace(0.1, 1e4, 12)
        out.append(isoperimetric_profile_check(tr, V))
    return out


def capped_models() -> list[tuple[str, M.ProfileTriple]]:
    return [
        ("euclidean", M.euclidean()),
        ("de_sitter", M.de_sitter()),
        ("hyperbolic", M.schwarzschild_ads(0.0, -3.0)),
    ]


def criterion_heintze_karcher() -> list[CheckReport]:
    out = []
    for label, tr in capped_models():
        for r in (0.3, 0.6, 0.9):
            rep = heintze_karcher_check(tr, RadialGraphSurface.sphere(r))
            out.append(rep)
            out.append(_flag(f"hk_equality[{label}, r={r:g}]", rep.equality, abs(rep.margin) / rep.rhs, 1e-8))
        rep = heintze_karcher_check(tr, RadialGraphSurface.cosine([0.5, 0.05, 0.02]))
        out.append(_flag(f"hk_strict[{label}]", rep.margin > 0, rep.margin, 0.0))
    s = M.schwarzschild(0.5)
    for surf in (RadialGraphSurface.sphere(2.0), RadialGraphSurface.cosine([3.0, 0.3])):
        rep = heintze_karcher_check(s, surf)
        out.append(_flag(f"hk_strict_horizon[{surf.label}]", rep.margin > 0, rep.margin, 0.0))
    return out


def perturbed_triples(count: int = 20, seed: int = SEED) -> list[M.ProfileTriple]:
    """Schwarzschild with a concave bump in b, kept only if check_substatic accepts it."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        m = rng.uniform(0.3, 1.0)
        base = M.schwarzschild(m)
        center = base.r_min * rng.uniform(3.0, 10.0)
        width = base.r_min * rng.uniform(0.5, 2.0)
        depth = rng.uniform(0.05, 0.5) / width
        tr = M.bump_warp(base, center, width, depth)
        if check_substatic(tr, substatic_grid(tr)).passed:
            out.append(tr)
    return out


def criterion_laplacian() -> list[CheckReport]:
    out = []
    for label, tr in (("schwarzschild", M.schwarzschild(0.5)), ("reissner_nordstrom", M.reissner_nordstrom(1.0, 0.5))):
        r0 = 2.0 * tr.r_min
        rep = laplacian_comparison_check(tr, r0, np.geomspace(r0, 100.0 * tr.r_min, 200))
        out.append(rep)
        out.append(_below(f"h_eta_defect[{label}]", rep.context["max_abs_h_eta_defect"], 1e-8))
    worst = math.inf
    for tr in perturbed_triples():
        r0 = 2.0 * tr.r_min
        rep = laplacian_comparison_check(tr, r0, np.geomspace(r0, 50.0 * tr.r_min, 200))
        worst = min(worst, rep.margin)
        if not rep.passed:
            out.append(rep)
    out.append(CheckReport.build("perturbed_20_min_slack", worst, 0.0, 1e-10))
    s = M.schwarzschild(0.5)
    for h0 in (-0.1, -0.5, -2.0):
        res = riccati_evolve(s, 2.0, 40.0, h0)
        focal = [e for e in res.events if e.kind == "focal"]
        predicted = focal_distance_prediction(s, 2.0, h0)
        out.append(
            _flag(
                f"riccati_blowup[h0={h0:g}]",
                res.blew_up,
                focal[0].r if focal else math.nan,
                predicted,
            )
        )
    return out


def criterion_identities() -> list[CheckReport]:
    out = []
    models = [("schwarzschild", M.schwarzschild(0.5)), ("reissner_nordstrom", M.reissner_nordstrom(1.0, 0.5)),
              ("schwarzschild_ads", M.schwarzschild_ads(0.5, -3.0))]
    for label, tr in models:
        radii = np.geomspace(1.2 * tr.r_min, 30.0 * tr.r_min, 20)
        closed = max(cd01_identity_check(tr, r, "closed").rhs for r in radii)
        fd = max(cd01_identity_check(tr, r, "fd").rhs for r in radii)
        out.append(_below(f"cd01_closed[{label}]", closed, 1e-10))
        out.append(_below(f"cd01_fd[{label}]", fd, 1e-6))
        grid = substatic_grid(tr)
        lx = lixia_ricci(tr, grid, 0.0, 1.0)
        q = substatic_tensor(tr, grid)
        f = tr.lapse(grid)
        gap = max(float(np.max(np.abs(f * lx.rad_rad - q.rad_rad))), float(np.max(np.abs(f * lx.tan_tan - q.tan_tan))))
        out.append(_below(f"lixia_times_f_equals_Q[{label}]", gap, 1e-10))
    rn = M.reissner_nordstrom(1.0, 0.5)
    out.append(nec_check(rn, samples=1000, grid=substatic_grid(rn)))
    synth = M.bump_warp(M.schwarzschild(0.5), 4.0, 1.0, -0.3)
    rep = nec_check(synth, samples=1000, grid=substatic_grid(synth))
    qmin = float(np.min(substatic_tensor(synth, substatic_grid(synth)).min_eig()))
    out.append(_flag("nec_sign_indefinite_profile", qmin < 0 and rep.lhs < 0, qmin, 0.0))
    out.append(_flag("nec_sign_equivalent", rep.context["sign_equivalent"], rep.lhs, qmin))
    return out


def criterion_ends() -> list[CheckReport]:
    out = []
    for label, tr, kind in (
        ("schwarzschild", M.schwarzschild(1.0), "f-complete"),
        ("reissner_nordstrom", M.reissner_nordstrom(1.0, 0.5), "f-complete"),
        ("schwarzschild_ads", M.schwarzschild_ads(1.0, -3.0), "conformally-compact"),
    ):
        got = M.classify_end(tr).kind
        out.append(_flag(f"end[{label}]={got}", got == kind, 0.0, 0.0, expected=kind))
    u = M.check_uniformity_criteria(M.schwarzschild(1.0))
    out.append(_flag("uniformity_via_f_to_1", u.passed and u.context["criterion"] == "f->1", u.context["f_limit_error"], 1e-6))
    s = M.schwarzschild(0.5)
    out.append(M.check_f_pinching(s, 0.5, (2.0, 100.0)))
    out.append(M.check_f_pinching(s, 0.5, (100.0, 1e4)))
    return out


def criterion_hygiene() -> list[CheckReport]:
    out = []
    s = M.schwarzschild(0.5)
    for alpha in (0.3, 1.2, 2.5):
        length = 10.0
        traj = geodesic_integrate(s, GeodesicState.from_angle(s, 4.0, 0.0, alpha), length)
        e = traj.energy()
        out.append(_below(f"energy_drift_per_length[alpha={alpha}]", float(np.max(np.abs(e - e[0]))) / length, 1e-9))
    surfaces = [RadialGraphSurface.sphere(2.0), RadialGraphSurface.cosine([3.0, 0.3]), RadialGraphSurface.cosine([2.5, 0.2, -0.1, 0.05])]
    for tr_label, tr in (("schwarzschild", s), ("reissner_nordstrom", M.reissner_nordstrom(1.0, 0.5))):
        for surf in surfaces:
            fine = surf.with_nodes(2 * surf.nodes)
            da = abs(area(tr, fine) - area(tr, surf)) / area(tr, fine)
            dv = abs(f_volume(tr, fine) - f_volume(tr, surf)) / f_volume(tr, fine)
            out.append(_below(f"node_doubling[{tr_label}, {surf.label}]", max(da, dv), 1e-9))
    flow = RadialFlow.from_sphere(s, 2.0)
    coarse = RadialFlow(s, 2.0, flow.eta0, growth=1.04)
    r = np.geomspace(2.5, 1e3, 20)
    out.append(_below("optical_distance_refinement", float(np.max(np.abs(flow.rho(r) - coarse.rho(r)) / flow.rho(r))), 1e-9))
    v1 = volume_functional(s, Base.sphere(2.0), [1.0, 10.0, 100.0], k=3.0).V
    out.append(_below("volume_quadrature_vs_closed_form", float(np.max(np.abs(v1 - 1.0))), 1e-9))
    return out


REGISTRY: dict[int, Criterion] = {
    c.number: c
    for c in (
        Criterion(1, "substatic verification (Reissner-Nordstrom)", criterion_substatic),
        Criterion(2, "vacuum staticity (Schwarzschild)", criterion_vacuum),
        Criterion(3, "Bishop-Gromov rigidity", criterion_bishop_gromov),
        Criterion(4, "asymptotic volume ratio", criterion_avr),
        Criterion(5, "Willmore-type inequality", criterion_willmore),
        Criterion(6, "f-isoperimetric inequality", criterion_isoperimetric),
        Criterion(7, "Heintze-Karcher inequality", criterion_heintze_karcher),
        Criterion(8, "Laplacian comparison and Riccati blow-up", criterion_laplacian),
        Criterion(9, "conformal and connection identities, NEC", criterion_identities),
        Criterion(10, "ends: classification, uniformity, pinching", criterion_ends),
        Criterion(11, "numerical hygiene", criterion_hygiene),
    )
}


def run_criterion(number: int) -> CriterionResult:
    crit = REGISTRY[number]
    t0 = time.perf_counter()
    try:
        reports = crit.run()
        passed = all(r.passed for r in reports)
    except Exception as exc:  # a crash is a failure, recorded with its message
        reports = [_flag(f"error: {type(exc).__name__}: {exc}", False)]
        passed = False
    return CriterionResult(number, crit.title, passed, time.perf_counter() - t0, reports)


def run_suite(numbers=None) -> list[CriterionResult]:
    numbers = sorted(REGISTRY) if numbers is None else list(numbers)
    t0 = time.perf_counter()
    results = [run_criterion(k) for k in numbers]
    if numbers == sorted(REGISTRY):
        total = time.perf_counter() - t0
        ok = total < 120.0
        last = results[-1]
        rep = _below("suite_runtime_seconds", total, 120.0)
        results[-1] = CriterionResult(last.number, last.title, last.passed and ok, last.seconds, last.reports + [rep])
    return results
