import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from substatic import functionals as FN
from substatic import models as M
from substatic.errors import BaseInvalid, NotUniform

T_GRID = np.concatenate([[0.0], np.geomspace(1e-2, 1e3, 40)])


def test_flat_point_base_is_rigid(flat):
    s = FN.volume_functional(flat, FN.Base.point(), T_GRID)
    assert np.max(np.abs(s.A - 1.0)) < 1e-12
    assert np.max(np.abs(s.V - 1.0)) < 1e-10
    assert s.monotone


def test_schwarzschild_sphere_base(schw):
    s = FN.volume_functional(schw, FN.Base.sphere(2.0), T_GRID)
    assert np.max(np.abs(s.A - 1.0)) < 1e-12
    assert np.max(np.abs(s.V - 1.0)) < 1e-10


def test_scaled_cross_section_area():
    tr = M.euclidean(area_ratio=0.5)
    s = FN.area_functional(tr, FN.Base.sphere(1.0), T_GRID)
    assert np.max(np.abs(s.A - 0.5)) < 1e-12


def test_volume_limit_at_zero(rn):
    s = FN.volume_functional(rn, FN.Base.sphere(3.0), [0.0, 1e-4], k=1.5)
    assert s.V[0] == pytest.approx(3.0 / 1.5 * s.A[0], rel=1e-15)
    assert s.V[1] == pytest.approx(s.V[0], rel=1e-3)


def test_volume_ode(rn):
    # d/dt (t^k V) = (n/|S|) t^{k-1} A-type integrand, i.e. t V' + k V = n A
    k = 2.0
    t = np.array([1.0, 3.0, 10.0])
    h = 1e-4
    s0 = FN.volume_functional(rn, FN.Base.sphere(3.0), t, k=k)
    sp = FN.volume_functional(rn, FN.Base.sphere(3.0), t + h, k=k)
    sm = FN.volume_functional(rn, FN.Base.sphere(3.0), t - h, k=k)
    dV = (sp.V - sm.V) / (2 * h)
    resid = t * dV + k * s0.V - rn.n * s0.A
    assert np.max(np.abs(resid)) < 1e-6


def test_volume_dominates_area(rn):
    for k in (1.0, 2.0, 3.0, 4.5):
        s = FN.volume_functional(rn, FN.Base.sphere(3.0), T_GRID, k=k)
        assert np.all(s.V >= rn.n / k * s.A - 1e-12)


def test_concave_bump_strictly_decreases():
    tr = M.bump_warp(M.schwarzschild(0.5), 4.0, 1.0, 0.2)
    s = FN.volume_functional(tr, FN.Base.sphere(2.0), T_GRID)
    assert s.monotone
    assert s.A[-1] < 1.0 - 1e-3


def test_point_base_needs_cap(schw):
    with pytest.raises(BaseInvalid):
        FN.area_functional(schw, FN.Base.point(), [1.0])
    with pytest.raises(BaseInvalid):
        FN.area_functional(schw, FN.Base.sphere(0.5), [1.0])
    with pytest.raises(BaseInvalid):
        FN.area_functional(M.twisted_product(), FN.Base.sphere(1.0), [1.0])


def test_empty_grid(schw):
    s = FN.volume_functional(schw, FN.Base.sphere(2.0), [])
    assert s.A.size == 0 and s.V.size == 0 and s.monotone


def test_avr_schwarzschild(schw):
    est = FN.avr_estimate(schw)
    assert est.value == pytest.approx(1.0, abs=1e-6)
    assert est.certified
    assert est.volume_limit == pytest.approx(1.0, abs=1e-6)


def test_avr_cone():
    est = FN.avr_estimate(M.euclidean(area_ratio=0.7), FN.Base.sphere(1.0))
    assert est.value == pytest.approx(0.7, abs=1e-9)
    assert FN.closed_form_avr(M.euclidean(area_ratio=0.7)) == pytest.approx(0.7)


def test_avr_cylinder_vanishes():
    tr = M.twisted_product()
    est = FN.avr_estimate(tr, FN.Base.sphere(1.0, eta0=1.0))
    assert abs(est.value) < 1e-6


def test_avr_base_independence(rn, flat):
    assert FN.avr_base_independence(rn, [2.5, 4.0]).passed
    rep = FN.avr_base_independence(flat, [None, 1.0, FN.Base.sphere(3.0)], tol=1e-8)
    assert rep.passed
    with pytest.raises(ValueError):
        FN.avr_base_independence(rn, [2.5])


def test_avr_uncertified_oscillating():
    tr = M.oscillating_lapse()
    est = FN.avr_estimate(tr)
    assert not est.certified
    with pytest.raises(NotUniform):
        FN.avr_estimate(tr, strict=True)


@pytest.mark.parametrize(
    "triple, expected",
    [(M.euclidean(), 1.0), (M.de_sitter(), 1.0), (M.scaled_lapse(M.euclidean(), 0.8), 1.5625)],
    ids=["flat", "de-sitter", "scaled"],
)
def test_small_t_limit(triple, expected):
    rep = FN.small_t_limit_check(triple)
    assert rep.passed
    assert rep.context["expected"] == pytest.approx(expected, rel=1e-12)


def test_small_t_needs_point(flat):
    with pytest.raises(BaseInvalid):
        FN.small_t_limit_check(flat, FN.Base.sphere(1.0))


def test_rigidity_on_models(schw):
    s = FN.area_functional(schw, FN.Base.sphere(2.0), T_GRID)
    windows = FN.detect_rigidity(s)
    assert len(windows) == 1
    w = windows[0]
    assert w.is_constant and w.window == (T_GRID[0], T_GRID[-1])
    assert w.phi_coeff == 0.0 and w.psi_coeff == 0.0


def test_rigidity_window_ends_before_bump():
    # past a concave bump b/eta keeps drifting, so only the inner window is rigid
    tr = M.bump_warp(M.schwarzschild(0.5), 4.0, 0.5, 0.2)
    s = FN.area_functional(tr, FN.Base.sphere(2.0), np.linspace(0.0, 30.0, 301))
    windows = FN.detect_rigidity(s)
    assert len(windows) == 1
    w = windows[0]
    assert w.is_constant and w.window[0] == 0.0
    end = s.r[np.searchsorted(s.t_grid, w.window[1])]
    assert 3.4 < end <= 3.5 + 1e-9


def test_small_exponent_volume_near_base(flat):
    # V = n/k exactly for the flat sphere flow; the floor is set by float resolution of r
    s = FN.volume_functional(flat, FN.Base.sphere(1.0), [1e-3, 1.0, 100.0], k=0.5)
    assert np.all(np.isfinite(s.V))
    assert np.max(np.abs(s.V - 6.0)) < 1e-7


@given(
    center=st.floats(2.0, 8.0),
    width=st.floats(0.3, 1.5),
    depth=st.floats(0.0, 0.3),
    k=st.floats(0.5, 5.0),
)
def test_monotone_and_dominated(center, width, depth, k):
    tr = M.bump_warp(M.schwarzschild(0.5), center, width, depth)
    s = FN.volume_functional(tr, FN.Base.sphere(1.5), np.geomspace(1e-2, 200.0, 30), k=k)
    assert s.max_increase <= 1e-6
    bound = tr.n / k * s.A
    if k >= 1:
        assert np.all(s.V - bound >= -1e-9)
    else:
        # below k = 1 the rho^{k-1} weight resolves r near the base only to float precision
        assert np.all(s.V >= bound * (1 - 1e-7))


@given(c=st.floats(0.3, 1.0))
def test_avr_matches_area_ratio(c):
    tr = M.euclidean(area_ratio=c)
    assert FN.avr_estimate(tr, FN.Base.sphere(1.0)).value == pytest.approx(c, abs=1e-9)
