import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from substatic import conformal as O
from substatic import models as M
from substatic.errors import HorizonDivergence, LeftDomain, NotMeanConvex, PrerequisiteFailed
from substatic.models import RadialFunction


def test_rho_flat(flat):
    assert O.rho_radial(flat, 1.0, 4.0) == pytest.approx(3.0, rel=1e-14)
    assert O.rho_radial(flat, 4.0, 1.0) == pytest.approx(-3.0, rel=1e-14)
    assert O.rho_radial(flat, 2.0, 2.0) == 0.0


def test_rho_schwarzschild():
    # int dr/(1-2/r) from 3 to 5 = 2 + 2 log 3 with m = 1
    tr = M.schwarzschild(1.0)
    assert O.rho_radial(tr, 3.0, 5.0) == pytest.approx(2.0 + 2.0 * math.log(3.0), rel=1e-12)


def test_rho_half_mass():
    tr = M.schwarzschild(0.5)
    assert O.rho_radial(tr, 2.0, 4.0) == pytest.approx(2.0 + math.log(3.0), rel=1e-12)


def test_rho_to_horizon_diverges(schw):
    with pytest.raises(HorizonDivergence):
        O.rho_radial(schw, schw.r_min, 3.0)


def test_eta_identity_warp(flat, schw):
    assert O.eta_from_sphere(flat, 1.0, 5.0) == pytest.approx(5.0, abs=1e-10)
    # with b = r, eta - r is constant along the flow
    assert O.eta_from_sphere(schw, 2.0, 7.0) == pytest.approx(7.0, abs=1e-10)


def test_eta_sinusoidal_warp():
    b = RadialFunction(lambda r: r + 0.1 * np.sin(r), lambda r: 1 + 0.1 * np.cos(r), lambda r: -0.1 * np.sin(r))
    tr = M.from_functions(3, RadialFunction.constant(1.0), b, r_min=0.0)
    r0 = 1.0
    expected = 3.0 - r0 + (r0 + 0.1 * math.sin(r0)) / (1 + 0.1 * math.cos(r0))
    assert O.eta_from_sphere(tr, r0, 3.0) == pytest.approx(expected, abs=1e-10)


def test_eta_rejects_flat_warping():
    with pytest.raises(NotMeanConvex):
        O.eta_from_sphere(M.twisted_product(), 1.0, 2.0)


def test_flat_geodesic_is_straight(flat):
    init = O.GeodesicState.from_angle(flat, 2.0, 0.0, 1.0)
    traj = O.geodesic_integrate(flat, init, 5.0, step=1e-3)
    x, y = traj.cartesian()
    # straight line through (2, 0) with direction angle 1 from the radial one
    d = np.abs((x - 2.0) * math.sin(1.0) - y * math.cos(1.0))
    assert np.max(d) < 1e-8
    assert np.max(np.abs(traj.eta - traj.rho)) < 1e-12


def test_radial_geodesic_keeps_angle(schw):
    traj = O.geodesic_integrate(schw, O.GeodesicState.from_angle(schw, 3.0, 0.7, 0.0), 4.0)
    assert np.all(traj.phi == 0.7)
    assert traj.rho[-1] == pytest.approx(O.rho_radial(schw, 3.0, traj.r[-1]), rel=1e-8)


def test_energy_conservation(rn):
    traj = O.geodesic_integrate(rn, O.GeodesicState.from_angle(rn, 4.0, 0.0, 1.2), 20.0, step=1e-3)
    e = traj.energy()
    assert np.max(np.abs(e - 0.5)) < 1e-10


def test_eta_accumulates_squared_lapse(rn):
    traj = O.geodesic_integrate(rn, O.GeodesicState.from_angle(rn, 4.0, 0.0, 0.9), 5.0, step=1e-3)
    deta = np.gradient(traj.eta, traj.rho)
    assert np.max(np.abs(deta - rn.F(traj.r))[1:-1]) < 1e-6


def test_inward_geodesic_leaves_domain(schw):
    with pytest.raises(LeftDomain) as exc:
        O.geodesic_integrate(schw, O.GeodesicState.from_angle(schw, 2.0, 0.0, math.pi), 100.0, step=1e-2)
    assert exc.value.trajectory.r[-1] > schw.r_min


def test_sphere_cap_geodesics_close():
    tr = M.sphere_cap()
    traj = O.geodesic_integrate(tr, O.GeodesicState.from_angle(tr, 1.0, 0.0, 0.5), 2 * math.pi, step=1e-3)
    assert traj.r[-1] == pytest.approx(1.0, abs=1e-8)


def test_h_over_f_of_coordinate_spheres(schw):
    traj = O.geodesic_integrate(schw, O.GeodesicState.from_angle(schw, 3.0, 0.0, 0.3), 2.0)
    assert np.allclose(traj.h_over_f(), 2.0 / traj.r, rtol=1e-14)


def test_distance_radial_and_trivial(schw):
    assert O.distance_point(schw, (3.0, 0.0), (3.0, 0.0)) == 0.0
    d = O.distance_point(schw, (2.0, 0.0), (5.0, 0.0))
    assert d == pytest.approx(O.rho_radial(schw, 2.0, 5.0), rel=1e-6)
    with pytest.raises(ValueError):
        O.distance_point(schw, (2.0, 0.0), (5.0, 0.0), fan=8)


def test_distance_flat_chord(flat):
    p, q = (2.0, 0.0), (3.0, 1.3)
    chord = math.dist((2.0, 0.0), (3.0 * math.cos(1.3), 3.0 * math.sin(1.3)))
    assert O.distance_point(flat, p, q) == pytest.approx(chord, abs=1e-5)


def test_riccati_equality_on_models(schw):
    r0 = 2.0
    res = O.riccati_evolve(schw, r0, 10.0, 2.0 / r0)
    assert not res.events
    defect = max(abs(s.h_over_f * s.eta - 2.0) for s in res.states)
    assert defect < 1e-9


def test_riccati_focal_point(flat):
    r0, h0 = 2.0, -0.5
    predicted = O.focal_distance_prediction(flat, r0, h0)
    assert predicted == pytest.approx(r0 + 4.0)
    res = O.riccati_evolve(flat, r0, 10.0, h0)
    assert res.blew_up
    focal = [e for e in res.events if e.kind == "focal"][0]
    assert focal.r == pytest.approx(predicted, abs=1e-6)
    assert res.events[0].kind == "nonpositive-start"


def test_riccati_zero_start_stays_zero(flat):
    res = O.riccati_evolve(flat, 2.0, 6.0, 0.0)
    assert max(s.h_over_f for s in res.states) <= 0.0
    assert not res.blew_up


@pytest.mark.parametrize("triple", [M.schwarzschild(0.5), M.reissner_nordstrom(1.0, 0.5), M.euclidean()])
def test_laplacian_equality_on_models(triple):
    r0 = max(2.0 * triple.r_min, 1.0)
    rep = O.laplacian_comparison_check(triple, r0, np.geomspace(r0, 40 * r0, 60))
    assert rep.passed and rep.equality


def test_laplacian_strict_beyond_concave_bump():
    tr = M.bump_warp(M.schwarzschild(0.5), 4.0, 1.0, 0.2)
    rep = O.laplacian_comparison_check(tr, 2.0, np.geomspace(2.0, 40.0, 80))
    # the base sphere itself is always an equality point
    assert rep.passed and rep.context["max_abs_h_eta_defect"] > 1e-3
    beyond = np.geomspace(5.5, 40.0, 10)
    flow = O.RadialFlow.from_sphere(tr, 2.0)
    slack = 2.0 / flow.eta(beyond) - 2.0 * tr.b(beyond, 1) / tr.b(beyond)
    assert np.all(slack > 1e-6)


def test_laplacian_needs_substatic():
    tr = M.bump_warp(M.euclidean(), 3.0, 1.0, -0.3)
    with pytest.raises(PrerequisiteFailed):
        O.laplacian_comparison_check(tr, 1.0, np.linspace(1.0, 6.0, 50))


def test_point_limit_de_sitter():
    tr = M.de_sitter()
    assert O.point_mean_curvature_product(tr, 1e-3) == pytest.approx(2.0, abs=1e-4)


@given(center=st.floats(2.0, 6.0), width=st.floats(0.3, 1.0), depth=st.floats(0.0, 0.3))
def test_substatic_implies_comparison(center, width, depth):
    tr = M.bump_warp(M.schwarzschild(0.5), center, width, depth)
    grid = np.geomspace(1.5, 30.0, 60)
    rep = O.laplacian_comparison_check(tr, 1.5, grid)
    assert rep.passed
