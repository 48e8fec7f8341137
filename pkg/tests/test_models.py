import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from substatic import models as M
from substatic.errors import BadProfile, DomainEmpty, InapplicableEnd, ModelError, NakedSingularity


def test_schwarzschild_domain_and_lapse():
    tr = M.schwarzschild(1.0)
    assert tr.r_min == pytest.approx(2.0, abs=1e-14)
    assert tr.has_horizon and not tr.capped
    f, f1, _ = M.eval_f(tr, 4.0)
    assert f == pytest.approx(math.sqrt(0.5), rel=1e-15)
    # f' = m / (r^2 f)
    assert f1 == pytest.approx(1.0 / (16.0 * math.sqrt(0.5)), rel=1e-13)


def test_reissner_nordstrom_outer_horizon():
    tr = M.reissner_nordstrom(1.0, 0.6)
    assert tr.r_min == pytest.approx(1.8, abs=1e-14)
    assert float(tr.F(tr.r_min)) == pytest.approx(0.0, abs=1e-14)


def test_higher_dimensional_horizon():
    # F = 1 - 2m/r^{n-2}: r_min = (2m)^{1/(n-2)}
    tr = M.schwarzschild(1.0, n=4)
    assert tr.r_min == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_de_sitter_is_bounded():
    tr = M.de_sitter(3.0)
    assert tr.r_min == 0.0 and tr.capped
    assert tr.r_max == pytest.approx(1.0, rel=1e-14)


def test_schwarzschild_ads_has_no_cosmological_horizon():
    tr = M.schwarzschild_ads(1.0, -3.0)
    assert math.isinf(tr.r_max)
    assert float(tr.F(tr.r_min)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("q", [2.0, 1.0])
def test_naked_or_extremal_rejected(q):
    with pytest.raises(NakedSingularity):
        M.reissner_nordstrom(1.0, q)


def test_spec_validation():
    with pytest.raises(ModelError):
        M.ModelSpec("schwarzschild", mass=-1.0)
    with pytest.raises(ModelError):
        M.ModelSpec("schwarzschild", n=2)
    with pytest.raises(ModelError):
        M.ModelSpec("unknown")
    with pytest.raises(BadProfile):
        M.ModelSpec("custom")


def test_horizon_lapse_is_exactly_zero():
    tr = M.schwarzschild(0.5)
    f, f1, _ = M.eval_f(tr, tr.r_min)
    assert f == 0.0
    assert math.isinf(f1)


@given(
    m=st.floats(0.05, 3.0),
    q_frac=st.floats(0.0, 0.95),
    lam=st.floats(-3.0, 0.0),
    n=st.integers(3, 6),
    x=st.floats(1.01, 50.0),
)
def test_squared_lapse_formula(m, q_frac, lam, n, x):
    q = q_frac * m
    try:
        tr = M.build_model(M.ModelSpec("reissner-nordstrom" if lam == 0 else "schwarzschild-ads", n=n, lam=lam, mass=m, charge=q if lam == 0 else 0.0))
    except (NakedSingularity, DomainEmpty):
        return
    r = x * max(tr.r_min, 0.1)
    qq = q if lam == 0 else 0.0
    expected = 1.0 - 2.0 * m / r ** (n - 2) + qq**2 / r ** (2 * n - 4) - 2.0 * lam / (n * (n - 1)) * r**2
    assert abs(float(tr.F(r)) - expected) <= 1e-12 * max(1.0, abs(expected))


def test_construction_is_deterministic():
    a = M.tabulate(M.reissner_nordstrom(1.0, 0.5), np.geomspace(2.0, 50.0, 20))
    b = M.tabulate(M.reissner_nordstrom(1.0, 0.5), np.geomspace(2.0, 50.0, 20))
    assert a == b


def test_custom_table_round_trip():
    ref = M.schwarzschild(0.5)
    radii = np.concatenate([[1.0], np.geomspace(1.1, 40.0, 1500)])
    tr = M.build_model(M.ModelSpec("custom", profile_table=tuple(map(tuple, M.tabulate(ref, radii)))))
    assert tr.has_horizon and tr.r_min == 1.0
    r = np.linspace(2.0, 30.0, 50)
    assert np.max(np.abs(tr.F(r) - ref.F(r))) < 1e-7
    assert tr.b_is_identity


@pytest.mark.parametrize(
    "rows",
    [
        [[1.0, 1.0, 1.0]] * 3,
        [[float(i), 1.0, float(i)] for i in range(8, 0, -1)],
        [[float(i), -1.0, float(i)] for i in range(1, 9)],
        [[float(i), 1.0, 0.0] for i in range(1, 9)],
        [[float(i), 1.0] for i in range(1, 9)],
    ],
)
def test_custom_table_rejected(rows):
    with pytest.raises(BadProfile):
        M.build_model(M.ModelSpec("custom", profile_table=tuple(map(tuple, rows))))


def test_cross_section_scaling():
    tr = M.euclidean(area_ratio=0.7)
    assert tr.cross_section.area_ratio == pytest.approx(0.7, rel=1e-15)
    assert tr.unit_area == pytest.approx(0.7 * 4 * math.pi, rel=1e-15)


@pytest.mark.parametrize(
    "triple, kind",
    [
        (M.schwarzschild(0.5), "f-complete"),
        (M.reissner_nordstrom(1.0, 0.5), "f-complete"),
        (M.euclidean(), "f-complete"),
        (M.power_lapse(0.5), "f-complete"),
        (M.schwarzschild_ads(1.0, -3.0), "conformally-compact"),
        (M.de_sitter(), "undetermined"),
    ],
)
def test_classify_end(triple, kind):
    assert M.classify_end(triple).kind == kind


def test_sads_optical_length_is_finite():
    end = M.classify_end(M.schwarzschild_ads(1.0, -3.0))
    assert 0 < end.rho_total < math.inf


def test_pinching():
    assert M.check_f_pinching(M.schwarzschild(1.0), 0.5, (2.5, 100.0)).passed
    assert not M.check_f_pinching(M.power_lapse(2.0), 0.5, (2.0, 100.0)).passed
    with pytest.raises(ValueError):
        M.check_f_pinching(M.schwarzschild(1.0), 1.5, (2.5, 100.0))


def test_uniformity():
    rep = M.check_uniformity_criteria(M.schwarzschild(0.5))
    assert rep.passed and rep.context["criterion"] == "f->1"
    assert M.check_uniformity_criteria(M.euclidean()).passed
    bad = M.check_uniformity_criteria(M.oscillating_lapse())
    assert not bad.passed
    assert bad.context["criterion"] == "uniformity not certified"
    with pytest.raises(InapplicableEnd):
        M.check_uniformity_criteria(M.schwarzschild_ads(1.0, -3.0))


def test_bump_warp_matches_profile_derivatives():
    tr = M.bump_warp(M.schwarzschild(0.5), 3.0, 1.0, 0.2)
    r = np.linspace(1.5, 5.0, 41)
    h = 1e-5
    fd1 = (tr.b(r + h) - tr.b(r - h)) / (2 * h)
    fd2 = (tr.b(r + h, 1) - tr.b(r - h, 1)) / (2 * h)
    assert np.max(np.abs(fd1 - tr.b(r, 1))) < 1e-9
    assert np.max(np.abs(fd2 - tr.b(r, 2))) < 1e-8
    far = np.array([1.5, 1.9, 4.1, 6.0])
    assert np.all(tr.b(far, 2) == 0.0)
