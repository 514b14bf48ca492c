import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ihg import EvaluationPoint, Parameters
from ihg.atlas import RegionTag
from ihg.errors import NotConverged, OutsideConvergenceRegion
from ihg.series import (appell_f1, f12_11_pq, f12_11_via_f1, f12_11_via_superposition, f_series,
                        gauss_2f1, series_derivative, tilde_f)
from ihg.weyl import SeriesHandle, cauchy_derivative


def mp_phi(p, x, anchor_flips=(False, False)):
    """Independent mpmath integral with the region's factor branches."""
    x11, x21, x12, x22 = (mpmath.mpc(v) for v in x)

    def factor(x1, x2, t, alpha, flip):
        if flip:
            return (x2 * t) ** alpha * (1 + x1 / (x2 * t)) ** alpha
        return x1 ** alpha * (1 + x2 * t / x1) ** alpha

    f = lambda t: (t ** p.gamma * factor(x11, x21, t, p.alpha1, anchor_flips[0])
                   * factor(x12, x22, t, p.alpha2, anchor_flips[1]))
    return complex(mpmath.quad(f, [p.a, p.b]))


def test_trivial_collapse():
    p = Parameters(0, 0, 1, 1, 2)
    assert f_series(RegionTag.D12_11, p, (10, 1, 10, 1)).value == pytest.approx(1.5, abs=1e-15)
    assert f_series(RegionTag.D22_21, p, (1, 4, 1, 8)).value == pytest.approx(1.5, abs=1e-15)


def test_generic_value_against_mpmath(generic_params, far_point):
    val = f_series(RegionTag.D12_11, generic_params, far_point).value
    ref = mp_phi(generic_params, far_point.as_tuple())
    assert abs(val - ref) / abs(ref) < 1e-12


@pytest.mark.parametrize("region, x", [
    (RegionTag.D12_11, (5 + 1j, 1 - 0.5j, 6 - 2j, 1 + 0.3j)),
    (RegionTag.D22_21, (1 + 0.5j, 4 - 1j, 1 - 0.2j, 9 + 2j)),
    (RegionTag.D12_21, (1 + 0.5j, 4 - 1j, 6 - 2j, 1 + 0.3j)),
    (RegionTag.D22_11, (5 + 1j, 1 - 0.5j, 1 - 0.2j, 9 + 2j)),
])
def test_complex_points_against_mpmath(region, x):
    p = Parameters(0.35 + 0.2j, -0.45, 0.6, 0.5, 1.5)
    val = f_series(region, p, x).value
    ref = mp_phi(p, x, region.flips)
    assert abs(val - ref) / abs(ref) < 1e-11


def test_outside_region_raises():
    with pytest.raises(OutsideConvergenceRegion):
        f_series(RegionTag.D12_11, Parameters(0.3, 0.2, 0.1, 1, 2), (1, 1, 1, 1))


def test_terms_cap(monkeypatch):
    monkeypatch.setenv("IHG_MAX_TERMS", "16")
    p = Parameters(0.3, 0.2, 0.1, 1, 2)
    with pytest.raises(NotConverged):
        f_series(RegionTag.D12_11, p, (2.1, 1, 2.1, 1))


def test_tail_bound_is_honest(generic_params):
    x = (2.5, 1, 3, 1)
    res = f_series(RegionTag.D12_11, generic_params, x, tol=1e-6, rtol=0)
    ref = mp_phi(generic_params, x)
    assert abs(res.value - ref) <= res.tail_bound + 1e-14


def test_pq_variants(generic_params, far_point):
    plain = f_series(RegionTag.D12_11, generic_params, far_point).value
    assert f12_11_pq(1, 1, generic_params, far_point).value == pytest.approx(plain, rel=1e-15)
    assert f12_11_pq(0, 0, generic_params, far_point).value == 0


def test_representations_agree(generic_params):
    x = (4 + 1j, 1 - 0.5j, 5 - 2j, 1 + 0.3j)
    s = f_series(RegionTag.D12_11, generic_params, x).value
    assert abs(f12_11_via_f1(generic_params, x).value - s) < 1e-12 * abs(s)
    assert abs(f12_11_via_superposition(generic_params, x).value - s) < 1e-12 * abs(s)


def test_f1_form_trivial_and_a_zero():
    p = Parameters(0, 0, 0.5, 1, 2)
    assert f12_11_via_f1(p, (10, 1, 10, 1)).value == pytest.approx((2 ** 1.5 - 1) / 1.5)
    q = Parameters(0.3, -0.2, 0.4, 0, 2)
    x = (10, 1, 10, 1)
    assert abs(f12_11_via_f1(q, x).value - mp_phi(q, x)) < 1e-12


def test_superposition_alpha2_zero():
    p = Parameters(0.3, 0, 0.4, 1, 2)
    x = (10, 1, 10, 1)
    assert abs(f12_11_via_superposition(p, x).value - mp_phi(p, x)) < 1e-12


def test_gauss_2f1():
    assert gauss_2f1(1, 2, 3, 0).value == 1
    assert gauss_2f1(1, 1, 2, 0.5).value == pytest.approx(2 * math.log(2), rel=1e-14)
    assert gauss_2f1(0.7, 1.3, 1.3, 0.4 + 0.2j).value == pytest.approx((0.6 - 0.2j) ** -0.7,
                                                                       rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.2, 3), st.floats(-0.8, 0.8),
       st.floats(-0.5, 0.5))
def test_gauss_2f1_property(aa, bb, cc, zr, zi):
    z = complex(zr, zi)
    ref = complex(mpmath.hyp2f1(aa, bb, cc, z))
    assert abs(gauss_2f1(aa, bb, cc, z).value - ref) <= 1e-11 * max(1, abs(ref))


def test_appell_f1():
    assert appell_f1(0.3, 0.4, 0.5, 1.2, 0, 0).value == 1
    assert appell_f1(0.3, 0.4, 0, 1.2, 0.5, 0.7).value == pytest.approx(
        gauss_2f1(0.3, 0.4, 1.2, 0.5).value, rel=1e-14)
    assert appell_f1(0.5, 0.5, 0.5, 1.5, 0.25, 0).value == pytest.approx(
        math.asin(0.5) / 0.5, rel=1e-14)
    u, v = 0.3 - 0.2j, -0.4 + 0.1j
    ref = complex(mpmath.appellf1(0.3, 0.4, -0.7, 1.6, u, v))
    assert abs(appell_f1(0.3, 0.4, -0.7, 1.6, u, v).value - ref) < 1e-13


def test_derivative_empty_and_trivial(generic_params, far_point):
    ev = series_derivative(RegionTag.D12_11, generic_params, (0, 0, 0, 0))
    assert ev(far_point).value == f_series(RegionTag.D12_11, generic_params, far_point).value
    q = Parameters(0, 0, 0.3, 1, 2)
    assert abs(series_derivative(RegionTag.D12_11, q, (1, 0, 0, 0))(far_point).value) < 1e-15


def test_termwise_vs_cauchy_derivative(generic_params):
    x = EvaluationPoint(4 + 1j, 1 - 0.5j, 5 - 2j, 1 + 0.3j)
    termwise = series_derivative(RegionTag.D12_11, generic_params, (0, 1, 0, 0))(x).value
    numeric = cauchy_derivative(SeriesHandle(RegionTag.D12_11, generic_params), (0, 1, 0, 0), x)
    assert abs(termwise - numeric) < 1e-8 * abs(termwise)


def test_tilde_f_against_closed_form():
    p = Parameters(0.3, 0.25, 0.4, 0.5, 1.0)
    x = (1 + 0.2j, 3 - 0.4j, 2 + 0.1j, 1.5 + 0.3j)
    x11, x21, x12, x22 = (mpmath.mpc(v) for v in x)
    ref = (x11 ** p.alpha1 * x12 ** p.alpha2 * (-x11 / x21) ** (p.gamma + 1)
           * mpmath.hyp2f1(-p.alpha2, p.gamma + 1, p.gamma + p.alpha1 + 2,
                           x11 * x22 / (x12 * x21)))
    assert abs(tilde_f(p, x).value - complex(ref)) < 1e-13 * abs(complex(ref))


def test_tilde_f_alpha2_zero_is_prefactor():
    p = Parameters(0.3, 0, 0.4, 0.5, 1.0)
    x = (1 + 0.2j, 3 - 0.4j, 2 + 0.1j, 1.5 + 0.3j)
    pref = x[0] ** 0.3 * (-x[0] / x[1]) ** 1.4
    assert tilde_f(p, x).value == pytest.approx(pref, rel=1e-14)


def test_series_result_fields(generic_params, far_point):
    r = f_series(RegionTag.D12_11, generic_params, far_point)
    assert r.tail_bound >= 0 and r.terms_used[0] >= 1
    assert np.isfinite(r.value)
