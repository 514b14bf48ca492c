import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ihg.atlas import (DVector, EvaluationPoint, RegionTag, base_point, chain_holds, classify_d,
                       region_membership, region_ratios)
from ihg.errors import BoundaryError, EndpointError
from ihg.params import Parameters, genericity

coord = st.builds(complex, st.floats(-5, 5), st.floats(-5, 5))


def test_classify_d_example():
    x = EvaluationPoint(1 + 1j, 1 + 2j, 1 + 1j, 1 + 3j)
    assert classify_d(x).d == (0, 0, 0, 0, 0, 0, 1)


def test_classify_d_real_point_is_boundary():
    with pytest.raises(BoundaryError):
        classify_d(EvaluationPoint(1, 2, 1, 3))


@given(coord, coord, coord, coord)
def test_conjugation_flips_d(a, b, c, d):
    assume(min(abs(v) for v in (a, b, c, d)) > 1e-3)
    x = EvaluationPoint(a, b, c, d)
    try:
        dv = classify_d(x)
    except BoundaryError:
        assume(False)
    assert classify_d(x.conjugate()) == dv.flipped()


def test_zero_coordinate_rejected():
    with pytest.raises(BoundaryError):
        EvaluationPoint(0, 1, 1, 1)


def test_dvector_validation_and_match():
    with pytest.raises(ValueError):
        DVector((0, 1))
    d = DVector((1, 1, 0, 1, 0, 1, 0))
    assert d.matches("11**0**") and not d.matches("01**0**")
    assert str(d) == "(1,1,0,1,0,1,0)"


def test_region_membership_examples():
    assert region_membership(EvaluationPoint(1, 2, 1, 3), 0.8, 1.5) == {RegionTag.D22_21}
    assert region_membership(EvaluationPoint(10, 1, 10, 1), 0.8, 1.5) == {RegionTag.D12_11}
    r = region_ratios(RegionTag.D22_21, EvaluationPoint(1, 2, 1, 3), 0.8, 1.5)
    assert r == pytest.approx([1 / 3, 0.625, 1 / 4.5, 1 / 2.4])


def test_region_boundary_excluded():
    x = EvaluationPoint(2, 1, 10, 1)  # |x21 b / x11| = 1 with b = 2
    assert RegionTag.D12_11 not in region_membership(x, 1.0, 2.0)


def test_zero_endpoint_excludes_flipped_regions():
    x = EvaluationPoint(10, 1, 10, 1)
    assert region_membership(x, 0.0, 1.0) == {RegionTag.D12_11}


def test_region_flips():
    assert RegionTag.D12_11.flips == (False, False)
    assert RegionTag.D22_21.flips == (True, True)
    assert RegionTag.D12_21.flips == (True, False)
    assert RegionTag.D22_11.flips == (False, True)


@pytest.mark.parametrize("a, b, expected", [(0.8, 1.5, (1, 3, 1, 6)), (1, 2, (1, 4, 1, 8)),
                                            (0.1, 0.2, (1, 20, 1, 40))])
def test_base_point(a, b, expected):
    x = base_point(a, b)
    assert x.as_tuple() == pytest.approx(expected)
    assert chain_holds(x, a, b)
    assert region_membership(x, a, b) == {RegionTag.D22_21}


def test_endpoints_validated():
    with pytest.raises(EndpointError):
        region_membership(EvaluationPoint(1, 1, 1, 1), 2.0, 1.0)
    with pytest.raises(EndpointError):
        Parameters(0, 0, 0, -1, 1)
    with pytest.raises(EndpointError):
        base_point(0.0, 1.0)


def test_parameters_beta_and_shift():
    p = Parameters(0.3, 0.4, 0.5, 1, 2)
    assert p.beta == -1.5
    assert Parameters.from_beta(0.3, 0.4, -1.5, 1, 2) == p
    q = p.shifted(1, 0, 1)
    assert (q.alpha1, q.gamma, q.beta) == (1.3, -0.5, -0.5)
    with pytest.raises(ValueError):
        Parameters(0, 0, 0, 1, 2, beta=3)


def test_genericity():
    assert genericity(Parameters(0.3, 0.4, 0.5, 1, 2)).ok
    rep = genericity(Parameters(0.5, 0.4, 0.5, 1, 2))
    assert not rep.ok and rep.violated == ("gamma+alpha1",)
