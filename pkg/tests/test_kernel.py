import cmath
import math

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ihg.errors import BoundaryError, PoleError, ZeroBaseError
from ihg.kernel import (branch_case, branched_pow, log_gamma, near_integer, pochhammer,
                        pow_product_factor, rgamma)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


@pytest.mark.parametrize("a, n, expected", [(2.5, 0, 1), (1, 4, 24), (-2, 3, 0)])
def test_pochhammer_examples(a, n, expected):
    assert pochhammer(a, n) == expected


def test_pochhammer_large_n_matches_mpmath():
    a = 0.3 + 0.7j
    ref = complex(mpmath.rf(mpmath.mpc(a), 100))
    assert abs(pochhammer(a, 100) - ref) / abs(ref) < 1e-12


def test_pochhammer_negative_n():
    with pytest.raises(ValueError):
        pochhammer(1, -1)


def test_log_gamma_values():
    assert log_gamma(1) == 0
    assert abs(log_gamma(0.5) - 0.57236494292470) < 1e-13


@given(cplx)
def test_log_gamma_against_mpmath(z):
    assume(abs(z - round(z.real)) > 0.05)
    assert abs(log_gamma(z) - complex(mpmath.loggamma(z))) < 1e-12 * max(1, abs(log_gamma(z)))


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        log_gamma(-2)


def test_rgamma_zero_at_poles():
    assert rgamma(0) == 0 and rgamma(-3) == 0
    assert abs(rgamma(0.5) - 1 / math.sqrt(math.pi)) < 1e-15


def test_near_integer():
    assert near_integer(3 + 1e-12)
    assert not near_integer(3.01)
    assert not near_integer(3 + 1e-3j)


@pytest.mark.parametrize("z, alpha, expected", [
    (1, 0.37 - 2j, 1),
    (1j, 0.5, cmath.exp(0.25j * math.pi)),
    (-1 + 1e-12j, 0.5, 1j),
])
def test_branched_pow_examples(z, alpha, expected):
    assert abs(branched_pow(z, alpha) - expected) < 1e-10


def test_branched_pow_negative_axis_is_upper_side():
    # arg(-1) = +pi on the principal branch
    assert abs(branched_pow(-1, 0.5) - 1j) < 1e-15


def test_branched_pow_zero_base():
    assert branched_pow(0, 1.5) == 0
    with pytest.raises(ZeroBaseError):
        branched_pow(0, -0.5)


def test_product_factor_examples():
    z = w = -1 - 0.1j
    assert branch_case(z, w) == "plus_2pi"
    assert abs(pow_product_factor(z, w, 0.3) - cmath.exp(2j * math.pi * 0.3)) < 1e-15
    assert pow_product_factor(1 + 1j, 1 + 0.1j, 0.3) == 1
    assert pow_product_factor(-1 + 0.1j, -1 + 0.1j, 0.3) == cmath.exp(-2j * math.pi * 0.3)
    assert pow_product_factor(-1 - 0.1j, -1 - 0.1j, 0) == 1


def test_product_factor_boundary():
    with pytest.raises(BoundaryError):
        branch_case(2.0, 1 + 1j)


@settings(max_examples=300)
@given(cplx, cplx, cplx)
def test_product_rule_property(z, w, alpha):
    assume(min(abs(z.imag), abs(w.imag), abs((z * w).imag)) > 1e-3)
    lhs = branched_pow(z * w, alpha)
    rhs = pow_product_factor(z, w, alpha) * branched_pow(z, alpha) * branched_pow(w, alpha)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1e-300) + 1e-300
