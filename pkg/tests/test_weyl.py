import cmath

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ihg import EvaluationPoint, Parameters
from ihg.errors import RankError, ToricMismatch
from ihg.system import SystemSpec, build_delta11_homogeneous, build_delta11_inhomogeneous, build_system
from ihg.weyl import (ALPHA1, ALPHA2, GAMMA, IDENTITY, X11, X21, X12, X22, CallableHandle,
                      DifferentialOperator as D, PhiHandle, apply, cauchy_derivative, compose,
                      euler_op, theta)

x0 = EvaluationPoint(0.7 + 0.1j, 1.3, 0.9 - 0.2j, 2.1)


def test_canonical_commutator():
    assert compose(D.d("11"), D.const(X11)) == D.const(X11) * D.d("11") + 1


def test_theta_squared():
    want = D({(2, 0, 0, 0): X11 ** 2, (1, 0, 0, 0): X11})
    assert compose(theta("11"), theta("11")) == want


def test_identity_and_order():
    op = theta("21") * D.d("12") - ALPHA1
    assert compose(IDENTITY, op) == op and compose(op, IDENTITY) == op
    assert op.order == 2
    assert (op - op) == D()


def test_swap12_involution():
    op = D.const(X11 * X22) * D.d("21") + ALPHA1 * theta("12")
    assert op.swap12().swap12() == op
    assert op.swap12() == D.const(X12 * X21) * D.d("22") + ALPHA2 * theta("11")


def test_canonical_string_is_stable():
    a = theta("11") + theta("21")
    b = theta("21") + theta("11")
    assert a.canonical() == b.canonical()
    assert "d11" in str(a)


def test_apply_exp_and_monomial():
    f = CallableHandle(lambda x11, x21, x12, x22: cmath.exp(x11))
    x = EvaluationPoint(1e-9 + 0j, 1, 1, 1)
    # entire function: a unit-scale radius is allowed
    assert abs(apply(D.d("11"), f, x, radius=0.5) - cmath.exp(x.x11)) < 1e-12
    n = 5
    g = CallableHandle(lambda x11, x21, x12, x22: x11 ** n)
    y = EvaluationPoint(1.3 + 0.2j, 1, 1, 1)
    assert abs(apply(theta("11"), g, y) - n * y.x11 ** n) < 1e-10 * abs(y.x11 ** n)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3))
def test_cauchy_mixed_derivative_of_exponential(n1, n2):
    f = CallableHandle(lambda x11, x21, x12, x22: cmath.exp(2 * x11 + 0.5 * x22))
    val = cauchy_derivative(f, (n1, 0, 0, n2), x0)
    ref = 2 ** n1 * 0.5 ** n2 * cmath.exp(2 * x0.x11 + 0.5 * x0.x22)
    assert abs(val - ref) < 1e-9 * abs(ref)


def test_compose_matches_numeric_application():
    op1, op2 = theta("11") + X21 * D.d("12"), D.const(X22) * D.d("11") - 2
    f = CallableHandle(lambda x11, x21, x12, x22: cmath.exp(x11 * x12) * x22 ** 2)
    composed = apply(compose(op1, op2), f, x0)
    from ihg.weyl import OperatorHandle
    nested = apply(op1, OperatorHandle(op2, f), x0)
    assert abs(composed - nested) < 1e-8 * max(1, abs(composed))


def test_toric_operator_annihilates_phi():
    p = Parameters(0.35, -0.45, 0.6, 0.5, 1.5)
    x = EvaluationPoint(2 + 0.5j, 1, 3, 1 - 0.2j)
    toric = D.d("11") * D.d("22") - D.d("21") * D.d("12")
    h = PhiHandle(p)
    scale = abs(h.derivative((1, 0, 0, 1), x))
    assert abs(apply(toric, h, x)) < 1e-7 * scale


def test_euler_rows():
    assert euler_op(3) == theta("21") + theta("22") + GAMMA + 1
    with pytest.raises(ValueError):
        euler_op(4)


def test_system_rows_shapes():
    rows = build_delta11_inhomogeneous()
    assert len(rows) == 4 and rows[3][1] == "boundary_term"
    assert [op.order for op, _ in rows] == [2, 1, 1, 1]
    hom = build_delta11_homogeneous()
    assert hom[3].order == 3


def test_row4_trivial_case():
    p = Parameters(0, 0, 0, 1, 2)
    op, g = build_delta11_inhomogeneous(p)[3]
    x = EvaluationPoint(1 + 0.1j, 1, 1, 1)
    assert abs(apply(op, PhiHandle(p), x) - g.evaluate(x)) < 1e-9


def test_build_system_beta_example():
    al, be = sp.symbols("al be")
    spec = SystemSpec([[1, 1], [0, 1]], [GAMMA - 1, al - 1])
    rows = build_system(spec)
    assert len(rows) == 2
    assert rows[0][0] == theta("11") + theta("21") - (GAMMA - 1)
    assert rows[1][0] == theta("21") - (al - 1)


def test_build_system_delta11_matches_scaled_rows():
    spec = SystemSpec([[1, 1, 0, 0], [0, 0, 1, 1], [0, 1, 0, 1]], [ALPHA1, ALPHA2, -GAMMA - 1],
                      [((1, 0, 0, 1), (0, 1, 1, 0))])
    rows = build_system(spec)
    assert rows[0][0] == euler_op(1) and rows[1][0] == euler_op(2) and rows[2][0] == euler_op(3)
    toric = rows[3][0]
    # theta11 theta22 - (x11 x22/(x21 x12)) theta21 theta12 is x11 x22 times the binomial operator
    scaled = D.const(X11 * X22) * toric
    from ihg.system import row1_operator
    assert scaled == row1_operator()


def test_build_system_identity_no_pairs():
    rows = build_system(SystemSpec([[1, 0], [0, 1]], [1, 2]))
    assert len(rows) == 2


def test_build_system_errors():
    with pytest.raises(RankError):
        build_system(SystemSpec([[2, 0], [0, 1]], [0, 0]))
    with pytest.raises(ToricMismatch):
        build_system(SystemSpec([[1, 1, 0, 0], [0, 0, 1, 1], [0, 1, 0, 1]], [0, 0, 0],
                                [((1, 0, 0, 0), (0, 1, 0, 0))]))
    with pytest.raises(ValueError):
        SystemSpec([[1, 1, 1, 1, 1]], [0])


def test_coefficients_numeric():
    op = D.const(X11 * ALPHA1) * D.d("21") + 3
    c = op.coefficients(x0, {"alpha1": 2.0})
    assert c[(0, 1, 0, 0)] == pytest.approx(2 * x0.x11)
    assert c[(0, 0, 0, 0)] == 3
