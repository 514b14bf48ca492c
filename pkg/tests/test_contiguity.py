import numpy as np
import pytest
import sympy as sp

from ihg import EvaluationPoint, Parameters
from ihg.atlas import RegionTag
from ihg.errors import UnknownShift
from ihg.system import (HATTABLE, SHIFTS, all_relations, check_g_shift_condition, contiguity_op,
                        verify_contiguity)
from ihg.weyl import ALPHA1, ALPHA2, BETA, DifferentialOperator as D

P = Parameters(0.35, -0.45, 0.6, 0.5, 1.5)
X_SERIES = EvaluationPoint(1 + 0.1j, 5, 1 - 0.1j, 9)      # inside D22_21 for every shift used
X_ORACLE = EvaluationPoint(2 + 0.5j, 1, 3, 1 - 0.2j)


def test_relation_inventory():
    rels = all_relations()
    assert len(rels) == len(SHIFTS) + len(HATTABLE) == 16
    assert {r.shift for r in rels} == set(SHIFTS)


def test_published_simple_forms():
    r = contiguity_op("-a1")
    assert r.operator == D.d("11") and r.scalar == ALPHA1 and r.boundary_coeff == 0
    r = contiguity_op("+a1", hatted=True)
    assert r.boundary_coeff == -1 and sp.simplify(r.scalar - (ALPHA1 + ALPHA2 - BETA)) == 0
    r = contiguity_op("+e3", hatted=True)
    assert sp.simplify(r.scalar - ALPHA1 * BETA) == 0 and r.boundary_coeff == ALPHA1


def test_unknown_shift():
    with pytest.raises(UnknownShift):
        contiguity_op("+a7")
    with pytest.raises(UnknownShift):
        contiguity_op("-a1", hatted=True)


@pytest.mark.parametrize("shift", SHIFTS)
def test_relations_series(shift):
    rep = verify_contiguity(shift, P, X_SERIES)
    assert rep.ok, rep.to_dict()


@pytest.mark.parametrize("shift", HATTABLE)
def test_hatted_relations_series(shift):
    rep = verify_contiguity(shift, P, X_SERIES, hatted=True)
    assert rep.ok, rep.to_dict()


@pytest.mark.parametrize("shift", ["-a1", "+a2", "+e3"])
def test_relations_oracle(shift):
    rep = verify_contiguity(shift, P, X_ORACLE, method="oracle")
    assert rep.ok, rep.to_dict()


@pytest.mark.parametrize("shift", ["+a2", "+a4", "+e3"])
def test_printed_sign_fails_with_ratio_minus_one(shift):
    rep = verify_contiguity(shift, P, X_SERIES, as_printed=True)
    assert not rep.ok
    assert abs(rep.lhs / rep.rhs + 1) < 1e-8


def test_minus_a1_trivial_zero():
    q = Parameters(0, 0, 0.6, 0.5, 1.5)
    rep = verify_contiguity("-a1", q, X_SERIES)
    assert abs(rep.lhs) < 1e-14 and abs(rep.rhs) < 1e-14


def test_report_json_roundtrip():
    import json
    rep = verify_contiguity("-a2", P, X_SERIES)
    d = json.loads(rep.to_json())
    assert d["ok"] is True and d["residual"] == rep.residual


def test_g_shift_condition_examples():
    q = Parameters(2.0, 0.4, 0.3, 0.5, 1.5)
    x = EvaluationPoint(1 + 0.1j, 5, 1 - 0.1j, 9)
    rep = check_g_shift_condition("11", q, x)
    assert rep.ok
    for k in ("21", "12", "22"):
        assert check_g_shift_condition(k, q, x).ok
    z = Parameters(0, 0.4, 0.3, 0.5, 1.5)
    rep = check_g_shift_condition("11", z, x)
    assert rep.ok and "degenerate" in rep.notes
