"""Incomplete A-hypergeometric systems and the contiguity operators of the 2x2 case."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import sympy as sp
from sympy.matrices.normalforms import smith_normal_form

from .atlas import EvaluationPoint, RegionTag, region_ratios
from .errors import OutsideConvergenceRegion, RankError, ToricMismatch, UnknownShift
from .params import Parameters
from .weyl import (ALPHA1, ALPHA2, B, BETA, GAMMA, A as A_SYM, X11, X12, X21, X22, XS,
                   BoundaryHandle, DifferentialOperator, FunctionHandle, PhiHandle,
                   SeriesHandle, apply_with_scale, compose, euler_op, theta)

D = DifferentialOperator
d11, d21, d12, d22 = (D.d(k) for k in ("11", "21", "12", "22"))

DELTA11_A = ((1, 1, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1))
TORIC_PAIR = ((1, 0, 0, 1), (0, 1, 1, 0))


@dataclass
class SystemSpec:
    """Matrix A (d x n, n <= 4), parameters, toric pairs (u, v) and right-hand sides."""

    A: list
    beta_vec: list
    toric_pairs: list = field(default_factory=list)
    rhs: list | None = None

    def __post_init__(self):
        self.A = [list(map(int, row)) for row in self.A]
        d, n = len(self.A), len(self.A[0])
        if n > 4:
            raise ValueError("at most four variables are supported")
        if len(self.beta_vec) != d:
            raise ValueError("beta_vec length must equal the number of rows of A")
        if self.rhs is None:
            self.rhs = [0] * d


def _spans_lattice(A) -> bool:
    M = sp.Matrix(A)
    d = M.rows
    if M.rank() < d:
        return False
    S = smith_normal_form(M, domain=sp.ZZ)
    return all(abs(S[i, i]) == 1 for i in range(d))


def _pad(v) -> tuple[int, int, int, int]:
    v = tuple(int(t) for t in v)
    return v + (0,) * (4 - len(v))


def build_system(spec: SystemSpec) -> list[tuple[DifferentialOperator, object]]:
    """Euler operators sum_j a_ij x_j d_j - beta_i with their right-hand sides, then
    one binomial operator d^u - d^v per toric pair (right-hand side 0).

    Variables are taken in the order x11, x21, x12, x22.
    """
    if not _spans_lattice(spec.A):
        raise RankError("columns of A do not span the integer lattice")
    n = len(spec.A[0])
    out = []
    for row, beta_i, g_i in zip(spec.A, spec.beta_vec, spec.rhs):
        op = D.const(-sp.sympify(beta_i))
        for j, aij in enumerate(row):
            if aij:
                op = op + aij * theta(("11", "21", "12", "22")[j])
        out.append((op, g_i))
    M = sp.Matrix(spec.A)
    for u, v in spec.toric_pairs:
        if len(u) != n or len(v) != n or min(u) < 0 or min(v) < 0:
            raise ToricMismatch("toric vectors must be nonnegative with one entry per column")
        if M * sp.Matrix(u) != M * sp.Matrix(v):
            raise ToricMismatch(f"A u != A v for u={u}, v={v}")
        out.append((D.dmulti(_pad(u)) - D.dmulti(_pad(v)), 0))
    return out


def row1_operator() -> DifferentialOperator:
    """theta11 theta22 - (x11 x22 / (x21 x12)) theta21 theta12."""
    return (compose(theta("11"), theta("22"))
            - D.const(X11 * X22 / (X21 * X12)) * compose(theta("21"), theta("12")))


def build_delta11_inhomogeneous(p: Parameters | None = None) -> list[tuple[DifferentialOperator, object]]:
    """Four operators; right-hand side is zero except the last row, which carries [g]."""
    g = BoundaryHandle(p) if p is not None else "boundary_term"
    return [(row1_operator(), 0), (euler_op(1), 0), (euler_op(2), 0), (euler_op(3), g)]


def build_delta11_homogeneous(p: Parameters | None = None) -> list[DifferentialOperator]:
    last = compose(compose(d22 - A_SYM * d12, d21 - B * d11), euler_op(3))
    return [row1_operator(), euler_op(1), euler_op(2), last]


# -------------------------------------------------------------- contiguity

@dataclass(frozen=True)
class ContiguityRelation:
    """operator . Phi(source) = scalar * Phi(target) + boundary_coeff * [g](target).

    Operator, scalar and boundary coefficient are written in the target
    parameters; ``source_shift`` is (d_alpha1, d_alpha2, d_beta) from target to source.
    """

    shift: str
    hatted: bool
    operator: DifferentialOperator
    scalar: sp.Expr
    boundary_coeff: sp.Expr
    source_shift: tuple
    target_shift: tuple = (0, 0, 0)

    def source(self, p: Parameters) -> Parameters:
        return p.shifted(*self.source_shift)

    def target(self, p: Parameters) -> Parameters:
        return p.shifted(*self.target_shift)


SHIFTS = ("-a1", "+a1", "-a2", "+a2", "-a3", "+a3", "-a4", "+a4", "-e3", "+e3")
HATTABLE = ("+a1", "+a2", "+a3", "+a4", "-e3", "+e3")


def _s_plus_a1() -> DifferentialOperator:
    theta_e = D.const(X21) * d21 + D.const(X22) * d22 + D.const(1 - BETA)
    inner = compose((A_SYM + B) * theta_e + D.const(X11) * d21 + D.const(X12) * d22, d22)
    inner = inner + A_SYM * B * (BETA * d12 - D.const(X22) * compose(d12, d22)
                                 - D.const(X21) * compose(d11, d22))
    return (D.const(X21 * X22) * inner
            + (ALPHA1 + ALPHA2 - BETA) * (D.const(X21 * X12) * d22 + D.const(ALPHA2 * X11)))


def _s_hat_plus_a1() -> DifferentialOperator:
    return D.const(X21 * X12 - X11 * X22) * d22 + D.const((ALPHA1 + ALPHA2) * X11)


def _s_plus_a2() -> DifferentialOperator:
    x = D.const
    t1 = (A_SYM + B) * (x(X11) * (x(ALPHA2 * X21) * d21 - x(X21 * X22) * compose(d21, d22)
                                  - x(X22 ** 2) * D.d("22", 2)
                                  + x((BETA + ALPHA2 - 2) * X22) * d22
                                  - x(ALPHA2 * (BETA - 1))))
    t2 = A_SYM * B * (compose(x(X11 * X22) * (x(X22) * d22 - x(ALPHA2 + BETA - 1)), d12)
                      + x(X21 ** 2) * (x(ALPHA2) * d21 - x(X22) * compose(d21, d22))
                      + x(X21) * (x((ALPHA1 - 1) * X22) * d22 - x(ALPHA2 * (ALPHA1 + BETA - 1))))
    t3 = x(X11) * (x(X12 * X22) * D.d("22", 2) + x((ALPHA1 - BETA + 1) * X12) * d22
                   + x(X11 * X22) * compose(d21, d22) - x(ALPHA2 * X11) * d21)
    return t1 + t2 - t3


def _s_hat_plus_a2() -> DifferentialOperator:
    return D.const(X11 * X22) * d12 + D.const(X21 * X22) * d22 + D.const(ALPHA1 * X21)


def _swap_expr(e):
    return sp.sympify(e).xreplace({ALPHA1: ALPHA2, ALPHA2: ALPHA1})


def _swap_rel(rel: ContiguityRelation, shift: str) -> ContiguityRelation:
    s = rel.source_shift
    t = rel.target_shift
    return ContiguityRelation(shift, rel.hatted, rel.operator.swap12(), _swap_expr(rel.scalar),
                              _swap_expr(rel.boundary_coeff), (s[1], s[0], s[2]), (t[1], t[0], t[2]))


def contiguity_op(shift: str, p: Parameters | None = None, hatted: bool = False,
                  as_printed: bool = False) -> ContiguityRelation:
    """Contiguity relation for ``shift``; ``hatted`` selects the variant carrying [g].

    The long +a2 operator (and everything derived from it: +a4, +e3) maps to
    -ab alpha2 beta Phi; ``as_printed=True`` returns the scalar with the
    opposite sign as it is usually stated, which fails numerical verification.
    """
    sgn = 1 if as_printed else -1
    if shift not in SHIFTS:
        raise UnknownShift(shift)
    if hatted and shift not in HATTABLE:
        raise UnknownShift(f"{shift} has no hatted form")
    zero = sp.Integer(0)
    if shift == "-a1":
        return ContiguityRelation(shift, False, d11, ALPHA1, zero, (0, 0, 0), (-1, 0, 0))
    if shift == "+a1":
        if hatted:
            return ContiguityRelation(shift, True, _s_hat_plus_a1(), ALPHA1 + ALPHA2 - BETA,
                                      sp.Integer(-1), (-1, 0, 0))
        return ContiguityRelation(shift, False, _s_plus_a1(), ALPHA2 * (ALPHA1 + ALPHA2 - BETA),
                                  zero, (-1, 0, 0))
    if shift == "-a2":
        return ContiguityRelation(shift, False, d21, ALPHA1, zero, (0, 0, 0), (-1, 0, -1))
    if shift == "+a2":
        if hatted:
            return ContiguityRelation(shift, True, _s_hat_plus_a2(), BETA, sp.Integer(1), (-1, 0, -1))
        return ContiguityRelation(shift, False, _s_plus_a2(), sgn * A_SYM * B * ALPHA2 * BETA, zero,
                                  (-1, 0, -1))
    if shift in ("-a3", "+a3", "-a4", "+a4"):
        base = {"a3": "a1", "a4": "a2"}[shift[1:]]
        return _swap_rel(contiguity_op(shift[0] + base, hatted=hatted, as_printed=as_printed), shift)
    if shift == "-e3":
        # operator for (alpha1-1, alpha2, beta; +a1) after d21 at (alpha1, alpha2, beta+1)
        outer = contiguity_op("+a1", hatted=hatted)
        op = compose(outer.operator, d21)
        if hatted:
            return ContiguityRelation(shift, True, op, ALPHA1 * (ALPHA1 + ALPHA2 - BETA), -ALPHA1,
                                      (0, 0, 1))
        return ContiguityRelation(shift, False, op, ALPHA1 * ALPHA2 * (ALPHA1 + ALPHA2 - BETA),
                                  zero, (0, 0, 1))
    # +e3
    outer = contiguity_op("+a2", hatted=hatted, as_printed=as_printed)
    op = compose(outer.operator, d11)
    if hatted:
        return ContiguityRelation(shift, True, op, ALPHA1 * BETA, ALPHA1, (0, 0, -1))
    return ContiguityRelation(shift, False, op, sgn * A_SYM * B * ALPHA1 * ALPHA2 * BETA, zero,
                              (0, 0, -1))


def all_relations() -> list[ContiguityRelation]:
    out = [contiguity_op(s) for s in SHIFTS]
    out += [contiguity_op(s, hatted=True) for s in HATTABLE]
    return out


# ------------------------------------------------------------ verification

def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass
class VerificationReport:
    relation: str
    parameters: dict
    point: list
    lhs: complex
    rhs: complex
    residual: float
    method: str
    ok: bool
    notes: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lhs"], d["rhs"] = _c(self.lhs), _c(self.rhs)
        d["point"] = [_c(v) for v in self.point]
        d["parameters"] = {k: (_c(v) if isinstance(v, complex) else v)
                           for k, v in self.parameters.items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _eval_scalar(expr, p: Parameters) -> complex:
    vals = {sp.Symbol(k): v for k, v in p.symbol_values().items()}
    return complex(sp.sympify(expr).subs(vals))


def pick_region(x: EvaluationPoint, p: Parameters) -> RegionTag:
    """Region tag whose series converges fastest at x."""
    best = min(RegionTag, key=lambda r: max(region_ratios(r, x, p.a, p.b)))
    if max(region_ratios(best, x, p.a, p.b)) >= 1:
        raise OutsideConvergenceRegion(f"{x.as_tuple()} lies in no convergence region")
    return best


def relation_label(rel: ContiguityRelation) -> str:
    return ("hat" if rel.hatted else "") + rel.shift


def verify_contiguity(shift: str, p: Parameters, x, method: str = "series", tol: float = 1e-6,
                      hatted: bool = False, region=None, as_printed: bool = False) -> VerificationReport:
    """Evaluate both sides of a relation at named parameters p and report the relative residual."""
    x = EvaluationPoint.of(x)
    rel = contiguity_op(shift, hatted=hatted, as_printed=as_printed)
    src, tgt = rel.source(p), rel.target(p)
    values = p.symbol_values()
    if method == "series":
        tag = RegionTag(region) if region is not None else pick_region(x, p)
        handle: FunctionHandle = SeriesHandle(tag, src)
        target_val = SeriesHandle(tag, tgt).evaluate(x)
        anchor = tag
    elif method == "oracle":
        from .quadrature import DEFAULT_ANCHOR, phi_integral
        anchor = RegionTag(region) if region is not None else DEFAULT_ANCHOR
        handle = PhiHandle(src, anchor)
        target_val = phi_integral(tgt, x, anchor=anchor)
    else:
        raise ValueError(f"unknown method {method!r}")
    lhs, lhs_scale = apply_with_scale(rel.operator, handle, x, values)
    rhs = _eval_scalar(rel.scalar, p) * target_val
    bc = _eval_scalar(rel.boundary_coeff, p)
    if bc != 0:
        from .quadrature import boundary_term
        rhs += bc * boundary_term(tgt, x, anchor)
    scale = max(abs(lhs), abs(rhs), 1e-30)
    residual = abs(lhs - rhs) / scale
    return VerificationReport(relation_label(rel), {k: v for k, v in p.symbol_values().items()},
                              list(x.as_tuple()), lhs, rhs, residual, method, residual <= tol,
                              notes=f"term scale {lhs_scale:.3e}")


def check_g_shift_condition(k: str, p: Parameters, x, tol: float = 1e-7,
                            anchor=None) -> VerificationReport:
    """d_k [g](p) = c * [g](p - a_k) with c = alpha1 for x11, x21 and alpha2 for x12, x22."""
    from .quadrature import DEFAULT_ANCHOR
    from .weyl import apply
    x = EvaluationPoint.of(x)
    anchor = DEFAULT_ANCHOR if anchor is None else anchor
    shifts = {"11": (-1, 0, 0), "21": (-1, 0, -1), "12": (0, -1, 0), "22": (0, -1, -1)}
    if k not in shifts:
        raise ValueError(f"unknown column {k!r}")
    factor = p.alpha1 if k in ("11", "21") else p.alpha2
    lhs = apply(D.d(k), BoundaryHandle(p, anchor), x)
    rhs = factor * BoundaryHandle(p.shifted(*shifts[k]), anchor).evaluate(x)
    scale = max(abs(lhs), abs(rhs), 1e-30)
    residual = abs(lhs - rhs) / scale
    notes = "degenerate: factor is zero" if factor == 0 else ""
    return VerificationReport(f"g-shift d{k}", p.symbol_values(), list(x.as_tuple()), lhs, rhs,
                              residual, "cauchy", residual <= tol or (factor == 0 and abs(lhs) < tol),
                              notes)
