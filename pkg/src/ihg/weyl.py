"""Differential operators in x11, x21, x12, x22 and their application to functions.

Operators are stored normal ordered (coefficients to the left of derivatives)
as a map from a derivative multi-index (n11, n21, n12, n22) to a sympy
coefficient in the coordinates and the parameter symbols.
"""
from __future__ import annotations

import math
from functools import cached_property
from itertools import product
from typing import Callable, Iterable

import numpy as np
import sympy as sp

from .atlas import COORDS, EvaluationPoint, RegionTag
from .errors import DerivativeOrderTooHigh, NumericBreakdown
from .params import Parameters

X11, X21, X12, X22 = XS = sp.symbols("x11 x21 x12 x22")
ALPHA1, ALPHA2, BETA, GAMMA, A, B = PARAMS = sp.symbols("alpha1 alpha2 beta gamma a b")
_ALL = XS + PARAMS
_INDEX = {"11": 0, "21": 1, "12": 2, "22": 3}

MAX_ORDER = 4


def _norm(c) -> sp.Expr:
    c = sp.sympify(c)
    if c.is_polynomial(*XS):
        return sp.expand(c)
    return sp.cancel(c)


class DifferentialOperator:
    """Immutable normal-ordered operator sum(c_m(x, params) * d^m)."""

    __slots__ = ("terms", "__dict__")

    def __init__(self, terms: dict | None = None):
        merged: dict[tuple, sp.Expr] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(v) for v in m)
            merged[m] = merged.get(m, 0) + sp.sympify(c)
        self.terms = {m: c for m, c in ((m, _norm(c)) for m, c in merged.items()) if c != 0}

    # construction
    @classmethod
    def const(cls, c) -> "DifferentialOperator":
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def d(cls, ij: str, n: int = 1) -> "DifferentialOperator":
        m = [0, 0, 0, 0]
        m[_INDEX[ij]] = n
        return cls({tuple(m): 1})

    @classmethod
    def dmulti(cls, multi) -> "DifferentialOperator":
        return cls({tuple(multi): 1})

    # algebra
    def __add__(self, other):
        other = _as_op(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return DifferentialOperator(t)

    __radd__ = __add__

    def __neg__(self):
        return DifferentialOperator({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_op(other))

    def __rsub__(self, other):
        return _as_op(other) - self

    def __mul__(self, other):
        """Composition; scalars and sympy expressions act as multiplication operators."""
        return compose(self, _as_op(other))

    def __rmul__(self, other):
        return compose(_as_op(other), self)

    def __eq__(self, other):
        if not isinstance(other, DifferentialOperator):
            try:
                other = _as_op(other)
            except TypeError:
                return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(sp.cancel(self.terms.get(k, 0) - other.terms.get(k, 0)) == 0 for k in keys)

    def __hash__(self):
        return hash(self.canonical())

    def subs(self, mapping) -> "DifferentialOperator":
        return DifferentialOperator({m: c.subs(mapping) for m, c in self.terms.items()})

    def swap12(self) -> "DifferentialOperator":
        """Exchange alpha1 <-> alpha2, x_i1 <-> x_i2 and d_i1 <-> d_i2."""
        rep = {ALPHA1: ALPHA2, ALPHA2: ALPHA1, X11: X12, X12: X11, X21: X22, X22: X21}
        return DifferentialOperator({(m[2], m[3], m[0], m[1]): c.xreplace(rep)
                                     for m, c in self.terms.items()})

    @property
    def order(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def canonical(self) -> str:
        """Canonical text form: multi-indices sorted descending, coefficients expanded."""
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            dpart = "*".join(f"d{k}" + (f"^{n}" if n > 1 else "")
                             for k, n in zip(("11", "21", "12", "22"), m) if n)
            coeff = sp.sstr(self.terms[m], order="lex")
            parts.append(f"({coeff})" + (f"*{dpart}" if dpart else ""))
        return " + ".join(parts)

    __str__ = canonical

    def __repr__(self):
        return f"DifferentialOperator({self.canonical()})"

    @cached_property
    def _coeff_funcs(self):
        keys = list(self.terms)
        fn = sp.lambdify(_ALL, [self.terms[k] for k in keys], modules="numpy")
        return keys, fn

    def coefficients(self, x: EvaluationPoint, values: dict) -> dict[tuple, complex]:
        keys, fn = self._coeff_funcs
        args = list(x.as_tuple()) + [complex(values.get(str(s), 0)) for s in PARAMS]
        vals = fn(*args)
        return {k: complex(v) for k, v in zip(keys, vals)}


def _as_op(obj) -> DifferentialOperator:
    if isinstance(obj, DifferentialOperator):
        return obj
    if isinstance(obj, (int, float, complex, sp.Basic)):
        return DifferentialOperator.const(obj)
    raise TypeError(f"cannot interpret {obj!r} as an operator")


IDENTITY = DifferentialOperator.const(1)


def _derive(c: sp.Expr, multi) -> sp.Expr:
    for var, n in zip(XS, multi):
        if n:
            c = sp.diff(c, var, n)
    return c


def compose(op1: DifferentialOperator, op2: DifferentialOperator) -> DifferentialOperator:
    """Normal-ordered product op1 o op2 (Leibniz rule)."""
    out: dict[tuple, sp.Expr] = {}
    for ma, ca in op1.terms.items():
        for mb, cb in op2.terms.items():
            for mc in product(*(range(n + 1) for n in ma)):
                w = math.prod(math.comb(n, k) for n, k in zip(ma, mc))
                dc = _derive(cb, mc)
                if dc == 0:
                    continue
                key = tuple(na - k + nb for na, k, nb in zip(ma, mc, mb))
                out[key] = out.get(key, 0) + w * ca * dc
    return DifferentialOperator(out)


def theta(ij: str) -> DifferentialOperator:
    """Euler operator x_ij d_ij."""
    return DifferentialOperator.const(XS[_INDEX[ij]]) * DifferentialOperator.d(ij)


def euler_op(row: int) -> DifferentialOperator:
    """Rows 1..3: theta11+theta21-alpha1, theta12+theta22-alpha2, theta21+theta22+gamma+1."""
    if row == 1:
        return theta("11") + theta("21") - ALPHA1
    if row == 2:
        return theta("12") + theta("22") - ALPHA2
    if row == 3:
        return theta("21") + theta("22") + GAMMA + 1
    raise ValueError("row must be 1, 2 or 3")


# ------------------------------------------------------------------ handles

class FunctionHandle:
    """A holomorphic function of the four coordinates.

    Subclasses provide ``evaluate`` and either exact ``derivative`` (termwise
    mode) or ``batch`` evaluation on many points for Cauchy differentiation.
    """

    mode = "cauchy-numeric"
    params: Parameters | None = None

    def evaluate(self, x: EvaluationPoint) -> complex:
        raise NotImplementedError

    def batch(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(EvaluationPoint(*row)) for row in X])

    def singular_distance(self, x: EvaluationPoint) -> np.ndarray:
        """Per-coordinate distance to the nearest known singularity."""
        return singular_distance(x, self.params)

    def derivative(self, multi, x: EvaluationPoint, radius=None) -> complex:
        multi = _check_multi(multi)
        if not any(multi):
            return self.evaluate(x)
        return cauchy_derivative(self, multi, x, radius)


def _check_multi(multi) -> tuple[int, int, int, int]:
    multi = tuple(int(v) for v in multi)
    if len(multi) != 4 or min(multi) < 0:
        raise ValueError(f"bad multi-index {multi}")
    if sum(multi) > MAX_ORDER:
        raise DerivativeOrderTooHigh(f"order {sum(multi)} > {MAX_ORDER}")
    return multi


class SeriesHandle(FunctionHandle):
    """One of the four series (optionally the (p, q)-weighted variant), differentiated termwise."""

    mode = "termwise-series"

    def __init__(self, region, p: Parameters, pq=(1.0, 1.0)):
        self.region = RegionTag(region)
        self.params = p
        self.pq = pq
        self._cache: dict = {}

    def _ev(self, multi):
        from .series import series_derivative
        if multi not in self._cache:
            self._cache[multi] = series_derivative(self.region, self.params, multi, self.pq)
        return self._cache[multi]

    def evaluate(self, x):
        return self._ev((0, 0, 0, 0))(EvaluationPoint.of(x)).value

    def derivative(self, multi, x, radius=None):
        return self._ev(_check_multi(multi))(EvaluationPoint.of(x)).value


class TildeHandle(FunctionHandle):
    """The homogeneous solution built from a single Gauss function, differentiated termwise."""

    mode = "termwise-series"

    def __init__(self, p: Parameters):
        self.params = p
        self._cache: dict = {}

    def _ev(self, multi):
        from .series import tilde_f_derivative
        if multi not in self._cache:
            self._cache[multi] = tilde_f_derivative(self.params, multi)
        return self._cache[multi]

    def evaluate(self, x):
        return self._ev((0, 0, 0, 0))(EvaluationPoint.of(x)).value

    def derivative(self, multi, x, radius=None):
        return self._ev(_check_multi(multi))(EvaluationPoint.of(x)).value


class PhiHandle(FunctionHandle):
    """The defining integral by quadrature."""

    def __init__(self, p: Parameters, anchor=None):
        from .quadrature import DEFAULT_ANCHOR
        self.params = p
        self.anchor = DEFAULT_ANCHOR if anchor is None else anchor

    def evaluate(self, x):
        from .quadrature import phi_integral
        return phi_integral(self.params, EvaluationPoint.of(x), anchor=self.anchor)

    def batch(self, X):
        from .quadrature import phi_integral_batch
        return phi_integral_batch(self.params, X, anchor=self.anchor)


class BoundaryHandle(FunctionHandle):
    """[g(t, x)] between the endpoints."""

    def __init__(self, p: Parameters, anchor=None):
        from .quadrature import DEFAULT_ANCHOR
        self.params = p
        self.anchor = DEFAULT_ANCHOR if anchor is None else anchor

    def evaluate(self, x):
        from .quadrature import boundary_term
        return boundary_term(self.params, EvaluationPoint.of(x), self.anchor)

    def batch(self, X):
        from .quadrature import _log_factors
        p = self.params
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        gb = np.exp(_log_factors(p, X, self.anchor, np.array([1.0]), np.array([0.0]), 1))[:, 0]
        if p.a == 0:
            return gb
        ga = np.exp(_log_factors(p, X, self.anchor, np.array([0.0]), np.array([1.0]), 1))[:, 0]
        return gb - ga


class CallableHandle(FunctionHandle):
    """Wrap a plain function f(x11, x21, x12, x22)."""

    def __init__(self, f: Callable, vectorized: bool = False, params: Parameters | None = None):
        self.f = f
        self.vectorized = vectorized
        self.params = params

    def evaluate(self, x):
        return complex(self.f(*EvaluationPoint.of(x).as_tuple()))

    def batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        if self.vectorized:
            return np.asarray(self.f(*X.T), dtype=complex)
        return np.array([complex(self.f(*row)) for row in X])


class LinearCombination(FunctionHandle):
    """sum c_k h_k, each summand differentiated in its own mode."""

    def __init__(self, items: Iterable[tuple[complex, FunctionHandle]]):
        self.items = [(complex(c), h) for c, h in items]
        self.params = next((h.params for _, h in self.items if h.params is not None), None)
        self.mode = ("termwise-series" if all(h.mode == "termwise-series" for _, h in self.items)
                     else "mixed")

    def evaluate(self, x):
        return sum(c * h.evaluate(x) for c, h in self.items)

    def derivative(self, multi, x, radius=None):
        return sum(c * h.derivative(multi, x, radius) for c, h in self.items)


class OperatorHandle(FunctionHandle):
    """The function op . f, so operators can be applied in nested fashion."""

    def __init__(self, op: DifferentialOperator, f: FunctionHandle, values: dict | None = None):
        self.op, self.f = op, f
        self.params = f.params
        self.values = values
        self.mode = f.mode

    def evaluate(self, x):
        return apply(self.op, self.f, x, self.values)

    def derivative(self, multi, x, radius=None):
        return apply(compose(DifferentialOperator.dmulti(_check_multi(multi)), self.op),
                     self.f, x, self.values, radius)


# ------------------------------------------------------- Cauchy derivatives

NODES = 64
NODES_BY_DIM = {1: 64, 2: 64, 3: 24, 4: 16}
CHUNK = 8192
CAP = 0.1
DIFF_RTOL = 1e-10
MAX_GRID = 1 << 21


def singular_distance(x: EvaluationPoint, p: Parameters | None) -> np.ndarray:
    """Distance, coordinate by coordinate, to the singular locus.

    Components: x_ij = 0, x11 x22 - x21 x12 = 0 and the loci where a
    t-branch point sits on [a, b].
    """
    v = np.array(x.as_tuple())
    dist = np.abs(v).astype(float)
    det = v[0] * v[3] - v[1] * v[2]
    grads = np.array([v[3], -v[2], -v[1], v[0]])
    with np.errstate(divide="ignore"):
        dist = np.minimum(dist, np.where(grads != 0, abs(det) / np.abs(grads), np.inf))
    if p is not None:
        ts = np.linspace(p.a, p.b, 257)
        for i1, i2 in ((0, 1), (2, 3)):
            # moving x_1i: singular set {-x_2i t}; moving x_2i: {-x_1i / t}
            dist[i1] = min(dist[i1], np.min(np.abs(v[i1] + v[i2] * ts)))
            tpos = ts[ts > 0]
            d2 = np.min(np.abs(v[i2] + v[i1] / tpos)) if tpos.size else np.inf
            if p.a == 0:
                d2 = min(d2, abs(v[i2]))
            dist[i2] = min(dist[i2], d2)
    return dist


def _radii(f: FunctionHandle, x: EvaluationPoint, radius) -> np.ndarray:
    if radius is not None:
        return np.broadcast_to(np.asarray(radius, dtype=float), (4,)).copy()
    d = f.singular_distance(x)
    return np.minimum(0.5 * d, CAP * np.abs(np.array(x.as_tuple())))


def cauchy_derivative(f: FunctionHandle, multi, x: EvaluationPoint, radius=None) -> complex:
    """Mixed partial derivative by the trapezoid rule on a torus of circles.

    The node count per circle starts at 64 (fewer for three or four
    variables) and doubles until two estimates agree.
    """
    x = EvaluationPoint.of(x)
    vars_ = [j for j in range(4) if multi[j]]
    if not vars_:
        return complex(f.evaluate(x))
    r = _radii(f, x, radius)
    if np.any(r[vars_] <= 0):
        raise NumericBreakdown("Cauchy radius collapsed: point is on the singular locus")
    base = np.array(x.as_tuple())
    n = [multi[j] for j in vars_]
    fact = math.prod(math.factorial(k) for k in n) / math.prod(r[j] ** k for j, k in zip(vars_, n))
    M = NODES_BY_DIM[len(vars_)]
    prev = None
    while True:
        if M ** len(vars_) > MAX_GRID:
            raise NumericBreakdown("Cauchy grid exceeded size limit without converging")
        circ = np.exp(2j * math.pi * np.arange(M) / M)
        grids = np.meshgrid(*([circ] * len(vars_)), indexing="ij")
        X = np.tile(base, (M ** len(vars_), 1))
        for j, g in zip(vars_, grids):
            X[:, j] = base[j] + r[j] * g.ravel()
        F = np.concatenate([np.asarray(f.batch(X[i:i + CHUNK]))
                            for i in range(0, len(X), CHUNK)]).reshape((M,) * len(vars_))
        if not np.all(np.isfinite(F)):
            raise NumericBreakdown("function not finite on the Cauchy torus")
        C = np.fft.fftn(F) / F.size
        est = complex(C[tuple(n)]) * fact
        floor = 1e-13 * np.max(np.abs(F)) * fact
        if prev is not None and abs(est - prev) <= max(DIFF_RTOL * abs(est), floor):
            return est
        prev, M = est, 2 * M


# -------------------------------------------------------------- application

def _values(f: FunctionHandle, values: dict | None) -> dict:
    out = {}
    if f.params is not None:
        out.update(f.params.symbol_values())
    if values:
        out.update(values)
    return out


def apply_terms(op: DifferentialOperator, f: FunctionHandle, x, values: dict | None = None,
                radius=None) -> list[complex]:
    """The individual contributions c_m(x) * d^m f(x)."""
    x = EvaluationPoint.of(x)
    for m in op.terms:
        _check_multi(m)
    coeffs = op.coefficients(x, _values(f, values))
    return [c * f.derivative(m, x, radius) for m, c in coeffs.items() if c != 0]


def apply(op: DifferentialOperator, f: FunctionHandle, x, values: dict | None = None,
          radius=None) -> complex:
    """op . f at x; parameter symbols are taken from f's parameters unless overridden."""
    return complex(sum(apply_terms(op, f, x, values, radius), 0j))


def apply_with_scale(op: DifferentialOperator, f: FunctionHandle, x, values: dict | None = None,
                     radius=None) -> tuple[complex, float]:
    """(op . f, sum of term magnitudes) - the latter is the natural residual scale."""
    parts = apply_terms(op, f, x, values, radius)
    return complex(sum(parts, 0j)), float(sum(abs(t) for t in parts))
