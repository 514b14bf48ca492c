"""Series solutions around the four convergence regions, plus 2F1 and Appell F1.

Every evaluator returns a :class:`SeriesResult` whose ``tail_bound`` is a
majorant bound on the discarded part of the (rectangularly truncated) sum.
Termwise derivatives of the series are available through
:func:`series_derivative`; each term is a monomial in the four coordinates,
so a partial derivative only multiplies it by falling factorials.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .atlas import EvaluationPoint, RegionTag, region_ratios
from .errors import (NonGenericParameters, NotConverged, OutsideConvergenceRegion,
                     PoleError)
from .kernel import EPS_INT, branched_pow, near_nonpositive_integer
from .params import Parameters

MARGIN = 0.995
DEFAULT_MAX_TERMS = 1024
START_TERMS = 16
RTOL = 1e-15
MAX_DERIV_ORDER = 4


def max_terms() -> int:
    env = os.environ.get("IHG_MAX_TERMS")
    return int(env) if env else DEFAULT_MAX_TERMS


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    tail_bound: float
    terms_used: tuple[int, int]

    def __post_init__(self):
        if not self.tail_bound >= 0:
            raise ValueError("tail bound must be nonnegative")


# ---------------------------------------------------------------- helpers

def _terminates_at(alpha: complex) -> float:
    """Last index with (-alpha)_k != 0, or inf when the sequence never stops."""
    alpha = complex(alpha)
    if alpha.imag == 0 and alpha.real >= 0 and alpha.real == round(alpha.real):
        return int(round(alpha.real))
    return math.inf


def _binomial_coeffs(alpha: complex, n: int) -> np.ndarray:
    """c_k = (-alpha)_k / k! for k = 0..n, by cumulative products (exact zeros kept)."""
    k = np.arange(n, dtype=float)
    ratios = (k - alpha) / (k + 1)
    return np.concatenate(([1 + 0j], np.cumprod(ratios)))


def _falling(e: np.ndarray, n: int) -> np.ndarray:
    out = np.ones_like(e, dtype=complex)
    for j in range(n):
        out = out * (e - j)
    return out


def _ratio_bound(N: int, num: Sequence[complex], den: Sequence[complex]) -> float:
    """Upper bound, valid for every n >= N, of prod|n+num_i| / prod|n+den_i|."""
    out = 1.0
    for p, q in zip(num, den):
        p_up = abs(p)
        q = complex(q)
        q_lo = q.real if (q.imag == 0 and q.real >= 0) else -abs(q)
        if N + q_lo <= 0:
            return math.inf
        out *= max(1.0, (N + p_up) / (N + q_lo))
    return out


def _geometric_tail(last: float, N: int, rho: float, num, den, deg: int = 0,
                    shift: float = 0.0) -> float:
    """Bound on sum_{n>N} M_n given M_N = last and the Pochhammer ratio structure.

    M_{n+1}/M_n <= rho * prod(n+|num|)/prod(n+den) * ((n+1+shift)/(n+shift))**deg.
    """
    if last == 0:
        return 0.0
    q = rho * _ratio_bound(N, num, den)
    if deg:
        q *= ((N + 1 + shift) / (N + shift)) ** deg
    if q >= 1:
        return math.inf
    return last * q / (1 - q)


def _min_abs_affine(E0: complex, s: int, jlo: float, jhi: float) -> float:
    """min |E0 + s j| over integers j in [jlo, jhi] (bounds may be infinite)."""
    centre = -s * E0.real
    cands = {math.floor(centre), math.ceil(centre)}
    if math.isfinite(jlo):
        cands.add(int(jlo))
    if math.isfinite(jhi):
        cands.add(int(jhi))
    vals = [abs(E0 + s * j) for j in cands if jlo <= j <= jhi]
    return min(vals) if vals else math.inf


def _check_multi(multi) -> tuple[int, int, int, int]:
    multi = tuple(int(v) for v in (multi or (0, 0, 0, 0)))
    if len(multi) != 4 or any(v < 0 for v in multi):
        raise ValueError(f"bad derivative multi-index {multi}")
    if sum(multi) > MAX_DERIV_ORDER:
        from .errors import DerivativeOrderTooHigh
        raise DerivativeOrderTooHigh(f"order {sum(multi)} > {MAX_DERIV_ORDER}")
    return multi


# ------------------------------------------------------- the four series

@dataclass(frozen=True)
class _Layout:
    """Geometry of one region's series at one point."""

    region: RegionTag
    E0: complex
    s1: int
    s2: int
    r1: complex
    r2: complex
    prefactor: complex


def _layout(region: RegionTag, p: Parameters, x: EvaluationPoint) -> _Layout:
    flip1, flip2 = region.flips
    x11, x21, x12, x22 = x.as_tuple()
    E0 = p.gamma + 1 + (p.alpha1 if flip1 else 0) + (p.alpha2 if flip2 else 0)
    r1 = x11 / x21 if flip1 else x21 / x11
    r2 = x12 / x22 if flip2 else x22 / x12
    pref = branched_pow(x21 if flip1 else x11, p.alpha1) * \
        branched_pow(x22 if flip2 else x12, p.alpha2)
    return _Layout(region, E0, -1 if flip1 else 1, -1 if flip2 else 1, r1, r2, pref)


def _pair_exponents(flip: bool, alpha: complex, k: np.ndarray):
    """Exponents of (x1i, x2i) in term k of the factor for one alpha."""
    if flip:
        return k.astype(complex), alpha - k
    return alpha - k, k.astype(complex)


class _FSeries:
    """Double series for one region, with optional termwise derivative."""

    def __init__(self, region: RegionTag, p: Parameters, multi=None, pq=(1.0, 1.0)):
        self.region = RegionTag(region)
        self.p = p
        self.multi = _check_multi(multi)
        self.pq = (complex(pq[0]), complex(pq[1]))
        self._K1 = _terminates_at(p.alpha1)
        self._K2 = _terminates_at(p.alpha2)

    # -- validity -----------------------------------------------------
    def _endpoints(self, lay: _Layout):
        p = self.p
        pcoef, qcoef = self.pq
        ends = [(p.b, qcoef)]
        if p.a > 0:
            ends.append((p.a, -pcoef))
        else:
            # a = 0: the a-terms vanish only if every surviving exponent has Re > 0
            re_min = lay.E0.real
            for s, K in ((lay.s1, self._K1), (lay.s2, self._K2)):
                if s < 0:
                    re_min -= K
            if not re_min > 0:
                raise OutsideConvergenceRegion(
                    f"a = 0 needs Re of every exponent > 0 in region {self.region.value}")
        return ends

    def _inv_bound(self, lay: _Layout) -> float:
        K1, K2 = self._K1, self._K2
        if lay.s1 == lay.s2:
            m = _min_abs_affine(lay.E0, lay.s1, 0, K1 + K2)
        else:
            m = _min_abs_affine(lay.E0, lay.s1, -K2, K1)
        if m < EPS_INT:
            raise NonGenericParameters(
                f"denominator of region {self.region.value} vanishes (min |E| = {m:.3g})")
        return 1.0 / m

    def _check_region(self, x: EvaluationPoint):
        p = self.p
        ratios = region_ratios(self.region, x, p.a, p.b)
        # a-ratios are irrelevant if a == 0 and factor is not flipped (they are 0)
        if max(ratios) > MARGIN:
            raise OutsideConvergenceRegion(
                f"{x.as_tuple()} outside {self.region.value} (max ratio {max(ratios):.4f})")

    # -- evaluation ---------------------------------------------------
    def _pieces(self, lay: _Layout, x: EvaluationPoint, N: int, t: float):
        """Vectors U_k, V_m (coefficients times geometric and derivative factors)."""
        p = self.p
        flip1, flip2 = self.region.flips
        n11, n21, n12, n22 = self.multi
        x11, x21, x12, x22 = x.as_tuple()
        k = np.arange(N + 1, dtype=float)
        c1 = _binomial_coeffs(p.alpha1, N)
        c2 = _binomial_coeffs(p.alpha2, N)
        g1 = -lay.r1 * t ** lay.s1
        g2 = -lay.r2 * t ** lay.s2
        U = c1 * np.power(g1, k)
        V = c2 * np.power(g2, k)
        if n11 or n21:
            e_a, e_b = _pair_exponents(flip1, p.alpha1, k)
            U = U * _falling(e_a, n11) / x11 ** n11 * _falling(e_b, n21) / x21 ** n21
        if n12 or n22:
            e_a, e_b = _pair_exponents(flip2, p.alpha2, k)
            V = V * _falling(e_a, n12) / x12 ** n12 * _falling(e_b, n22) / x22 ** n22
        return c1, c2, U, V

    def _pair_tail(self, U, N, rho, alpha, deg, coord_scale):
        """(head sum, tail bound) for one factor's majorant sequence."""
        head = float(np.sum(np.abs(U)))
        shift = abs(alpha) + deg + 1
        k = N
        # majorant of the last term, including the derivative polynomial bound
        ck = abs(_binomial_coeffs(alpha, N)[-1])
        last = ck * rho ** k * (k + shift) ** deg * coord_scale
        tail = _geometric_tail(last, N, rho, [-alpha], [1], deg, shift)
        return head, tail

    def _evaluate(self, x: EvaluationPoint, N: int, lay: _Layout, ends, L: float):
        p = self.p
        n11, n21, n12, n22 = self.multi
        x11, x21, x12, x22 = x.as_tuple()
        deg1, deg2 = n11 + n21, n12 + n22
        sc1 = 1.0 / (abs(x11) ** n11 * abs(x21) ** n21)
        sc2 = 1.0 / (abs(x12) ** n12 * abs(x22) ** n22)
        k = np.arange(N + 1, dtype=float)
        E = lay.E0 + lay.s1 * k[:, None] + lay.s2 * k[None, :]
        small = np.abs(E) < EPS_INT
        invE = np.where(small, 0, 1 / np.where(small, 1, E))
        total = 0j
        bound = 0.0
        for t, w in ends:
            c1, c2, U, V = self._pieces(lay, x, N, t)
            if small.any():
                nz = (c1[:, None] != 0) & (c2[None, :] != 0) & small
                if nz.any():
                    raise NonGenericParameters("zero denominator with nonzero coefficient")
            tE = np.exp(lay.E0 * math.log(t))
            total += w * tE * (U @ invE @ V)
            rho1 = abs(lay.r1) * t ** lay.s1
            rho2 = abs(lay.r2) * t ** lay.s2
            S1, T1 = self._pair_tail(U, N, rho1, p.alpha1, deg1, sc1)
            S2, T2 = self._pair_tail(V, N, rho2, p.alpha2, deg2, sc2)
            bound += abs(w) * abs(tE) * L * (T1 * (S2 + T2) + S1 * T2)
        return total * lay.prefactor, bound * abs(lay.prefactor)

    def __call__(self, x, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
        x = EvaluationPoint.of(x)
        self._check_region(x)
        lay = _layout(self.region, self.p, x)
        ends = self._endpoints(lay)
        L = self._inv_bound(lay)
        cap = max_terms()
        N = min(START_TERMS, cap)
        while True:
            value, bound = self._evaluate(x, N, lay, ends, L)
            if bound <= max(tol, rtol * abs(value)):
                return SeriesResult(complex(value), float(bound), (N, N))
            if N >= cap:
                raise NotConverged(
                    f"{self.region.value}: tail bound {bound:.3g} > tol after {N} terms")
            N = min(2 * N, cap)


def f_series(region, p: Parameters, x, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
    """Sum of the series solution attached to ``region`` at ``x``."""
    return _FSeries(region, p)(x, tol, rtol)


def f12_11_pq(pcoef, qcoef, p: Parameters, x, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
    """D12_11 series with the b-endpoint weighted by ``qcoef`` and the a-endpoint by ``pcoef``."""
    return _FSeries(RegionTag.D12_11, p, pq=(pcoef, qcoef))(x, tol, rtol)


def series_derivative(region, p: Parameters, multi, pq=(1.0, 1.0)) -> _FSeries:
    """Evaluator of the termwise partial derivative ``multi`` (orders of d11, d21, d12, d22)."""
    return _FSeries(region, p, multi, pq)


# ---------------------------------------------------------- Gauss 2F1

def _check_unit(z: complex, name: str = "z"):
    if not abs(z) <= MARGIN:
        raise OutsideConvergenceRegion(f"|{name}| = {abs(z):.4f} exceeds {MARGIN}")


def gauss_2f1(aa, bb, cc, z, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
    aa, bb, cc, z = complex(aa), complex(bb), complex(cc), complex(z)
    if near_nonpositive_integer(cc):
        raise PoleError(f"2F1 lower parameter {cc} is a nonpositive integer")
    _check_unit(z)
    cap = max_terms()
    N = min(START_TERMS, cap)
    while True:
        n = np.arange(N, dtype=float)
        terms = np.concatenate(([1 + 0j], np.cumprod((aa + n) * (bb + n) / ((cc + n) * (n + 1)) * z)))
        value = complex(terms.sum())
        tail = _geometric_tail(abs(terms[-1]), N, abs(z), [aa, bb], [cc, 1])
        if tail <= max(tol, rtol * abs(value)):
            return SeriesResult(value, float(tail), (N, 0))
        if N >= cap:
            raise NotConverged(f"2F1 tail bound {tail:.3g} after {N} terms")
        N = min(2 * N, cap)


# ---------------------------------------------------------- Appell F1

def appell_f1(aa, b1, b2, cc, u, v, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
    """F1(aa; b1, b2; cc; u, v) by rectangular truncation of the double series."""
    aa, b1, b2, cc, u, v = map(complex, (aa, b1, b2, cc, u, v))
    if near_nonpositive_integer(cc):
        raise PoleError(f"F1 lower parameter {cc} is a nonpositive integer")
    _check_unit(u, "u")
    _check_unit(v, "v")
    cap = max_terms()
    N = min(START_TERMS, cap)
    while True:
        n = np.arange(2 * N, dtype=float)
        R = np.concatenate(([1 + 0j], np.cumprod((aa + n) / (cc + n))))
        k = np.arange(N + 1, dtype=float)
        c1 = _binomial_coeffs(-b1, N)   # (b1)_k / k!
        c2 = _binomial_coeffs(-b2, N)
        U = c1 * np.power(u, k)
        V = c2 * np.power(v, k)
        H = R[(k[:, None] + k[None, :]).astype(int)]
        value = complex(U @ H @ V)
        # G(n) = |(aa)_n/(cc)_n| grows at most by w per step beyond N
        w = _ratio_bound(N, [aa], [cc])
        GN = abs(R[N])
        bound = math.inf
        if math.isfinite(w):
            S1 = float(np.sum(np.abs(c1) * (abs(u) * w) ** k))
            S2 = float(np.sum(np.abs(c2) * (abs(v) * w) ** k))
            T1 = _geometric_tail(abs(c1[-1]) * (abs(u) * w) ** N, N, abs(u) * w, [b1], [1])
            T2 = _geometric_tail(abs(c2[-1]) * (abs(v) * w) ** N, N, abs(v) * w, [b2], [1])
            bound = GN * w ** (-N) * (T1 * (S2 + T2) + S1 * T2)
        if bound <= max(tol, rtol * abs(value)):
            return SeriesResult(value, float(bound), (N, N))
        if N >= cap:
            raise NotConverged(f"F1 tail bound {bound:.3g} after {N} terms")
        N = min(2 * N, cap)


# ------------------------------------------- alternative representations

def f12_11_via_f1(p: Parameters, x, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
    x = EvaluationPoint.of(x)
    x11, x21, x12, x22 = x.as_tuple()
    g1 = p.gamma + 1
    if abs(g1) < EPS_INT:
        raise NonGenericParameters("gamma + 1 = 0")
    pref = branched_pow(x11, p.alpha1) * branched_pow(x12, p.alpha2)
    total, bound, used = 0j, 0.0, (0, 0)
    for t, sign in ((p.b, 1), (p.a, -1)):
        if t == 0:
            if not g1.real > 0:
                raise OutsideConvergenceRegion("a = 0 needs Re(gamma) > -1")
            continue
        r = appell_f1(g1, -p.alpha1, -p.alpha2, g1 + 1, -x21 * t / x11, -x22 * t / x12,
                      tol / 2, rtol)
        w = sign * np.exp(g1 * math.log(t)) / g1
        total += w * r.value
        bound += abs(w) * r.tail_bound
        used = max(used, r.terms_used)
    return SeriesResult(complex(total * pref), float(bound * abs(pref)), used)


def f12_11_via_superposition(p: Parameters, x, tol: float = 0.0,
                             rtol: float = RTOL) -> SeriesResult:
    """Sum over m of contiguous 2F1(-alpha1, gamma+m+1; gamma+m+2; .) values."""
    x = EvaluationPoint.of(x)
    x11, x21, x12, x22 = x.as_tuple()
    series = _FSeries(RegionTag.D12_11, p)
    series._check_region(x)
    lay = _layout(RegionTag.D12_11, p, x)
    ends = series._endpoints(lay)
    L = series._inv_bound(lay)
    K2 = _terminates_at(p.alpha2)
    cap = max_terms()
    M = min(START_TERMS, cap)
    cache: dict[tuple[float, int], complex] = {}
    while True:
        total, bound = 0j, 0.0
        c2 = _binomial_coeffs(p.alpha2, M)
        for t, w in ends:
            z = -x21 * t / x11
            acc = 0j
            for m in range(M + 1):
                if c2[m] == 0 or m > K2:
                    continue
                key = (t, m)
                if key not in cache:
                    gm = p.gamma + m + 1
                    cache[key] = gauss_2f1(-p.alpha1, gm, gm + 1, z, 0.0, rtol / 10).value
                gm = p.gamma + m + 1
                acc += (-x22 / x12) ** m * np.exp(gm * math.log(t)) * c2[m] / gm * cache[key]
            total += w * acc
            rho1, rho2 = abs(z), abs(x22 / x12) * t
            k = np.arange(M + 1, dtype=float)
            c1 = _binomial_coeffs(p.alpha1, M)
            S1 = float(np.sum(np.abs(c1) * rho1 ** k))
            T1 = _geometric_tail(abs(c1[-1]) * rho1 ** M, M, rho1, [-p.alpha1], [1])
            T2 = _geometric_tail(abs(c2[-1]) * rho2 ** M, M, rho2, [-p.alpha2], [1])
            bound += abs(w) * t ** lay.E0.real * L * (S1 + T1) * T2
        total *= lay.prefactor
        bound *= abs(lay.prefactor)
        if bound <= max(tol, rtol * abs(total)):
            return SeriesResult(complex(total), float(bound), (0, M))
        if M >= cap:
            raise NotConverged(f"superposition tail bound {bound:.3g} after {M} terms")
        M = min(2 * M, cap)


# ------------------------------------------------------------ tilde f

class _TildeF:
    """x11^a1 x12^a2 (-x11/x21)^(gamma+1) 2F1(-a2, gamma+1; gamma+a1+2; x11 x22/(x12 x21))."""

    def __init__(self, p: Parameters, multi=None):
        self.p = p
        self.multi = _check_multi(multi)
        self.cc = p.gamma + p.alpha1 + 2
        if near_nonpositive_integer(self.cc):
            raise PoleError(f"gamma+alpha1+2 = {self.cc} is a nonpositive integer")

    def __call__(self, x, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
        x = EvaluationPoint.of(x)
        p = self.p
        x11, x21, x12, x22 = x.as_tuple()
        z = x11 * x22 / (x12 * x21)
        _check_unit(z, "x11 x22/(x12 x21)")
        g1 = p.gamma + 1
        pref = branched_pow(x11, p.alpha1) * branched_pow(x12, p.alpha2) * \
            branched_pow(-x11 / x21, g1)
        n11, n21, n12, n22 = self.multi
        deg = sum(self.multi)
        coord = 1.0 / (abs(x11) ** n11 * abs(x21) ** n21 * abs(x12) ** n12 * abs(x22) ** n22)
        shift = abs(p.alpha1) + abs(p.alpha2) + 2 * abs(g1) + deg + 1
        aa, bb, cc = -p.alpha2, g1, self.cc
        cap = max_terms()
        N = min(START_TERMS, cap)
        while True:
            n = np.arange(N, dtype=float)
            coef = np.concatenate(([1 + 0j], np.cumprod((aa + n) * (bb + n) / ((cc + n) * (n + 1)))))
            k = np.arange(N + 1, dtype=float)
            terms = coef * np.power(z, k)
            if deg:
                e11, e21, e12, e22 = p.alpha1 + g1 + k, -g1 - k, p.alpha2 - k, k + 0j
                terms = terms * (_falling(e11, n11) / x11 ** n11 * _falling(e21, n21) / x21 ** n21
                                 * _falling(e12, n12) / x12 ** n12 * _falling(e22, n22) / x22 ** n22)
            value = complex(terms.sum() * pref)
            last = abs(coef[-1]) * abs(z) ** N * (N + shift) ** deg * coord
            tail = _geometric_tail(last, N, abs(z), [aa, bb], [cc, 1], deg, shift) * abs(pref)
            if tail <= max(tol, rtol * abs(value)):
                return SeriesResult(value, float(tail), (N, 0))
            if N >= cap:
                raise NotConverged(f"tilde_f tail bound {tail:.3g} after {N} terms")
            N = min(2 * N, cap)


def tilde_f(p: Parameters, x, tol: float = 0.0, rtol: float = RTOL) -> SeriesResult:
    return _TildeF(p)(x, tol, rtol)


def tilde_f_derivative(p: Parameters, multi) -> _TildeF:
    return _TildeF(p, multi)
