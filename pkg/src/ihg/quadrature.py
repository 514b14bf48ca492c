"""Ground-truth quadrature of the defining integral and its analytic continuation.

The integrand is t^gamma (x11 + x21 t)^alpha1 (x12 + x22 t)^alpha2 on [a, b].
For complex points the branch of each factor follows an *anchor*: the
factorisation whose series converges in the given region (``x1i^alpha
(1 + x2i t/x1i)^alpha`` for an unflipped factor, ``(x2i t)^alpha
(1 + x1i/(x2i t))^alpha`` for a flipped one).  ``anchor=None`` takes the
principal power of each linear factor directly.

Continuation along a path in x-space keeps a polyline t-contour from a to b
that is pushed ahead of any moving branch point; every logarithm is unwound
continuously along the path and along the contour.
"""
from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .atlas import EvaluationPoint, RegionTag
from .errors import (BranchPointOnContour, ContourCollision, EndpointError,
                     QuadratureNotConverged)
from .params import Parameters

DEFAULT_ANCHOR = RegionTag.D22_21

# Gauss-Kronrod 15 / Gauss 7 on [-1, 1]
_XGK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                 0.207784955007898467600689403773245, 0.0])
_WGK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_GK_X = np.concatenate((-_XGK[:-1], _XGK[::-1]))
_GK_W = np.concatenate((_WGK[:-1], _WGK[::-1]))
_G_W = np.zeros(15)
_G_W[[1, 3, 5, 9, 11, 13]] = np.concatenate((_WG[:-1], _WG[:-1][::-1]))
_G_W[7] = _WG[-1]

MAX_INTERVALS = 2000


def _gk_nodes(lo: float, hi: float):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    u = mid + half * _GK_X
    return u, half


def adaptive_gk15(h, tol: float = 1e-13, rtol: float = 1e-14, lo: float = 0.0, hi: float = 1.0):
    """Adaptive GK15 of a vectorised complex function of u on [lo, hi].

    ``h(u, u_lo, u_hi)`` receives the node and its distances to 0 and 1.
    Returns (value, error estimate).
    """
    def piece(l, r):
        u, half = _gk_nodes(l, r)
        f = h(u, u, 1.0 - u)
        k = half * np.dot(_GK_W, f)
        g = half * np.dot(_G_W, f)
        return complex(k), abs(k - g)

    k, e = piece(lo, hi)
    heap = [(-e, lo, hi, k)]
    total, err = k, e
    n = 1
    while err > max(tol, rtol * abs(total)):
        if n >= MAX_INTERVALS:
            raise QuadratureNotConverged(f"GK15: error {err:.3g} after {n} intervals")
        neg_e, l, r, kv = heapq.heappop(heap)
        m = 0.5 * (l + r)
        k1, e1 = piece(l, m)
        k2, e2 = piece(m, r)
        total += k1 + k2 - kv
        err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, l, m, k1))
        heapq.heappush(heap, (-e2, m, r, k2))
        n += 1
    # recompute from the leaves to limit accumulated rounding
    total = sum(item[3] for item in heap)
    err = sum(-item[0] for item in heap)
    return complex(total), float(err)


def _tanh_sinh_nodes(h: float, tmax: float = 6.5):
    j = np.arange(-math.ceil(tmax / h), math.ceil(tmax / h) + 1)
    tau = j * h
    s = np.clip(0.5 * math.pi * np.sinh(tau), -350.0, 350.0)
    u_lo = 1.0 / (1.0 + np.exp(-2 * s))
    u_hi = 1.0 / (1.0 + np.exp(2 * s))
    w = h * 0.5 * math.pi * np.cosh(tau) * 2.0 / (np.exp(s) + np.exp(-s)) ** 2
    keep = (np.minimum(u_lo, u_hi) > 1e-300) & (w > 0)
    return u_lo[keep], u_hi[keep], w[keep]


def tanh_sinh(h, tol: float = 1e-13, rtol: float = 1e-14, max_level: int = 7):
    """Double-exponential quadrature on [0, 1]; tolerates algebraic endpoint singularities."""
    prev = None
    step = 0.5
    for _ in range(max_level):
        u_lo, u_hi, w = _tanh_sinh_nodes(step)
        val = complex(np.dot(w, h(u_lo, u_lo, u_hi)))
        if prev is not None:
            err = abs(val - prev)
            if err <= max(tol, rtol * abs(val)):
                return val, err
        prev = val
        step /= 2
    raise QuadratureNotConverged(f"tanh-sinh: change {abs(val - prev):.3g} at finest level")


# ------------------------------------------------------------- integrand

def _flip_pattern(anchor) -> tuple[bool, bool] | None:
    if anchor is None:
        return None
    return RegionTag(anchor).flips


def _is_nonneg_int(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0 and z.real >= 0 and z.real == round(z.real)


def _log_factors(p: Parameters, X: np.ndarray, anchor, u_lo, u_hi, with_dt_power: int = 0):
    """log of t^(gamma+with_dt_power) * prod factor_i on [a, b] at nodes u (shape (n, m)).

    X has shape (n, 4).  Linear factors are evaluated from the nearer endpoint
    so that zeros at an endpoint are resolved to full relative precision.
    """
    a, b = p.a, p.b
    L = b - a
    ulo = np.asarray(u_lo)[None, :]
    uhi = np.asarray(u_hi)[None, :]
    near_a = ulo <= 0.5
    t = np.where(near_a, a + L * ulo, b - L * uhi)
    if a == 0:
        log_t = np.where(near_a, math.log(b) + np.log(ulo), np.log(t))
    else:
        log_t = np.log(t)
    out = (p.gamma + with_dt_power) * log_t + np.zeros((X.shape[0], 1))
    flips = _flip_pattern(anchor)
    for i, alpha in enumerate((p.alpha1, p.alpha2)):
        if alpha == 0:
            continue
        x1 = X[:, (0, 2)[i]][:, None]
        x2 = X[:, (1, 3)[i]][:, None]
        P = np.where(near_a, (x1 + x2 * a) + x2 * L * ulo, (x1 + x2 * b) - x2 * L * uhi)
        if flips is None:
            lg = np.log(P.astype(complex))
        elif not flips[i]:
            lg = np.log(x1.astype(complex)) + np.log(P / x1)
        else:
            lg = np.log(x2.astype(complex)) + log_t + np.log(P / (x2 * t))
        out = out + alpha * lg
    return out


def _check_contour(p: Parameters, x: EvaluationPoint):
    for i, alpha in enumerate((p.alpha1, p.alpha2)):
        if _is_nonneg_int(alpha):
            continue
        x1, x2 = (x.x11, x.x21) if i == 0 else (x.x12, x.x22)
        ts = -x1 / x2
        if abs(ts.imag) <= 1e-14 * abs(ts) and p.a < ts.real < p.b:
            raise BranchPointOnContour(f"branch point t = {ts.real} lies inside [a, b]")


def _endpoint_singular(p: Parameters, x: EvaluationPoint) -> bool:
    if p.a == 0 and not _is_nonneg_int(p.gamma):
        return True
    for i, alpha in enumerate((p.alpha1, p.alpha2)):
        if _is_nonneg_int(alpha):
            continue
        x1, x2 = (x.x11, x.x21) if i == 0 else (x.x12, x.x22)
        for t in (p.a, p.b):
            if abs(x1 + x2 * t) <= 1e-12 * (abs(x1) + abs(x2 * t)):
                return True
    return False


def phi_integral(p: Parameters, x, tol: float = 1e-13, anchor=DEFAULT_ANCHOR,
                 rtol: float = 1e-14) -> complex:
    """Integral over [a, b] with the anchored branch of each factor."""
    x = EvaluationPoint.of(x)
    _check_contour(p, x)
    if p.a == 0 and not p.gamma.real > -1:
        raise EndpointError("a = 0 needs Re(gamma) > -1")
    X = np.array([x.as_tuple()], dtype=complex)
    L = p.b - p.a

    def h(u, u_lo, u_hi):
        return L * np.exp(_log_factors(p, X, anchor, u_lo, u_hi))[0]

    if _endpoint_singular(p, x):
        value, _ = tanh_sinh(h, tol, rtol)
    else:
        value, _ = adaptive_gk15(h, tol, rtol)
    return value


def phi_integral_batch(p: Parameters, X, anchor=DEFAULT_ANCHOR, rtol: float = 1e-14) -> np.ndarray:
    """Integral at many points with one shared fixed rule (for Cauchy differentiation).

    The rule is refined until the centre point agrees between two levels.
    """
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    L = p.b - p.a
    x0 = EvaluationPoint(*X[0])
    _check_contour(p, x0)
    if _endpoint_singular(p, x0):
        step = 0.25
        prev = None
        for _ in range(7):
            u_lo, u_hi, w = _tanh_sinh_nodes(step)
            vals = L * np.exp(_log_factors(p, X, anchor, u_lo, u_hi)) @ w
            if prev is not None and np.max(np.abs(vals - prev)) <= rtol * np.max(np.abs(vals)):
                return vals
            prev, step = vals, step / 2
        return vals
    prev = None
    panels = 4
    for _ in range(8):
        edges = np.linspace(0.0, 1.0, panels + 1)
        half = 0.5 * np.diff(edges)
        u = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * _GK_X[None, :]).ravel()
        w = (half[:, None] * _GK_W[None, :]).ravel()
        vals = L * np.exp(_log_factors(p, X, anchor, u, 1.0 - u)) @ w
        if prev is not None and np.max(np.abs(vals - prev)) <= rtol * np.max(np.abs(vals)):
            return vals
        prev, panels = vals, panels * 2
    return vals


def g_value(p: Parameters, x, t: float, anchor=DEFAULT_ANCHOR) -> complex:
    """g(t, x) = t^(gamma+1) (x11+x21 t)^alpha1 (x12+x22 t)^alpha2 on the anchored branch."""
    x = EvaluationPoint.of(x)
    if t == 0:
        if p.gamma.real > -1:
            return 0j
        raise EndpointError("g(0, x) diverges for Re(gamma) <= -1")
    X = np.array([x.as_tuple()], dtype=complex)
    a, b = p.a, p.b
    if t == b:
        ulo, uhi = np.array([1.0]), np.array([0.0])
    elif t == a:
        ulo, uhi = np.array([0.0]), np.array([1.0])
    else:
        raise EndpointError("g is only evaluated at the endpoints")
    return complex(np.exp(_log_factors(p, X, anchor, ulo, uhi, with_dt_power=1))[0, 0])


def boundary_term(p: Parameters, x, anchor=DEFAULT_ANCHOR) -> complex:
    """[g(t, x)] from t=a to t=b."""
    return g_value(p, x, p.b, anchor) - g_value(p, x, p.a, anchor)


# ------------------------------------------------------- path continuation

@dataclass
class PathSpec:
    vertices: list
    closed: bool = False

    def __post_init__(self):
        self.vertices = [EvaluationPoint.of(v) for v in self.vertices]
        if not self.vertices:
            raise ValueError("empty path")

    def points(self) -> list[EvaluationPoint]:
        pts = list(self.vertices)
        if self.closed and pts[-1] != pts[0]:
            pts.append(pts[0])
        return pts

    def __add__(self, other: "PathSpec") -> "PathSpec":
        return PathSpec(self.points() + other.points()[1:])


def circle_path(x: EvaluationPoint, centre: complex, n: int = 256, coord: str = "x11",
                turns: int = 1) -> PathSpec:
    """Closed loop of ``coord`` around ``centre``, starting and ending at x, counterclockwise."""
    z0 = getattr(x, coord)
    r = z0 - centre
    verts = [x.replace(**{coord: centre + r * cmath.exp(2j * math.pi * turns * k / n)})
             for k in range(n + 1)]
    verts[-1] = x
    return PathSpec(verts)


def _branch_points(x: EvaluationPoint) -> tuple[complex, complex]:
    return -x.x11 / x.x21, -x.x12 / x.x22


def _seg_dist(p: complex, q: complex, z: complex) -> float:
    d = q - p
    if d == 0:
        return abs(z - p)
    s = ((z - p) * d.conjugate()).real / abs(d) ** 2
    s = min(1.0, max(0.0, s))
    return abs(p + s * d - z)


def _seg_seg_dist(p1, q1, p2, q2) -> float:
    # straight segments in the plane; intersection gives 0
    def cross(u, v):
        return (u.conjugate() * v).imag
    d1, d2 = q1 - p1, q2 - p2
    den = cross(d1, d2)
    if den != 0:
        s = cross(p2 - p1, d2) / den
        r = cross(p2 - p1, d1) / den
        if 0 <= s <= 1 and 0 <= r <= 1:
            return 0.0
    return min(_seg_dist(p2, q2, p1), _seg_dist(p2, q2, q1),
               _seg_dist(p1, q1, p2), _seg_dist(p1, q1, q2))


def _contour_dist(contour: list[complex], p: complex, q: complex) -> float:
    return min(_seg_seg_dist(contour[j], contour[j + 1], p, q) for j in range(len(contour) - 1))


def _winding(poly: list[complex], z: complex) -> float:
    tot = 0.0
    for j in range(len(poly)):
        u = poly[j] - z
        v = poly[(j + 1) % len(poly)] - z
        tot += cmath.phase(v / u)
    return tot / (2 * math.pi)


def _circle_hits(p: complex, q: complex, c: complex, r: float) -> list[float]:
    d = q - p
    f = p - c
    A = abs(d) ** 2
    if A == 0:
        return []
    B = 2 * (f * d.conjugate()).real
    C = abs(f) ** 2 - r * r
    disc = B * B - 4 * A * C
    if disc <= 0:
        return []
    sq = math.sqrt(disc)
    return sorted(s for s in ((-B - sq) / (2 * A), (-B + sq) / (2 * A)) if 0 < s < 1)


def _arc(c: complex, r: float, z_from: complex, z_to: complex, ccw: bool) -> list[complex]:
    th0 = cmath.phase(z_from - c)
    th1 = cmath.phase(z_to - c)
    dth = (th1 - th0) % (2 * math.pi)
    if not ccw:
        dth -= 2 * math.pi
    n = max(2, int(math.ceil(abs(dth) / (math.pi / 16))))
    return [c + r * cmath.exp(1j * (th0 + dth * k / n)) for k in range(1, n)]


def _push(contour: list[complex], Q: complex, R: complex, delta: float,
          forbidden: list[complex]) -> list[complex]:
    """Deform the contour so a branch point moving from Q to R never touches it."""
    if _contour_dist(contour, Q, R) > delta:
        return contour
    c, r = R, abs(R - Q) + 2 * delta
    if abs(contour[0] - c) <= r or abs(contour[-1] - c) <= r:
        raise ContourCollision("moving branch point came too close to an endpoint")
    # split the polyline at its crossings with the circle
    pts: list[complex] = [contour[0]]
    inside: list[bool] = []
    for j in range(len(contour) - 1):
        p0, p1 = contour[j], contour[j + 1]
        ss = [0.0] + _circle_hits(p0, p1, c, r) + [1.0]
        for s0, s1 in zip(ss[:-1], ss[1:]):
            mid = p0 + 0.5 * (s0 + s1) * (p1 - p0)
            inside.append(abs(mid - c) < r)
            pts.append(p0 + s1 * (p1 - p0))
    out: list[complex] = [pts[0]]
    j = 0
    while j < len(inside):
        if not inside[j]:
            out.append(pts[j + 1])
            j += 1
            continue
        start = j
        while j < len(inside) and inside[j]:
            j += 1
        piece = pts[start:j + 1]
        e_in, e_out = piece[0], piece[-1]
        chosen = None
        for ccw in (True, False):
            back = _arc(c, r, e_out, e_in, ccw)
            poly = piece + back
            if abs(_winding(poly, Q)) < 0.5 and all(abs(_winding(poly, f)) < 0.5 for f in forbidden):
                chosen = back
                break
        if chosen is None:
            raise ContourCollision("cannot push contour without crossing a singularity")
        out.extend(chosen[::-1])
        out.append(e_out)
    # drop repeated vertices
    clean = [out[0]]
    for z in out[1:]:
        if abs(z - clean[-1]) > 1e-15:
            clean.append(z)
    if _contour_dist(clean, Q, R) <= 0.5 * delta:
        raise ContourCollision("contour deformation failed to clear the moving branch point")
    return clean


@dataclass
class ContinuationState:
    """Contour, current point and continuous logs of the linear factors at t = a."""

    x: EvaluationPoint
    contour: list = field(default_factory=list)
    log_p_at_a: tuple = (0j, 0j)


def _initial_state(p: Parameters, x: EvaluationPoint, anchor) -> ContinuationState:
    if p.a <= 0:
        raise EndpointError("path continuation needs a > 0")
    _check_contour(p, x)
    X = np.array([x.as_tuple()], dtype=complex)
    logs = []
    for i in range(2):
        q = Parameters(1.0 if i == 0 else 0.0, 1.0 if i == 1 else 0.0, 0.0, p.a, p.b)
        lg = _log_factors(q, X, anchor, np.array([0.0]), np.array([1.0]))[0, 0]
        logs.append(complex(lg))
    return ContinuationState(x, [complex(p.a), complex(p.b)], tuple(logs))


def _factor(x: EvaluationPoint, i: int, t):
    return (x.x11 + x.x21 * t) if i == 0 else (x.x12 + x.x22 * t)


def _contour_integral(p: Parameters, st: ContinuationState, tol: float) -> complex:
    x = st.x
    alphas = (p.alpha1, p.alpha2)
    log_t = complex(math.log(p.a))
    logs = list(st.log_p_at_a)
    total = 0j
    nseg = len(st.contour) - 1
    for j in range(nseg):
        s, e = st.contour[j], st.contour[j + 1]
        d = e - s
        ps = [_factor(x, i, s) for i in range(2)]
        lt0, lg0 = log_t, tuple(logs)

        def h(u, u_lo, u_hi, s=s, d=d, ps=ps, lt0=lt0, lg0=lg0):
            tau = s + d * u
            ex = p.gamma * (lt0 + np.log(tau / s))
            for i in range(2):
                if alphas[i] != 0:
                    ex = ex + alphas[i] * (lg0[i] + np.log(_factor(x, i, tau) / ps[i]))
            return d * np.exp(ex)

        val, _ = adaptive_gk15(h, tol / max(nseg, 1), 1e-14)
        total += val
        log_t = lt0 + cmath.log(e / s)
        logs = [lg0[i] + cmath.log(_factor(x, i, e) / ps[i]) for i in range(2)]
    return total


def continue_along_path(p: Parameters, path: PathSpec, tol: float = 1e-12,
                        anchor=DEFAULT_ANCHOR, state: ContinuationState | None = None,
                        delta: float | None = None, return_state: bool = False):
    """Analytically continue the integral along ``path`` (vertices in x-space).

    The starting branch is fixed by ``anchor`` at the first vertex, or taken
    from ``state`` when resuming a previous continuation.
    """
    pts = path.points()
    st = state if state is not None else _initial_state(p, pts[0], anchor)
    if state is not None and pts[0] != st.x:
        raise ValueError("path does not start at the state's point")
    contour = list(st.contour)
    logs = list(st.log_p_at_a)
    fixed = [] if _is_nonneg_int(p.gamma) else [0j]
    if delta is None:
        delta = _auto_delta(p, pts)
    x = pts[0]
    for nxt in pts[1:]:
        bp0, bp1 = _branch_points(x), _branch_points(nxt)
        move = max(abs(bp1[0] - bp0[0]), abs(bp1[1] - bp0[1]))
        pa0 = [_factor(x, i, p.a) for i in range(2)]
        pa1 = [_factor(nxt, i, p.a) for i in range(2)]
        rel = max(abs(pa1[i] - pa0[i]) / abs(pa0[i]) for i in range(2))
        nsub = max(1, int(math.ceil(move / (0.5 * delta))), int(math.ceil(rel / 0.25)))
        xs = [EvaluationPoint(*(np.array(x.as_tuple()) +
                                (np.array(nxt.as_tuple()) - np.array(x.as_tuple())) * (k / nsub)))
              for k in range(1, nsub + 1)]
        for y in xs:
            b_old, b_new = _branch_points(x), _branch_points(y)
            for i in range(2):
                if _is_nonneg_int((p.alpha1, p.alpha2)[i]) or b_old[i] == b_new[i]:
                    continue
                others = fixed + [b_old[1 - i] if i == 0 else b_new[0]]
                contour = _push(contour, b_old[i], b_new[i], delta, others)
            for i in range(2):
                logs[i] += cmath.log(_factor(y, i, p.a) / _factor(x, i, p.a))
            x = y
    st = ContinuationState(x, contour, tuple(logs))
    value = _contour_integral(p, st, tol)
    return (value, st) if return_state else value


def _auto_delta(p: Parameters, pts: list[EvaluationPoint]) -> float:
    """Push margin: a fraction of the closest approach of a branch point to a fixed feature."""
    feats = [complex(p.a), complex(p.b)] + ([] if _is_nonneg_int(p.gamma) else [0j])
    dmin = math.inf
    for x in pts:
        b0, b1 = _branch_points(x)
        for f in feats:
            dmin = min(dmin, abs(b0 - f), abs(b1 - f))
        dmin = min(dmin, abs(b0 - b1))
    return min(0.2 * dmin, 0.05 * (p.b - p.a))
