"""Connection phases between the four series, and monodromy of the first series."""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .atlas import DVector, EvaluationPoint, RegionTag, classify_d
from .errors import EmptyOverlap, NonGenericParameters
from .kernel import TWO_PI_I, near_integer, rgamma
from .params import Parameters

# pair -> (left region, right region, moving coordinate, exponent index)
PAIRS = {
    1: (RegionTag.D12_11, RegionTag.D12_21, "x11", 1),
    2: (RegionTag.D12_11, RegionTag.D22_11, "x12", 2),
    3: (RegionTag.D12_21, RegionTag.D22_21, "x12", 2),
}

# (pattern for e^{+2 pi i alpha}, pattern for e^{-2 pi i alpha})
PATTERNS = {
    1: ("01**0**", "10**1**"),
    2: ("**01*0*", "**10*1*"),
    3: ("**01*0*", "**10*1*"),
}

# patterns as usually stated; item 1 differs from the verified rule above
PRINTED_PATTERNS = {
    1: ("11**0**", "00**1**"),
    2: PATTERNS[2],
    3: PATTERNS[3],
}


@dataclass(frozen=True)
class ConnectionRule:
    pair: int
    plus: str
    minus: str

    def phase(self, d: DVector, alpha) -> complex:
        alpha = complex(alpha)
        if d.matches(self.plus):
            return cmath.exp(2j * math.pi * alpha)
        if d.matches(self.minus):
            return cmath.exp(-2j * math.pi * alpha)
        return 1.0 + 0j


def connection_rule(pair: int, printed: bool = False) -> ConnectionRule:
    if pair not in PAIRS:
        raise ValueError(f"pair must be 1, 2 or 3, got {pair}")
    plus, minus = (PRINTED_PATTERNS if printed else PATTERNS)[pair]
    return ConnectionRule(pair, plus, minus)


def connection_phase(pair: int, d, alpha, printed: bool = False) -> complex:
    """f_left = phase * f_right on D_d."""
    if not isinstance(d, DVector):
        d = DVector(tuple(d))
    return connection_rule(pair, printed).phase(d, alpha)


@dataclass
class ConnectionReport:
    pair: int
    d: str
    phase: complex
    lhs: complex
    rhs: complex
    residual: float
    ok: bool

    def to_dict(self) -> dict:
        c = lambda z: [complex(z).real, complex(z).imag]
        return {"pair": self.pair, "d": self.d, "phase": c(self.phase), "lhs": c(self.lhs),
                "rhs": c(self.rhs), "residual": self.residual, "ok": self.ok}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def connection_points(pair: int, p: Parameters, x, ratio: float = 0.5):
    """Two points on the ray through x (scaling the pair's moving coordinate by s > 0):
    one where the left series converges, one where the right one does.

    Positive rescaling of any coordinate keeps every imaginary-part sign, so
    both points lie in the D_d of x.
    """
    x = EvaluationPoint.of(x)
    left, right, coord, _ = PAIRS[pair]
    if p.a <= 0:
        raise EmptyOverlap("connection needs 0 < a < b")
    # rescale the fixed factor's leading coordinate so its expansion converges
    if pair == 1:
        x = x.replace(x12=x.x12 / abs(x.x12) * abs(x.x22) * p.b / ratio)
        mod = abs(x.x21)
    else:
        fixed = x.x11 / abs(x.x11) * abs(x.x21)
        x = x.replace(x11=fixed * (p.b / ratio if pair == 2 else p.a * ratio))
        mod = abs(x.x22)
    z = getattr(x, coord)
    unit = z / abs(z)
    x_left = x.replace(**{coord: unit * mod * p.b / ratio})
    x_right = x.replace(**{coord: unit * mod * p.a * ratio})
    from .atlas import region_ratios
    for tag, pt in ((left, x_left), (right, x_right)):
        if max(region_ratios(tag, pt, p.a, p.b)) >= 1:
            raise EmptyOverlap(f"cannot place a point of {tag.value} on the ray through x")
    return x_left, x_right


def verify_connection(pair: int, p: Parameters, x, tol: float = 1e-8, steps: int = 64,
                      printed: bool = False) -> ConnectionReport:
    """Continue the left series along the ray inside D_d (by quadrature) and compare
    with phase * right series at the far end.
    """
    from .quadrature import PathSpec, continue_along_path, phi_integral
    from .series import f_series
    left, right, coord, idx = PAIRS[pair]
    x_left, x_right = connection_points(pair, p, x)
    d = classify_d(x_left)
    alpha = p.alpha1 if idx == 1 else p.alpha2
    phase = connection_phase(pair, d, alpha, printed)
    # geometric spacing along the ray
    z0, z1 = getattr(x_left, coord), getattr(x_right, coord)
    s = np.geomspace(1.0, abs(z1) / abs(z0), steps + 1)
    path = PathSpec([x_left.replace(**{coord: z0 * si}) for si in s])
    f_left0 = f_series(left, p, x_left).value
    start = phi_integral(p, x_left, anchor=left)
    cont = continue_along_path(p, path, tol=1e-13, anchor=left)
    # the anchored integral reproduces the left series at the start point
    lhs = cont * (f_left0 / start if start != 0 else 1.0)
    rhs = phase * f_series(right, p, x_right).value
    scale = max(abs(lhs), abs(rhs), 1e-30)
    residual = abs(lhs - rhs) / scale
    return ConnectionReport(pair, str(d), phase, lhs, rhs, residual, residual <= tol)


def verify_connection_series(pair: int, p: Parameters, x_left, x_right) -> complex:
    """Ratio f_left(x_left) / f_right(x_right) is meaningless unless the points coincide;
    this helper returns the left series continued by quadrature divided by the right series."""
    rep = verify_connection(pair, p, EvaluationPoint.of(x_left))
    return rep.lhs / (rep.rhs / rep.phase)


# ------------------------------------------------------------------ monodromy

def gauss_connection_coeffs(aa, bb, cc):
    """(1 - A, B) of the continuation of 2F1(aa, bb; cc; z) around z = 1.

    F -> (1 - A) F + B z^(1-cc) F(aa-cc+1, bb-cc+1; 2-cc; z).
    """
    aa, bb, cc = complex(aa), complex(bb), complex(cc)
    from .kernel import log_gamma, near_nonpositive_integer
    if near_integer(cc):
        raise NonGenericParameters("cc must not be an integer")
    e = lambda z: cmath.exp(-2j * math.pi * z)
    A = (1 - e(aa)) * (1 - e(bb)) / (1 - e(cc))
    inv = rgamma(aa) * rgamma(bb) * rgamma(cc - aa) * rgamma(cc - bb)
    if inv == 0:
        Bv = 0j
    else:
        Bv = (TWO_PI_I / (1 - cc) * cmath.exp(2 * log_gamma(cc)) * inv
              * cmath.exp(1j * math.pi * (cc - aa - bb)))
    return 1 - A, Bv


def _loop_phase(alpha) -> complex:
    """e^{2 pi i alpha}, exactly 1 for integer alpha."""
    return 1.0 + 0j if near_integer(alpha, 0.0) else cmath.exp(2j * math.pi * complex(alpha))


@dataclass(frozen=True)
class MonodromyResult:
    """Continuation of f12_11(1, 1; x) equals f12_11(pq; x) + tilde_coeff * tilde_f(x)."""

    loop: str
    pq: tuple
    tilde_coeff: complex
    value: complex | None = None


def tilde_coefficient(p: Parameters, printed: bool = False) -> complex:
    """Coefficient of tilde_f after a positive loop around x11 = -b x21.

    The full coefficient carries Gamma(gamma+1)/Gamma(gamma+alpha1+2); with
    ``printed=True`` that factor is left out.
    """
    a1 = p.alpha1
    c = -TWO_PI_I * cmath.exp(1j * math.pi * (a1 + 1)) * rgamma(-a1)
    if printed:
        return c
    from .kernel import log_gamma
    if near_integer(p.gamma + a1 + 2) and (p.gamma + a1 + 2).real <= 0.5:
        raise NonGenericParameters("gamma + alpha1 + 2 is a pole")
    return c * cmath.exp(log_gamma(p.gamma + 1)) * rgamma(p.gamma + a1 + 2)


def monodromy_rhs(loop: str, p: Parameters, x, tol: float = 0.0,
                  printed: bool = False) -> MonodromyResult:
    """Value of the continuation of f12_11 along gamma_a or gamma_b (positive orientation)."""
    from .series import f12_11_pq, tilde_f
    x = EvaluationPoint.of(x)
    if loop not in ("gamma_a", "gamma_b"):
        raise ValueError("loop must be 'gamma_a' or 'gamma_b'")
    e = _loop_phase(p.alpha1)
    c = tilde_coefficient(p, printed)
    if loop == "gamma_b":
        pq = (1.0 + 0j, e)
    else:
        pq, c = (e, 1.0 + 0j), -c
    val = f12_11_pq(pq[0], pq[1], p, x, tol).value
    if c != 0:
        val += c * tilde_f(p, x, tol).value
    return MonodromyResult(loop, pq, c, val)


def g_monodromy(loop: str, p: Parameters, x, anchor=RegionTag.D12_11) -> complex:
    """Continuation of [g] along the loop."""
    from .quadrature import g_value
    e = _loop_phase(p.alpha1)
    gb = g_value(p, x, p.b, anchor)
    ga = g_value(p, x, p.a, anchor) if p.a != 0 else 0j
    if loop == "gamma_b":
        return e * gb - ga
    if loop == "gamma_a":
        return gb - e * ga
    raise ValueError("loop must be 'gamma_a' or 'gamma_b'")


def loop_path(loop: str, p: Parameters, x, n: int = 96, radius: float | None = None,
              approach: int = 24):
    """Positive loop of x11 around -a x21 or -b x21, starting and ending at x.

    The path runs straight to a circle around the target point, goes once
    around it counterclockwise, and returns along the same segment.
    """
    from .quadrature import PathSpec, circle_path
    x = EvaluationPoint.of(x)
    t = p.b if loop == "gamma_b" else p.a
    centre = -t * x.x21
    if radius is None:
        other = -(p.a if loop == "gamma_b" else p.b) * x.x21
        radius = 0.4 * min(abs(other - centre), abs(x.x11 - centre))
        if p.a == 0 or loop == "gamma_a":
            radius = min(radius, 0.4 * abs(centre))
    direction = (x.x11 - centre) / abs(x.x11 - centre)
    start = x.replace(x11=centre + radius * direction)
    down = [x.replace(x11=x.x11 + (start.x11 - x.x11) * k / approach) for k in range(approach + 1)]
    ring = circle_path(start, centre, n=n).points()
    return PathSpec(down + ring[1:] + down[::-1][1:])


def monodromy_lhs(loop: str, p: Parameters, x, tol: float = 1e-12, n: int = 96) -> complex:
    """Continuation of f12_11 along the loop by contour-deformed quadrature."""
    from .quadrature import continue_along_path
    return continue_along_path(p, loop_path(loop, p, x, n=n), tol=tol, anchor=RegionTag.D12_11)
