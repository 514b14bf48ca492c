"""Incomplete beta and incomplete elliptic integrals as special cases."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import IHGError, NotConverged, OutsideConvergenceRegion
from .kernel import log_gamma
from .params import Parameters


@dataclass(frozen=True)
class BetaArgs:
    alpha: complex
    beta: complex
    y: float

    def __post_init__(self):
        if not 0 < self.y <= 1:
            raise ValueError("y must lie in (0, 1]")
        if not complex(self.alpha).real > 0:
            raise ValueError("Re(alpha) must be positive")


@dataclass(frozen=True)
class EllipticArgs:
    z: float
    k: float

    def __post_init__(self):
        if not 0 < self.z < 1:
            raise ValueError("z must lie in (0, 1)")
        if not 0 <= self.k < 1:
            raise ValueError("k must lie in [0, 1)")


def _beta_params(alpha, beta) -> Parameters:
    # integral over [0, 1] of t^(alpha-1) (1 - y t)^(beta-1); the second factor is switched off
    return Parameters(complex(beta) - 1, 0.0, complex(alpha) - 1, 0.0, 1.0)


def _beta_point(y: float):
    return (1.0, -y, 1.0, 0.5)


def incomplete_beta(args: BetaArgs, tol: float = 1e-14, method: str = "auto") -> complex:
    """B(alpha, beta; y) = int_0^y s^(alpha-1) (1-s)^(beta-1) ds.

    Evaluated as y^alpha times the integral over [0, 1] at x = (1, -y).  The
    series is used when it converges; otherwise (y close to 1) the
    quadrature oracle takes over.
    """
    from .quadrature import phi_integral
    from .series import f_series
    p = _beta_params(args.alpha, args.beta)
    x = _beta_point(args.y)
    scale = cmath.exp(complex(args.alpha) * math.log(args.y))
    if method in ("auto", "series"):
        try:
            return scale * f_series("D12_11", p, x, tol=tol * 1e-2).value
        except (NotConverged, OutsideConvergenceRegion):
            if method == "series":
                raise
    return scale * phi_integral(p, x, tol=tol, anchor=None)


def complete_beta(alpha, beta) -> complex:
    return cmath.exp(log_gamma(alpha) + log_gamma(beta) - log_gamma(complex(alpha) + complex(beta)))


@dataclass(frozen=True)
class BetaRecurrenceReport:
    lhs: complex
    rhs: complex
    residual: float
    degenerate: bool = False


def beta_recurrence_check(args: BetaArgs, tol: float = 1e-14) -> BetaRecurrenceReport:
    """Residual of (alpha+beta) B(alpha+1, beta; y) = alpha B(alpha, beta; y) - y^alpha (1-y)^beta."""
    a, b, y = complex(args.alpha), complex(args.beta), args.y
    if a == 0:
        return BetaRecurrenceReport(0j, 0j, 0.0, degenerate=True)
    lhs = (a + b) * incomplete_beta(BetaArgs(a + 1, b, y), tol)
    tail = 0j if y == 1 else cmath.exp(a * math.log(y) + b * math.log1p(-y))
    rhs = a * incomplete_beta(args, tol) - tail
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return BetaRecurrenceReport(lhs, rhs, abs(lhs - rhs) / scale)


def incomplete_elliptic_F(args: EllipticArgs, tol: float = 1e-15) -> float:
    """F(z; k) = z F1(1/2, 1/2, 1/2, 3/2; z^2, k^2 z^2)."""
    from .series import appell_f1
    z, k = args.z, args.k
    val = appell_f1(0.5, 0.5, 0.5, 1.5, z * z, (k * z) ** 2, tol=tol).value
    return float((z * val).real)


def incomplete_elliptic_F_quad(args: EllipticArgs, tol: float = 1e-14) -> float:
    """Direct quadrature of dx / sqrt((1-x^2)(1-k^2 x^2)) over [0, z]."""
    from .quadrature import adaptive_gk15
    z, k = args.z, args.k

    def h(u, u_lo, u_hi):
        xx = z * u
        return z / np.sqrt((1 - xx * xx) * (1 - (k * xx) ** 2))

    val, _ = adaptive_gk15(h, tol, 1e-15)
    return float(val.real)


def elliptic_via_series_chain(args: EllipticArgs) -> complex:
    """2 F(z; k) / z from the two-factor integral at alpha1 = alpha2 = gamma = -1/2 on [0, 1]."""
    from .series import f12_11_via_f1
    z, k = args.z, args.k
    p = Parameters(-0.5, -0.5, -0.5, 0.0, 1.0)
    return f12_11_via_f1(p, (1.0, -z * z, 1.0, -(k * z) ** 2)).value


__all__ = ["BetaArgs", "EllipticArgs", "incomplete_beta", "complete_beta", "beta_recurrence_check",
           "incomplete_elliptic_F", "incomplete_elliptic_F_quad", "elliptic_via_series_chain",
           "IHGError"]
