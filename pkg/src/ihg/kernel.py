"""Branch-disciplined complex scalar functions.

Every power in the package goes through :func:`branched_pow`, which is the
principal branch ``arg z in (-pi, pi]``.  :func:`pow_product_factor` gives the
correction needed when the principal power of a product is split.
"""
from __future__ import annotations

import cmath
import math

from scipy import special

from .errors import BoundaryError, PoleError, ZeroBaseError

EPS_INT = 1e-9
EPS_BD = 1e-12
POCH_SWITCH = 64

TWO_PI_I = 2j * math.pi


def near_integer(z: complex, eps: float = EPS_INT) -> bool:
    z = complex(z)
    return abs(z.imag) <= eps and abs(z.real - round(z.real)) <= eps


def near_nonpositive_integer(z: complex, eps: float = EPS_INT) -> bool:
    z = complex(z)
    return near_integer(z, eps) and round(z.real) <= 0


def log_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z)."""
    z = complex(z)
    if near_nonpositive_integer(z):
        raise PoleError(f"log_gamma: {z} is a pole of Gamma")
    return complex(special.loggamma(z))


def rgamma(z: complex) -> complex:
    """1/Gamma(z); exactly 0 at the poles of Gamma."""
    z = complex(z)
    if near_nonpositive_integer(z, 0.0):
        return 0j
    return complex(special.rgamma(z))


def pochhammer(a: complex, n: int) -> complex:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    a = complex(a)
    if n == 0:
        return 1 + 0j
    # crossing a pole of Gamma: keep the exact zero from the product
    if n < POCH_SWITCH or near_nonpositive_integer(a) or near_nonpositive_integer(a + n):
        out = 1 + 0j
        for j in range(n):
            out *= a + j
        return out
    return cmath.exp(log_gamma(a + n) - log_gamma(a))


def branched_pow(z: complex, alpha: complex) -> complex:
    """Principal power z**alpha with arg z in (-pi, pi]."""
    z = complex(z)
    alpha = complex(alpha)
    if z == 0:
        if alpha.real > 0:
            return 0j
        raise ZeroBaseError(f"0**{alpha} is undefined")
    if alpha == 0:
        return 1 + 0j
    if z.imag == 0 and z.real > 0:
        return cmath.exp(alpha * math.log(z.real))
    return cmath.exp(alpha * cmath.log(z))


def branch_case(z: complex, w: complex) -> str:
    """Which of the three product cases (z, w) falls into."""
    z, w = complex(z), complex(w)
    zw = z * w
    for label, v in (("z", z), ("w", w), ("zw", zw)):
        if abs(v.imag) <= EPS_BD * max(1.0, abs(v)):
            raise BoundaryError(f"Im {label} = 0 (value {v})")
    if z.imag < 0 and w.imag < 0 and zw.imag > 0:
        return "plus_2pi"
    if z.imag > 0 and w.imag > 0 and zw.imag < 0:
        return "minus_2pi"
    return "neutral"


def pow_product_factor(z: complex, w: complex, alpha: complex) -> complex:
    """Factor F with (zw)**alpha = F * z**alpha * w**alpha (principal powers)."""
    case = branch_case(z, w)
    alpha = complex(alpha)
    if case == "plus_2pi":
        return cmath.exp(TWO_PI_I * alpha)
    if case == "minus_2pi":
        return cmath.exp(-TWO_PI_I * alpha)
    return 1 + 0j
