"""Evaluation points, the 2^7 sign domains D_d and the four convergence regions."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

from .errors import BoundaryError, EndpointError
from .kernel import EPS_BD

COORDS = ("x11", "x21", "x12", "x22")


class RegionTag(str, enum.Enum):
    """Convergence region of one of the four series.

    The superscript pair picks the expansion of the alpha1 factor
    (``11``: in x21/x11, ``21``: in x11/x21), the subscript pair that of the
    alpha2 factor (``12``: in x22/x12, ``22``: in x12/x22).
    """

    D12_11 = "D12_11"
    D22_11 = "D22_11"
    D12_21 = "D12_21"
    D22_21 = "D22_21"

    @property
    def flips(self) -> tuple[bool, bool]:
        """(factor 1 expanded at infinity, factor 2 expanded at infinity)."""
        return self.value.endswith("21"), self.value.startswith("D22")


@dataclass(frozen=True)
class EvaluationPoint:
    x11: complex
    x21: complex
    x12: complex
    x22: complex

    def __post_init__(self):
        for name in COORDS:
            v = complex(getattr(self, name))
            object.__setattr__(self, name, v)
            if v == 0:
                raise BoundaryError(f"{name} = 0 is on the singular locus")

    @classmethod
    def of(cls, coords) -> "EvaluationPoint":
        if isinstance(coords, EvaluationPoint):
            return coords
        return cls(*coords)

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.x11, self.x21, self.x12, self.x22)

    def replace(self, **kw) -> "EvaluationPoint":
        vals = dict(zip(COORDS, self.as_tuple()))
        vals.update(kw)
        return EvaluationPoint(**vals)

    def conjugate(self) -> "EvaluationPoint":
        return EvaluationPoint(*(v.conjugate() for v in self.as_tuple()))

    @cached_property
    def d(self) -> "DVector":
        return classify_d(self)


@dataclass(frozen=True)
class DVector:
    d: tuple[int, ...]

    def __post_init__(self):
        if len(self.d) != 7 or any(v not in (0, 1) for v in self.d):
            raise ValueError(f"bad d-vector {self.d}")

    def matches(self, pattern: str) -> bool:
        """Match against a 7-character pattern over {0, 1, *}."""
        return all(p == "*" or int(p) == v for p, v in zip(pattern, self.d))

    def flipped(self) -> "DVector":
        return DVector(tuple(1 - v for v in self.d))

    def __str__(self):
        return "(" + ",".join(map(str, self.d)) + ")"


SIGN_NAMES = ("Im x11", "Im x21", "Im x12", "Im x22",
              "Im x21/x11", "Im x22/x12", "Im x21*x12/(x11*x22)")


def signed_quantities(x: EvaluationPoint) -> tuple[complex, ...]:
    x11, x21, x12, x22 = x.as_tuple()
    return (x11, x21, x12, x22, x21 / x11, x22 / x12, (x21 * x12) / (x11 * x22))


def classify_d(x: EvaluationPoint) -> DVector:
    """d_i = 0 iff the i-th imaginary part is positive."""
    bits = []
    for name, q in zip(SIGN_NAMES, signed_quantities(x)):
        if abs(q.imag) <= EPS_BD * max(1.0, abs(q)):
            raise BoundaryError(f"{name} vanishes at {x.as_tuple()}")
        bits.append(0 if q.imag > 0 else 1)
    return DVector(tuple(bits))


def check_endpoints(a: float, b: float) -> None:
    if not (0 <= a < b):
        raise EndpointError(f"need 0 <= a < b, got a={a}, b={b}")


def region_ratios(region: RegionTag, x: EvaluationPoint, a: float, b: float) -> list[float]:
    """The four moduli that must be < 1 for ``x`` to lie in ``region``.

    Ratios with a zero endpoint in the denominator are infinite.
    """
    x11, x21, x12, x22 = x.as_tuple()
    flip1, flip2 = region.flips
    out = []
    for t in (b, a):
        out.append(abs(x11 / (x21 * t)) if flip1 and t else
                   float("inf") if flip1 else abs(x21 * t / x11))
    for t in (b, a):
        out.append(abs(x12 / (x22 * t)) if flip2 and t else
                   float("inf") if flip2 else abs(x22 * t / x12))
    return out


def region_membership(x: EvaluationPoint, a: float, b: float) -> set[RegionTag]:
    check_endpoints(a, b)
    return {r for r in RegionTag if all(q < 1 for q in region_ratios(r, x, a, b))}


def base_point(a: float, b: float) -> EvaluationPoint:
    """Real positive point of D22_21 satisfying the full ordering chain."""
    check_endpoints(a, b)
    if a == 0:
        raise EndpointError("base point needs a > 0")
    x21 = 2.0 * max(1.0 / a, b)
    return EvaluationPoint(1.0, x21, 1.0, 2.0 * x21)


def chain_holds(x: EvaluationPoint, a: float, b: float) -> bool:
    x11, x21, x12, x22 = (v.real for v in x.as_tuple())
    return 0 < x12 / x22 < x11 / x21 < a < b < x21 / x11 < x22 / x12
