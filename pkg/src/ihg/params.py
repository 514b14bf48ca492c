from __future__ import annotations

from dataclasses import dataclass, replace

from .atlas import check_endpoints
from .kernel import near_integer


@dataclass(frozen=True)
class Parameters:
    """Exponents and endpoints of the integral over [a, b].

    ``beta`` is redundant (always -gamma-1) and is filled in when omitted.
    """

    alpha1: complex
    alpha2: complex
    gamma: complex
    a: float
    b: float
    beta: complex | None = None

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "gamma"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        expected = -self.gamma - 1
        if self.beta is None:
            object.__setattr__(self, "beta", expected)
        else:
            beta = complex(self.beta)
            if abs(beta - expected) > 1e-12 * max(1.0, abs(beta)):
                raise ValueError(f"beta must equal -gamma-1, got {beta} vs {expected}")
            object.__setattr__(self, "beta", expected)
        check_endpoints(self.a, self.b)

    @classmethod
    def from_beta(cls, alpha1, alpha2, beta, a, b) -> "Parameters":
        return cls(alpha1, alpha2, -complex(beta) - 1, a, b)

    def shifted(self, d_alpha1=0, d_alpha2=0, d_beta=0) -> "Parameters":
        return replace(self, alpha1=self.alpha1 + d_alpha1, alpha2=self.alpha2 + d_alpha2,
                       gamma=self.gamma - d_beta, beta=None)

    def symbol_values(self) -> dict[str, complex]:
        return {"alpha1": self.alpha1, "alpha2": self.alpha2, "beta": self.beta,
                "gamma": self.gamma, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class GenericityReport:
    ok: bool
    violated: tuple[str, ...]


def genericity(p: Parameters) -> GenericityReport:
    combos = {
        "gamma": p.gamma,
        "gamma+alpha1": p.gamma + p.alpha1,
        "gamma+alpha2": p.gamma + p.alpha2,
        "gamma+alpha1+alpha2": p.gamma + p.alpha1 + p.alpha2,
    }
    bad = tuple(k for k, v in combos.items() if near_integer(v))
    return GenericityReport(not bad, bad)
