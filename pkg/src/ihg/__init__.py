"""Incomplete hypergeometric integrals of two linear factors over [a, b].

Series in four convergence regions, a quadrature oracle with path
continuation, Weyl-algebra operators, contiguity relations, connection
phases, monodromy, and incomplete beta / elliptic special cases.
"""
from .atlas import DVector, EvaluationPoint, RegionTag, classify_d, region_membership
from .errors import IHGError
from .params import Parameters, genericity
from .quadrature import (PathSpec, boundary_term, circle_path, continue_along_path,
                         phi_integral)
from .series import (appell_f1, f12_11_pq, f12_11_via_f1, f12_11_via_superposition, f_series,
                     gauss_2f1, series_derivative, tilde_f)

__all__ = [
    "DVector", "EvaluationPoint", "RegionTag", "classify_d", "region_membership", "IHGError",
    "Parameters", "genericity", "PathSpec", "boundary_term", "circle_path", "continue_along_path",
    "phi_integral", "appell_f1", "f12_11_pq", "f12_11_via_f1", "f12_11_via_superposition",
    "f_series", "gauss_2f1", "series_derivative", "tilde_f",
]
