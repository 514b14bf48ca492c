"""Seeded verification suites shared by the command line and the acceptance tests.

Each suite returns a list of records ``{"suite", "check", "residual", "tol", "ok", ...}``
sorted by check id.
"""
from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from .atlas import EvaluationPoint, RegionTag, classify_d
from .errors import BoundaryError
from .params import Parameters

SUITES = ("oracle", "representations", "system", "contiguity", "connection", "monodromy",
          "branch", "applications")
ALIASES = {"all": SUITES}


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _rec(suite, check, residual, tol, **extra) -> dict:
    residual = float(residual)
    return {"suite": suite, "check": check, "residual": residual, "tol": tol,
            "ok": bool(residual <= tol), **extra}


def _sorted(records):
    return sorted(records, key=lambda r: r["check"])


# ---------------------------------------------------------------- sampling

def _off_integer(v: complex, gap: float) -> bool:
    return abs(v.imag) > gap or abs(v.real - round(v.real)) >= gap


def random_parameters(rng: np.random.Generator, complex_exponents: bool = False,
                      gap: float = 0.05, a_range=(0.2, 1.0), span=(0.5, 1.5)) -> Parameters:
    """Generic exponents with real parts in (-0.9, 2), every relevant combination off-integer."""
    while True:
        re = rng.uniform(-0.9, 2.0, 3)
        im = rng.uniform(-0.5, 0.5, 3) if complex_exponents else np.zeros(3)
        a1, a2, g = (complex(r, i) for r, i in zip(re, im))
        combos = (a1, a2, g, g + a1, g + a2, g + a1 + a2)
        if all(_off_integer(c, gap) for c in combos):
            a = rng.uniform(*a_range)
            return Parameters(a1, a2, g, a, a + rng.uniform(*span))


def region_point(rng: np.random.Generator, tag, p: Parameters, lo=0.2, hi=0.6) -> EvaluationPoint:
    """Real positive point of the region, convergence ratios in (lo, hi) and off x11 x22 = x21 x12."""
    f1, f2 = RegionTag(tag).flips
    while True:
        r1, r2 = rng.uniform(lo, hi, 2)
        x11, x12 = rng.uniform(0.5, 2.0, 2)
        x21 = x11 / (p.a * r1) if f1 else r1 * x11 / p.b
        x22 = x12 / (p.a * r2) if f2 else r2 * x12 / p.b
        if abs(x11 * x22 - x21 * x12) > 0.05 * abs(x11 * x22):
            return EvaluationPoint(x11, x21, x12, x22)


def tilde_point(rng: np.random.Generator, p: Parameters, bound: float = 0.7) -> EvaluationPoint:
    """Point of D12_11 where the Gauss series of tilde_f also converges."""
    while True:
        x = region_point(rng, RegionTag.D12_11, p)
        if abs(x.x11 * x.x22 / (x.x12 * x.x21)) < bound:
            return x


# --------------------------------------------------------------- criterion 1

def suite_oracle(seed: int = 0, n: int = 20, tol: float = 1e-8) -> list[dict]:
    from .quadrature import phi_integral
    from .series import f_series
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        p = random_parameters(rng, complex_exponents=bool(i % 2))
        for tag in RegionTag:
            x = region_point(rng, tag, p)
            s = f_series(tag, p, x).value
            q = phi_integral(p, x, tol=1e-14, anchor=tag)
            out.append(_rec("oracle", f"oracle/{i:02d}/{tag.value}", abs(s - q) / abs(q), tol,
                            series=_c(s), quadrature=_c(q)))
    return _sorted(out)


# --------------------------------------------------------------- criterion 2

def suite_representations(seed: int = 0, n: int = 10, tol: float = 1e-10) -> list[dict]:
    from .series import f12_11_via_f1, f12_11_via_superposition, f_series
    rng = np.random.default_rng(seed + 1)
    out = []
    for i in range(n):
        p = random_parameters(rng, complex_exponents=bool(i % 2))
        x = region_point(rng, RegionTag.D12_11, p, 0.1, 0.5)
        vals = {"series": f_series("D12_11", p, x).value, "f1": f12_11_via_f1(p, x).value,
                "superposition": f12_11_via_superposition(p, x).value}
        names = list(vals)
        for j in range(3):
            for k in range(j + 1, 3):
                u, v = vals[names[j]], vals[names[k]]
                out.append(_rec("representations", f"repr/{i:02d}/{names[j]}-{names[k]}",
                                abs(u - v) / max(abs(u), abs(v), 1e-300), tol))
    return _sorted(out)


# --------------------------------------------------------------- criterion 3

def suite_system(seed: int = 0, n: int = 5, tol_inhom: float = 1e-7,
                 tol_hom: float = 1e-6) -> list[dict]:
    from .system import build_delta11_homogeneous, build_delta11_inhomogeneous
    from .weyl import PhiHandle, SeriesHandle, TildeHandle, apply_with_scale
    rng = np.random.default_rng(seed + 2)
    out = []
    for i in range(n):
        p = random_parameters(rng)
        values = p.symbol_values()
        x = region_point(rng, RegionTag.D12_11, p)
        phi = PhiHandle(p)
        for r, (op, g) in enumerate(build_delta11_inhomogeneous(p), start=1):
            lhs, scale = apply_with_scale(op, phi, x, values)
            rhs = g.evaluate(x) if g != 0 else 0j
            res = abs(lhs - rhs) / max(scale, abs(rhs), 1e-300)
            out.append(_rec("system", f"system/{i}/inhomogeneous/row{r}", res, tol_inhom,
                            lhs=_c(lhs), rhs=_c(rhs)))
        hom = build_delta11_homogeneous(p)
        handles = [(tag.value, SeriesHandle(tag, p), region_point(rng, tag, p)) for tag in RegionTag]
        xt = tilde_point(rng, p)
        handles.append(("tilde_f", TildeHandle(p), xt))
        for name, h, pt in handles:
            for r, op in enumerate(hom, start=1):
                val, scale = apply_with_scale(op, h, pt, values)
                out.append(_rec("system", f"system/{i}/homogeneous/{name}/row{r}",
                                abs(val) / max(scale, 1e-300), tol_hom))
    return _sorted(out)


# --------------------------------------------------------------- criterion 4

def suite_contiguity(seed: int = 0, n: int = 10, tol: float = 1e-6, method: str = "series") -> list[dict]:
    from .system import all_relations, verify_contiguity
    rng = np.random.default_rng(seed + 3)
    out = []
    for i in range(n):
        p = random_parameters(rng)
        tag = list(RegionTag)[i % 4]
        x = region_point(rng, tag, p)
        for rel in all_relations():
            rep = verify_contiguity(rel.shift, p, x, method=method, tol=tol, hatted=rel.hatted,
                                    region=tag)
            out.append(_rec("contiguity", f"contiguity/{rep.relation}/{i:02d}", rep.residual, tol,
                            region=tag.value, lhs=_c(rep.lhs), rhs=_c(rep.rhs)))
    return _sorted(out)


# ------------------------------------------------------------ criteria 5, 6

def suite_applications(seed: int = 0, n: int = 100) -> list[dict]:
    from .applications import (BetaArgs, EllipticArgs, beta_recurrence_check, complete_beta,
                               incomplete_beta, incomplete_elliptic_F, incomplete_elliptic_F_quad)
    rng = np.random.default_rng(seed + 5)
    out = []
    for i in range(n):
        args = BetaArgs(rng.uniform(0.1, 5.0), rng.uniform(0.1, 5.0), rng.uniform(0.01, 0.99))
        rep = beta_recurrence_check(args)
        out.append(_rec("applications", f"beta/recurrence/{i:03d}", rep.residual, 1e-10,
                        alpha=args.alpha, beta=args.beta, y=args.y))
    lhs = 2 * incomplete_beta(BetaArgs(2, 1, 0.5))
    rhs = incomplete_beta(BetaArgs(1, 1, 0.5)) - 0.5 * 0.5
    out.append(_rec("applications", "beta/exact-quarter", max(abs(lhs - 0.25), abs(rhs - 0.25)), 0.0,
                    lhs=_c(lhs), rhs=_c(rhs)))
    for i, (al, be) in enumerate(rng.uniform(0.1, 5.0, (10, 2))):
        v = incomplete_beta(BetaArgs(al, be, 1.0))
        ref = complete_beta(al, be)
        out.append(_rec("applications", f"beta/complete/{i:02d}", abs(v - ref) / abs(ref), 1e-10))
    out.append(_rec("applications", "elliptic/pi-over-6",
                    abs(incomplete_elliptic_F(EllipticArgs(0.5, 0.0)) - math.pi / 6), 1e-12))
    for z in np.linspace(0.1, 0.7, 5):
        for k in np.linspace(0.0, 0.8, 5):
            a = EllipticArgs(float(z), float(k))
            u, v = incomplete_elliptic_F(a), incomplete_elliptic_F_quad(a)
            out.append(_rec("applications", f"elliptic/grid/{z:.2f}/{k:.2f}", abs(u - v) / abs(v), 1e-9))
    return _sorted(out)


# --------------------------------------------------------------- criterion 7

CONNECTION_TARGETS = {
    # pair: (plus pattern, minus pattern, two other patterns)
    1: ("01**0**", "10**1**", "00**0**", "11**1**"),
    2: ("**01*0*", "**10*1*", "**00*0*", "**11*1*"),
    3: ("**01*0*", "**10*1*", "**00*0*", "**11*1*"),
}


def _point_matching(rng, pattern: str, tries: int = 10000) -> EvaluationPoint:
    for _ in range(tries):
        x = EvaluationPoint(*np.exp(1j * rng.uniform(-math.pi, math.pi, 4)))
        try:
            d = classify_d(x)
        except BoundaryError:
            continue
        if d.matches(pattern) and all(abs(q.imag) > 0.05 * abs(q) for q in
                                      (x.x21 / x.x11, x.x22 / x.x12, x.x11, x.x21, x.x12, x.x22)):
            return x
    raise RuntimeError(f"no point found for pattern {pattern}")


def suite_connection(seed: int = 0, tol: float = 1e-8) -> list[dict]:
    from .connection import verify_connection
    rng = np.random.default_rng(seed + 7)
    out = []
    for pair, pats in CONNECTION_TARGETS.items():
        p = random_parameters(rng, a_range=(0.3, 0.8))
        alpha = p.alpha1 if pair == 1 else p.alpha2
        expected = [cmath.exp(2j * math.pi * alpha), cmath.exp(-2j * math.pi * alpha), 1, 1]
        for j, (pat, ph) in enumerate(zip(pats, expected)):
            x = _point_matching(rng, pat)
            rep = verify_connection(pair, p, x, tol)
            phase_ok = rep.phase == ph
            out.append(_rec("connection", f"connection/pair{pair}/{j}-{pat}",
                            rep.residual if phase_ok else math.inf, tol, d=rep.d,
                            phase=_c(rep.phase)))
    return _sorted(out)


# --------------------------------------------------------------- criterion 8

def monodromy_point(p: Parameters, h: float = 0.4) -> EvaluationPoint:
    return EvaluationPoint(-p.b + 1j * h, 1.0, 1.0, 0.3)


def suite_monodromy(seed: int = 0, slow: bool = False) -> list[dict]:
    from .connection import (gauss_connection_coeffs, g_monodromy, monodromy_lhs,
                             monodromy_rhs)
    from .system import build_delta11_homogeneous, build_delta11_inhomogeneous
    from .weyl import LinearCombination, SeriesHandle, TildeHandle, apply_with_scale
    rng = np.random.default_rng(seed + 8)
    out = []
    p = Parameters(*rng.uniform(0.1, 0.9, 3), a=0.5, b=1.0)
    e = cmath.exp(2j * math.pi * p.alpha1)
    for m in range(21):
        one_minus_a, _ = gauss_connection_coeffs(-p.alpha1, p.gamma + m + 1, p.gamma + m + 2)
        out.append(_rec("monodromy", f"monodromy/1-A/m{m:02d}", abs(one_minus_a - e), 1e-12))
    x = monodromy_point(p)
    values = p.symbol_values()
    for r, op in enumerate(build_delta11_homogeneous(p), start=1):
        val, scale = apply_with_scale(op, TildeHandle(p), x, values)
        out.append(_rec("monodromy", f"monodromy/tilde-homogeneous/row{r}", abs(val) / scale, 1e-6))
    for loop in ("gamma_a", "gamma_b"):
        res = monodromy_rhs(loop, p, x)
        h = LinearCombination([(1.0, SeriesHandle(RegionTag.D12_11, p, res.pq)),
                               (res.tilde_coeff, TildeHandle(p))])
        for r, (op, g) in enumerate(build_delta11_inhomogeneous(p), start=1):
            lhs, scale = apply_with_scale(op, h, x, values)
            rhs = g_monodromy(loop, p, x) if g != 0 else 0j
            out.append(_rec("monodromy", f"monodromy/{loop}/inhomogeneous/row{r}",
                            abs(lhs - rhs) / max(scale, abs(rhs)), 1e-6))
    if slow:
        out.extend(suite_monodromy_slow(seed))
    return _sorted(out)


def suite_monodromy_slow(seed: int = 0, tol: float = 1e-4) -> list[dict]:
    """Contour-deformed continuation around gamma_b compared with the closed form."""
    from .connection import monodromy_lhs, monodromy_rhs
    rng = np.random.default_rng(seed + 9)
    p = Parameters(*rng.uniform(0.1, 0.9, 3), a=0.5, b=1.0)
    x = monodromy_point(p)
    lhs = monodromy_lhs("gamma_b", p, x)
    rhs = monodromy_rhs("gamma_b", p, x).value
    return [_rec("monodromy", "monodromy/continuation/gamma_b", abs(lhs - rhs) / abs(rhs), tol,
                 lhs=_c(lhs), rhs=_c(rhs))]


# -------------------------------------------------------------- criterion 10

def suite_branch(seed: int = 0, n: int = 10_000, n_g: int = 10) -> list[dict]:
    from .kernel import branched_pow, pow_product_factor
    from .system import check_g_shift_condition
    rng = np.random.default_rng(seed + 10)
    worst = 0.0
    done = 0
    while done < n:
        z, w = (complex(*rng.uniform(-3, 3, 2)) for _ in range(2))
        if min(abs(z.imag), abs(w.imag), abs((z * w).imag)) < 1e-6:
            continue
        alpha = complex(*rng.uniform(-2, 2, 2))
        lhs = branched_pow(z * w, alpha)
        rhs = pow_product_factor(z, w, alpha) * branched_pow(z, alpha) * branched_pow(w, alpha)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
        done += 1
    out = [_rec("branch", "branch/product-rule", worst, 1e-12, cases=n)]
    for i in range(n_g):
        p = random_parameters(rng)
        x = region_point(rng, RegionTag.D22_21, p)
        for k in ("11", "21", "12", "22"):
            rep = check_g_shift_condition(k, p, x)
            out.append(_rec("branch", f"branch/g-shift/{i:02d}/d{k}", rep.residual, 1e-7))
    return _sorted(out)


SUITE_FUNCS: dict[str, Callable[..., list[dict]]] = {
    "oracle": suite_oracle,
    "representations": suite_representations,
    "system": suite_system,
    "contiguity": suite_contiguity,
    "connection": suite_connection,
    "monodromy": suite_monodromy,
    "branch": suite_branch,
    "applications": suite_applications,
}


def run_suite(name: str, seed: int = 0, **kw) -> list[dict]:
    names = ALIASES.get(name, (name,))
    out = []
    for n in names:
        if n not in SUITE_FUNCS:
            raise KeyError(f"unknown suite {n!r}")
        kwargs = kw if n == "monodromy" else {}
        out.extend(SUITE_FUNCS[n](seed=seed, **kwargs))
    return out
