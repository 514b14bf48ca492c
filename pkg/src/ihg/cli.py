"""Command line front end: ``ihg eval|verify|table``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import resources

import jsonschema
import numpy as np

from .errors import IHGError

EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_EVAL = 3


class ConfigError(Exception):
    pass


class EvalError(Exception):
    pass


def load_schema(name: str) -> dict:
    return json.loads(resources.files("ihg").joinpath("schemas", name).read_text())


def to_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def from_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _clean(obj):
    """Make an object strict-JSON safe (non-finite floats become null)."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return from_complex(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def read_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    cfg["command"] = args.command
    for key in ("tol", "seed", "format", "function", "region", "suite", "kind"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "slow", False):
        cfg["slow"] = True
    for key in ("params", "point", "grid", "args"):
        raw = getattr(args, key, None)
        if raw is None:
            continue
        try:
            val = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--{key} is not valid JSON: {exc}") from exc
        if key == "params":
            cfg["parameters"] = val
        elif key == "point":
            cfg["points"] = [val]
        elif key == "args":
            cfg["args"] = val if isinstance(val, list) else [val]
        else:
            cfg[key] = val
    try:
        jsonschema.validate(cfg, load_schema("config.schema.json"))
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    return cfg


# -------------------------------------------------------------------- eval

def _parameters(cfg):
    from .params import Parameters
    if "parameters" not in cfg:
        raise ConfigError("'parameters' is required for this function")
    pr = cfg["parameters"]
    try:
        return Parameters(to_complex(pr["alpha1"]), to_complex(pr["alpha2"]), to_complex(pr["gamma"]),
                          pr["a"], pr["b"])
    except (ValueError, IHGError) as exc:
        raise ConfigError(f"bad parameters: {exc}") from exc


def _d_string(x) -> str | None:
    from .atlas import classify_d
    try:
        return str(classify_d(x))
    except IHGError:
        return None


def cmd_eval(cfg) -> list[dict]:
    from .atlas import EvaluationPoint
    fn = cfg.get("function")
    if fn is None:
        raise ConfigError("'function' is required for eval")
    tol = cfg.get("tol", 1e-13)
    rows = []
    if fn in ("phi", "f_series", "tilde_f"):
        p = _parameters(cfg)
        if not cfg.get("points"):
            raise ConfigError("'points' is required")
        from .quadrature import phi_integral
        from .series import f_series, tilde_f
        for pt in cfg["points"]:
            try:
                x = EvaluationPoint(*(to_complex(v) for v in pt))
                region = cfg.get("region")
                if fn == "phi":
                    val, bound, method = phi_integral(p, x, tol=tol, anchor=region or "D22_21"), tol, "quadrature"
                    region = region or "D22_21"
                elif fn == "f_series":
                    region = region or "D12_11"
                    res = f_series(region, p, x, tol=tol)
                    val, bound, method = res.value, res.tail_bound, "series"
                else:
                    res = tilde_f(p, x, tol=tol)
                    val, bound, method, region = res.value, res.tail_bound, "series", None
            except (IHGError, ValueError, ZeroDivisionError) as exc:
                raise EvalError(f"evaluation failed at point {pt}: {exc}") from exc
            rows.append({"function": fn, "method": method, "point": [from_complex(v) for v in x.as_tuple()],
                         "value": from_complex(val), "bound": bound, "region": region,
                         "d": _d_string(x)})
        return rows
    arglist = cfg.get("args")
    if not arglist:
        raise ConfigError(f"'args' is required for {fn}")
    for a in arglist:
        try:
            rows.append(_eval_special(fn, a, tol))
        except (IHGError, ValueError, ZeroDivisionError) as exc:
            raise EvalError(f"evaluation failed at {a}: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad args {a}: {exc}") from exc
    return rows


def _eval_special(fn: str, a: dict, tol: float) -> dict:
    from .applications import BetaArgs, EllipticArgs, incomplete_beta, incomplete_elliptic_F
    from .series import appell_f1, gauss_2f1
    c = lambda k: to_complex(a[k])
    bound = None
    if fn == "f1":
        res = appell_f1(c("aa"), c("b1"), c("b2"), c("cc"), c("u"), c("v"), tol=tol)
        val, bound, method = res.value, res.tail_bound, "series"
    elif fn == "2f1":
        res = gauss_2f1(c("aa"), c("bb"), c("cc"), c("z"), tol=tol)
        val, bound, method = res.value, res.tail_bound, "series"
    elif fn == "beta":
        val = incomplete_beta(BetaArgs(c("alpha"), c("beta"), float(a["y"])), tol)
        method = "beta"
    else:
        val = incomplete_elliptic_F(EllipticArgs(float(a["z"]), float(a["k"])))
        method = "appell-f1"
    return {"function": fn, "method": method, "point": None, "args": a,
            "value": from_complex(val), "bound": bound, "region": None, "d": None}


# ------------------------------------------------------------------ verify

def cmd_verify(cfg) -> tuple[dict, bool]:
    from .suites import run_suite
    suite = cfg.get("suite", "all")
    seed = cfg.get("seed", 0)
    kw = {"slow": True} if cfg.get("slow") else {}
    try:
        records = run_suite(suite, seed=seed, **kw)
    except (IHGError, ValueError) as exc:
        raise EvalError(f"suite {suite} failed to run: {exc}") from exc
    if "tol" in cfg:
        for r in records:
            r["tol"] = cfg["tol"]
            r["ok"] = bool(r["residual"] <= cfg["tol"])
    records = sorted(records, key=lambda r: (r["suite"], r["check"]))
    passed = all(r["ok"] for r in records)
    return {"suite": suite, "seed": seed, "passed": passed, "checks": len(records),
            "records": records}, passed


# ------------------------------------------------------------------- table

def _grid_axis(spec) -> np.ndarray:
    lo, hi, n = spec
    return np.linspace(lo, hi, int(n)) if n else np.array([])


def cmd_table(cfg) -> tuple[list[str], list[list]]:
    from .applications import BetaArgs, EllipticArgs, incomplete_beta, incomplete_elliptic_F
    kind = cfg.get("kind", "elliptic")
    grid = cfg.get("grid", {})
    rows = []
    try:
        if kind == "elliptic":
            header = ["z", "k", "F"]
            zs = _grid_axis(grid.get("z", [0.1, 0.7, 7]))
            ks = _grid_axis(grid.get("k", [0.0, 0.8, 5]))
            for z in zs:
                for k in ks:
                    rows.append([z, k, incomplete_elliptic_F(EllipticArgs(float(z), float(k)))])
        else:
            header = ["alpha", "beta", "y", "B"]
            al = _grid_axis(grid.get("alpha", [0.5, 2.5, 3]))
            be = _grid_axis(grid.get("beta", [0.5, 2.5, 3]))
            ys = _grid_axis(grid.get("y", [0.25, 1.0, 4]))
            for a in al:
                for b in be:
                    for y in ys:
                        rows.append([a, b, y, incomplete_beta(BetaArgs(a, b, float(y))).real])
    except (IHGError, ValueError) as exc:
        raise EvalError(f"table evaluation failed: {exc}") from exc
    return header, rows


# ----------------------------------------------------------------- output

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating, int)):
        return f"{float(v):.15g}"
    if isinstance(v, complex):
        return f"{v.real:.15g}{v.imag:+.15g}j"
    return "" if v is None else str(v)


def render(command: str, result, fmt: str) -> str:
    if command == "table":
        header, rows = result
        if fmt == "json":
            return json.dumps([dict(zip(header, map(float, r))) for r in rows], indent=2) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    if command == "verify":
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["suite", "check", "residual", "tol", "ok"])
            for r in result["records"]:
                w.writerow([r["suite"], r["check"], _fmt(r["residual"]), _fmt(r["tol"]), r["ok"]])
            return buf.getvalue()
        return json.dumps(_clean(result), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["function", "method", "re", "im", "bound", "region", "d"])
        for r in result:
            w.writerow([r["function"], r["method"], _fmt(r["value"][0]), _fmt(r["value"][1]),
                        _fmt(r["bound"]), r["region"] or "", r["d"] or ""])
        return buf.getvalue()
    return json.dumps(_clean(result), indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ihg", description="Incomplete hypergeometric integrals.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON job file; flags override its values")
        p.add_argument("--tol", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--out", help="write output here instead of stdout")

    pe = sub.add_parser("eval", help="evaluate a function at points")
    common(pe)
    pe.add_argument("--function", choices=("phi", "f_series", "tilde_f", "f1", "2f1", "beta", "elliptic"))
    pe.add_argument("--region", choices=("D12_11", "D22_11", "D12_21", "D22_21"))
    pe.add_argument("--params", help='JSON, e.g. {"alpha1":0.3,"alpha2":0,"gamma":0,"a":1,"b":2}')
    pe.add_argument("--point", help="JSON list of four coordinates (numbers or [re, im])")
    pe.add_argument("--args", help="JSON object (or list) of arguments for f1, 2f1, beta, elliptic")

    pv = sub.add_parser("verify", help="run a verification suite")
    common(pv)
    pv.add_argument("suite", nargs="?", choices=("oracle", "representations", "system", "contiguity",
                                                 "connection", "monodromy", "branch", "applications",
                                                 "all"))
    pv.add_argument("--slow", action="store_true", help="include the path-continuation check")

    pt = sub.add_parser("table", help="tabulate F(z;k) or B(alpha,beta;y) on a grid")
    common(pt)
    pt.add_argument("kind", nargs="?", choices=("elliptic", "beta"))
    pt.add_argument("--grid", help='JSON, e.g. {"z":[0.1,0.7,7],"k":[0,0.8,5]}')
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = read_config(args)
        fmt = cfg.get("format", "csv" if args.command == "table" else "json")
        code = 0
        if args.command == "eval":
            result = cmd_eval(cfg)
        elif args.command == "verify":
            result, passed = cmd_verify(cfg)
            if not passed:
                code = EXIT_VERIFY_FAILED
                worst = max(result["records"],
                            key=lambda r: (not r["ok"], r["residual"] / r["tol"] if r["tol"] else math.inf))
                print(f"FAILED: {worst['check']} residual {worst['residual']:.3e} > tol {worst['tol']:.1e}",
                      file=sys.stderr)
        else:
            result = cmd_table(cfg)
        text = render(args.command, result, fmt)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvalError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
