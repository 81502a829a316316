"""Command-line interface: density, reduce, gauss, oracle and verify jobs.

All input and output is JSON.  Rationals are serialized as "a/b" strings,
closed values as their eight coordinates.  Exit code 1 signals a
computational error (the report carries the error name), exit code 2 a
schema error; identical jobs produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .density import DensityResult, beta
from .errors import PadicDensityError
from .exact import ExpSum, PhasedValue
from .fields import FieldSpec
from .gauss import (anisotropic_exp_integral, dyadic_residue_gauss_sum,
                    gauss_sign, hyperbolic_exp_integral, residue_gauss_sum,
                    square_exp_integral, twisted_unit_integral,
                    unit_shell_integral)
from .oracle import DEFAULT_BUDGET, count_density, stabilized_density
from .padics import PadicApprox
from .quadratic import (QuadraticPolynomial, reduce_dyadic, reduce_nondyadic,
                        select_rho)
from .residue import teichmuller_lift


class SchemaError(Exception):
    pass


def _parse_field(data) -> FieldSpec:
    try:
        return FieldSpec.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad field spec: {exc}") from exc


def _parse_coeff(spec: FieldSpec, data, prec: int) -> PadicApprox:
    if isinstance(data, int):
        return PadicApprox.from_rational(spec, data, prec)
    if isinstance(data, str):
        try:
            return PadicApprox.from_rational(spec, Fraction(data), prec)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational {data!r}") from exc
    if isinstance(data, dict):
        val = data.get("val")
        if val == "inf":
            return PadicApprox.zero(spec)
        unit = data.get("unit")
        if not isinstance(val, int) or not isinstance(unit, list) or not unit:
            raise SchemaError(f"bad coefficient {data!r}")
        coords = list(unit) + [0] * (spec.f - len(unit))
        return PadicApprox.from_exact_coords(spec, coords[:spec.f], prec,
                                             shift=val)
    raise SchemaError(f"bad coefficient {data!r}")


def _parse_poly(data, prec: int, field_override=None) -> QuadraticPolynomial:
    if not isinstance(data, dict):
        raise SchemaError("polynomial must be a JSON object")
    if field_override is not None:
        spec = _parse_field(_load(field_override))
    else:
        spec = _parse_field(data.get("field", {}))
    try:
        r = int(data["r"])
        quad = {(int(i), int(j)): _parse_coeff(spec, c, prec)
                for i, j, c in data.get("quad", [])}
        lin_raw = data.get("lin", [0] * r)
        lin = tuple(_parse_coeff(spec, c, prec) for c in lin_raw)
        const = _parse_coeff(spec, data.get("const", 0), prec)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad polynomial: {exc}") from exc
    if len(lin) != r or any(i < 0 or j >= r for (i, j) in quad):
        raise SchemaError("polynomial indices out of range")
    try:
        return QuadraticPolynomial(spec, r, quad, lin, const)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _value_report(value) -> dict:
    if isinstance(value, PhasedValue):
        out = _value_report(value.value)
        if not value.phase.is_zero:
            out["phase"] = [value.phase.numerator, value.phase.log_den]
        num = value.numeric()
        out["numeric"] = [num.real, num.imag]
        return out
    if isinstance(value, ExpSum):
        num = value.numeric()
        return {"sum": value.to_json(), "numeric": [num.real, num.imag]}
    num = value.numeric()
    return {"coords": value.to_json(), "numeric": [num.real, num.imag]}


def _density_report(res: DensityResult, trace: bool) -> dict:
    out = {"beta": _frac_str(res.value), "tail": res.tail.to_json()}
    if trace:
        out["terms"] = [t.to_json() for t in res.terms]
        out["precision"] = res.precision_used
    return out


def run_density(args) -> dict:
    poly = _parse_poly(_load(args.poly), args.precision, args.field)
    n = _parse_coeff(poly.spec, args.n, args.precision)
    res = beta(poly, n, mode=args.mode, assume_n_zero=args.assume_n_zero)
    return _density_report(res, args.trace)


def run_reduce(args) -> dict:
    poly = _parse_poly(_load(args.poly), args.precision, args.field)

    def coeff(c):
        if c.is_exact_zero:
            return {"val": "inf", "unit": []}
        return {"val": c.valuation, "unit": list(c.unit.coords)}

    if poly.spec.p == 2:
        red = reduce_dyadic(poly)
        report = {"kind": "dyadic",
                  "squares": [[coeff(b), coeff(c)] for b, c in red.squares],
                  "hyperbolic": [[coeff(b), coeff(c1), coeff(c2)]
                                 for b, c1, c2 in red.hyperbolic],
                  "anisotropic": [[coeff(b), coeff(c1), coeff(c2)]
                                  for b, c1, c2 in red.aniso],
                  "rho": coeff(red.rho)}
    else:
        red = reduce_nondyadic(poly)
        report = {"kind": "diagonal",
                  "terms": [[coeff(b), coeff(c)] for b, c in red.terms]}
    report["transform"] = red.transform.to_json()
    report["const"] = coeff(red.const)
    return report


def run_gauss(args) -> dict:
    params = _load(args.params)
    if not isinstance(params, dict) or "op" not in params:
        raise SchemaError("gauss parameters need an 'op' name")
    spec = _parse_field(params.get("field", {}))
    prec = args.precision

    def cf(name, default=None):
        if name not in params:
            if default is not None:
                return default
            raise SchemaError(f"missing parameter {name!r}")
        return _parse_coeff(spec, params[name], prec)

    op = params["op"]
    zero = PadicApprox.zero(spec)
    if op == "gauss_sum":
        sigma = cf("sigma").residue_mod(1)
        value = residue_gauss_sum(sigma)
    elif op == "gauss_sign":
        value = gauss_sign(spec)
    elif op == "square_integral":
        value = square_exp_integral(cf("sigma"), cf("tau", zero))
    elif op == "twisted_unit_integral":
        value = twisted_unit_integral(cf("sigma"))
    elif op == "hyperbolic_integral":
        value = hyperbolic_exp_integral(cf("sigma"), cf("tau1", zero),
                                        cf("tau2", zero))
    elif op == "anisotropic_integral":
        rho = params.get("rho")
        rho = _parse_coeff(spec, rho, prec) if rho is not None \
            else select_rho(spec, prec)
        value = anisotropic_exp_integral(cf("sigma"), cf("tau1", zero),
                                         cf("tau2", zero), rho)
    elif op == "unit_shell_integral":
        a_res = cf("a").residue_mod(1)
        a = teichmuller_lift(a_res, max(4, prec))
        value = unit_shell_integral(a, cf("alpha", zero), cf("m", zero),
                                    int(params.get("ell", 0)))
    elif op == "dyadic_residue_sum":
        value = dyadic_residue_gauss_sum(cf("sigma").residue_mod(2),
                                         cf("tau", zero).residue_mod(2))
    else:
        raise SchemaError(f"unknown gauss op {op!r}")
    return {"op": op, "value": _value_report(value)}


def run_oracle(args) -> dict:
    poly = _parse_poly(_load(args.poly), args.precision, args.field)
    n = _parse_coeff(poly.spec, args.n, args.precision)
    budget = args.budget
    if args.k_max:
        res = stabilized_density(poly, n, args.k_max, budget=budget)
    else:
        if not args.k:
            raise SchemaError("oracle needs --k or --k-max")
        res = count_density(poly, n, args.k, budget=budget)
    return {"k": res.k, "count": res.count,
            "density": _frac_str(res.density), "stabilized": res.stabilized}


def run_verify(args) -> dict:
    grid = _load(args.grid)
    if not isinstance(grid, dict) or "instances" not in grid:
        raise SchemaError("verify grid needs an 'instances' list")
    rows = []
    failures = 0
    for idx, inst in enumerate(grid["instances"]):
        poly = _parse_poly(inst["poly"], args.precision)
        n = _parse_coeff(poly.spec, inst.get("n", 0), args.precision)
        k_max = int(inst.get("k_max", 5))
        row = {"instance": idx}
        try:
            res = beta(poly, n, mode=inst.get("mode", "both"),
                       assume_n_zero=bool(inst.get("assume_n_zero", False)))
            row["beta"] = _frac_str(res.value)
            closed_ok = True
        except PadicDensityError as exc:
            row["beta"] = type(exc).__name__
            closed_ok = False
        orc = stabilized_density(poly, n, k_max, budget=args.budget)
        row["oracle"] = _frac_str(orc.density)
        row["stabilized"] = orc.stabilized
        ok = (closed_ok and orc.stabilized and row["beta"] == row["oracle"]) \
            or (not closed_ok and not orc.stabilized)
        row["pass"] = ok
        failures += 0 if ok else 1
        rows.append(row)
    return {"instances": rows, "failures": failures}


def _load(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padic-density",
        description="Exact local densities of quadratic polynomials over "
                    "unramified p-adic fields.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, poly=True):
        p.add_argument("--precision", type=int, default=12,
                       help="relative working precision for parsed rationals")
        p.add_argument("--budget", type=int,
                       default=int(os.environ.get("PADIC_DENSITY_BUDGET",
                                                  DEFAULT_BUDGET)))
        if poly:
            p.add_argument("--poly", required=True, help="polynomial JSON file")
            p.add_argument("--field", default=None,
                           help="field JSON file overriding the polynomial's")

    p = sub.add_parser("density", help="closed-form local density")
    common(p)
    p.add_argument("--n", required=True, help="target value (rational)")
    p.add_argument("--mode", choices=["case_table", "lemma_sum", "both"],
                   default="both")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--assume-n-zero", dest="assume_n_zero",
                   action="store_true")
    p.set_defaults(func=run_density)

    p = sub.add_parser("reduce", help="block reduction and transform")
    common(p)
    p.set_defaults(func=run_reduce)

    p = sub.add_parser("gauss", help="evaluate a Gauss sum or integral")
    common(p, poly=False)
    p.add_argument("--params", required=True, help="JSON parameter file")
    p.set_defaults(func=run_gauss)

    p = sub.add_parser("oracle", help="brute-force counting")
    common(p)
    p.add_argument("--n", required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--k-max", dest="k_max", type=int, default=0)
    p.set_defaults(func=run_oracle)

    p = sub.add_parser("verify", help="closed form vs oracle on a grid")
    common(p, poly=False)
    p.add_argument("--grid", required=True, help="instance grid JSON file")
    p.set_defaults(func=run_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except SchemaError as exc:
        print(json.dumps({"error": "SchemaError", "message": str(exc)},
                         sort_keys=True))
        return 2
    except PadicDensityError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True))
        return 1
    print(json.dumps(report, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
