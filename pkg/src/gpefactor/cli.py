"""Command-line interface.

Exit codes: 0 success, 1 property or feasibility failure, 2 input error,
3 pole or numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, factorization, interp, slicefun
from .errors import (
    GPEError,
    InfeasibleError,
    InputError,
    NotEvenError,
    NotGPEError,
    NumericalError,
    PoleError,
)
from .io import (
    dump_realization,
    dumps,
    format_matrix,
    load_realization,
    parse_point,
    realization_to_dict,
)
from .quat import QuatMatrix, Quaternion
from .realization import (
    QUATERNION,
    evaluate,
    evaluate_slice,
    from_polynomial,
    lift,
    minimality_report,
)

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def _emit(obj):
    print(dumps(obj, default=_json_default))


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o)}")


def cmd_eval(args):
    R = load_realization(args.realization)
    p = parse_point(args.point)
    if R.field == QUATERNION:
        value = evaluate_slice(R, p)
    else:
        if p.y or p.z:
            raise InputError("a complex realization needs a point of the form a+bi")
        value = evaluate(R, complex(p.w, p.x))
    print(format_matrix(value))
    return EXIT_OK


def cmd_factor(args):
    R = load_realization(args.realization)
    if R.field == QUATERNION:
        res = slicefun.quat_gpe_factor(R, args.side)
    elif R.N == 0 and R.poly:
        if R.n_out != 1 or R.n_in != 1:
            raise InputError("only scalar polynomials are factored without a realization")
        coeffs = [c[0, 0] for c in R.coefficients()]
        L = factorization.factor_scalar_polynomial(coeffs, args.side)
        Lr = from_polynomial([np.array([[c]]) for c in L])
        report = {"side": args.side, "route": "scalar-polynomial", "factor_coefficients": [[c.real, c.imag] for c in L]}
        _write_factor(Lr, args.out)
        _emit(report)
        return EXIT_OK
    elif args.regularize:
        res = factorization.factor_regularized(R, args.side)
    else:
        res = factorization.pseudo_spectral_factor(R, args.side)
    _write_factor(res.L, args.out)
    _emit(res.to_dict())
    return EXIT_OK


def _write_factor(L, out):
    if out:
        dump_realization(L, out)
    else:
        _emit({"factor": realization_to_dict(L)})


def cmd_negsq(args):
    if args.grid < 1:
        raise InputError("grid size must be a positive integer")
    R = load_realization(args.realization)
    kernel = "quat_carat" if R.field == QUATERNION else args.kernel
    rep = analysis.negative_squares(kernel, R, n_points=args.grid)
    _emit(rep.to_dict())
    return EXIT_OK


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _complex_list(data, name):
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} must hold [re, im] pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InputError(f"{name} must hold [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def cmd_interp(args):
    spec = _load_json(args.spec)
    if not isinstance(spec, dict) or "type" not in spec:
        raise InputError("interpolation spec needs a 'type' field")
    kind = spec["type"]
    side = spec.get("side")
    try:
        if kind == "even_polynomial":
            nodes = _complex_list(spec["nodes"], "nodes")
            values = _complex_list(spec["values"], "values")
            res = interp.even_polynomial_interpolate(list(nodes), list(values), side or "left")
            out = {
                "type": kind,
                "coefficients": [[c.real, c.imag] for c in res.coeffs],
                "beta": res.beta,
                "phi": [[c.real, c.imag] for c in res.phi],
                "factor": [[c.real, c.imag] for c in res.factor],
            }
        elif kind == "directional":
            nodes = _complex_list(spec["nodes"], "nodes")
            xis = _complex_list(spec["xi"], "xi")
            etas = _complex_list(spec["eta"], "eta")
            res = interp.gpe_interpolate(list(nodes), list(xis), list(etas), side or "right")
            out = {
                "type": kind,
                "phi": realization_to_dict(res.Phi),
                "factor": realization_to_dict(res.L),
                "residuals": res.residuals,
            }
        elif kind == "quaternion":
            nodes = [Quaternion.coerce(p) for p in spec["nodes"]]
            values = []
            for v in spec["values"]:
                arr = np.array(v, dtype=float)
                if arr.ndim == 1:
                    arr = arr[None, None, :]
                if arr.ndim != 3 or arr.shape[-1] != 4:
                    raise InputError("quaternion values must be matrices of [w, x, y, z] entries")
                values.append(QuatMatrix.from_components(*np.moveaxis(arr, -1, 0)))
            Phi = interp.quat_gpe_interpolate(nodes, values)
            out = {"type": kind, "phi": realization_to_dict(Phi)}
        else:
            raise InputError(f"unknown interpolation type {kind!r}")
    except KeyError as exc:
        raise InputError(f"interpolation spec is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, GPEError):
            raise
        raise InputError(f"malformed interpolation spec: {exc}") from exc
    text = dumps(out, default=_json_default)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_check(args):
    R = load_realization(args.realization)
    prop = args.property
    detail = {}
    if prop == "even":
        ok = analysis.is_even(R)
    elif prop == "minimal":
        rep = minimality_report(R)
        ok = rep.minimal
        detail = {"controllable": rep.controllable, "observable": rep.observable}
    else:
        ok = analysis.is_even(R)
        if ok:
            br = analysis.boundary_positivity(lift(R) if R.field == QUATERNION else R)
            detail = {"min_eig": br.min_eig}
            ok = br.worst_relative >= -1e-7
    _emit({"property": prop, "holds": bool(ok), **detail})
    return EXIT_OK if ok else EXIT_PROPERTY


def build_parser():
    p = argparse.ArgumentParser(prog="gpefactor", description="Realizations and spectral factors of GPE functions.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a realization at a point")
    e.add_argument("--realization", required=True)
    e.add_argument("--point", required=True)
    e.set_defaults(func=cmd_eval)

    f = sub.add_parser("factor", help="pseudo-spectral factorization")
    f.add_argument("--realization", required=True)
    f.add_argument("--side", choices=("left", "right"), default="right")
    f.add_argument("--regularize", action="store_true")
    f.add_argument("--out")
    f.set_defaults(func=cmd_factor)

    n = sub.add_parser("negsq", help="estimate the number of negative squares")
    n.add_argument("--realization", required=True)
    n.add_argument("--grid", type=int, default=30)
    n.add_argument("--kernel", choices=("carat", "schur"), default="carat")
    n.set_defaults(func=cmd_negsq)

    i = sub.add_parser("interp", help="solve an interpolation problem")
    i.add_argument("--spec", required=True)
    i.add_argument("--out")
    i.set_defaults(func=cmd_interp)

    c = sub.add_parser("check", help="test a property of a realization")
    c.add_argument("--realization", required=True)
    c.add_argument("--property", choices=("even", "gpe", "minimal"), required=True)
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotGPEError, NotEvenError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except PoleError as exc:
        print(f"pole: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
