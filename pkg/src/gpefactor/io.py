"""JSON encodings of realizations, points and matrices.

Complex entries are ``[re, im]`` pairs and quaternion entries are
``[w, x, y, z]`` quadruples; matrices are row-major nested lists.
"""

from __future__ import annotations

import json
import re

import numpy as np

from .errors import InputError
from .quat import QuatMatrix, Quaternion, format_quaternion
from .realization import COMPLEX, QUATERNION, Realization

__all__ = [
    "dump_realization",
    "dumps",
    "dumps_realization",
    "format_matrix",
    "load_realization",
    "parse_point",
    "realization_from_dict",
    "realization_to_dict",
]


def _enc_complex_matrix(M):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(M)]


def _enc_quat_matrix(M):
    return [[list(map(float, q.as_tuple())) for q in row] for row in M.entries()]


def realization_to_dict(R):
    enc = _enc_quat_matrix if R.field == QUATERNION else _enc_complex_matrix
    out = {
        "field": R.field,
        "n_out": R.n_out,
        "n_in": R.n_in,
        "state_dim": R.N,
        "A": enc(R.A),
        "B": enc(R.B),
        "C": enc(R.C),
        "D": enc(R.D),
    }
    if R.poly:
        out["poly"] = [enc(P) for P in R.poly]
    return out


def _dec_matrix(data, rows, cols, fld, name):
    width = 4 if fld == QUATERNION else 2
    if rows == 0 or cols == 0:
        if data not in ([], None) and not all(r == [] for r in data):
            raise InputError(f"{name} should be empty")
        return QuatMatrix.zeros(rows, cols) if fld == QUATERNION else np.zeros((rows, cols), complex)
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} is not a numeric nested array") from exc
    if arr.shape != (rows, cols, width):
        raise InputError(f"{name} has shape {arr.shape}, expected {(rows, cols, width)}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    if fld == QUATERNION:
        return QuatMatrix.from_components(arr[..., 0], arr[..., 1], arr[..., 2], arr[..., 3])
    return arr[..., 0] + 1j * arr[..., 1]


def realization_from_dict(d):
    if not isinstance(d, dict):
        raise InputError("realization file must hold a JSON object")
    fld = d.get("field", COMPLEX)
    if fld not in (COMPLEX, QUATERNION):
        raise InputError(f"unknown field {fld!r}")
    try:
        n_out, n_in, N = int(d["n_out"]), int(d["n_in"]), int(d["state_dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"missing or invalid dimension field: {exc}") from exc
    if min(n_out, n_in, N) < 0 or n_out == 0 or n_in == 0:
        raise InputError("dimensions must be positive (state_dim may be zero)")
    try:
        A = _dec_matrix(d.get("A", []), N, N, fld, "A")
        B = _dec_matrix(d.get("B", []), N, n_in, fld, "B")
        C = _dec_matrix(d.get("C", []), n_out, N, fld, "C")
        D = _dec_matrix(d["D"], n_out, n_in, fld, "D")
    except KeyError as exc:
        raise InputError("missing matrix D") from exc
    poly = tuple(_dec_matrix(P, n_out, n_in, fld, f"poly[{k}]") for k, P in enumerate(d.get("poly", [])))
    if N == 0:
        A = QuatMatrix.zeros(0, 0) if fld == QUATERNION else np.zeros((0, 0))
        return Realization(A, None, None, D, poly, fld)
    return Realization(A, B, C, D, poly, fld)


def load_realization(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return realization_from_dict(data)


def _depth(o):
    if isinstance(o, (list, tuple)):
        return 1 + max((_depth(x) for x in o), default=0)
    return -1 if isinstance(o, dict) else 0


def _format(o, indent, default):
    pad = " " * (indent + 2)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = (f"{pad}{json.dumps(str(k))}: {_format(v, indent + 2, default)}" for k, v in o.items())
        return "{\n" + ",\n".join(items) + "\n" + " " * indent + "}"
    if isinstance(o, (list, tuple)) and o and (_depth(o) > 2 or any(isinstance(x, dict) for x in o)):
        items = (pad + _format(x, indent + 2, default) for x in o)
        return "[\n" + ",\n".join(items) + "\n" + " " * indent + "]"
    return json.dumps(o, default=default)


def dumps(obj, default=None):
    """JSON text with nested arrays kept readable: one matrix row per line."""
    return _format(obj, 0, default)


def dumps_realization(R):
    return dumps(realization_to_dict(R))


def dump_realization(R, path=None):
    text = dumps_realization(R)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


_TERM = re.compile(r"([+-])?((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?([ijk])?")


def parse_point(text):
    """Parse ``"a+bi"`` or ``"a+bi+cj+dk"`` (spaces allowed) into a Quaternion."""
    s = re.sub(r"\s+", "", str(text))
    if not s:
        raise InputError("empty point")
    comps = {"": 0.0, "i": 0.0, "j": 0.0, "k": 0.0}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise InputError(f"cannot parse point {text!r} at position {pos}")
        if pos > 0 and m.group(1) is None:
            raise InputError(f"missing sign before term in {text!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        mag = float(m.group(2)) if m.group(2) is not None else 1.0
        comps[m.group(3) or ""] += sign * mag
        pos = m.end()
    return Quaternion(comps[""], comps["i"], comps["j"], comps["k"])


def format_complex(z, digits=12):
    return format_quaternion(Quaternion(float(np.real(z)), float(np.imag(z))), digits)


def format_matrix(M, digits=12):
    """Row-major text such as ``[[1+k, i+j], [-i-j, 1+k]]``."""
    if isinstance(M, QuatMatrix):
        rows = [[format_quaternion(q, digits) for q in r] for r in M.entries()]
    else:
        rows = [[format_complex(v, digits) for v in r] for r in np.asarray(M)]
    return "[" + ", ".join("[" + ", ".join(r) + "]" for r in rows) + "]"
