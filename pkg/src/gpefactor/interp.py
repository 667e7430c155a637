"""Interpolation by generalized positive even functions.

Complex directional problems ``L^#(w) L(w) xi = eta``, the scalar
even-polynomial construction with a positivity shift, and the quaternionic
full-value problem built from star-products of Lagrange polynomials.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InfeasibleError, InputError, NumericalError
from .factorization import factor_scalar_polynomial, pseudo_spectral_factor
from .linalg import UnsolvableReport, psd_sqrt, solve_sylvester
from .quat import QuatMatrix, Quaternion
from .realization import Realization, evaluate, from_fraction, from_polynomial, product, sharp
from .slicefun import SlicePolynomial, star_product

__all__ = [
    "EvenInterpolation",
    "GPEInterpolation",
    "LagrangeResult",
    "even_polynomial_interpolate",
    "gpe_interpolate",
    "lagrange_matrix_polynomial",
    "left_mult_matrix",
    "positive_matrix_for",
    "quat_gpe_interpolate",
    "right_mult_matrix",
]


def _col(v, name):
    v = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    return v


def positive_matrix_for(xi, eta, tol=1e-12):
    """A positive semidefinite ``A`` with ``A xi = eta``.

    ``eta = 0`` gives ``I - xi xi* / (xi* xi)``; ``xi* eta > 0`` gives
    ``eta eta* / (eta* xi)``. Any other data is infeasible since
    ``xi* A xi = xi* eta`` must be nonnegative.
    """
    xi, eta = _col(xi, "xi"), _col(eta, "eta")
    if xi.shape != eta.shape:
        raise InputError("xi and eta must have the same length")
    nx = np.vdot(xi, xi).real
    if nx == 0:
        raise InputError("xi must be nonzero")
    scale = max(1.0, np.linalg.norm(eta)) * np.sqrt(nx)
    if np.linalg.norm(eta) <= tol * scale:
        return np.eye(xi.size, dtype=complex) - np.outer(xi, xi.conj()) / nx
    s = np.vdot(xi, eta)
    if abs(s.imag) > 1e-10 * scale or s.real <= tol * scale:
        raise InfeasibleError(f"no positive matrix maps xi to eta: xi* eta = {s:.6g}")
    return np.outer(eta, eta.conj()) / s.real


def _directional_polynomial(n, rows, tol=1e-9, max_extra=2):
    """Least-norm ``n x n`` polynomial of minimal degree meeting linear constraints.

    ``rows`` holds ``(w, xi, v)`` meaning ``P(w) xi = v``; ``xi=None`` means
    the full value ``P(w) = v``.
    """
    count = sum(n if xi is not None else n * n for _, xi, _ in rows)
    max_deg = max(0, -(-count // n) - 1) + max_extra
    for deg in range(0, max_deg + 1):
        eqs, rhs = [], []
        # unknown vector: coefficients P_k stacked, each vectorized row-major
        for w, xi, v in rows:
            powers = np.array([w**k for k in range(deg + 1)], dtype=complex)
            if xi is None:
                for a in range(n):
                    for b in range(n):
                        e = np.zeros((deg + 1, n, n), dtype=complex)
                        e[:, a, b] = powers
                        eqs.append(e.ravel())
                        rhs.append(v[a, b])
            else:
                for a in range(n):
                    e = np.zeros((deg + 1, n, n), dtype=complex)
                    e[:, a, :] = powers[:, None] * xi[None, :]
                    eqs.append(e.ravel())
                    rhs.append(v[a])
        K = np.array(eqs)
        r = np.array(rhs)
        x, *_ = np.linalg.lstsq(K, r, rcond=None)
        if np.linalg.norm(K @ x - r) <= tol * max(1.0, np.linalg.norm(r)):
            return [c for c in x.reshape(deg + 1, n, n)]
    raise InfeasibleError("interpolation constraints are inconsistent")


class GPEInterpolation(NamedTuple):
    L: Realization
    Phi: Realization
    residuals: list


def _axis(w, tol=1e-12):
    return abs(w.real) <= tol * max(1.0, abs(w))


def _poly_adj(coeffs):
    return [((-1) ** k) * c.conj().T for k, c in enumerate(coeffs)]


def _poly_mul(a, b):
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = x @ y if out[i + j] is None else out[i + j] + x @ y
    return out


def _poly_add(a, b):
    m = max(len(a), len(b))
    z = np.zeros_like(a[0])
    return [(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(m)]


def _trim(coeffs, tol=1e-13):
    scale = max(1.0, max(np.abs(c).max() for c in coeffs))
    while len(coeffs) > 1 and np.abs(coeffs[-1]).max() <= tol * scale:
        coeffs = coeffs[:-1]
    return coeffs


def _factor_matrix_polynomial(coeffs, side):
    """``L`` with ``L^# L = sum z^k coeffs[k]`` through a proper quotient."""
    deg = len(coeffs) - 1
    if deg == 0:
        D = coeffs[0]
        return [psd_sqrt(D)]
    if deg % 2:
        raise NumericalError("even polynomial of odd degree")
    d = deg // 2
    cs = 1.0 + 0.5 * np.arange(1, d + 1)
    den = np.array([1.0 + 0j])
    q = np.array([1.0 + 0j])
    for c in cs:
        den = np.convolve(den, [c * c, 0.0, -1.0])
        q = np.convolve(q, [c, 1.0] if side == "right" else [-c, 1.0])
    Psi = from_fraction(coeffs, den)
    M = pseudo_spectral_factor(Psi, side).L
    K = 2 * deg + 8
    roots = np.exp(2j * np.pi * np.arange(K) / K)
    vals = np.array([np.polyval(q[::-1], z) * evaluate(M, z) for z in roots])
    F = np.fft.fft(vals, axis=0) / K
    return _refine_factor([F[k] for k in range(d + 1)], coeffs)


def _sharp_product_error(Lc, coeffs):
    back = _poly_mul(_poly_adj(Lc), Lc)
    return [a - b for a, b in zip(_poly_add(coeffs, [0 * back[0]]), _poly_add(back, [0 * coeffs[0]]))]


def _refine_factor(Lc, coeffs, steps=4):
    """Newton steps on ``L^# L = Phi`` solved in the least-squares sense.

    The correction ``dL`` solves ``dL^# L + L^# dL = Phi - L^# L``; the map is
    only real-linear, so it is assembled column by column on real unknowns.
    """
    n = Lc[0].shape[0]
    m = len(Lc)
    nunk = 2 * m * n * n

    def unpack(x):
        z = x[: nunk // 2] + 1j * x[nunk // 2 :]
        return list(z.reshape(m, n, n))

    err = _sharp_product_error(Lc, coeffs)
    size = len(err)

    def flat(mats):
        mats = list(mats) + [np.zeros((n, n), complex)] * (size - len(mats))
        v = np.concatenate([M.ravel() for M in mats])
        return np.concatenate([v.real, v.imag])

    best = max(np.abs(e).max() for e in err)
    for _ in range(steps):
        if best == 0.0:
            break
        cols = []
        for j in range(nunk):
            e = np.zeros(nunk)
            e[j] = 1.0
            dL = unpack(e)
            lin = _poly_add(_poly_mul(_poly_adj(dL), Lc), _poly_mul(_poly_adj(Lc), dL))
            cols.append(flat(lin))
        x, *_ = np.linalg.lstsq(np.array(cols).T, flat(err), rcond=None)
        trial = [a + b for a, b in zip(Lc, unpack(x))]
        terr = _sharp_product_error(trial, coeffs)
        tbest = max(np.abs(e).max() for e in terr)
        if tbest >= best:
            break
        Lc, err, best = trial, terr, tbest
    return Lc


def gpe_interpolate(nodes, xis, etas, side="right"):
    """Even ``Phi = L^# L`` with ``Phi(w_i) xi_i = eta_i``.

    Returns ``(L, Phi, residuals)`` where ``L`` and ``Phi`` are polynomial
    realizations and ``residuals`` lists ``||L^#(w_i) L(w_i) xi_i - eta_i||``.
    """
    nodes = [complex(w) for w in nodes]
    xis = [_col(x, "xi") for x in xis]
    etas = [_col(e, "eta") for e in etas]
    if not (len(nodes) == len(xis) == len(etas)) or not nodes:
        raise InputError("nodes, xi and eta must be nonempty lists of equal length")
    n = xis[0].size
    if any(x.size != n for x in xis) or any(e.size != n for e in etas):
        raise InputError("all directions must have the same length")
    if any(np.linalg.norm(x) == 0 for x in xis):
        raise InputError("directions must be nonzero")
    for a in range(len(nodes)):
        for b in range(a):
            if abs(nodes[a] - nodes[b]) <= 1e-12 * max(1.0, abs(nodes[a])):
                raise InputError("nodes must be distinct")
    idx_of = {}
    for i, w in enumerate(nodes):
        idx_of[i] = next(
            (j for j, v in enumerate(nodes) if j != i and abs(v + np.conj(w)) <= 1e-12 * max(1.0, abs(w))),
            None,
        )
    done = set()
    Phi = [np.zeros((n, n), complex)]
    for u, w in enumerate(nodes):
        if u in done:
            continue
        others = [(nodes[j], xis[j], np.zeros(n, complex)) for j in range(len(nodes)) if j != u]
        v = idx_of[u]
        if _axis(w):
            Au = positive_matrix_for(xis[u], etas[u])
            rows = others + [(w, None, psd_sqrt(Au))]
        elif v is not None:
            xu, xv, eu, ev = xis[u], xis[v], etas[u], etas[v]
            lhs, rhs = np.vdot(xv, eu), np.vdot(ev, xu)
            if abs(lhs - rhs) > 1e-10 * max(1.0, abs(lhs)):
                raise InfeasibleError(
                    f"symmetric nodes {w} and {nodes[v]} need xi_v* eta_u = eta_v* xi_u ({lhs:.6g} vs {rhs:.6g})"
                )
            nu, nv = np.vdot(xu, xu).real, np.vdot(xv, xv).real
            X = np.outer(eu, xu.conj()) / nu + np.outer(xv, ev.conj()) / nv - np.outer(xv, xu.conj()) * lhs / (nu * nv)
            others = [r for k, r in enumerate(others) if abs(r[0] - nodes[v]) > 0]
            rows = others + [(w, None, X), (nodes[v], None, np.eye(n, dtype=complex))]
            done.add(v)
        else:
            rows = others + [(w, xis[u], etas[u]), (-np.conj(w), None, np.eye(n, dtype=complex))]
        P = _directional_polynomial(n, rows)
        Phi = _poly_add(Phi, _poly_mul(_poly_adj(P), P))
        done.add(u)
    Phi = _trim([(c + 0) for c in Phi])
    if len(Phi) > 1 and np.linalg.svd(Phi[-1], compute_uv=False)[-1] <= 1e-9 * max(1.0, np.abs(Phi[-1]).max()):
        # a term vanishing at every node restores an invertible leading coefficient
        d = (len(Phi) - 1) // 2
        q0 = np.array([1.0 + 0j])
        for w in nodes:
            q0 = np.convolve(q0, [-w, 1.0])
        k = max(0, d - len(nodes))
        for _ in range(k):
            q0 = np.convolve(q0, [1.0, 1.0])
        Q = [c * np.eye(n) for c in q0]
        Phi = _poly_add(Phi, _poly_mul(_poly_adj(Q), Q))
    Phi = _trim(Phi)
    Lc = _factor_matrix_polynomial(Phi, side)
    L = from_polynomial(Lc)
    Phi_R = from_polynomial(Phi)
    Ls = sharp(L)
    residuals = []
    for w, x, e in zip(nodes, xis, etas):
        residuals.append(float(np.linalg.norm(evaluate(Ls, w) @ evaluate(L, w) @ x - e)))
    back = product(Ls, L).coefficients()
    err = max(np.abs(a - b).max() for a, b in zip(_poly_add(back, [0 * Phi[0]]), _poly_add(Phi, [0 * back[0]])))
    if err > 1e-7 * max(1.0, max(np.abs(c).max() for c in Phi)):
        raise NumericalError(f"factor of the interpolant is inaccurate (coefficient error {err:.2e})")
    return GPEInterpolation(L, Phi_R, residuals)


class EvenInterpolation(NamedTuple):
    coeffs: np.ndarray
    beta: float
    factor: np.ndarray
    phi: np.ndarray
    phi0: np.ndarray


def _axis_minimum(c):
    """Minimum over real ``y`` of the real polynomial ``y -> Phi(iy)``."""
    g = np.array([c[k] * (1j) ** k for k in range(c.size)])
    g = np.real_if_close(g, tol=1e6).real if np.abs(g.imag).max(initial=0) <= 1e-9 * max(1.0, np.abs(g).max()) else None
    if g is None:
        return -np.inf
    g = np.trim_zeros(g, "b")
    if g.size == 0:
        return 0.0
    if g.size == 1:
        return float(g[0])
    deg = g.size - 1
    if deg % 2 or g[-1] < 0:
        return -np.inf
    crit = np.roots((np.arange(1, g.size) * g[1:])[::-1])
    ys = [r.real for r in crit if abs(r.imag) <= 1e-7 * max(1.0, abs(r))]
    ys += list(np.linspace(-5.0, 5.0, 201))
    return float(min(np.polyval(g[::-1], y) for y in ys))


def even_polynomial_interpolate(nodes, values, side="left", betas=None):
    """Even polynomial interpolant, shifted by ``beta Phi_0`` until positive on ``iR``.

    The data are first closed under ``w -> -conj(w)``, ``v -> conj(v)``; the
    unique interpolant of degree ``K - 1`` through the ``K`` extended nodes
    is even. ``Phi_0 = q^# q`` with ``q`` vanishing at the nodes in the
    closed right half-plane, so ``Phi_0`` vanishes at every node.
    """
    nodes = [complex(w) for w in nodes]
    values = [complex(v) for v in values]
    if len(nodes) != len(values) or not nodes:
        raise InputError("nodes and values must be nonempty lists of equal length")
    ext_n, ext_v = [], []

    def add(w, v):
        for k, x in enumerate(ext_n):
            if abs(x - w) <= 1e-12 * max(1.0, abs(w)):
                if abs(ext_v[k] - v) > 1e-10 * max(1.0, abs(v)):
                    raise InfeasibleError(f"data are not symmetric at {w}: {ext_v[k]} vs {v}")
                return
        ext_n.append(w)
        ext_v.append(v)

    for w, v in zip(nodes, values):
        add(w, v)
    for w, v in zip(nodes, values):
        add(-np.conj(w), np.conj(v))
    K = len(ext_n)
    V = np.vander(np.array(ext_n), K, increasing=True)
    coeffs = np.linalg.solve(V, np.array(ext_v))
    coeffs = np.where(np.abs(coeffs) <= 1e-13 * max(1.0, np.abs(coeffs).max()), 0, coeffs)
    q = np.array([1.0 + 0j])
    for w in ext_n:
        if w.real >= -1e-12 * max(1.0, abs(w)):
            q = np.convolve(q, [-w, 1.0])
    qs = np.array([(-1) ** k * np.conj(a) for k, a in enumerate(q)])
    phi0 = np.convolve(qs, q)
    if betas is None:
        betas = [0.0] + [2.0**k for k in range(17)]
    for beta in betas:
        m = max(coeffs.size, phi0.size)
        phi = np.zeros(m, complex)
        phi[: coeffs.size] += coeffs
        phi[: phi0.size] += beta * phi0
        phi = np.where(np.abs(phi) <= 1e-13 * max(1.0, np.abs(phi).max()), 0, phi)
        if _axis_minimum(phi) >= -1e-10 * max(1.0, np.abs(phi).max()):
            try:
                factor = factor_scalar_polynomial(phi, side)
            except Exception:
                continue
            return EvenInterpolation(coeffs, float(beta), factor, phi, phi0)
    raise InfeasibleError("no shift up to 2^16 certified positivity on the imaginary axis")


# quaternionic Lagrange interpolation -----------------------------------------


def left_mult_matrix(q):
    """Real 4x4 matrix of ``t -> q t`` on ``(w, x, y, z)`` coordinates."""
    q = Quaternion.coerce(q)
    basis = [Quaternion(*e) for e in np.eye(4)]
    return np.column_stack([(q * e).as_tuple() for e in basis])


def right_mult_matrix(s):
    """Real 4x4 matrix of ``t -> t s``."""
    s = Quaternion.coerce(s)
    basis = [Quaternion(*e) for e in np.eye(4)]
    return np.column_stack([(e * s).as_tuple() for e in basis])


def _same_sphere(a, b, tol=1e-10):
    ya = np.sqrt(a.x**2 + a.y**2 + a.z**2)
    yb = np.sqrt(b.x**2 + b.y**2 + b.z**2)
    return abs(a.w - b.w) <= tol * max(1.0, abs(a)) and abs(ya - yb) <= tol * max(1.0, abs(a))


class LagrangeResult(NamedTuple):
    polynomial: object
    sylvester: dict


def lagrange_matrix_polynomial(constraints, tol=1e-9):
    """Minimal-degree polynomial meeting value and sharp-value constraints.

    Parameters
    ----------
    constraints : list of (point, kind, matrix)
        ``kind`` is ``"value"`` (``T(point) = matrix``) or ``"sharp-value"``
        (``T^#(point) = matrix``). Complex points with complex matrices give
        a list of complex coefficient matrices; quaternion points or
        :class:`QuatMatrix` data give a :class:`SlicePolynomial`.

    Returns
    -------
    LagrangeResult
        The polynomial and, in the quaternionic case, the Sylvester
        solutions ``X_jk`` of ``q_j X - X s_k = C_j - D_k`` for left and
        right nodes on a common sphere.
    """
    if not constraints:
        raise InputError("no constraints")
    quaternionic = any(isinstance(p, Quaternion) or isinstance(M, QuatMatrix) for p, _, M in constraints)
    for _, kind, _ in constraints:
        if kind not in ("value", "sharp-value"):
            raise InputError(f"unknown constraint kind {kind!r}")
    if not quaternionic:
        rows = []
        for p, kind, M in constraints:
            M = np.atleast_2d(np.asarray(M, dtype=complex))
            if kind == "value":
                rows.append((complex(p), M))
            else:
                rows.append((-np.conj(complex(p)), M.conj().T))
        pts = [r[0] for r in rows]
        for a in range(len(pts)):
            for b in range(a):
                if abs(pts[a] - pts[b]) <= 1e-12 * max(1.0, abs(pts[a])):
                    raise InputError("constraint points coincide after mapping sharp nodes")
        K = len(rows)
        V = np.vander(np.array(pts), K, increasing=True)
        Y = np.array([r[1] for r in rows])
        coeffs = np.linalg.solve(V, Y.reshape(K, -1)).reshape(Y.shape)
        return LagrangeResult(_trim(list(coeffs)), {})
    left, right = [], []
    for p, kind, M in constraints:
        p = Quaternion.coerce(p)
        M = QuatMatrix.coerce(M if not isinstance(M, Quaternion) else QuatMatrix.scalar(M))
        if kind == "value":
            left.append((p, M))
        else:
            right.append((-p.conj(), M.adjoint()))
    shape = (left or right)[0][1].shape
    if any(M.shape != shape for _, M in left + right):
        raise InputError("constraint matrices have different shapes")
    allpts = [p for p, _ in left] + [s for s, _ in right]
    for a in range(len(allpts)):
        same = [b for b in range(len(allpts)) if _same_sphere(allpts[a], allpts[b])]
        if len(same) >= 3:
            raise InputError("three constraint points lie on a common sphere")
    for a in range(len(left)):
        for b in range(a):
            if (left[a][0] - left[b][0]).norm2() == 0:
                raise InputError("repeated left node")
    sylv = {}
    for j, (q, C) in enumerate(left):
        for k, (s, Dm) in enumerate(right):
            if not _same_sphere(q, s):
                continue
            P = left_mult_matrix(q) - right_mult_matrix(s)
            W, Xc, Yc, Zc = (np.zeros(shape) for _ in range(4))
            diff = C - Dm
            for a in range(shape[0]):
                for b in range(shape[1]):
                    rhs = np.array(diff[a, b].as_tuple())[:, None]
                    sol = solve_sylvester(P, np.zeros((1, 1)), rhs)
                    if isinstance(sol, UnsolvableReport):
                        raise InfeasibleError(
                            f"Sylvester system q X - X s = C - D has no solution for left node {j} and right node {k} "
                            f"(residual {sol.residual:.2e})"
                        )
                    W[a, b], Xc[a, b], Yc[a, b], Zc[a, b] = sol.real.ravel()
            sylv[(j, k)] = QuatMatrix.from_components(W, Xc, Yc, Zc)
    m, n = shape
    total = len(left) + len(right)
    for deg in range(0, total + 2):
        blocks = []
        for q, _ in left:
            blocks.append(np.hstack([left_mult_matrix(q**a) for a in range(deg + 1)]))
        for s, _ in right:
            blocks.append(np.hstack([right_mult_matrix(s**a) for a in range(deg + 1)]))
        Kmat = np.vstack(blocks)
        rhs = np.zeros((Kmat.shape[0], m * n))
        for r, (_, M) in enumerate(left + right):
            for a in range(m):
                for b in range(n):
                    rhs[4 * r : 4 * r + 4, a * n + b] = M[a, b].as_tuple()
        sol, *_ = np.linalg.lstsq(Kmat, rhs, rcond=None)
        if np.linalg.norm(Kmat @ sol - rhs) <= tol * max(1.0, np.linalg.norm(rhs)):
            coeffs = []
            for a in range(deg + 1):
                comp = sol[4 * a : 4 * a + 4].reshape(4, m, n)
                coeffs.append(QuatMatrix.from_components(*comp))
            return LagrangeResult(SlicePolynomial(tuple(coeffs)), sylv)
    raise InfeasibleError("quaternionic interpolation constraints are inconsistent")


def quat_gpe_interpolate(nodes, values):
    """Even quaternionic ``Phi = sum_u L_u star L_u^#`` with ``Phi(p_u) = Phi_u``.

    ``L_u`` satisfies ``L_u(p_j) = delta_uj I`` and ``L_u^#(p_u) = Phi_u``.
    Returns the polynomial realization of ``Phi``.
    """
    nodes = [Quaternion.coerce(p) for p in nodes]
    values = [QuatMatrix.coerce(v if not isinstance(v, (Quaternion, int, float, complex)) else QuatMatrix.scalar(Quaternion.coerce(v))) for v in values]
    if len(nodes) != len(values) or not nodes:
        raise InputError("nodes and values must be nonempty lists of equal length")
    n = values[0].shape[0]
    if any(v.shape != (n, n) for v in values):
        raise InputError("values must be square of a common size")
    for a in range(len(nodes)):
        same = [b for b in range(len(nodes)) if _same_sphere(nodes[a], nodes[b])]
        if len(same) >= 3:
            raise InputError("three nodes lie on a common sphere")
    I = QuatMatrix.eye(n)
    Z = QuatMatrix.zeros(n, n)
    total = None
    for u, (pu, Vu) in enumerate(zip(nodes, values)):
        cons = [(pj, "value", I if j == u else Z) for j, pj in enumerate(nodes)]
        cons.append((pu, "sharp-value", Vu))
        Lu = lagrange_matrix_polynomial(cons).polynomial
        term = star_product(Lu, Lu.sharp())
        total = term if total is None else total + term
    return total.to_realization()
