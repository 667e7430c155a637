"""Diagnostics for generalized positive even functions.

Structure matrix of an even realization, the positive-real LMI, sampled
negative-squares counts of Caratheodory-type kernels, boundary positivity
and evenness tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InputError, NotEvenError, NumericalError, PoleError
from .linalg import inertia
from .quat import QuatMatrix, Quaternion, chi, quat_hermitian_inertia
from .realization import (
    COMPLEX,
    Realization,
    evaluate,
    evaluate_slice,
    lift,
    minimize,
)

__all__ = [
    "BoundaryReport",
    "KernelInertiaReport",
    "LMIResult",
    "StructureMatrix",
    "boundary_positivity",
    "default_grid",
    "default_quaternion_grid",
    "is_even",
    "negative_squares",
    "solve_structure_H",
    "verify_positive_real_lmi",
]


@dataclass(frozen=True)
class StructureMatrix:
    """Skew-Hermitian ``H`` with ``H A = -A* H`` and ``H B = C*``."""

    H: np.ndarray
    residual: float
    min_singular: float
    skew_hermitian: bool = True
    realization: Realization | None = field(default=None, repr=False, compare=False)


def _poly_is_even(R, tol):
    for k, P in enumerate(R.poly, start=1):
        if np.linalg.norm(P - (-1) ** k * P.conj().T) > tol * max(1.0, np.linalg.norm(P)):
            return False
    return True


def solve_structure_H(R, tol=1e-8):
    """Solve ``H A = -A* H``, ``H B = C*`` for a minimal even realization.

    Raises
    ------
    NotEvenError
        If ``D`` is not Hermitian, the polynomial tail has the wrong parity
        or the linear system is inconsistent.
    NumericalError
        If the solution is numerically singular (typically a non-minimal
        input).
    """
    if R.field != COMPLEX:
        R = lift(R)
    if R.n_out != R.n_in:
        raise NotEvenError("an even function must be square")
    dscale = max(1.0, np.linalg.norm(R.D))
    if np.linalg.norm(R.D - R.D.conj().T) > tol * dscale:
        raise NotEvenError("D is not Hermitian")
    if not _poly_is_even(R, tol):
        raise NotEvenError("polynomial coefficients violate P_k = (-1)^k P_k*")
    N = R.N
    if N == 0:
        return StructureMatrix(np.zeros((0, 0), complex), 0.0, np.inf, True, R)
    A, B, C = R.A, R.B, R.C
    I = np.eye(N)
    # column-major vec: vec(HA) = (A^T kron I) vec H, vec(A* H) = (I kron A*) vec H
    K = np.vstack([np.kron(A.T, I) + np.kron(I, A.conj().T), np.kron(B.T, I)])
    rhs = np.concatenate([np.zeros(N * N, complex), C.conj().T.reshape(-1, order="F")])
    h, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    H = h.reshape(N, N, order="F")
    H = (H - H.conj().T) / 2
    scale = 1.0 + np.linalg.norm(A) + np.linalg.norm(B) + np.linalg.norm(C)
    resid = max(
        np.linalg.norm(H @ A + A.conj().T @ H),
        np.linalg.norm(H @ B - C.conj().T),
        np.linalg.norm(C + B.conj().T @ H),
    )
    if resid > tol * scale * max(1.0, np.linalg.norm(H)):
        raise NotEvenError(f"no skew-Hermitian H intertwines the realization with its sharp (residual {resid:.2e})")
    smin = float(np.linalg.svd(H, compute_uv=False)[-1])
    if smin <= 1e-10 * max(1.0, np.linalg.norm(H, 2)):
        raise NumericalError(f"structure matrix is singular (smallest singular value {smin:.2e}); is the realization minimal?")
    return StructureMatrix(H, float(resid), smin, True, R)


class LMIResult(NamedTuple):
    holds: bool
    min_eig: float
    Q: np.ndarray
    S: np.ndarray
    R: np.ndarray


def verify_positive_real_lmi(R, H, tol=1e-10):
    """Evaluate ``diag(H, I) [[A, B], [C, D]] + [[A, B], [C, D]]* diag(H, I)``.

    Returns the blocks ``Q = HA + A*H``, ``S = HB + C*`` and ``R = D + D*``
    together with the smallest eigenvalue of the assembled matrix.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex)) if np.size(H) else np.zeros((0, 0), complex)
    if H.shape != (R.N, R.N):
        raise InputError(f"H has shape {H.shape}, expected {(R.N, R.N)}")
    Q = H @ R.A + R.A.conj().T @ H
    S = H @ R.B + R.C.conj().T
    Rb = R.D + R.D.conj().T
    M = np.block([[Q, S], [S.conj().T, Rb]])
    w = np.linalg.eigvalsh((M + M.conj().T) / 2)
    min_eig = float(w[0])
    scale = max(1.0, float(np.abs(w).max()))
    return LMIResult(bool(min_eig >= -tol * scale), min_eig, Q, S, Rb)


@dataclass
class KernelInertiaReport:
    """Inertia of Gram matrices on nested prefixes of a grid."""

    grid: list
    sizes: list
    gram_inertia: list
    tolerance: float

    @property
    def kappa_estimate(self):
        return self.gram_inertia[-1][2] if self.gram_inertia else 0

    @property
    def stabilized(self):
        return len(self.gram_inertia) >= 2 and self.gram_inertia[-1][2] == self.gram_inertia[-2][2]

    def to_dict(self):
        def enc(p):
            if isinstance(p, Quaternion):
                return list(p.as_tuple())
            return [float(np.real(p)), float(np.imag(p))]

        return {
            "grid": [enc(p) for p in self.grid],
            "sizes": list(self.sizes),
            "gram_inertia": [list(t) for t in self.gram_inertia],
            "kappa_estimate": self.kappa_estimate,
            "stabilized": self.stabilized,
            "tolerance": self.tolerance,
        }


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def default_grid(n=30, rmin=0.1, rmax=5.0):
    """Deterministic points of the open right half-plane.

    Log-spaced radii, golden-ratio angles in ``(-pi/2, pi/2)`` and a stride
    permutation so every prefix is spread over the region.
    """
    if n < 1:
        raise InputError("grid needs at least one point")
    k = np.arange(n)
    r = rmin * (rmax / rmin) ** (k / max(n - 1, 1))
    theta = np.pi * (((k + 0.5) * _GOLDEN) % 1.0 - 0.5) * 0.98
    pts = r * np.exp(1j * theta)
    perm = (k * int(round(n * 0.618))) % n
    return list(pts[np.argsort(perm, kind="stable")])


def _sphere_points(n):
    """Fibonacci points on the unit sphere of imaginary quaternions."""
    out = []
    for m in range(n):
        zc = 1.0 - 2.0 * (m + 0.5) / n
        rho = np.sqrt(max(0.0, 1.0 - zc * zc))
        phi = 2.0 * np.pi * m * _GOLDEN
        out.append(Quaternion(0.0, rho * np.cos(phi), rho * np.sin(phi), zc))
    return out


def default_quaternion_grid(n=30, rmin=0.1, rmax=5.0):
    """Right half-space points: the planar grid rotated onto varying slices."""
    units = _sphere_points(max(n, 1))
    pts = []
    for z, J in zip(default_grid(n, rmin, rmax), units):
        y = abs(z.imag)
        J = J if z.imag >= 0 else -J
        pts.append(Quaternion(z.real, y * J.x, y * J.y, y * J.z))
    return pts


def _as_function(f):
    if isinstance(f, Realization):
        return (lambda p: evaluate_slice(f, p)) if f.field != COMPLEX else (lambda z: evaluate(f, z))
    return f


def _nested_sizes(n):
    sizes = sorted({max(1, n // 3), max(1, (2 * n) // 3), n})
    return sizes


def negative_squares(kernel, f, grid=None, n_points=30, tol=None):
    """Sampled inertia of a Hermitian kernel built from ``f``.

    Parameters
    ----------
    kernel : {"carat", "schur", "quat_carat"}
        ``(F(z) + F(w)*) / (z + conj w)``, ``(I - S(z) S(w)*) / (z + conj w)``
        or the quaternionic Caratheodory kernel.
    f : callable or Realization
        Matrix-valued function of a complex (or quaternion) variable.
    grid : sequence, optional
        Points of the right half-plane (half-space). By default a
        deterministic grid of ``n_points`` points; points at poles are then
        dropped, while a pole in a user grid is an input error.
    tol : float, optional
        Eigenvalue threshold; defaults to ``1e-9`` times the spectral radius
        of the full Gram matrix.
    """
    if kernel not in ("carat", "schur", "quat_carat"):
        raise InputError(f"unknown kernel {kernel!r}")
    fun = _as_function(f)
    quaternionic = kernel == "quat_carat"
    user_grid = grid is not None
    if grid is None:
        grid = default_quaternion_grid(n_points) if quaternionic else default_grid(n_points)
    pts, vals = [], []
    for p in grid:
        if quaternionic:
            p = Quaternion.coerce(p)
            if p.w <= 0:
                raise InputError(f"grid point {p} is not in the open right half-space")
        else:
            p = complex(p)
            if p.real <= 0:
                raise InputError(f"grid point {p} is not in the open right half-plane")
        try:
            v = fun(p)
        except PoleError as exc:
            if user_grid:
                raise InputError(f"grid point {p} lies on a pole: {exc}") from exc
            continue
        pts.append(p)
        vals.append(v)
    if not pts:
        raise InputError("no usable grid points")

    if quaternionic:
        from .slicefun import carat_kernel

        blocks = [[carat_kernel(fun, p, q, values=(vp, vq)) for q, vq in zip(pts, vals)] for p, vp in zip(pts, vals)]
        G = QuatMatrix.block(blocks)
        G = (G + G.adjoint()) * 0.5
        full = chi(G)
        n = vals[0].shape[0]
    else:
        vals = [np.atleast_2d(np.asarray(v, dtype=complex)) for v in vals]
        n = vals[0].shape[0]
        blocks = []
        for z, Fz in zip(pts, vals):
            row = []
            for w, Fw in zip(pts, vals):
                if kernel == "carat":
                    num = Fz + Fw.conj().T
                else:
                    num = np.eye(n) - Fz @ Fw.conj().T
                row.append(num / (z + np.conj(w)))
            blocks.append(row)
        G = np.block(blocks)
        G = (G + G.conj().T) / 2
        full = G
    w = np.linalg.eigvalsh(full)
    if tol is None:
        tol = max(1e-9 * float(np.abs(w).max()), 1e-300)
    sizes = _nested_sizes(len(pts))
    inertias = []
    for m in sizes:
        if quaternionic:
            inertias.append(quat_hermitian_inertia(G[: m * n, : m * n], tol))
        else:
            inertias.append(inertia(G[: m * n, : m * n], tol))
    return KernelInertiaReport(pts, sizes, inertias, tol)


class BoundaryReport(NamedTuple):
    min_eig: float
    worst_point: object
    worst_relative: float


def _axis_samples(samples, scale):
    half = max(samples // 2, 1)
    ys = scale * np.logspace(-3, 2, half)
    return np.concatenate([[0.0], ys, -ys])


def boundary_positivity(R, samples=200, points=None, n_units=20):
    """Smallest eigenvalue of the Hermitian part on the imaginary axis.

    Complex realizations are sampled at ``i y``; quaternionic ones at
    ``t J`` for ``n_units`` deterministic unit imaginary ``J``. Explicit
    ``points`` replace the default sampling. Sample points at poles are
    skipped. ``worst_relative`` is the smallest eigenvalue divided by
    ``max(1, ||value||)`` and is the quantity used for positivity decisions.
    """
    scale = 1.0
    if R.N:
        Rl = lift(R) if R.field != COMPLEX else R
        scale = 1.0 + float(np.abs(np.linalg.eigvals(Rl.A)).max())
    if points is None:
        ys = _axis_samples(samples, scale)
        if R.field == COMPLEX:
            points = [1j * y for y in ys]
        else:
            points = [Quaternion(0.0, t * J.x, t * J.y, t * J.z) for J in _sphere_points(n_units) for t in ys[ys >= 0]]
    best = (np.inf, None, np.inf)
    hit = False
    for p in points:
        try:
            if R.field == COMPLEX:
                V = evaluate(R, complex(p))
                Hm = (V + V.conj().T) / 2
                nrm = np.linalg.norm(V)
            else:
                V = evaluate_slice(R, p)
                Hm = chi((V + V.adjoint()) * 0.5)
                nrm = V.norm()
        except PoleError:
            continue
        hit = True
        m = float(np.linalg.eigvalsh(Hm)[0])
        rel = m / max(1.0, nrm)
        if m < best[0]:
            best = (m, p, best[2])
        if rel < best[2]:
            best = (best[0], best[1], rel)
    if not hit:
        raise InputError("every boundary sample hit a pole")
    return BoundaryReport(*best)


def is_even(R, tol=1e-8):
    """Test ``Phi^# = Phi``.

    Complex realizations: a structure matrix exists for the minimized
    realization. Quaternionic ones: the lift is even and the coefficient
    identity holds at sampled real points.
    """
    if R.field != COMPLEX:
        from .realization import sharp

        S = sharp(R)
        for x in (-1.7, -0.35, 0.45, 1.3, 2.9):
            try:
                if not evaluate_slice(R, x).allclose(evaluate_slice(S, x), tol * 100):
                    return False
            except PoleError:
                continue
        return is_even(lift(R), tol)
    if R.n_out != R.n_in:
        return False
    try:
        solve_structure_H(minimize(R), tol)
    except (NotEvenError, NumericalError):
        return False
    return True
