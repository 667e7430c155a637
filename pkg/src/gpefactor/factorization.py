"""Pseudo-spectral factorization ``Phi = L^# L`` of even rational functions.

``side="right"`` returns the factor whose poles and zeros lie in the closed
left half-plane, ``side="left"`` the mirror image. Both satisfy
``Phi = L^# L`` and take the value ``D^{1/2}`` at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .analysis import StructureMatrix, boundary_positivity, solve_structure_H
from .errors import (
    InputError,
    NotGPEError,
    NumericalError,
    SingularFeedthroughError,
    UnsupportedStructureError,
)
from .linalg import SubspaceBasis, eig, orth, projection_along, psd_sqrt
from .realization import (
    COMPLEX,
    Realization,
    cross_matrix,
    evaluate,
    minimize,
    sample_points,
    sharp,
)

__all__ = [
    "FactorizationResult",
    "SpectralSubspaces",
    "factor_regularized",
    "factor_scalar_polynomial",
    "invariant_subspace",
    "pseudo_spectral_factor",
    "spectral_subspaces",
    "verify_factorization",
]

SIDES = ("left", "right")
EPSILON_SCHEDULE = tuple(10.0**-k for k in range(1, 9))


class SpectralSubspaces(NamedTuple):
    """Invariant subspaces: ``M_plus``/``M_minus`` for ``A``, ``*_cross`` for ``A x``.

    ``plus`` collects the open right half-plane, ``minus`` the open left
    half-plane; both take half of every Jordan chain on the imaginary axis.
    """

    M_plus: SubspaceBasis
    M_minus: SubspaceBasis
    M_plus_cross: SubspaceBasis
    M_minus_cross: SubspaceBasis


@dataclass
class FactorizationResult:
    side: str
    L: Realization
    subspaces: SpectralSubspaces | None
    projection: np.ndarray | None
    residual: float
    epsilon_path: list = field(default_factory=list)
    H: StructureMatrix | None = field(default=None, repr=False)
    pole_zero_report: dict = field(default_factory=dict)

    def to_dict(self):
        subs = None
        if self.subspaces is not None:
            subs = {k: v.dim for k, v in self.subspaces._asdict().items()}
        return {
            "side": self.side,
            "residual": self.residual,
            "state_dim": self.L.N,
            "subspace_dims": subs,
            "epsilon_path": [[float(e), float(d)] for e, d in self.epsilon_path],
            "pole_zero_report": self.pole_zero_report,
        }


def _check_side(side):
    if side not in SIDES:
        raise InputError(f"side must be 'left' or 'right', got {side!r}")


def invariant_subspace(A, half, tau=None, cluster_tol=None):
    """A-invariant subspace for one open half-plane plus half the axis chains.

    Parameters
    ----------
    A : ndarray
        Square matrix.
    half : {"plus", "minus"}
        ``Re > tau`` or ``Re < -tau``.
    tau : float, optional
        Axis band; defaults to ``1e-8 (1 + ||A||)``.
    cluster_tol : float, optional
        Eigenvalue clustering radius; defaults to ``1e-6 (1 + ||A||)`` so
        that the split eigenvalues of a defective axis eigenvalue stay in
        one cluster.
    """
    n = A.shape[0]
    if n == 0:
        return SubspaceBasis(0, np.zeros((0, 0), complex))
    scale = 1.0 + np.linalg.norm(A, 2)
    tau = 1e-8 * scale if tau is None else tau
    cluster_tol = 1e-6 * scale if cluster_tol is None else cluster_tol
    es = eig(A, tol_cluster=cluster_tol)
    centres = es.eigenvalues
    kind = np.where(centres.real > tau, 1, np.where(centres.real < -tau, -1, 0))
    want = 1 if half == "plus" else -1

    def select(x):
        return kind[int(np.argmin(np.abs(centres - x)))] == want

    expected = int(sum(m for m, k in zip(es.multiplicities, kind) if k == want))
    _, Z, sdim = sla.schur(A.astype(complex), output="complex", sort=select)
    if sdim != expected:
        raise NumericalError(
            f"ordered Schur form found {sdim} eigenvalues in the half-plane, expected {expected}"
        )
    pieces = [Z[:, :sdim]]
    axis_dim = 0
    for lam, chains, k in zip(centres, es.chains, kind):
        if k != 0:
            continue
        for ch in chains:
            length = ch.shape[1]
            if length % 2:
                raise UnsupportedStructureError(
                    f"Jordan chain of odd length {length} at the imaginary-axis eigenvalue {lam:.6g}"
                )
            pieces.append(ch[:, : length // 2])
            axis_dim += length // 2
    V = orth(np.hstack(pieces), 1e-10)
    if V.shape[1] != sdim + axis_dim:
        raise NumericalError("selected invariant subspace lost rank")
    return SubspaceBasis(n, V)


def _check_neutral(V, H, name):
    if V.dim == 0:
        return
    defect = np.linalg.norm(V.basis.conj().T @ H @ V.basis)
    if defect > 1e-6 * max(1.0, np.linalg.norm(H, 2)):
        raise NumericalError(f"{name} is not H-neutral (||V* H V|| = {defect:.2e})")


def spectral_subspaces(R, H=None):
    """The four invariant subspaces for ``A`` and ``A x = A - B D^{-1} C``.

    Each has dimension ``N/2`` and is neutral for the structure matrix.
    """
    N = R.N
    if N == 0:
        e = SubspaceBasis(0, np.zeros((0, 0), complex))
        return SpectralSubspaces(e, e, e, e)
    Ax = cross_matrix(R)
    subs = SpectralSubspaces(
        invariant_subspace(R.A, "plus"),
        invariant_subspace(R.A, "minus"),
        invariant_subspace(Ax, "plus"),
        invariant_subspace(Ax, "minus"),
    )
    for name, V in subs._asdict().items():
        if 2 * V.dim != N:
            raise NumericalError(f"{name} has dimension {V.dim}, expected {N // 2}")
    if H is not None:
        Hm = H.H if isinstance(H, StructureMatrix) else np.asarray(H)
        for name, V in subs._asdict().items():
            _check_neutral(V, Hm, name)
    return subs


def _pick(subs, side):
    """``(kernel M, range M x)`` of the projection for the requested side."""
    if side == "right":
        return subs.M_plus, subs.M_minus_cross
    return subs.M_minus, subs.M_plus_cross


def _compressed(R, M, Mx, Dh, Dih):
    X = Mx.basis
    T = np.hstack([X, M.basis])
    Y = np.linalg.inv(T)[: X.shape[1]]
    return Realization(Y @ R.A @ X, Y @ R.B, Dih @ R.C @ X, Dh), X @ Y


def _prepare(R):
    if R.field != COMPLEX:
        raise InputError("complex factorization needs a complex realization; use quat_gpe_factor")
    if R.poly:
        raise InputError("realization has a polynomial part; use factor_scalar_polynomial")
    if R.n_out != R.n_in:
        raise NotGPEError("an even function must be square")
    R = minimize(R)
    D = R.D
    if np.linalg.norm(D - D.conj().T) > 1e-8 * max(1.0, np.linalg.norm(D)):
        raise NotGPEError("D is not Hermitian, so the function is not even")
    return R, np.linalg.eigvalsh((D + D.conj().T) / 2)


def _boundary_check(R, tol):
    rep = boundary_positivity(R)
    if rep.worst_relative < -tol:
        raise NotGPEError(
            f"not positive on the imaginary axis: min eigenvalue {rep.min_eig:.4g} at {rep.worst_point}"
        )
    return rep


def pseudo_spectral_factor(R, side="right", boundary_tol=1e-7):
    """Factor ``Phi = L^# L`` for an even, boundary-positive ``Phi`` with ``D > 0``.

    Raises
    ------
    SingularFeedthroughError
        ``D`` is singular; use :func:`factor_regularized`.
    NotGPEError
        ``D`` is indefinite or ``Phi(iy)`` fails to be positive.
    NotEvenError
        No structure matrix exists.
    """
    _check_side(side)
    R, dw = _prepare(R)
    dscale = max(1.0, float(np.abs(dw).max()) if dw.size else 1.0)
    if dw.size and dw[0] < -1e-10 * dscale:
        raise NotGPEError("D has a negative eigenvalue")
    if dw.size and dw[0] <= 1e-10 * dscale:
        raise SingularFeedthroughError("D singular, use --regularize")
    Dh = psd_sqrt(R.D)
    Dih = psd_sqrt(R.D, inverse=True)
    H = solve_structure_H(R)
    _boundary_check(R, boundary_tol)
    if R.N == 0:
        L = Realization.static(Dh)
        residual, report = verify_factorization(R, L)
        return FactorizationResult(side, L, spectral_subspaces(R), np.zeros((0, 0)), residual, [], H, report)
    subs = spectral_subspaces(R, H)
    M, Mx = _pick(subs, side)
    Pi = projection_along(Mx, M)
    L, _ = _compressed(R, M, Mx, Dh, Dih)
    residual, report = verify_factorization(R, L)
    _check_residual(R, residual)
    return FactorizationResult(side, L, subs, Pi, residual, [], H, report)


def _check_residual(R, residual, tol=1e-6):
    scale = max(1.0, np.linalg.norm(R.D), np.linalg.norm(R.C) * np.linalg.norm(R.B))
    if residual > tol * scale:
        raise NumericalError(f"factorization residual {residual:.2e} is too large")


def _extrapolate(ss, Cs, order=3):
    """Polynomial extrapolation to ``s = 0`` through the last ``order + 1`` points."""
    k = len(ss)
    idx = range(max(0, k - order - 1), k)
    out = 0
    for j in idx:
        w = 1.0
        for i in idx:
            if i != j:
                w *= ss[i] / (ss[i] - ss[j])
        out = out + w * Cs[j]
    return out


def factor_regularized(R, side="right", schedule=EPSILON_SCHEDULE, tol=1e-6, boundary_tol=1e-6):
    """Factor an even ``Phi`` with possibly singular ``D >= 0``.

    The factors of ``Phi + eps I`` share the state matrix and input matrix of
    ``Phi``; only their output matrix ``C_eps`` depends on ``eps``. ``C_eps``
    is computed along ``schedule`` and extrapolated to ``eps = 0`` in the
    variable ``sqrt(eps)``. Convergence is declared when successive
    extrapolated factors differ by less than ``tol`` at sample points.
    """
    _check_side(side)
    R, dw = _prepare(R)
    dscale = max(1.0, float(np.abs(dw).max()) if dw.size else 1.0)
    if dw.size and dw[0] < -1e-10 * dscale:
        raise NotGPEError("D has a negative eigenvalue")
    _boundary_check(R, boundary_tol)
    if not dw.size or dw[0] > 1e-10 * dscale:
        return pseudo_spectral_factor(R, side)
    H = solve_structure_H(R)
    n = R.n_in
    A, B, C = R.A, R.B, R.C
    M = invariant_subspace(A, "plus" if side == "right" else "minus")
    if 2 * M.dim != R.N:
        raise NumericalError(f"invariant subspace has dimension {M.dim}, expected {R.N // 2}")
    _check_neutral(M, H.H, "A-invariant subspace")
    Dh = psd_sqrt(R.D)
    pts = sample_points(R, 20, seed=4242, rmin=0.5, rmax=2.0)
    ss, Cs, path = [], [], []
    prev_vals = None
    Pi = None
    converged = False
    C_hat = None
    for eps in schedule:
        Re = Realization(A, B, C, R.D + eps * np.eye(n))
        Mx = invariant_subspace(cross_matrix(Re), "minus" if side == "right" else "plus")
        if 2 * Mx.dim != R.N:
            raise NumericalError(f"zero subspace at eps={eps:g} has dimension {Mx.dim}")
        Pi = projection_along(Mx, M)
        ss.append(np.sqrt(eps))
        Cs.append(psd_sqrt(Re.D, inverse=True) @ C @ Pi)
        C_hat = _extrapolate(ss, Cs)
        Lk = Realization(A, B, C_hat, Dh)
        vals = np.array([evaluate(Lk, z) for z in pts])
        dist = np.inf if prev_vals is None else float(np.abs(vals - prev_vals).max())
        path.append((eps, dist))
        prev_vals = vals
        if len(path) >= 3 and dist < tol:
            converged = True
            break
    if not converged:
        raise NumericalError(f"epsilon regularization did not converge; path {path}")
    L = minimize(Realization(A, B, C_hat, Dh))
    residual, report = verify_factorization(R, L)
    _check_residual(R, residual, 1e-5)
    return FactorizationResult(side, L, None, Pi, residual, path, H, report)


def _poly_is_even(c, tol):
    k = np.arange(c.size)
    return np.abs(c - (-1.0) ** k * c.conj()).max(initial=0) <= tol * max(1.0, np.abs(c).max())


def factor_scalar_polynomial(coeffs, side="left", tol=1e-8):
    """Factor a scalar even polynomial, nonnegative on ``iR``, as ``L^# L``.

    Parameters
    ----------
    coeffs : sequence of complex
        Ascending coefficients ``a_0, a_1, ...``.
    side : {"left", "right"}
        ``left`` keeps the roots with ``Re >= 0``, ``right`` those with
        ``Re <= 0``; axis roots are split evenly.

    Returns
    -------
    ndarray
        Ascending coefficients of ``L = c prod (z - r_k)`` with ``c > 0``.
    """
    _check_side(side)
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size == 0:
        raise NotGPEError("the zero polynomial has no factorization")
    if not _poly_is_even(c, tol):
        raise NotGPEError("polynomial is not even: a_k != (-1)^k conj(a_k)")
    deg = c.size - 1
    if deg % 2:
        raise NotGPEError("an even polynomial has even degree")
    m = deg // 2
    lead = ((-1) ** m * c[-1]).real
    if lead <= 0:
        raise NotGPEError("leading behaviour on the imaginary axis is negative")
    roots = np.roots(c[::-1]) if deg else np.zeros(0)
    scale = 1.0 + (np.abs(roots).max() if roots.size else 0.0)
    band = 1e-6 * scale
    chosen = list(roots[roots.real > band]) if side == "left" else list(roots[roots.real < -band])
    axis = np.sort_complex(roots[np.abs(roots.real) <= band])
    # pair up axis roots by imaginary part
    i = 0
    ax = sorted(axis, key=lambda r: r.imag)
    while i < len(ax):
        j = i
        while j + 1 < len(ax) and abs(ax[j + 1].imag - ax[i].imag) <= 1e-4 * scale:
            j += 1
        group = ax[i : j + 1]
        if len(group) % 2:
            raise NotGPEError(f"root {group[0]:.6g} on the imaginary axis has odd multiplicity")
        centre = 1j * float(np.mean([g.imag for g in group]))
        chosen.extend([centre] * (len(group) // 2))
        i = j + 1
    if len(chosen) != m:
        raise NumericalError(f"root assignment produced {len(chosen)} roots, expected {m}")
    L = np.sqrt(lead) * np.poly(np.array(chosen, dtype=complex))[::-1] if m else np.array([np.sqrt(lead)])
    # compare L^# L with the input
    Ls = np.array([(-1) ** k * np.conj(a) for k, a in enumerate(L)])
    back = np.convolve(Ls, L)
    err = np.abs(back - c).max()
    if err > 1e-6 * max(1.0, np.abs(c).max()):
        raise NotGPEError(f"polynomial is not nonnegative on the imaginary axis (reconstruction error {err:.2e})")
    return L


def verify_factorization(R, L, samples=50):
    """Residual ``max ||Phi(z) - L^#(z) L(z)||`` and pole/zero half-plane report."""
    poles = np.linalg.eigvals(L.A) if L.N else np.zeros(0, complex)
    zeros = None
    if L.N and L.n_in == L.n_out and np.linalg.cond(L.D) < 1e10:
        zeros = np.linalg.eigvals(cross_matrix(L))
    avoid = np.concatenate([poles, zeros if zeros is not None else np.zeros(0)])
    pts = sample_points(R, samples, avoid=avoid)
    Ls = sharp(L)
    residual = 0.0
    for z in pts:
        diff = evaluate(R, z) - evaluate(Ls, z) @ evaluate(L, z)
        residual = max(residual, float(np.linalg.norm(diff, 2)))
    report = {
        "poles": [[float(p.real), float(p.imag)] for p in poles],
        "zeros": None if zeros is None else [[float(p.real), float(p.imag)] for p in zeros],
        "max_real_part": float(max([p.real for p in avoid], default=0.0)),
        "min_real_part": float(min([p.real for p in avoid], default=0.0)),
    }
    return residual, report
