"""Slice hyperholomorphic polynomials and the quaternionic factorization.

Functions of a quaternion variable are written ``f(p) = sum p^k F_k`` with
right matrix coefficients. The star-product convolves coefficients keeping
the left factor's coefficients on the left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import boundary_positivity, is_even, solve_structure_H
from .errors import InputError, NotEvenError, NotGPEError, NumericalError, PoleError, SingularFeedthroughError
from .factorization import FactorizationResult, _pick, spectral_subspaces
from .linalg import projection_along, psd_sqrt
from .quat import E, QuatMatrix, Quaternion, chi_inverse, e_symmetry_defect
from .realization import (
    QUATERNION,
    Realization,
    evaluate,
    evaluate_slice,
    from_polynomial,
    lift,
    minimize,
    product,
    quaternion_sample_points,
    sharp,
)

__all__ = [
    "SlicePolynomial",
    "StarInverseLinear",
    "carat_kernel",
    "quat_gpe_factor",
    "star_inverse_linear",
    "star_product",
    "verify_E_symmetry",
]


@dataclass(frozen=True)
class SlicePolynomial:
    """``sum_k p^k coeffs[k]`` with quaternion matrix coefficients."""

    coeffs: tuple

    def __post_init__(self):
        cs = [QuatMatrix.coerce(c) for c in self.coeffs]
        if not cs:
            raise InputError("a slice polynomial needs at least one coefficient")
        shape = cs[0].shape
        if any(c.shape != shape for c in cs):
            raise InputError("coefficients have different shapes")
        while len(cs) > 1 and cs[-1].norm() == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def shape(self):
        return self.coeffs[0].shape

    def __call__(self, p):
        p = Quaternion.coerce(p)
        out = QuatMatrix.zeros(*self.shape)
        pk = Quaternion(1.0)
        for c in self.coeffs:
            out = out + pk * c
            pk = pk * p
        return out

    def sharp(self):
        """``sum p^k (-1)^k C_k*``."""
        return SlicePolynomial(tuple(((-1) ** k) * c.adjoint() for k, c in enumerate(self.coeffs)))

    def to_realization(self):
        return from_polynomial(list(self.coeffs), QUATERNION)

    def __add__(self, other):
        a, b = list(self.coeffs), list(other.coeffs)
        m = max(len(a), len(b))
        z = QuatMatrix.zeros(*self.shape)
        a += [z] * (m - len(a))
        b += [z] * (m - len(b))
        return SlicePolynomial(tuple(x + y for x, y in zip(a, b)))


def star_product(G, F):
    """Star-product of slice polynomials, or of quaternionic realizations."""
    if isinstance(G, Realization) or isinstance(F, Realization):
        return product(G, F)
    if G.shape[1] != F.shape[0]:
        raise InputError(f"inner dimensions differ: {G.shape} and {F.shape}")
    out = [QuatMatrix.zeros(G.shape[0], F.shape[1]) for _ in range(G.degree + F.degree + 1)]
    for a, Ga in enumerate(G.coeffs):
        for b, Fb in enumerate(F.coeffs):
            out[a + b] = out[a + b] + Ga @ Fb
    return SlicePolynomial(tuple(out))


class StarInverseLinear:
    """The star-inverse ``(p + conj q)^{-*} = (|q|^2 + 2 Re(q) p + p^2)^{-1} (p + q)``."""

    def __init__(self, q, tol=1e-12):
        self.q = Quaternion.coerce(q)
        self.tol = tol

    @property
    def pole_sphere(self):
        """``(centre, radius)`` of the sphere ``[-conj q]``."""
        return -self.q.w, float(np.sqrt(self.q.x**2 + self.q.y**2 + self.q.z**2))

    def denominator(self, p):
        p = Quaternion.coerce(p)
        return p * p + 2.0 * self.q.w * p + self.q.norm2()

    def __call__(self, p):
        p = Quaternion.coerce(p)
        h = self.denominator(p)
        if abs(h) <= self.tol * max(1.0, abs(p) ** 2 + self.q.norm2()):
            raise PoleError(f"{p} lies on the pole sphere of (p + conj q)^-*")
        return h.inverse() * (p + self.q)


def star_inverse_linear(q):
    return StarInverseLinear(q)


def carat_kernel(Phi, p, q, values=None):
    """``(Phi(p) + Phi(q)*) star (p + conj q)^{-*}`` in the variable ``p``.

    The numerator is a slice function of ``p`` for fixed ``q``; the
    star-product with the scalar series ``h(p)^{-1} (p + q)`` gives
    ``h(p)^{-1} (p N + N q)`` with ``N = Phi(p) + Phi(q)*``.
    """
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    if values is None:
        f = Phi if callable(Phi) else None
        if isinstance(Phi, Realization):
            f = lambda x: evaluate_slice(Phi, x)
        if f is None:
            raise InputError("Phi must be callable or a Realization")
        vp, vq = f(p), f(q)
    else:
        vp, vq = values
    vp, vq = QuatMatrix.coerce(vp), QuatMatrix.coerce(vq)
    Nm = vp + vq.adjoint()
    inv = StarInverseLinear(q)
    h = inv.denominator(p)
    if abs(h) <= inv.tol * max(1.0, abs(p) ** 2 + q.norm2()):
        raise PoleError(f"{p} lies on the pole sphere [-conj q]")
    return h.inverse() * (p * Nm + Nm * q)


def verify_E_symmetry(M_fun, tol=1e-9, points=None):
    """Check ``E^{-1} conj(M(conj z)) E = M(z)`` at sample points.

    ``M_fun`` is a complex realization or a callable returning ``2m x 2n``
    matrices.
    """
    if isinstance(M_fun, Realization):
        R = M_fun
        if R.field != "complex":
            R = lift(R)
        f = lambda z: evaluate(R, z)
    else:
        f = M_fun
    if points is None:
        rng = np.random.default_rng(99)
        points = rng.uniform(-2, 2, 12) + 1j * rng.uniform(-2, 2, 12)
    for z in points:
        try:
            Mz = np.atleast_2d(f(z))
            Mc = np.atleast_2d(f(np.conj(z)))
        except PoleError:
            continue
        m2, n2 = Mz.shape
        if m2 % 2 or n2 % 2:
            return False
        d = np.linalg.norm(-E(m2 // 2) @ Mc.conj() @ E(n2 // 2) - Mz)
        if d > tol * max(1.0, np.linalg.norm(Mz)):
            return False
    return True


def _realization_symmetry_defect(R):
    """Largest E-symmetry defect over the lifted matrices of a complex realization."""
    mats = [R.A, R.B, R.C, R.D]
    return max((e_symmetry_defect(M) for M in mats if M.size), default=0.0)


def quat_gpe_factor(R, side="right", samples=None, boundary_tol=1e-7):
    """Factor a quaternionic even function as ``Phi = L^# star L``.

    The complex lift is factored; the factor keeps the lifted state matrix
    and input matrix, so its output matrix ``chi(D)^{-1/2} chi(C) Pi`` is
    checked for E-symmetry and pulled back with ``chi_inverse``.
    """
    if R.field != QUATERNION:
        raise InputError("quat_gpe_factor needs a quaternionic realization")
    if R.poly:
        raise InputError("realization has a polynomial part")
    if R.n_out != R.n_in:
        raise NotGPEError("an even function must be square")
    R = minimize(R)
    if not is_even(R):
        raise NotEvenError("function is not even")
    Rl = lift(R)
    Dl = Rl.D
    w = np.linalg.eigvalsh((Dl + Dl.conj().T) / 2)
    if w[0] < -1e-10 * max(1.0, abs(w).max()):
        raise NotGPEError("D has a negative eigenvalue")
    if w[0] <= 1e-10 * max(1.0, abs(w).max()):
        raise SingularFeedthroughError("D singular, use --regularize")
    rep = boundary_positivity(Rl)
    if rep.worst_relative < -boundary_tol:
        raise NotGPEError(f"lift is not positive on the imaginary axis: min eigenvalue {rep.min_eig:.4g}")
    if not verify_E_symmetry(Rl):
        raise NumericalError("lift fails the E-symmetry")
    Dh = psd_sqrt(Dl)
    Dih = psd_sqrt(Dl, inverse=True)
    Lq_D = chi_inverse(Dh, tol=1e-8)
    if R.N == 0:
        L = Realization.static(Lq_D, QUATERNION)
        return FactorizationResult(side, L, spectral_subspaces(Rl), np.zeros((0, 0)), _quat_residual(R, L, samples), [], None, {"lift_symmetry_defect": 0.0})
    H = solve_structure_H(Rl)
    subs = spectral_subspaces(Rl, H)
    M, Mx = _pick(subs, side)
    Pi = projection_along(Mx, M)
    C_full = Dih @ Rl.C @ Pi
    Lift = Realization(Rl.A, Rl.B, C_full, Dh)
    defect = _realization_symmetry_defect(Lift)
    if defect > 1e-8 * max(1.0, np.linalg.norm(C_full)):
        raise NumericalError(f"factor of the lift is not E-symmetric (defect {defect:.2e})")
    L = Realization(R.A, R.B, chi_inverse(C_full, tol=1e-6), Lq_D, (), QUATERNION)
    L = minimize(L)
    residual = _quat_residual(R, L, samples)
    report = {"lift_symmetry_defect": defect, "lift_residual": None}
    if residual > 1e-6 * max(1.0, R.D.norm(), R.C.norm() * R.B.norm()):
        raise NumericalError(f"quaternionic factorization residual {residual:.2e} is too large")
    return FactorizationResult(side, L, subs, Pi, residual, [], H, report)


def _quat_residual(R, L, samples=None):
    pts = quaternion_sample_points() if samples is None else samples
    LsL = product(sharp(L), L)
    worst = 0.0
    for p in pts:
        try:
            d = (evaluate_slice(R, p) - evaluate_slice(LsL, p)).norm()
        except PoleError:
            continue
        worst = max(worst, d)
    return worst
