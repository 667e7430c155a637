"""State-space realizations of rational matrix functions over C or H.

A :class:`Realization` represents

    Phi(z) = D + C (z I - A)^{-1} B + sum_k z^k P_k,

where the optional polynomial tail ``poly = (P_1, P_2, ...)`` lets the same
type carry polynomial and other improper functions. Over the quaternions
``z`` is a quaternion variable written on the left and the matrices are
right coefficients; products are then star-products.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import InputError, NumericalError, PoleError
from .linalg import as_matrix, cluster_eigenvalues, eig, null_space, orth
from .quat import QuatMatrix, Quaternion, chi, chi_inverse, slice_decompose

__all__ = [
    "MinimalityReport",
    "Realization",
    "cross_matrix",
    "degrees",
    "evaluate",
    "evaluate_slice",
    "from_fraction",
    "from_polynomial",
    "gpe_from_factor",
    "lift",
    "minimality_report",
    "minimize",
    "product",
    "quaternion_sample_points",
    "sample_points",
    "sharp",
    "similarity",
    "transform",
]

COMPLEX = "complex"
QUATERNION = "quaternion"


def _adj(X):
    return X.adjoint() if isinstance(X, QuatMatrix) else X.conj().T


def _zeros(fld, m, n):
    return QuatMatrix.zeros(m, n) if fld == QUATERNION else np.zeros((m, n), dtype=complex)


def _eye(fld, n):
    return QuatMatrix.eye(n) if fld == QUATERNION else np.eye(n, dtype=complex)


def _block(fld, rows):
    if fld == QUATERNION:
        return QuatMatrix.block(rows)
    return np.block(rows)


def _norm(X):
    return X.norm() if isinstance(X, QuatMatrix) else float(np.linalg.norm(X))


@dataclass(frozen=True)
class Realization:
    """Quadruple ``(A, B, C, D)`` plus an optional polynomial tail.

    Parameters
    ----------
    A, B, C, D : array_like or QuatMatrix
        State matrix ``N x N``, input ``N x n_in``, output ``n_out x N`` and
        feedthrough ``n_out x n_in``.
    poly : sequence, optional
        Coefficients of ``z, z^2, ...``, each ``n_out x n_in``.
    field : {"complex", "quaternion"}
    """

    A: object
    B: object
    C: object
    D: object
    poly: tuple = ()
    field: str = COMPLEX

    def __post_init__(self):
        fld = self.field
        if fld not in (COMPLEX, QUATERNION):
            raise InputError(f"unknown field {fld!r}")
        if fld == COMPLEX:
            D = as_matrix(self.D, name="D")
            n_out, n_in = D.shape
            A = np.asarray(self.A, dtype=complex)
            N = A.shape[0] if A.size else 0
            A = as_matrix(A, N, N, "A") if N else np.zeros((0, 0), complex)
            B = as_matrix(self.B, N, n_in, "B") if N else np.zeros((0, n_in), complex)
            C = as_matrix(self.C, n_out, N, "C") if N else np.zeros((n_out, 0), complex)
            poly = tuple(as_matrix(P, n_out, n_in, f"P{k + 1}") for k, P in enumerate(self.poly))
        else:
            D = QuatMatrix.coerce(self.D)
            n_out, n_in = D.shape
            A = QuatMatrix.coerce(self.A) if _size(self.A) else QuatMatrix.zeros(0, 0)
            N = A.shape[0]
            B = QuatMatrix.coerce(self.B) if N else QuatMatrix.zeros(0, n_in)
            C = QuatMatrix.coerce(self.C) if N else QuatMatrix.zeros(n_out, 0)
            poly = tuple(QuatMatrix.coerce(P) for P in self.poly)
            for name, M, shape in [("A", A, (N, N)), ("B", B, (N, n_in)), ("C", C, (n_out, N))] + [
                (f"P{k + 1}", P, (n_out, n_in)) for k, P in enumerate(poly)
            ]:
                if M.shape != shape:
                    raise InputError(f"{name} has shape {M.shape}, expected {shape}")
        while poly and _norm(poly[-1]) == 0:
            poly = poly[:-1]
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "poly", poly)

    @property
    def N(self):
        return self.A.shape[0]

    state_dim = N

    @property
    def n_out(self):
        return self.D.shape[0]

    @property
    def n_in(self):
        return self.D.shape[1]

    @property
    def is_proper(self):
        return not self.poly

    @property
    def is_polynomial(self):
        return self.N == 0

    @property
    def is_quaternionic(self):
        return self.field == QUATERNION

    def coefficients(self):
        """Polynomial coefficients ``[D, P1, P2, ...]`` (requires ``N == 0``)."""
        if self.N:
            raise InputError("coefficients are only defined for polynomial realizations")
        return [self.D, *self.poly]

    def __call__(self, z):
        if self.field == QUATERNION:
            return evaluate_slice(self, z)
        return evaluate(self, z)

    @classmethod
    def static(cls, D, field=COMPLEX):
        return cls(np.zeros((0, 0)), None, None, D, (), field)

    def scale_norm(self):
        return 1.0 + (_norm(self.A) if self.N else 0.0)

    @cached_property
    def poles(self):
        """Eigenvalues of ``A`` (of the lift over H)."""
        if self.N == 0:
            return np.zeros(0, complex)
        return np.linalg.eigvals(lift(self).A)

    @cached_property
    def pole_tolerance(self):
        if self.N == 0:
            return 0.0
        return 1e-10 * (1.0 + np.linalg.norm(lift(self).A, 2))


def _size(X):
    if X is None:
        return 0
    if isinstance(X, QuatMatrix):
        return X.size
    return np.asarray(X).size


def from_polynomial(coeffs, field=COMPLEX):
    """Realization of ``sum_k z^k coeffs[k]`` (ascending order)."""
    coeffs = list(coeffs)
    if not coeffs:
        raise InputError("empty coefficient list")
    return Realization(np.zeros((0, 0)), None, None, coeffs[0], tuple(coeffs[1:]), field)


def from_fraction(num, den):
    """Minimal realization of ``N(z) / d(z)`` with ``deg N <= deg d``.

    Parameters
    ----------
    num : sequence of matrices or scalars
        Ascending matrix coefficients of the numerator.
    den : sequence of scalars
        Ascending coefficients of the scalar denominator.
    """
    den = np.trim_zeros(np.asarray(den, dtype=complex), "b")
    if den.size == 0:
        raise InputError("zero denominator")
    num = [as_matrix(c, name="numerator coefficient") for c in num]
    n_out, n_in = num[0].shape
    m = den.size - 1
    if len(num) > m + 1:
        extra = num[m + 1 :]
        if any(np.linalg.norm(c) > 0 for c in extra):
            raise InputError("numerator degree exceeds denominator degree")
        num = num[: m + 1]
    num = num + [np.zeros((n_out, n_in), complex)] * (m + 1 - len(num))
    lead = den[-1]
    den = den / lead
    num = [c / lead for c in num]
    D = num[m]
    rem = [num[k] - D * den[k] for k in range(m)]
    if m == 0:
        return Realization.static(D)
    # controller form on the input side
    A = np.zeros((m * n_in, m * n_in), dtype=complex)
    for k in range(m - 1):
        A[k * n_in : (k + 1) * n_in, (k + 1) * n_in : (k + 2) * n_in] = np.eye(n_in)
    for k in range(m):
        A[(m - 1) * n_in :, k * n_in : (k + 1) * n_in] = -den[k] * np.eye(n_in)
    B = np.zeros((m * n_in, n_in), dtype=complex)
    B[(m - 1) * n_in :] = np.eye(n_in)
    C = np.hstack(rem)
    return minimize(Realization(A, B, C, D))


def cross_matrix(R):
    """The associated matrix ``A - B D^{-1} C`` whose spectrum holds the zeros."""
    if R.field == QUATERNION:
        return chi_inverse(cross_matrix(lift(R)))
    if R.n_out != R.n_in:
        raise InputError("zeros are only defined for square functions")
    if np.linalg.cond(R.D) > 1e12:
        raise NumericalError("feedthrough D is singular; no associated matrix")
    return R.A - R.B @ np.linalg.solve(R.D, R.C)


def _pole_check(R, z):
    if R.N == 0:
        return
    vals = R.poles
    dist = np.abs(vals - z)
    k = int(np.argmin(dist))
    if dist[k] < R.pole_tolerance:
        raise PoleError(f"point {z} is within {dist[k]:.2e} of the pole {vals[k]}", nearest=complex(vals[k]))


def evaluate(R, z, check_poles=True):
    """``D + C (z I - A)^{-1} B + sum z^k P_k`` for a complex realization."""
    if R.field != COMPLEX:
        raise InputError("evaluate works on complex realizations; use evaluate_slice")
    if np.isinf(z):
        if R.poly:
            raise PoleError("polynomial part is unbounded at infinity")
        return R.D.copy()
    z = complex(z)
    out = R.D.copy()
    if R.N:
        if check_poles:
            _pole_check(R, z)
        try:
            out = out + R.C @ np.linalg.solve(z * np.eye(R.N) - R.A, R.B)
        except np.linalg.LinAlgError as exc:
            raise PoleError(f"resolvent is singular at {z}") from exc
    zk = 1.0
    for P in R.poly:
        zk = zk * z
        out = out + zk * P
    return out


def lift(R):
    """Complex realization obtained by applying ``chi`` entrywise."""
    if R.field == COMPLEX:
        return R
    return Realization(
        chi(R.A) if R.N else np.zeros((0, 0)),
        chi(R.B) if R.N else None,
        chi(R.C) if R.N else None,
        chi(R.D),
        tuple(chi(P) for P in R.poly),
    )


def to_quaternion(R):
    """View a complex realization as one with i-slice quaternion coefficients."""
    if R.field == QUATERNION:
        return R
    q = QuatMatrix
    return Realization(q(R.A), q(R.B), q(R.C), q(R.D), tuple(q(P) for P in R.poly), QUATERNION)


def _top_row(M, m, n):
    return QuatMatrix(M[:m, :n], M[:m, n:])


def evaluate_slice(R, p):
    """Evaluate a quaternionic realization at the quaternion ``p``.

    The lift is evaluated on the i-slice at ``x +- i y``; its top block row
    gives the slice values there, and the representation formula extends
    them to ``x + J y``.
    """
    if R.field == COMPLEX:
        R = to_quaternion(R)
    p = Quaternion.coerce(p)
    m, n = R.n_out, R.n_in
    Rl = lift(R)
    x, y, J = slice_decompose(p)
    if J is None:
        return _top_row(evaluate(Rl, x), m, n)
    fp = _top_row(evaluate(Rl, complex(x, y)), m, n)
    fm = _top_row(evaluate(Rl, complex(x, -y)), m, n)
    alpha = (fp + fm) * 0.5
    beta = (-0.5j) * (fp - fm)
    return alpha + J * beta


def product(Ra, Rb):
    """Realization of the product ``Phi_a Phi_b`` (star-product over H)."""
    if Ra.field != Rb.field:
        raise InputError("cannot multiply realizations over different fields")
    if Ra.n_in != Rb.n_out:
        raise InputError(f"inner dimensions differ: {Ra.n_in} vs {Rb.n_out}")
    fld = Ra.field
    if Ra.poly or Rb.poly:
        if Ra.N or Rb.N:
            raise InputError("product of an improper realization needs both factors polynomial")
        ca, cb = Ra.coefficients(), Rb.coefficients()
        out = [None] * (len(ca) + len(cb) - 1)
        for a, Ga in enumerate(ca):
            for b, Fb in enumerate(cb):
                term = Ga @ Fb
                out[a + b] = term if out[a + b] is None else out[a + b] + term
        return from_polynomial(out, fld)
    Na, Nb = Ra.N, Rb.N
    A = _block(fld, [[Ra.A, Ra.B @ Rb.C], [_zeros(fld, Nb, Na), Rb.A]])
    B = _block(fld, [[Ra.B @ Rb.D], [Rb.B]])
    C = _block(fld, [[Ra.C, Ra.D @ Rb.C]])
    return Realization(A, B, C, Ra.D @ Rb.D, (), fld)


def sharp(R):
    """Realization of ``Phi^#(z) = Phi(-conj z)^*``: ``(-A*, C*, -B*, D*)``."""
    poly = tuple(((-1) ** (k + 1)) * _adj(P) for k, P in enumerate(R.poly))
    if R.N == 0:
        return Realization(R.A, None, None, _adj(R.D), poly, R.field)
    return Realization(-_adj(R.A), _adj(R.C), -_adj(R.B), _adj(R.D), poly, R.field)


def gpe_from_factor(RL):
    """Realization of ``L L^#`` in the block form with state matrix ``[[A, B B*], [0, -A*]]``."""
    if RL.poly:
        return product(RL, sharp(RL))
    fld = RL.field
    A, B, C, D = RL.A, RL.B, RL.C, RL.D
    N = RL.N
    if N == 0:
        return Realization.static(D @ _adj(D), fld)
    AA = _block(fld, [[A, B @ _adj(B)], [_zeros(fld, N, N), -_adj(A)]])
    BB = _block(fld, [[B @ _adj(D)], [-_adj(C)]])
    CC = _block(fld, [[C, D @ _adj(B)]])
    return Realization(AA, BB, CC, D @ _adj(D), (), fld)


def transform(R, T):
    """State-space change of coordinates ``(T^{-1} A T, T^{-1} B, C T, D)``."""
    if R.field == QUATERNION:
        T = QuatMatrix.coerce(T)
        Ti = T.inv()
    else:
        T = as_matrix(T, R.N, R.N, "T")
        Ti = np.linalg.inv(T)
    return Realization(Ti @ R.A @ T, Ti @ R.B, R.C @ T, R.D, R.poly, R.field)


class MinimalityReport(NamedTuple):
    """PBH outcome; ``witnesses`` maps ``"controllable"``/``"observable"`` to
    lists of ``(eigenvalue, vector)`` pairs that violate the test."""

    controllable: bool
    observable: bool
    witnesses: dict

    @property
    def minimal(self):
        return self.controllable and self.observable


def _pbh_tol(R):
    scale = max(1.0, np.linalg.norm(np.vstack([R.A, R.C]), 2), np.linalg.norm(np.hstack([R.A, R.B]), 2))
    return 1e-8 * scale


def minimality_report(R, tol=None):
    """Popov-Belevich-Hautus tests at every eigenvalue of ``A``."""
    if R.field == QUATERNION:
        return minimality_report(lift(R), tol)
    if R.N == 0:
        return MinimalityReport(True, True, {"controllable": [], "observable": []})
    if tol is None:
        tol = _pbh_tol(R)
    es = eig(R.A)
    bad_c, bad_o = [], []
    I = np.eye(R.N)
    for lam in es.eigenvalues:
        K = null_space(np.vstack([R.A - lam * I, R.C]), tol)
        bad_o.extend((complex(lam), K[:, i]) for i in range(K.shape[1]))
        W = null_space(np.hstack([R.A - lam * I, R.B]).conj().T, tol)
        bad_c.extend((complex(lam), W[:, i]) for i in range(W.shape[1]))
    return MinimalityReport(not bad_c, not bad_o, {"controllable": bad_c, "observable": bad_o})


def _krylov(A, B, tol):
    """Orthonormal basis of ``span{B, AB, A^2 B, ...}``."""
    N = A.shape[0]
    V = np.zeros((N, 0), dtype=complex)
    new = B
    while new.shape[1] and V.shape[1] < N:
        for _ in range(2):
            new = new - V @ (V.conj().T @ new)
        Q = orth(new, tol)
        if Q.shape[1] == 0:
            break
        V = np.hstack([V, Q])
        new = A @ Q
    return V


def _J(v):
    n = v.shape[0] // 2
    return np.concatenate([-v[n:].conj(), v[:n].conj()])


def _structured_basis(U):
    """Reorder an orthonormal J-invariant basis ``U`` as ``[q_1..q_r, Jq_1..Jq_r]``."""
    n2 = U.shape[0]
    Q = np.zeros((n2, 0), dtype=complex)
    qs = []
    for i in range(U.shape[1]):
        if Q.shape[1] >= U.shape[1]:
            break
        r = U[:, i] - Q @ (Q.conj().T @ U[:, i])
        r = r - Q @ (Q.conj().T @ r)
        nr = np.linalg.norm(r)
        if nr < 0.5:
            continue
        q = r / nr
        Jq = _J(q)
        Jq = Jq - Q @ (Q.conj().T @ Jq)
        Jq = Jq - q * (q.conj() @ Jq)
        Jq = Jq / np.linalg.norm(Jq)
        qs.append(q)
        Q = np.column_stack([Q, q, Jq])
    if Q.shape[1] != U.shape[1]:
        raise NumericalError("subspace of the lift is not closed under the quaternion structure")
    n = n2 // 2
    Wq = np.column_stack(qs) if qs else np.zeros((n2, 0))
    return QuatMatrix(Wq[:n], -Wq[n:].conj())


def _minimize_tol(R):
    return 1e-9 * max(1.0, np.linalg.norm(R.A, 2), np.linalg.norm(R.B, 2), np.linalg.norm(R.C, 2))


def minimize(R, tol=None):
    """Kalman reduction: keep the controllable part, then quotient the unobservable part."""
    if R.N == 0:
        return R
    if R.field == QUATERNION:
        Rl = lift(R)
        tol = _minimize_tol(Rl) if tol is None else tol
        W = _structured_basis(_krylov(Rl.A, Rl.B, tol))
        if W.shape[1] == 0:
            return Realization(np.zeros((0, 0)), None, None, R.D, R.poly, QUATERNION)
        A1, B1, C1 = W.adjoint() @ R.A @ W, W.adjoint() @ R.B, R.C @ W
        chiA, chiC = chi(A1), chi(C1)
        V = _structured_basis(_krylov(chiA.conj().T, chiC.conj().T, tol))
        if V.shape[1] == 0:
            return Realization(np.zeros((0, 0)), None, None, R.D, R.poly, QUATERNION)
        return Realization(V.adjoint() @ A1 @ V, V.adjoint() @ B1, C1 @ V, R.D, R.poly, QUATERNION)
    tol = _minimize_tol(R) if tol is None else tol
    V = _krylov(R.A, R.B, tol)
    A1, B1, C1 = V.conj().T @ R.A @ V, V.conj().T @ R.B, R.C @ V
    W = _krylov(A1.conj().T, C1.conj().T, tol)
    if W.shape[1] == 0:
        return Realization(np.zeros((0, 0)), None, None, R.D, R.poly)
    return Realization(W.conj().T @ A1 @ W, W.conj().T @ B1, C1 @ W, R.D, R.poly)


def degrees(R, z0):
    """``(McMillan degree, local degree at z0)`` of the proper part."""
    if R.field != COMPLEX:
        raise InputError("degrees is implemented for complex realizations")
    Rm = minimize(R)
    if Rm.N == 0:
        return 0, 0
    vals = np.linalg.eigvals(Rm.A)
    scale = 1.0 + np.linalg.norm(Rm.A, 2)
    local = 0
    for centre, members in cluster_eigenvalues(vals, 1e-6 * scale):
        if abs(centre - complex(z0)) <= 1e-6 * scale:
            local += members.size
    return Rm.N, local


def sample_points(R=None, count=30, seed=1729, rmin=0.3, rmax=3.0, avoid=(), margin=0.25):
    """Deterministic points in an annulus, away from poles and zeros.

    Points closer than ``margin`` to the spectrum of ``A``, of ``A x`` or to
    their mirror images ``-conj(lambda)`` are skipped, so the points are safe
    for checks involving ``Phi`` as well as ``Phi^#``.
    """
    rng = np.random.default_rng(seed)
    bad = [np.asarray(avoid, dtype=complex).ravel()]
    if R is not None and R.field == COMPLEX and R.N:
        bad.append(np.linalg.eigvals(R.A))
        if R.n_in == R.n_out and np.linalg.cond(R.D) < 1e12:
            bad.append(np.linalg.eigvals(cross_matrix(R)))
    bad = np.concatenate(bad) if bad else np.zeros(0)
    bad = np.concatenate([bad, -bad.conj()])
    pts = []
    tries = 0
    while len(pts) < count:
        r = np.exp(rng.uniform(np.log(rmin), np.log(rmax)))
        z = r * np.exp(1j * rng.uniform(-np.pi, np.pi))
        tries += 1
        if tries % 2000 == 0:
            # crowded spectrum: relax the exclusion radius
            margin /= 2
        if bad.size and np.min(np.abs(bad - z)) < margin:
            continue
        pts.append(complex(z))
    return np.array(pts)


def quaternion_sample_points(off_slice=20, on_slice=10, seed=2718, rmin=0.3, rmax=3.0):
    """Quaternions with nonzero j/k parts followed by points of the i-slice."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(off_slice):
        r = np.exp(rng.uniform(np.log(rmin), np.log(rmax)))
        v = rng.standard_normal(4)
        v[2:] += np.sign(v[2:]) * 0.2
        v = r * v / np.linalg.norm(v)
        pts.append(Quaternion(*v))
    for _ in range(on_slice):
        r = np.exp(rng.uniform(np.log(rmin), np.log(rmax)))
        t = rng.uniform(-np.pi, np.pi)
        pts.append(Quaternion(r * np.cos(t), r * np.sin(t), 0.0, 0.0))
    return pts


def _same_function(R1, R2, tol=1e-8):
    pts = sample_points(R1, 30, avoid=np.linalg.eigvals(R2.A) if R2.N else ())
    for z in pts:
        F1, F2 = evaluate(R1, z), evaluate(R2, z)
        if np.linalg.norm(F1 - F2) > tol * max(1.0, np.linalg.norm(F1)):
            return False
    return True


def similarity(R1, R2):
    """The invertible ``S`` with ``S A1 = A2 S``, ``S B1 = B2``, ``C1 = C2 S``."""
    if R1.field != COMPLEX or R2.field != COMPLEX:
        raise InputError("similarity is implemented for complex realizations")
    if R1.N != R2.N or R1.D.shape != R2.D.shape:
        raise InputError("realizations have different dimensions")
    if not (minimality_report(R1).minimal and minimality_report(R2).minimal):
        raise InputError("similarity needs minimal realizations")
    if np.linalg.norm(R1.D - R2.D) > 1e-10 * max(1.0, np.linalg.norm(R1.D)) or not _same_function(R1, R2):
        raise InputError("realizations do not represent the same function")
    N = R1.N
    O1 = np.vstack([R1.C @ np.linalg.matrix_power(R1.A, k) for k in range(N)])
    O2 = np.vstack([R2.C @ np.linalg.matrix_power(R2.A, k) for k in range(N)])
    S = np.linalg.lstsq(O2, O1, rcond=None)[0]
    resid = max(
        np.linalg.norm(S @ R1.A - R2.A @ S),
        np.linalg.norm(S @ R1.B - R2.B),
        np.linalg.norm(R1.C - R2.C @ S),
    )
    scale = 1.0 + np.linalg.norm(S) * (1.0 + np.linalg.norm(R1.A))
    if resid > 1e-7 * scale:
        raise NumericalError(f"similarity relations fail (residual {resid:.2e})")
    return S
