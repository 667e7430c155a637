"""Dense complex linear algebra at desk scale.

Eigenstructure with Jordan chains, Kronecker-vectorized Sylvester solves,
inertia counts and oblique projections. Everything here works on plain
``numpy`` arrays and is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import InputError, NotDirectSumError, NumericalError

EPS = np.finfo(float).eps

__all__ = [
    "EigenStructure",
    "SubspaceBasis",
    "UnsolvableReport",
    "as_matrix",
    "cluster_eigenvalues",
    "eig",
    "inertia",
    "jordan_chains",
    "null_space",
    "numerical_rank",
    "orth",
    "projection_along",
    "psd_sqrt",
    "solve_sylvester",
]


def as_matrix(a, rows=None, cols=None, name="matrix"):
    """Return ``a`` as a finite 2-D complex array, checking the shape if given."""
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        if m.size == 0 and rows is not None and cols is not None:
            m = m.reshape(rows, cols)
        else:
            m = m.reshape(1, -1) if rows == 1 else m.reshape(-1, 1)
    if m.ndim != 2:
        raise InputError(f"{name} must be two-dimensional, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise InputError(f"{name} has {m.shape[0]} rows, expected {rows}")
    if cols is not None and m.shape[1] != cols:
        raise InputError(f"{name} has {m.shape[1]} columns, expected {cols}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name} has non-finite entries")
    return m


def _default_rank_tol(s, shape):
    if s.size == 0:
        return 0.0
    return max(shape) * EPS * s[0]


def numerical_rank(M, tol=None):
    """Rank from singular values; ``tol`` defaults to ``max_dim * eps * s_max``."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if tol is None:
        tol = _default_rank_tol(s, M.shape)
    return int(np.sum(s > tol))


def orth(M, tol=None):
    """Orthonormal basis of the range of ``M``."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    if tol is None:
        tol = _default_rank_tol(s, M.shape)
    return u[:, : int(np.sum(s > tol))]


def null_space(M, tol=None):
    """Orthonormal basis of the kernel of ``M``."""
    M = np.asarray(M, dtype=complex)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=complex)
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    if tol is None:
        tol = _default_rank_tol(s, M.shape)
    r = int(np.sum(s > tol))
    return vh[r:].conj().T


def psd_sqrt(M, inverse=False):
    """Hermitian square root (or inverse square root) of a PSD matrix."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return M.copy()
    w, v = np.linalg.eigh((M + M.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    if inverse:
        if np.any(w <= 0):
            raise NumericalError("matrix is singular, no inverse square root")
        w = 1.0 / np.sqrt(w)
    else:
        w = np.sqrt(w)
    return (v * w) @ v.conj().T


def _sort_key(z, digits=9):
    return (round(float(np.real(z)), digits), round(float(np.imag(z)), digits))


def cluster_eigenvalues(values, tol):
    """Group eigenvalues closer than ``tol`` (single linkage).

    Returns a list of ``(centre, members)`` sorted lexicographically by the
    real then imaginary part of the centre.
    """
    values = np.asarray(values, dtype=complex)
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        vals = values[members]
        out.append((complex(vals.mean()), vals))
    out.sort(key=lambda c: _sort_key(c[0]))
    return out


def jordan_chains(T, tol):
    """Jordan chains of a (numerically) nilpotent matrix ``T``.

    Each chain is returned as an ``m x k`` array whose columns ``v1..vk``
    satisfy ``T v1 = 0`` and ``T v_{j+1} = v_j``. Chains are sorted by length.
    """
    T = np.asarray(T, dtype=complex)
    m = T.shape[0]
    if m == 0:
        return []
    kernels = [np.zeros((m, 0), dtype=complex)]
    power = np.eye(m, dtype=complex)
    while kernels[-1].shape[1] < m:
        power = T @ power
        K = null_space(power, tol)
        if K.shape[1] <= kernels[-1].shape[1]:
            # Not nilpotent within tolerance: the cluster was not a single eigenvalue.
            raise NumericalError(
                "restricted matrix is not nilpotent within tolerance "
                f"(kernel dimensions stalled at {K.shape[1]} of {m})"
            )
        kernels.append(K)
    top = len(kernels) - 1
    tops = []  # (level, vector)
    for level in range(top, 0, -1):
        pieces = [kernels[level - 1]]
        for lev, u in tops:
            pieces.append(np.linalg.matrix_power(T, lev - level) @ u[:, None])
        W = orth(np.hstack(pieces), tol) if pieces else np.zeros((m, 0))
        K = kernels[level]
        resid = K - W @ (W.conj().T @ K)
        new = orth(resid, max(tol, 1e-12))
        needed = K.shape[1] - W.shape[1]
        new = new[:, :needed]
        for c in range(new.shape[1]):
            tops.append((level, new[:, c]))
    chains = []
    for level, u in tops:
        cols = [np.linalg.matrix_power(T, level - 1 - j) @ u for j in range(level)]
        chains.append(np.column_stack(cols))
    chains.sort(key=lambda c: c.shape[1])
    return chains


@dataclass(frozen=True)
class EigenStructure:
    """Clustered eigenvalues with their Jordan chains.

    ``chains[i]`` lists the chains belonging to ``eigenvalues[i]``; each chain
    is an ``N x k`` array of generalized eigenvectors.
    """

    eigenvalues: np.ndarray
    multiplicities: tuple
    chains: tuple
    rank_tolerance: float
    cluster_tolerance: float = 0.0

    @property
    def dimension(self):
        return int(sum(self.multiplicities))

    def spectrum(self):
        """Eigenvalues repeated according to algebraic multiplicity."""
        return np.repeat(self.eigenvalues, self.multiplicities)


def eig(A, tol_cluster=None, rank_tol=None):
    """Eigenvalues and Jordan chains of a square matrix.

    Parameters
    ----------
    A : array_like
        Square complex matrix.
    tol_cluster : float, optional
        Eigenvalues closer than this are treated as one; defaults to
        ``1e-8 * (1 + ||A||)``.
    rank_tol : float, optional
        Singular-value threshold for the nested kernels of ``(A - lam I)^k``;
        defaults to ``1e-7 * (1 + ||A||)``.
    """
    A = as_matrix(A, name="A")
    n = A.shape[0]
    if A.shape[1] != n:
        raise InputError(f"eig needs a square matrix, got {A.shape}")
    scale = 1.0 + (np.linalg.norm(A, 2) if n else 0.0)
    if tol_cluster is None:
        tol_cluster = 1e-8 * scale
    if rank_tol is None:
        rank_tol = 1e-7 * scale
    if n == 0:
        return EigenStructure(np.zeros(0, complex), (), (), rank_tol, tol_cluster)
    try:
        vals = sla.eigvals(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc
    clusters = cluster_eigenvalues(vals, tol_cluster)
    centres, mults, all_chains = [], [], []
    for lam, members in clusters:
        m = members.size
        shifted = A - lam * np.eye(n)
        # generalized eigenspace: the m weakest directions of (A - lam)^m
        _, _, vh = np.linalg.svd(np.linalg.matrix_power(shifted, m))
        V = vh[n - m :].conj().T
        T = V.conj().T @ shifted @ V
        chains = [V @ c for c in jordan_chains(T, rank_tol)]
        centres.append(lam)
        mults.append(m)
        all_chains.append(tuple(chains))
    return EigenStructure(
        np.array(centres, dtype=complex), tuple(mults), tuple(all_chains), rank_tol, tol_cluster
    )


@dataclass(frozen=True)
class UnsolvableReport:
    """Returned by :func:`solve_sylvester` when the system is inconsistent."""

    residual: float
    least_squares: np.ndarray = field(repr=False)
    message: str = "inconsistent Sylvester system"

    def __bool__(self):
        return False


def solve_sylvester(P, Q, R, tol=1e-10):
    """Solve ``P X - X Q = R`` through its Kronecker linearization.

    Singular systems return the least-norm solution when consistent and an
    :class:`UnsolvableReport` otherwise.
    """
    P = as_matrix(P, name="P")
    Q = as_matrix(Q, name="Q")
    if P.shape[0] != P.shape[1] or Q.shape[0] != Q.shape[1]:
        raise InputError("P and Q must be square")
    R = as_matrix(R, rows=P.shape[0], cols=Q.shape[0], name="R")
    m, n = R.shape
    # column-major vec: vec(PX) = (I kron P) vec X, vec(XQ) = (Q^T kron I) vec X
    K = np.kron(np.eye(n), P) - np.kron(Q.T, np.eye(m))
    rhs = R.reshape(-1, order="F")
    x, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    X = x.reshape(m, n, order="F")
    resid = np.linalg.norm(P @ X - X @ Q - R)
    bound = tol * (np.linalg.norm(P) + np.linalg.norm(Q)) * np.linalg.norm(X) + tol * np.linalg.norm(R)
    if resid > max(bound, tol * 1e-3):
        return UnsolvableReport(float(resid), X)
    return X


def inertia(H, tol=1e-10):
    """Counts of eigenvalues above ``tol``, within ``[-tol, tol]`` and below ``-tol``."""
    H = as_matrix(H, name="H")
    if H.shape[0] != H.shape[1]:
        raise InputError("inertia needs a square matrix")
    if H.size == 0:
        return (0, 0, 0)
    asym = np.linalg.norm(H - H.conj().T)
    if asym > tol * max(1.0, np.linalg.norm(H)) and asym > tol:
        raise InputError(f"matrix is not Hermitian (||H - H*|| = {asym:.3e})")
    w = np.linalg.eigvalsh((H + H.conj().T) / 2)
    return (int(np.sum(w > tol)), int(np.sum(np.abs(w) <= tol)), int(np.sum(w < -tol)))


@dataclass(frozen=True)
class SubspaceBasis:
    """A subspace of ``C^ambient_dim`` given by independent columns."""

    ambient_dim: int
    basis: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[1]

    @classmethod
    def span(cls, vectors, ambient_dim=None, tol=None):
        """Span of a matrix's columns or of a list of 1-D vectors."""
        if isinstance(vectors, (list, tuple)) and vectors and np.ndim(vectors[0]) == 1:
            vectors = np.column_stack(vectors)
        V = np.asarray(vectors, dtype=complex)
        if V.ndim == 1:
            V = V[:, None]
        if ambient_dim is None:
            ambient_dim = V.shape[0]
        return cls(ambient_dim, orth(V, tol) if V.size else np.zeros((ambient_dim, 0), complex))


def projection_along(range_space, kernel_space, tol=1e-10):
    """Projection onto ``range_space`` along ``kernel_space``.

    Raises :class:`NotDirectSumError` when the two subspaces do not split the
    ambient space.
    """
    n = range_space.ambient_dim
    if kernel_space.ambient_dim != n:
        raise InputError("subspaces live in different ambient spaces")
    R = range_space.basis.reshape(n, -1)
    K = kernel_space.basis.reshape(n, -1)
    if R.shape[1] + K.shape[1] != n:
        raise NotDirectSumError(
            f"dimension condition fails: dim range + dim kernel = {R.shape[1]} + {K.shape[1]} != {n}"
        )
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    T = np.hstack([R, K])
    s = np.linalg.svd(T, compute_uv=False)
    if s[-1] <= tol * max(1.0, s[0]):
        raise NotDirectSumError(
            f"subspaces intersect: smallest singular value of [range, kernel] is {s[-1]:.3e}"
        )
    Tinv = np.linalg.inv(T)
    return R @ Tinv[: R.shape[1]]
