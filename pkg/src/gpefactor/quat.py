"""Quaternion scalars and matrices, the complex embedding ``chi`` and its inverse.

A quaternion ``q = w + x i + y j + z k`` is stored as the complex pair
``(z1, z2)`` with ``q = z1 + z2 j``, ``z1 = w + x i`` and ``z2 = y + z i``.
Matrices are stored the same way, as two complex arrays. The distinguished
slice is ``C_i``: complex numbers embed as ``a + b i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import InputError, NumericalError

__all__ = [
    "Quaternion",
    "QuatMatrix",
    "E",
    "chi",
    "chi_inverse",
    "e_symmetry_defect",
    "quat_hermitian_inertia",
    "random_quat_matrix",
    "slice_decompose",
]


@dataclass(frozen=True)
class Quaternion:
    """Real quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_pair(cls, z1, z2):
        z1, z2 = complex(z1), complex(z2)
        return cls(z1.real, z1.imag, z2.real, z2.imag)

    @classmethod
    def coerce(cls, value):
        """Accept a Quaternion, a real/complex number or a 4-sequence."""
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, Number):
            c = complex(value)
            return cls(c.real, c.imag, 0.0, 0.0)
        vals = [float(v) for v in value]
        if len(vals) != 4:
            raise InputError(f"quaternion needs 4 components, got {len(vals)}")
        return cls(*vals)

    @property
    def pair(self):
        return complex(self.w, self.x), complex(self.y, self.z)

    def as_tuple(self):
        return (self.w, self.x, self.y, self.z)

    def conj(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self):
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def __abs__(self):
        return float(np.sqrt(self.norm2()))

    def real(self):
        return self.w

    def imag_part(self):
        return Quaternion(0.0, self.x, self.y, self.z)

    def inverse(self):
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("quaternion inverse of zero")
        c = self.conj()
        return Quaternion(c.w / n, c.x / n, c.y / n, c.z / n)

    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        return self + (-Quaternion.coerce(other))

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, QuatMatrix):
            return NotImplemented
        a1, a2 = self.pair
        b1, b2 = Quaternion.coerce(other).pair
        return Quaternion.from_pair(a1 * b1 - a2 * b2.conjugate(), a1 * b2 + a2 * b1.conjugate())

    def __rmul__(self, other):
        return Quaternion.coerce(other) * self

    def __truediv__(self, other):
        return self * Quaternion.coerce(other).inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = Quaternion(1.0)
        for _ in range(k):
            out = out * self
        return out

    def isclose(self, other, tol=1e-12):
        return abs(self - Quaternion.coerce(other)) <= tol

    def __str__(self):
        return format_quaternion(self)


def format_quaternion(q, digits=12):
    """Format as ``a+bi+cj+dk``, dropping zero parts."""
    parts = []
    for val, unit in zip(q.as_tuple(), ("", "i", "j", "k")):
        v = round(float(val), digits) + 0.0
        if v == 0:
            continue
        mag = f"{abs(v):.{digits}g}"
        if unit and mag == "1":
            mag = ""
        parts.append(("-" if v < 0 else "+") + mag + unit)
    if not parts:
        return "0"
    s = "".join(parts)
    return s[1:] if s[0] == "+" else s


class QuatMatrix:
    """Quaternion matrix ``Z1 + Z2 j`` with complex ``Z1``, ``Z2`` of equal shape."""

    __slots__ = ("Z1", "Z2")
    __array_ufunc__ = None

    def __init__(self, Z1, Z2=None):
        Z1 = np.atleast_2d(np.asarray(Z1, dtype=complex))
        Z2 = np.zeros_like(Z1) if Z2 is None else np.atleast_2d(np.asarray(Z2, dtype=complex))
        if Z1.shape != Z2.shape or Z1.ndim != 2:
            raise InputError(f"component shapes differ: {Z1.shape} vs {Z2.shape}")
        self.Z1 = Z1
        self.Z2 = Z2

    # construction ------------------------------------------------------
    @classmethod
    def from_components(cls, W, X, Y, Z):
        W, X, Y, Z = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (W, X, Y, Z))
        return cls(W + 1j * X, Y + 1j * Z)

    @classmethod
    def from_entries(cls, rows):
        """Build from nested lists of quaternion-like entries."""
        rows = [list(r) for r in rows]
        if not rows:
            return cls(np.zeros((0, 0)))
        m, n = len(rows), len(rows[0])
        Z1 = np.zeros((m, n), dtype=complex)
        Z2 = np.zeros((m, n), dtype=complex)
        for a, r in enumerate(rows):
            if len(r) != n:
                raise InputError("ragged quaternion matrix")
            for b, v in enumerate(r):
                Z1[a, b], Z2[a, b] = Quaternion.coerce(v).pair
        return cls(Z1, Z2)

    @classmethod
    def zeros(cls, m, n):
        return cls(np.zeros((m, n), dtype=complex))

    @classmethod
    def eye(cls, n):
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def scalar(cls, q):
        z1, z2 = Quaternion.coerce(q).pair
        return cls([[z1]], [[z2]])

    @classmethod
    def block(cls, rows):
        """Block assembly mirroring ``np.block``."""
        rows = [[cls.coerce(b) for b in r] for r in rows]
        return cls(
            np.block([[b.Z1 for b in r] for r in rows]),
            np.block([[b.Z2 for b in r] for r in rows]),
        )

    @classmethod
    def coerce(cls, value):
        if isinstance(value, QuatMatrix):
            return value
        if isinstance(value, Quaternion):
            return cls.scalar(value)
        return cls(np.asarray(value, dtype=complex))

    # structure ---------------------------------------------------------
    @property
    def shape(self):
        return self.Z1.shape

    @property
    def size(self):
        return self.Z1.size

    def components(self):
        """Real arrays ``(W, X, Y, Z)``."""
        return self.Z1.real, self.Z1.imag, self.Z2.real, self.Z2.imag

    def __getitem__(self, idx):
        if isinstance(idx, tuple) and all(isinstance(i, (int, np.integer)) for i in idx):
            return Quaternion.from_pair(self.Z1[idx], self.Z2[idx])
        return QuatMatrix(np.atleast_2d(self.Z1[idx]), np.atleast_2d(self.Z2[idx]))

    def entries(self):
        m, n = self.shape
        return [[self[a, b] for b in range(n)] for a in range(m)]

    def copy(self):
        return QuatMatrix(self.Z1.copy(), self.Z2.copy())

    @property
    def T(self):
        return QuatMatrix(self.Z1.T, self.Z2.T)

    def adjoint(self):
        """Conjugate transpose."""
        return QuatMatrix(self.Z1.conj().T, -self.Z2.T)

    H = property(adjoint)

    def norm(self):
        """Frobenius norm."""
        return float(np.sqrt(np.linalg.norm(self.Z1) ** 2 + np.linalg.norm(self.Z2) ** 2))

    def is_real(self, tol=0.0):
        return np.abs(self.Z1.imag).max(initial=0) <= tol and np.abs(self.Z2).max(initial=0) <= tol

    def is_complex(self, tol=0.0):
        """True when every entry lies in the i-slice."""
        return np.abs(self.Z2).max(initial=0) <= tol

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = _as_qm(other, self.shape)
        return QuatMatrix(self.Z1 + o.Z1, self.Z2 + o.Z2)

    __radd__ = __add__

    def __neg__(self):
        return QuatMatrix(-self.Z1, -self.Z2)

    def __sub__(self, other):
        return self + (-_as_qm(other, self.shape))

    def __rsub__(self, other):
        return _as_qm(other, self.shape) - self

    def __matmul__(self, other):
        o = QuatMatrix.coerce(other)
        if self.shape[1] != o.shape[0]:
            raise InputError(f"shape mismatch in product: {self.shape} @ {o.shape}")
        return QuatMatrix(
            self.Z1 @ o.Z1 - self.Z2 @ o.Z2.conj(),
            self.Z1 @ o.Z2 + self.Z2 @ o.Z1.conj(),
        )

    def __rmatmul__(self, other):
        return QuatMatrix.coerce(other) @ self

    def __mul__(self, other):
        """Right multiplication by a scalar."""
        z1, z2 = _scalar_pair(other)
        return QuatMatrix(self.Z1 * z1 - self.Z2 * np.conj(z2), self.Z1 * z2 + self.Z2 * np.conj(z1))

    def __rmul__(self, other):
        """Left multiplication by a scalar."""
        z1, z2 = _scalar_pair(other)
        return QuatMatrix(z1 * self.Z1 - z2 * self.Z2.conj(), z1 * self.Z2 + z2 * self.Z1.conj())

    def __truediv__(self, other):
        if isinstance(other, Number) and np.isreal(other):
            return QuatMatrix(self.Z1 / float(np.real(other)), self.Z2 / float(np.real(other)))
        return self * Quaternion.coerce(other).inverse()

    def inv(self):
        """Inverse through the complex embedding."""
        if self.shape[0] != self.shape[1]:
            raise InputError("inverse of a non-square quaternion matrix")
        return chi_inverse(np.linalg.inv(chi(self)), tol=1e-8)

    def allclose(self, other, atol=1e-10):
        o = QuatMatrix.coerce(other)
        return self.shape == o.shape and (self - o).norm() <= atol

    def __eq__(self, other):  # exact comparison, mostly for tests
        if not isinstance(other, QuatMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.Z1, other.Z1) and np.array_equal(self.Z2, other.Z2)

    __hash__ = None

    def __repr__(self):
        rows = ["[" + ", ".join(format_quaternion(q, 6) for q in r) + "]" for r in self.entries()]
        return "QuatMatrix([" + ", ".join(rows) + "])"


def _scalar_pair(value):
    if isinstance(value, QuatMatrix):
        if value.shape != (1, 1):
            raise InputError("scalar multiplication needs a 1x1 quaternion matrix")
        return value.Z1[0, 0], value.Z2[0, 0]
    return Quaternion.coerce(value).pair


def _as_qm(value, shape):
    if isinstance(value, (Quaternion, Number)):
        z1, z2 = Quaternion.coerce(value).pair
        if shape[0] != shape[1]:
            raise InputError("scalar addition needs a square matrix")
        n = shape[0]
        return QuatMatrix(z1 * np.eye(n), z2 * np.eye(n))
    out = QuatMatrix.coerce(value)
    if out.shape != shape:
        raise InputError(f"shape mismatch: {shape} vs {out.shape}")
    return out


def E(n):
    """The ``2n x 2n`` matrix ``[[0, I], [-I, 0]]``."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]]).astype(complex)


def chi(Q):
    """Complex ``2m x 2n`` embedding ``[[Z1, Z2], [-conj Z2, conj Z1]]``."""
    Q = QuatMatrix.coerce(Q)
    return np.block([[Q.Z1, Q.Z2], [-Q.Z2.conj(), Q.Z1.conj()]])


def e_symmetry_defect(M):
    """``||E^{-1} conj(M) E - M||`` (Frobenius) for a ``2m x 2n`` matrix."""
    M = np.asarray(M, dtype=complex)
    m2, n2 = M.shape
    if m2 % 2 or n2 % 2:
        return np.inf
    m, n = m2 // 2, n2 // 2
    return float(np.linalg.norm(-E(m) @ M.conj() @ E(n) - M))


def chi_inverse(M, tol=1e-9):
    """Recover ``Q`` with ``chi(Q) = M``.

    Raises :class:`InputError` when ``M`` violates the E-symmetry by more
    than ``tol * max(1, ||M||)``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    m2, n2 = M.shape
    if m2 % 2 or n2 % 2:
        raise InputError(f"chi_inverse needs even dimensions, got {M.shape}")
    defect = e_symmetry_defect(M)
    if defect > tol * max(1.0, np.linalg.norm(M)):
        raise InputError(f"matrix is not in the range of chi: ||E^-1 conj(M) E - M|| = {defect:.3e}")
    m, n = m2 // 2, n2 // 2
    Z1 = (M[:m, :n] + M[m:, n:].conj()) / 2
    Z2 = (M[:m, n:] - M[m:, :n].conj()) / 2
    return QuatMatrix(Z1, Z2)


def slice_decompose(p):
    """Write ``p = x + I y`` with ``y >= 0`` and ``I`` a unit imaginary quaternion.

    ``I`` is ``None`` when ``p`` is real.
    """
    p = Quaternion.coerce(p)
    y = float(np.sqrt(p.x**2 + p.y**2 + p.z**2))
    if y == 0:
        return p.w, 0.0, None
    return p.w, y, Quaternion(0.0, p.x / y, p.y / y, p.z / y)


def quat_hermitian_inertia(H, tol=1e-10):
    """Inertia of a quaternion-Hermitian matrix.

    The eigenvalues of ``chi(H)`` come in equal pairs, so each count of the
    complex inertia is halved.
    """
    H = QuatMatrix.coerce(H)
    if H.shape[0] != H.shape[1]:
        raise InputError("inertia needs a square matrix")
    asym = (H - H.adjoint()).norm()
    if asym > tol * max(1.0, H.norm()) and asym > tol:
        raise InputError(f"quaternion matrix is not Hermitian (||H - H*|| = {asym:.3e})")
    M = chi(H)
    w = np.linalg.eigvalsh((M + M.conj().T) / 2)
    counts = (int(np.sum(w > tol)), int(np.sum(np.abs(w) <= tol)), int(np.sum(w < -tol)))
    if any(c % 2 for c in counts):
        raise NumericalError(f"unpaired eigenvalues in the complex embedding: counts {counts}")
    return tuple(c // 2 for c in counts)


def random_quat_matrix(rng, m, n, scale=1.0):
    """Matrix with independent standard normal components."""
    W, X, Y, Z = (scale * rng.standard_normal((m, n)) for _ in range(4))
    return QuatMatrix.from_components(W, X, Y, Z)


def random_unit_imaginary(rng):
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return Quaternion(0.0, *v)
