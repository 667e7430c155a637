import numpy as np
import pytest

from gpefactor.quat import QuatMatrix, Quaternion
from gpefactor.realization import QUATERNION, Realization, cross_matrix, from_polynomial, lift, minimality_report


def neg_inv_z2():
    """-1/z^2 as C (zI - A)^{-1} B with a nilpotent A."""
    return Realization(np.array([[0, 1], [0, 0]]), np.array([[0], [-1]]), np.array([[1, 0]]), np.zeros((1, 1)))


def inv_z2():
    return Realization(np.array([[0, 1], [0, 0]]), np.array([[0], [1]]), np.array([[1, 0]]), np.zeros((1, 1)))


def one_minus_inv_z2():
    return Realization(np.array([[0, 1], [0, 0]]), np.array([[0], [1]]), np.array([[-1, 0]]), np.eye(1))


def ratio_example():
    """(1 - z^2) / (4 - z^2) = 1 + 3 / (z^2 - 4)."""
    A = np.array([[2.0, 0.0], [0.0, -2.0]])
    B = np.array([[1.0], [1.0]])
    C = np.array([[0.75, -0.75]])
    return Realization(A, B, C, np.eye(1))


def quat_jpoly():
    """[[p + 1, -p j + j], [p j - j, p + 1]] as a quaternionic polynomial."""
    j = Quaternion(0, 0, 1, 0)
    D = QuatMatrix.from_entries([[1, j], [-j, 1]])
    P1 = QuatMatrix.from_entries([[1, -j], [j, 1]])
    return from_polynomial([D, P1], QUATERNION)


def cubic_one_square():
    return from_polynomial(
        [
            np.array([[0, 0], [0, 1.0]]),
            np.array([[1, 0], [0, 0.0]]),
            np.array([[0, 1], [-1, 0.0]]),
            np.array([[0, 0], [0, -1.0]]),
        ]
    )


def quadratic_one_square():
    return from_polynomial([np.eye(2), np.array([[0, 1], [-1, 0.0]]), np.array([[0, 0], [0, -1.0]])])


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_factor(rng, n_max=3, N_max=6, gap=0.1, n=None):
    """Minimal complex L with D = I, poles on both sides and zeros off the axis."""
    fixed = n
    while True:
        n = fixed or int(rng.integers(1, n_max + 1))
        N = int(rng.integers(1, N_max + 1))
        sign = rng.choice([-1, 1], N)
        lam = sign * rng.uniform(0.3, 1.5, N) + 1j * rng.uniform(-1.5, 1.5, N)
        U = np.eye(N) + 0.3 * crandn(rng, N, N)
        A = U @ np.diag(lam) @ np.linalg.inv(U)
        L = Realization(A, 0.7 * crandn(rng, N, n), 0.7 * crandn(rng, n, N), np.eye(n))
        zeros = np.linalg.eigvals(cross_matrix(L))
        if np.abs(zeros.real).min() < gap or not minimality_report(L).minimal:
            continue
        return L


def random_quat_factor(rng, n_max=2, N_max=3, gap=0.15):
    """Minimal quaternionic L with D = I and genuinely non-complex entries."""
    while True:
        n = int(rng.integers(1, n_max + 1))
        N = int(rng.integers(1, N_max + 1))
        A = QuatMatrix.from_components(*(0.7 * rng.standard_normal((4, N, N))))
        B = QuatMatrix.from_components(*(0.6 * rng.standard_normal((4, N, n))))
        C = QuatMatrix.from_components(*(0.6 * rng.standard_normal((4, n, N))))
        L = Realization(A, B, C, QuatMatrix.eye(n), (), QUATERNION)
        Ll = lift(L)
        p = np.linalg.eigvals(Ll.A)
        z = np.linalg.eigvals(cross_matrix(Ll))
        if min(np.abs(p.real).min(), np.abs(z.real).min()) < gap or not minimality_report(Ll).minimal:
            continue
        return L


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
