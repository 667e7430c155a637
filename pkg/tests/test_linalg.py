import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpefactor.errors import InputError, NotDirectSumError
from gpefactor.linalg import (
    SubspaceBasis,
    UnsolvableReport,
    eig,
    inertia,
    projection_along,
    psd_sqrt,
    solve_sylvester,
)
from gpefactor.interp import left_mult_matrix, right_mult_matrix
from gpefactor.quat import Quaternion


def test_eig_diagonal():
    es = eig(np.diag([2.0, 1.0]))
    np.testing.assert_allclose(es.eigenvalues, [1, 2])
    assert es.multiplicities == (1, 1)
    assert [len(c) for c in es.chains] == [1, 1]
    assert all(ch.shape[1] == 1 for c in es.chains for ch in c)


def test_eig_nilpotent_block():
    es = eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert es.multiplicities == (2,)
    (chains,) = es.chains
    assert len(chains) == 1 and chains[0].shape[1] == 2


def test_eig_companion_roots():
    # companion matrix of z^6 - 2
    C = np.zeros((6, 6))
    C[1:, :-1] = np.eye(5)
    C[0, -1] = 2.0
    es = eig(C)
    expected = np.roots([1, 0, 0, 0, 0, 0, -2])
    assert es.multiplicities == (1,) * 6
    for lam in expected:
        assert np.min(np.abs(es.eigenvalues - lam)) < 1e-10
    # deterministic (Re, Im) ordering
    key = [(round(v.real, 8), round(v.imag, 8)) for v in es.eigenvalues]
    assert key == sorted(key)


def test_eig_chain_reassembly(rng):
    J = np.diag([1.0, 1.0, 1.0, -2.0]) + np.diag([1.0, 1.0, 0.0], 1)
    T = rng.standard_normal((4, 4))
    A = T @ J @ np.linalg.inv(T)
    es = eig(A)
    for lam, chains in zip(es.eigenvalues, es.chains):
        for ch in chains:
            Z = A - lam * np.eye(4)
            assert np.linalg.norm(Z @ ch[:, 0]) <= 1e-7 * np.linalg.norm(ch[:, 0])
            for k in range(1, ch.shape[1]):
                assert np.linalg.norm(Z @ ch[:, k] - ch[:, k - 1]) <= 1e-7 * np.linalg.norm(ch)
    assert sum(es.multiplicities) == 4


def test_eig_rejects_nonsquare():
    with pytest.raises(InputError):
        eig(np.zeros((2, 3)))


def test_sylvester_scalar():
    X = solve_sylvester(np.array([[1.0]]), np.array([[-1.0]]), np.array([[2.0]]))
    np.testing.assert_allclose(X, [[1.0]])


def test_sylvester_inconsistent():
    out = solve_sylvester(np.array([[1.0]]), np.array([[1.0]]), np.array([[1.0]]))
    assert isinstance(out, UnsolvableReport)
    assert not out
    assert out.residual > 0.5


def test_sylvester_quaternion_lift():
    # i x - x i = j has the solution x = -k/2
    i, j = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0)
    P = left_mult_matrix(i)
    Q = right_mult_matrix(i)
    X = solve_sylvester(P - Q, np.zeros((1, 1)), np.array(j.as_tuple())[:, None])
    assert not isinstance(X, UnsolvableReport)
    # least-norm solution: the kernel of ad_i is span{1, i}
    np.testing.assert_allclose(X[:, 0], [0, 0, 0, -0.5], atol=1e-12)


def test_sylvester_dimension_mismatch():
    with pytest.raises(InputError):
        solve_sylvester(np.eye(2), np.eye(3), np.zeros((3, 3)))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_sylvester_residual_bound(m, n, seed):
    r = np.random.default_rng(seed)
    P = r.standard_normal((m, m)) + 1j * r.standard_normal((m, m))
    Q = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    R = r.standard_normal((m, n))
    X = solve_sylvester(P, Q, R)
    if isinstance(X, UnsolvableReport):
        return
    tol = 1e-10
    res = np.linalg.norm(P @ X - X @ Q - R)
    assert res <= tol * (np.linalg.norm(P) + np.linalg.norm(Q)) * np.linalg.norm(X) + tol * np.linalg.norm(R)


def test_inertia_examples():
    assert inertia(np.diag([1.0, -2.0, 0.0])) == (1, 1, 1)
    assert inertia(np.eye(3)) == (3, 0, 0)


def test_inertia_rejects_non_hermitian():
    with pytest.raises(InputError):
        inertia(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_inertia_congruence(n, seed):
    r = np.random.default_rng(seed)
    d = r.choice([-1.0, 1.0], n) * r.uniform(0.5, 2.0, n)
    U, _ = np.linalg.qr(r.standard_normal((n, n)))
    H = U @ np.diag(d) @ U.T
    T = np.eye(n) + 0.3 * r.standard_normal((n, n))
    assert inertia(H) == inertia(T.conj().T @ H @ T, tol=1e-9)


def test_projection_coordinate():
    P = projection_along(SubspaceBasis.span([np.array([1.0, 0.0])]), SubspaceBasis.span([np.array([0.0, 1.0])]))
    np.testing.assert_allclose(P, np.diag([1.0, 0.0]), atol=1e-14)


def test_projection_oblique():
    P = projection_along(SubspaceBasis.span([np.array([1.0, 1.0])]), SubspaceBasis.span([np.array([1.0, -1.0])]))
    np.testing.assert_allclose(P, 0.5 * np.ones((2, 2)), atol=1e-14)


def test_projection_not_direct():
    e1 = SubspaceBasis.span([np.array([1.0, 0.0])])
    with pytest.raises(NotDirectSumError):
        projection_along(e1, e1)


def test_projection_properties(rng):
    n, k = 5, 2
    Rb = SubspaceBasis.span(rng.standard_normal((n, k)))
    Kb = SubspaceBasis.span(rng.standard_normal((n, n - k)))
    P = projection_along(Rb, Kb)
    assert np.linalg.norm(P @ P - P) < 1e-10
    assert np.linalg.norm(P @ Rb.basis - Rb.basis) < 1e-10
    assert np.linalg.norm(P @ Kb.basis) < 1e-10


def test_psd_sqrt():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    S = psd_sqrt(M)
    np.testing.assert_allclose(S @ S, M, atol=1e-12)
    np.testing.assert_allclose(psd_sqrt(M, inverse=True) @ S, np.eye(2), atol=1e-12)
