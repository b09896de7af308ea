import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fkdet import numkernel as nk
from fkdet.errors import DomainError, NotHermitian, NotUnitary, ShapeMismatch, Singular
from fkdet.sampling import _gauss, _haar_unitary, _invertible_block


def _herm(rng, n):
    m = _gauss(rng, n) * 3
    return 0.5 * (m + m.conj().T)


@pytest.mark.parametrize("seed", range(20))
def test_herm_eig_reconstruction(seed):
    rng = np.random.default_rng(seed)
    h = _herm(rng, int(rng.integers(1, 9)))
    evals, u = nk.herm_eig(h)
    assert np.all(np.diff(evals) >= 0)
    assert nk.op_norm((u * evals) @ u.conj().T - h) <= 1e-10 * (1 + nk.op_norm(h))
    assert nk.op_norm(u.conj().T @ u - np.eye(len(h))) <= 1e-12


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        nk.herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0))])
def test_as_cmatrix_rejects_shape(bad):
    with pytest.raises(ShapeMismatch):
        nk.as_cmatrix(bad)


def test_as_cmatrix_rejects_nan():
    with pytest.raises(ValueError):
        nk.as_cmatrix(np.array([[np.nan]]))


def test_func_herm_log_of_positive():
    d = np.diag([1.0, np.e, np.e ** 2]).astype(complex)
    assert np.allclose(nk.func_herm(d, np.log), np.diag([0.0, 1.0, 2.0]))


def test_func_herm_domain():
    with pytest.raises(DomainError):
        nk.func_herm(np.diag([-1.0, 1.0]).astype(complex), np.log)


def test_mat_exp_zero_is_exact_identity():
    assert np.array_equal(nk.mat_exp(np.zeros((3, 3))), np.eye(3))


@pytest.mark.parametrize("seed", range(10))
def test_mat_exp_inverse_and_diagonal(seed):
    rng = np.random.default_rng(seed)
    x = _gauss(rng, 5)
    assert nk.op_norm(nk.mat_exp(x) @ nk.mat_exp(-x) - np.eye(5)) <= 1e-10
    d = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert np.allclose(nk.mat_exp(np.diag(d)), np.diag(np.exp(d)), atol=1e-13)


@pytest.mark.parametrize("seed", range(20))
def test_polar_reconstruction(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    g = _invertible_block(rng, n, 1e4)
    u, p = nk.polar(g)
    assert nk.op_norm(u @ p - g) <= 1e-9 * nk.op_norm(g)
    assert nk.op_norm(u.conj().T @ u - np.eye(n)) <= 1e-10
    assert nk.is_hermitian(p)
    assert np.linalg.eigvalsh(p).min() > 0


def test_polar_singular():
    with pytest.raises(Singular):
        nk.polar(np.diag([1.0, 1e-14]).astype(complex))


@pytest.mark.parametrize("seed", range(20))
def test_unitary_log_roundtrip(seed):
    rng = np.random.default_rng(seed)
    u = _haar_unitary(rng, int(rng.integers(1, 9)))
    x = nk.unitary_log(u)
    assert nk.is_hermitian(x)
    assert np.all(np.abs(np.linalg.eigvalsh(x)) <= np.pi + 1e-12)
    assert nk.op_norm(nk.mat_exp(1j * x) - u) <= 1e-8


def test_unitary_log_branch_at_minus_one():
    x = nk.unitary_log(-np.eye(2, dtype=complex))
    assert np.allclose(x, np.pi * np.eye(2))


def test_unitary_log_rejects():
    with pytest.raises(NotUnitary):
        nk.unitary_log(2 * np.eye(2, dtype=complex))


@pytest.mark.parametrize("kind", ["normal", "generic", "jordan"])
def test_scaled_exp_matches_expm(kind):
    rng = np.random.default_rng(3)
    if kind == "normal":
        x = 1j * _herm(rng, 4)
    elif kind == "generic":
        x = _gauss(rng, 4)
    else:
        x = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
    cs = np.linspace(-1.0, 1.0, 7)
    stack = nk.ScaledExp(x)(cs)
    for c, e in zip(cs, stack):
        assert nk.op_norm(e - nk.mat_exp(c * x)) <= 1e-12 * max(1.0, nk.op_norm(e))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 31))
def test_norm_submultiplicative(n, seed):
    rng = np.random.default_rng(seed)
    a, b = _gauss(rng, n), _gauss(rng, n)
    assert nk.op_norm(a @ b) <= nk.op_norm(a) * nk.op_norm(b) * (1 + 1e-12)
