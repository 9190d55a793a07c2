import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqab.linop import (
    check_density,
    eig_hermitian,
    expm_hermitian,
    func_hermitian,
    haar_unitary,
    log_clamped,
    logm_hermitian,
    partial_trace,
    permute_subsystems,
    projector,
    random_density,
    random_hermitian,
    tensor,
    trace_distance,
)


def index_sum_partial_trace(a, da, db):
    """Keep the first factor of a two-party operator by explicit summation."""
    out = np.zeros((da, da), dtype=complex)
    for i in range(da):
        for j in range(da):
            for k in range(db):
                out[i, j] += a[i * db + k, j * db + k]
    return out


def test_eig_diag_and_pauli():
    w, v = eig_hermitian(np.diag([2.0, 1.0]))
    assert np.allclose(w, [1.0, 2.0])
    assert np.allclose(np.abs(v), [[0, 1], [1, 0]])
    w, v = eig_hermitian(np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.allclose(w, [-1.0, 1.0])
    minus = np.array([1, -1]) / np.sqrt(2)
    assert np.isclose(abs(np.vdot(minus, v[:, 0])), 1.0)


def test_eig_reconstruction(rng):
    a = random_hermitian(8, rng)
    w, v = eig_hermitian(a)
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - a) < 1e-10
    assert np.linalg.norm(v.conj().T @ v - np.eye(8)) < 1e-10
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(a).real) < 1e-10


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not Hermitian"):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


def test_matrix_functions(rng):
    assert np.allclose(expm_hermitian(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(logm_hermitian(np.diag([np.e, np.e**2])), np.diag([1.0, 2.0]))
    rho = random_density(5, rng)
    assert np.linalg.norm(expm_hermitian(logm_hermitian(rho)) - rho) < 1e-9


def test_func_hermitian_names_bad_eigenvalue():
    with pytest.raises(ValueError, match="-1"):
        func_hermitian(np.diag([-1.0, 1.0]), np.log)


def test_log_clamped():
    assert np.allclose(log_clamped(np.eye(3)), 0.0)
    assert np.allclose(log_clamped(np.diag([1.0, 0.0]), 1e-12), np.diag([0.0, np.log(1e-12)]))
    with pytest.raises(ValueError):
        log_clamped(np.diag([1.0, -1e-6]))


def test_log_clamped_matches_log_on_full_rank(rng):
    rho = random_density(4, rng)
    assert np.array_equal(log_clamped(rho), func_hermitian(rho, np.log))


def test_tensor():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    m, dims = tensor(a, (2,), np.eye(1), (1,))
    assert np.array_equal(m, a) and dims == (2, 1)
    m, dims = tensor(np.diag([1, 0]), (2,), np.diag([0, 1]), (2,))
    assert np.array_equal(m, np.diag([0, 1, 0, 0])) and dims == (2, 2)


def test_tensor_trace_multiplicative(rng):
    a, b = random_hermitian(3, rng), random_hermitian(2, rng)
    m, _ = tensor(a, (3,), b, (2,))
    assert np.isclose(np.trace(m), np.trace(a) * np.trace(b))


def test_partial_trace_examples(rng):
    ra, rb = random_density(2, rng), random_density(3, rng)
    assert np.allclose(partial_trace(np.kron(ra, rb), (2, 3), [0]), ra)
    bell = projector(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert np.allclose(partial_trace(bell, (2, 2), [0]), np.eye(2) / 2)
    with pytest.raises(ValueError):
        partial_trace(bell, (2, 2), [2])


def test_partial_trace_index_sum_oracle(rng):
    for da, db in [(2, 2), (3, 2), (2, 4)]:
        a = random_density(da * db, rng)
        assert np.max(np.abs(partial_trace(a, (da, db), [0]) - index_sum_partial_trace(a, da, db))) < 1e-12


def test_partial_trace_middle_subsystem(rng):
    a, b, c = random_density(2, rng), random_density(3, rng), random_density(2, rng)
    full = np.kron(np.kron(a, b), c)
    assert np.allclose(partial_trace(full, (2, 3, 2), [1]), b)
    assert np.allclose(partial_trace(full, (2, 3, 2), [0, 2]), np.kron(a, c))
    assert np.isclose(partial_trace(full, (2, 3, 2), [])[0, 0], 1.0)


def test_permute_subsystems(rng):
    a, b = random_density(2, rng), random_density(3, rng)
    swapped, dims = permute_subsystems(np.kron(a, b), (2, 3), [1, 0])
    assert dims == (3, 2)
    assert np.allclose(swapped, np.kron(b, a))


def test_trace_distance():
    z0, z1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert trace_distance(z0, z0) == 0.0
    assert np.isclose(trace_distance(z0, z1), 1.0)
    assert np.isclose(trace_distance(z0, np.eye(2) / 2), 0.5)
    with pytest.raises(ValueError):
        trace_distance(z0, np.eye(3) / 3)


def test_check_density_rejects():
    with pytest.raises(ValueError, match="trace"):
        check_density(np.eye(2))
    with pytest.raises(ValueError, match="positive"):
        check_density(np.diag([1.5, -0.5]))


def test_haar_unitary_is_unitary_and_seeded():
    u = haar_unitary(4, np.random.default_rng(7))
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    assert np.array_equal(u, haar_unitary(4, np.random.default_rng(7)))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=6))
def test_exp_log_round_trip(seed, d):
    a = random_hermitian(d, np.random.default_rng(seed)) * 0.5
    assert np.linalg.norm(logm_hermitian(expm_hermitian(a)) - a) < 1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_tensor_then_trace_recovers_left(seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(2, rng), random_hermitian(3, rng)
    m, dims = tensor(a, (2,), b, (3,))
    assert np.max(np.abs(partial_trace(m, dims, [0]) - a * np.trace(b))) < 1e-12
    assert abs(partial_trace(m, dims, [])[0, 0] - np.trace(m)) < 1e-12
