import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gqab.config import SolverConfig
from gqab.entropy import rel_entropy
from gqab.errors import ProjectionError
from gqab.linop import logm_hermitian, random_density, random_hermitian, trace_distance
from gqab.mixture import (
    MixtureFamily,
    contains,
    e_project,
    log_partition,
    log_partition_grad,
    traceless_basis,
)

Z = np.diag([1.0, -1.0]).astype(complex)


def grid_projection_oracle(rho, target, n=200001):
    """Minimize D(sigma || rho) over diagonal qubit states with <Z> = target by brute force."""
    best, arg = np.inf, None
    for q in np.linspace(0.0, 1.0, n):
        if abs((2 * q - 1) - target) > 1e-9:
            continue
        sigma = np.diag([q, 1 - q])
        d = rel_entropy(sigma, rho)
        if d < best:
            best, arg = d, sigma
    return arg


def random_family(rng, d=4, k=3):
    ops = [random_hermitian(d, rng) for _ in range(k)]
    member = random_density(d, rng)
    return MixtureFamily.family_of(member, ops, (d,)), member


def test_traceless_basis():
    for d in (2, 3, 4):
        basis = traceless_basis(d)
        assert len(basis) == d * d - 1
        gram = np.array([[np.trace(a @ b).real for b in basis] for a in basis])
        assert np.allclose(gram, 2 * np.eye(d * d - 1))
        assert all(abs(np.trace(b)) < 1e-12 for b in basis)


def test_family_validation():
    with pytest.raises(ValueError, match="dependent"):
        MixtureFamily([Z, 2 * Z], [0.0, 0.0], (2,))
    with pytest.raises(ValueError):
        MixtureFamily([Z], [0.0, 1.0], (2,))


def test_contains(rng):
    empty = MixtureFamily([], [], (2,))
    assert contains(empty, random_density(2, rng))
    fam, member = random_family(rng)
    assert contains(fam, member)
    assert not contains(MixtureFamily([Z], [0.5], (2,)), np.eye(2) / 2, 1e-9)
    with pytest.raises(ValueError):
        contains(fam, np.eye(2) / 2)


def test_log_partition_qubit_formula():
    fam = MixtureFamily([Z], [0.0], (2,))
    a = np.zeros((2, 2))
    for t in (-2.0, -0.3, 0.0, 0.7, 3.0):
        assert np.isclose(log_partition(a, fam, [t]), np.log(2 * np.cosh(t)))
    fam = MixtureFamily([Z], [0.25], (2,))
    for t in (-1.0, 0.4):
        assert np.isclose(log_partition_grad(a, fam, [t])[0], np.tanh(t) - 0.25)


def test_log_partition_at_zero(rng):
    fam, member = random_family(rng)
    a = random_hermitian(4, rng)
    w = np.linalg.eigvalsh(a)
    assert np.isclose(log_partition(a, fam, np.zeros(3)), np.log(np.sum(np.exp(w))))
    assert np.max(np.abs(log_partition_grad(logm_hermitian(member), fam, np.zeros(3)))) < 1e-12


def test_log_partition_overflow_guard():
    fam = MixtureFamily([Z], [0.0], (2,))
    assert np.isfinite(log_partition(np.diag([800.0, 0.0]), fam, [0.0]))


def test_log_partition_convex(rng):
    fam, _ = random_family(rng)
    a = random_hermitian(4, rng)
    for _ in range(100):
        t0, t1 = rng.normal(size=3) * 2, rng.normal(size=3) * 2
        mid = log_partition(a, fam, (t0 + t1) / 2)
        assert mid <= 0.5 * (log_partition(a, fam, t0) + log_partition(a, fam, t1)) + 1e-10


def test_log_partition_tau_length(rng):
    fam, _ = random_family(rng)
    with pytest.raises(ValueError):
        log_partition(np.zeros((4, 4)), fam, [0.0])


def test_projection_qubit_oracle():
    fam = MixtureFamily([Z], [0.5], (2,))
    res = e_project(np.eye(2) / 2, fam)
    oracle = grid_projection_oracle(np.eye(2) / 2, 0.5)
    assert np.max(np.abs(res.projected - oracle)) < 1e-8
    assert np.max(np.abs(res.projected - np.diag([0.75, 0.25]))) < 1e-8
    assert res.grad_norm <= 1e-10


def test_projection_of_member_is_identity(rng):
    fam, member = random_family(rng)
    res = e_project(member, fam)
    assert trace_distance(res.projected, member) < 1e-9
    assert np.max(np.abs(res.tau)) < 1e-6


def test_projection_pythagorean(rng):
    for _ in range(50):
        fam, sigma = random_family(rng)
        rho = random_density(4, rng)
        gamma = e_project(rho, fam).projected
        lhs = rel_entropy(sigma, rho)
        rhs = rel_entropy(sigma, gamma) + rel_entropy(gamma, rho)
        assert abs(lhs - rhs) < 1e-7


def test_projection_idempotent_and_feasible(rng):
    for _ in range(20):
        fam, _ = random_family(rng)
        once = e_project(random_density(4, rng), fam).projected
        assert contains(fam, once, 1e-9)
        assert trace_distance(e_project(once, fam).projected, once) < 1e-8


def test_projection_warm_start_is_inert(rng):
    fam, _ = random_family(rng)
    rho = random_density(4, rng)
    cold = e_project(rho, fam)
    warm = e_project(rho, fam, tau0=cold.tau + 0.1)
    assert trace_distance(cold.projected, warm.projected) < 1e-9


def test_infeasible_family_fails():
    # <Z> = 2 lies outside the qubit state space
    fam = MixtureFamily([Z], [2.0], (2,))
    with pytest.raises(ProjectionError) as info:
        e_project(np.eye(2) / 2, fam, SolverConfig(max_proj_iters=200))
    assert info.value.tau is not None and info.value.residual > 0


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    fam, _ = random_family(rng)
    a = random_hermitian(4, rng)
    tau = rng.normal(size=3)
    h = 1e-5
    fd = np.array(
        [(log_partition(a, fam, tau + h * e) - log_partition(a, fam, tau - h * e)) / (2 * h) for e in np.eye(3)]
    )
    assert np.max(np.abs(fd - log_partition_grad(a, fam, tau))) < 1e-6


def test_projection_matches_scalar_minimizer():
    from scipy.optimize import minimize_scalar

    x_op = np.array([[0, 1], [1, 0]], dtype=complex)
    rho = np.diag([0.8, 0.2]).astype(complex)
    fam = MixtureFamily([x_op], [0.3], (2,))

    def state(z):
        return 0.5 * (np.eye(2) + 0.3 * x_op + z * Z)

    # the optimum stays in the real x-z plane because rho and X are real
    r = np.sqrt(1 - 0.3**2)
    best = minimize_scalar(lambda z: rel_entropy(state(z), rho), bounds=(-r + 1e-9, r - 1e-9),
                           method="bounded", options={"xatol": 1e-12})
    res = e_project(rho, fam)
    assert np.max(np.abs(res.projected - state(best.x))) < 1e-6
    assert rel_entropy(res.projected, rho) <= best.fun + 1e-12
