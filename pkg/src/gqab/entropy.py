"""Von Neumann entropy, quantum relative entropy and mutual information (nats)."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .linop import (
    EPS_CLAMP,
    TOL_PSD_HARD,
    check_dims,
    eig_hermitian,
    partial_trace,
    permute_subsystems,
)

SUPPORT_WEIGHT_TOL = 1e-10


def _spectrum(rho: np.ndarray):
    w, v = eig_hermitian(rho)
    if w.size and w[0] < -TOL_PSD_HARD:
        raise ValueError(f"state is not positive semidefinite: eigenvalue {w[0]:.3e}")
    return np.clip(w, 0.0, None), v


def _entropy_of_probs(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def von_neumann(rho: np.ndarray) -> float:
    """Von Neumann entropy ``-Tr rho log rho`` with ``0 log 0 = 0``."""
    w, _ = _spectrum(np.asarray(rho, dtype=complex))
    return _entropy_of_probs(w)


def rel_entropy(rho: np.ndarray, sigma: np.ndarray, eps_clamp: float = EPS_CLAMP) -> float:
    """Quantum relative entropy ``D(rho || sigma) = Tr rho (log rho - log sigma)``.

    Evaluated in the eigenbases of both arguments. Returns ``inf`` when some
    eigenvector of ``sigma`` with eigenvalue below ``eps_clamp`` carries more
    than ``1e-10`` of ``rho``'s weight, i.e. ``supp(rho)`` is not contained in
    ``supp(sigma)``. Below that weight the cross term uses ``log max(q,
    eps_clamp)``, the same clamped logarithm as :func:`log_clamped`.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    p, u = _spectrum(rho)
    q, v = _spectrum(sigma)
    # weight[i, j] = |<u_i|v_j>|^2
    weight = np.abs(u.conj().T @ v) ** 2
    rho_weight_on_q = p @ weight
    small = q < eps_clamp
    if np.any(rho_weight_on_q[small] > SUPPORT_WEIGHT_TOL):
        return float("inf")
    cross = float(np.sum(rho_weight_on_q * np.log(np.maximum(q, eps_clamp))))
    return -_entropy_of_probs(p) - cross


def _split_groups(dims: Sequence[int], split) -> tuple[list[int], list[int]]:
    group_a, group_b = (sorted(int(i) for i in g) for g in split)
    n = len(dims)
    if not group_a or not group_b:
        raise ValueError("both groups of the split must be non-empty")
    if sorted(group_a + group_b) != list(range(n)):
        raise ValueError(f"split {split} is not a partition of subsystems 0..{n - 1}")
    return group_a, group_b


def mutual_info(rho: np.ndarray, dims: Sequence[int], split) -> float:
    """Mutual information ``D(rho_AB || rho_A (x) rho_B)`` across a bipartition.

    ``split`` is a pair of index groups partitioning ``range(len(dims))``.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = check_dims(rho, dims)
    group_a, group_b = _split_groups(dims, split)
    rho_ab, _ = permute_subsystems(rho, dims, group_a + group_b)
    rho_a = partial_trace(rho, dims, group_a)
    rho_b = partial_trace(rho, dims, group_b)
    return rel_entropy(rho_ab, np.kron(rho_a, rho_b))


def mutual_info_entropies(rho: np.ndarray, dims: Sequence[int], split) -> float:
    """Mutual information as ``H(A) + H(B) - H(AB)``."""
    rho = np.asarray(rho, dtype=complex)
    dims = check_dims(rho, dims)
    group_a, group_b = _split_groups(dims, split)
    return (
        von_neumann(partial_trace(rho, dims, group_a))
        + von_neumann(partial_trace(rho, dims, group_b))
        - von_neumann(rho)
    )
