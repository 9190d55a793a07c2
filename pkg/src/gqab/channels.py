"""Quantum channels in Kraus form and the channel/state correspondence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linop import (
    check_density,
    eig_hermitian,
    haar_isometry,
    ket,
    symmetrize,
)

TOL_TP = 1e-10


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving CP map ``rho -> sum_i K_i rho K_i^dagger``.

    Each Kraus operator has shape ``(prod(out_dims), prod(in_dims))``.
    """

    kraus: tuple
    in_dims: tuple
    out_dims: tuple

    def __init__(self, kraus: Sequence[np.ndarray], in_dims: Sequence[int], out_dims: Sequence[int], check: bool = True):
        ops = tuple(np.asarray(k, dtype=complex) for k in kraus)
        in_dims = tuple(int(d) for d in in_dims)
        out_dims = tuple(int(d) for d in out_dims)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d_in, d_out = int(np.prod(in_dims)), int(np.prod(out_dims))
        for k in ops:
            if k.shape != (d_out, d_in):
                raise ValueError(f"Kraus operator of shape {k.shape}, expected {(d_out, d_in)}")
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)
        if check:
            err = self.tp_error()
            if err > TOL_TP:
                raise ValueError(f"channel is not trace preserving: max |sum K^dag K - I| = {err:.3e}")

    @property
    def d_in(self) -> int:
        return int(np.prod(self.in_dims))

    @property
    def d_out(self) -> int:
        return int(np.prod(self.out_dims))

    def tp_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.d_in))))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply(self, rho)


def apply(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.d_in, ch.d_in):
        raise ValueError(f"input of shape {rho.shape} does not match channel in_dims {ch.in_dims}")
    out = sum(k @ rho @ k.conj().T for k in ch.kraus)
    return symmetrize(out)


def adjoint_apply(ch: KrausChannel, a: np.ndarray) -> np.ndarray:
    """Heisenberg-picture map ``A -> sum_i K_i^dagger A K_i``."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (ch.d_out, ch.d_out):
        raise ValueError(f"operator of shape {a.shape} does not match channel out_dims {ch.out_dims}")
    out = sum(k.conj().T @ a @ k for k in ch.kraus)
    return symmetrize(out)


def extend_identity(ch: KrausChannel, left_dims: Sequence[int]) -> KrausChannel:
    """``id_left (x) ch``, acting on ``left_dims + in_dims``."""
    left_dims = tuple(int(d) for d in left_dims)
    eye = np.eye(int(np.prod(left_dims)))
    return KrausChannel(
        [np.kron(eye, k) for k in ch.kraus],
        left_dims + ch.in_dims,
        left_dims + ch.out_dims,
        check=False,
    )


def identity_channel(dims: Sequence[int]) -> KrausChannel:
    d = int(np.prod(dims))
    return KrausChannel([np.eye(d)], dims, dims)


def depolarizing_channel(in_dims: Sequence[int], out_dims: Sequence[int]) -> KrausChannel:
    """Fully depolarizing map ``rho -> Tr(rho) I / d_out``."""
    d_in, d_out = int(np.prod(in_dims)), int(np.prod(out_dims))
    ops = [
        np.outer(ket(i, d_out), ket(j, d_in)) / np.sqrt(d_out)
        for i in range(d_out)
        for j in range(d_in)
    ]
    return KrausChannel(ops, in_dims, out_dims)


def stinespring_channel(isometry: np.ndarray, in_dims, out_dims) -> KrausChannel:
    """Channel ``rho -> Tr_env V rho V^dagger`` for ``V: in -> out (x) env``."""
    d_out = int(np.prod(out_dims))
    rows, d_in = isometry.shape
    if rows % d_out:
        raise ValueError("isometry rows must be a multiple of the output dimension")
    d_env = rows // d_out
    v = isometry.reshape(d_out, d_env, d_in)
    return KrausChannel([v[:, e, :] for e in range(d_env)], in_dims, out_dims)


def random_channel(in_dims, out_dims, rng: np.random.Generator, env_dim: int | None = None) -> KrausChannel:
    """Channel with a Haar-random Stinespring isometry."""
    d_in, d_out = int(np.prod(in_dims)), int(np.prod(out_dims))
    if env_dim is None:
        env_dim = d_in * d_out
    env_dim = max(env_dim, -(-d_in // d_out))
    v = haar_isometry(d_in, d_out * env_dim, rng)
    return stinespring_channel(v, in_dims, out_dims)


@dataclass(frozen=True, eq=False)
class Purification:
    """Pure state on ``system (x) ancilla`` whose system marginal is the source state."""

    vector: np.ndarray
    system_dims: tuple
    ancilla_dims: tuple

    @property
    def dims(self) -> tuple:
        return self.system_dims + self.ancilla_dims

    def density(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())


def purify(rho: np.ndarray, dims: Sequence[int] | None = None) -> Purification:
    """Canonical purification ``sum_i sqrt(l_i) |v_i> (x) |i>``.

    The ancilla copies the system dimensions. Eigenpairs are taken in
    descending order so a pure input maps onto ancilla ``|0>``.
    """
    rho = check_density(rho)
    d = rho.shape[0]
    dims = (d,) if dims is None else tuple(int(x) for x in dims)
    w, v = eig_hermitian(rho)
    w, v = w[::-1], v[:, ::-1]
    amps = np.sqrt(np.clip(w, 0.0, None))
    # sum_i amps_i v_i (x) e_i, stored row-major as (system, ancilla)
    psi = (v * amps).reshape(d * d)
    return Purification(psi, dims, dims)


def channel_to_state(ch: KrausChannel, rho_a: np.ndarray, dims_a: Sequence[int] | None = None):
    """``sigma_AB = (id_A (x) ch)(|phi_AA'><phi_AA'|)`` for the purification of ``rho_a``.

    Returns ``(sigma_AB, dims_A + ch.out_dims)``. The A-marginal of the result
    is ``rho_a``.
    """
    pur = purify(rho_a, dims_a)
    if int(np.prod(pur.ancilla_dims)) != ch.d_in:
        raise ValueError(
            f"channel in_dims {ch.in_dims} do not match ancilla dims {pur.ancilla_dims}"
        )
    ext = extend_identity(ch, pur.system_dims)
    return apply(ext, pur.density()), pur.system_dims + ch.out_dims


def amplitude_damping_model(lam: float, p: float):
    """Two-qubit source state and the damping-then-discard channel X1X2 -> Y.

    ``rho_X = [(1-p)|+><+| + p I/2] (x) I/2``. The channel applies amplitude
    damping with decay ``lam`` to the first qubit and traces out the second;
    the partial trace is folded into four Kraus operators ``(A_i (x) <j|)``.

    Returns ``(rho_X, channel)`` with ``rho_X`` on dims ``(2, 2)``.
    """
    if not (0.0 <= lam <= 1.0 and 0.0 <= p <= 1.0):
        raise ValueError(f"lambda and p must lie in [0, 1], got {lam}, {p}")
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    first = (1.0 - p) * np.outer(plus, plus.conj()) + p * np.eye(2) / 2.0
    rho_x = np.kron(first, np.eye(2) / 2.0)
    a1 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - lam)]], dtype=complex)
    a2 = np.array([[0.0, np.sqrt(lam)], [0.0, 0.0]], dtype=complex)
    ops = [np.kron(a, ket(j, 2)[None, :]) for a in (a1, a2) for j in range(2)]
    return rho_x, KrausChannel(ops, (2, 2), (2,))
