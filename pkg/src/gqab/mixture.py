"""Mixture families of states and the e-projection onto them.

A mixture family fixes the expectation values ``Tr rho H_i = a_i`` of a set of
linearly independent Hermitian operators. The e-projection of ``rho`` is the
family member closest to ``rho`` in relative entropy ``D(. || rho)``; it has
the exponential form ``exp(log rho + sum_j tau_j H_j) / Z`` with multipliers
``tau`` minimizing the convex log-partition functional

    psi(tau) = log Tr exp(log rho + sum_j tau_j H_j) - sum_i tau_i a_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .config import SolverConfig
from .errors import ProjectionError
from .linop import check_density, check_dims, log_clamped, symmetrize

ARMIJO_C = 1e-4
BACKTRACK = 0.5
GRAM_COND_MAX = 1e12


def traceless_basis(d: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices: ``d^2 - 1`` traceless Hermitian operators.

    Normalized so that ``Tr(B_i B_j) = 2 delta_ij``.
    """
    basis = []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            basis.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            basis.append(a)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    return basis


@dataclass(frozen=True, eq=False)
class MixtureFamily:
    """``{rho : Tr rho H_i = a_i}`` over a fixed ambient space."""

    operators: tuple
    values: np.ndarray
    dims: tuple

    def __init__(self, operators: Sequence[np.ndarray], values: Sequence[float], dims: Sequence[int]):
        ops = tuple(symmetrize(np.asarray(h, dtype=complex)) for h in operators)
        vals = np.asarray(values, dtype=float).reshape(-1)
        if len(ops) != vals.size:
            raise ValueError(f"{len(ops)} operators but {vals.size} target values")
        d = int(np.prod(dims))
        for h in ops:
            check_dims(h, dims)
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dims", tuple(int(x) for x in dims))
        object.__setattr__(self, "_stack", np.array(ops).reshape(len(ops), d, d))
        if ops:
            cond = self.gram_condition()
            if not np.isfinite(cond) or cond > GRAM_COND_MAX:
                raise ValueError(f"constraint operators are linearly dependent (Gram condition {cond:.3e})")

    @property
    def k(self) -> int:
        return len(self.operators)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def stack(self) -> np.ndarray:
        return self._stack

    def gram(self) -> np.ndarray:
        s = self._stack.reshape(self.k, -1)
        return (s.conj() @ s.T).real

    def gram_condition(self) -> float:
        return float(np.linalg.cond(self.gram())) if self.k else 1.0

    def expectations(self, rho: np.ndarray) -> np.ndarray:
        # Tr(rho H_i) = sum_{ab} rho_ab (H_i)_ba
        return np.einsum("kab,ba->k", self._stack, rho).real

    def residual(self, rho: np.ndarray) -> float:
        if not self.k:
            return 0.0
        return float(np.max(np.abs(self.expectations(rho) - self.values)))

    def combination(self, tau: np.ndarray) -> np.ndarray:
        if not self.k:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return np.tensordot(np.asarray(tau, dtype=float), self._stack, axes=1)

    @classmethod
    def family_of(cls, rho: np.ndarray, operators: Sequence[np.ndarray], dims: Sequence[int]) -> "MixtureFamily":
        """Family through ``rho``: targets are ``rho``'s own expectation values."""
        fam = cls(operators, np.zeros(len(operators)), dims)
        return cls(operators, fam.expectations(np.asarray(rho, dtype=complex)), dims)


def contains(fam: MixtureFamily, rho: np.ndarray, tol: float = 1e-9) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (fam.dim, fam.dim):
        raise ValueError(f"state of shape {rho.shape} does not match family dims {fam.dims}")
    return fam.residual(rho) <= tol


def _check_tau(fam: MixtureFamily, tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float).reshape(-1)
    if tau.size != fam.k:
        raise ValueError(f"tau has {tau.size} entries, family has {fam.k} constraints")
    return tau


def _evaluate(a: np.ndarray, fam: MixtureFamily, tau: np.ndarray):
    """Return ``(psi, grad, omega, log_norm)`` at ``tau``.

    ``omega`` is the normalized exponential state and ``log_norm`` the log of
    its normalizer ``log Tr exp(a + sum tau H)``.
    """
    w, v = np.linalg.eigh(symmetrize(a + fam.combination(tau)))
    log_norm = float(logsumexp(w))
    probs = np.exp(w - log_norm)
    omega = symmetrize((v * probs) @ v.conj().T)
    grad = fam.expectations(omega) - fam.values
    psi = log_norm - float(tau @ fam.values)
    return psi, grad, omega, log_norm


def log_partition(a: np.ndarray, fam: MixtureFamily, tau) -> float:
    """``psi(tau) = log Tr exp(a + sum_j tau_j H_j) - sum_i tau_i a_i``."""
    return _evaluate(np.asarray(a, dtype=complex), fam, _check_tau(fam, tau))[0]


def log_partition_grad(a: np.ndarray, fam: MixtureFamily, tau) -> np.ndarray:
    """Exact gradient ``Tr[omega(tau) H_i] - a_i`` of :func:`log_partition`."""
    return _evaluate(np.asarray(a, dtype=complex), fam, _check_tau(fam, tau))[1]


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    projected: np.ndarray
    tau: np.ndarray
    iterations: int
    grad_norm: float
    log_norm: float


def e_project_exponent(
    a: np.ndarray,
    fam: MixtureFamily,
    cfg: SolverConfig | None = None,
    tau0=None,
) -> ProjectionResult:
    """e-projection of the state ``exp(a) / Tr exp(a)`` onto ``fam``.

    Works directly from the exponent ``a`` (a Hermitian "log-state"), which
    avoids re-taking the logarithm of an already exponentiated operator.

    The multipliers come from gradient descent on the log-partition functional
    with Armijo backtracking; each trial step starts from the Barzilai-Borwein
    length of the previous iteration.
    """
    cfg = SolverConfig() if cfg is None else cfg
    a = symmetrize(np.asarray(a, dtype=complex))
    tau = np.zeros(fam.k) if tau0 is None else _check_tau(fam, tau0).copy()
    psi, grad, omega, log_norm = _evaluate(a, fam, tau)
    gnorm = float(np.max(np.abs(grad))) if fam.k else 0.0
    step = 1.0
    it = 0
    while gnorm > cfg.tol_proj:
        if it >= cfg.max_proj_iters:
            raise ProjectionError(
                f"e-projection did not converge in {cfg.max_proj_iters} iterations "
                f"(gradient sup-norm {gnorm:.3e})",
                tau=tau,
                residual=gnorm,
            )
        it += 1
        g2 = float(grad @ grad)
        t = step
        while True:
            new_tau = tau - t * grad
            n_psi, n_grad, n_omega, n_log_norm = _evaluate(a, fam, new_tau)
            if n_psi <= psi - ARMIJO_C * t * g2:
                break
            # Near the optimum psi differences drown in round-off; accept any
            # step that still shrinks the gradient.
            noise = 64 * np.finfo(float).eps * max(1.0, abs(psi))
            if abs(n_psi - psi) <= noise and np.max(np.abs(n_grad)) < gnorm:
                break
            t *= BACKTRACK
            if t < 1e-300:
                raise ProjectionError(
                    f"line search stalled (gradient sup-norm {gnorm:.3e})", tau=tau, residual=gnorm
                )
        s = new_tau - tau
        y = n_grad - grad
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 0 else 2.0 * t
        tau, psi, grad, omega, log_norm = new_tau, n_psi, n_grad, n_omega, n_log_norm
        gnorm = float(np.max(np.abs(grad)))
    return ProjectionResult(omega, tau, it, gnorm, log_norm)


def e_project(
    rho: np.ndarray,
    fam: MixtureFamily,
    cfg: SolverConfig | None = None,
    tau0=None,
) -> ProjectionResult:
    """Project ``rho`` onto ``fam`` minimizing ``D(sigma || rho)`` over members ``sigma``.

    ``rho`` must be full rank after eigenvalue clamping (``cfg.eps_clamp``).
    Raises :class:`ProjectionError` when the multiplier search does not reach
    ``cfg.tol_proj``; an infeasible family shows up this way.
    """
    cfg = SolverConfig() if cfg is None else cfg
    rho = check_density(rho)
    if rho.shape != (fam.dim, fam.dim):
        raise ValueError(f"state of shape {rho.shape} does not match family dims {fam.dims}")
    return e_project_exponent(log_clamped(rho, cfg.eps_clamp), fam, cfg, tau0)
