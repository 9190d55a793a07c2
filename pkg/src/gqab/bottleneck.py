"""Quantum information bottleneck as a constrained minimization over joint states.

The joint state ``sigma`` lives on ``T (x) X`` (memory first) and is constrained
to have X-marginal ``rho_X``. The objective is

    alpha I(T;X) + (1 - alpha) H(T) - beta I(T;Y),

with ``Y`` the output of a fixed channel ``R: X -> Y`` applied to the X part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algorithm import ObjectiveFunctional, d_omega, objective
from .channels import (
    KrausChannel,
    adjoint_apply,
    apply,
    extend_identity,
    purify,
    random_channel,
)
from .entropy import mutual_info, rel_entropy, von_neumann
from .linop import (
    check_density,
    check_dims,
    embed,
    log_clamped,
    partial_trace,
    permute_subsystems,
)
from .mixture import MixtureFamily, traceless_basis

MEMBERSHIP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class IBProblem:
    rho_x: np.ndarray
    channel: KrausChannel
    alpha: float
    beta: float
    dim_t: int = 2
    x_dims: tuple = ()

    def __post_init__(self):
        rho_x = check_density(self.rho_x)
        x_dims = tuple(self.x_dims) or self.channel.in_dims
        check_dims(rho_x, x_dims)
        object.__setattr__(self, "rho_x", rho_x)
        object.__setattr__(self, "x_dims", tuple(int(d) for d in x_dims))
        if int(np.prod(self.x_dims)) != self.channel.d_in:
            raise ValueError(f"channel in_dims {self.channel.in_dims} do not match rho_X dims {self.x_dims}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.beta < self.alpha:
            raise ValueError(f"beta must be >= alpha, got beta={self.beta}, alpha={self.alpha}")
        if self.dim_t < 1:
            raise ValueError("dim_t must be positive")

    @property
    def d_x(self) -> int:
        return int(np.prod(self.x_dims))

    @property
    def dims(self) -> tuple:
        """Subsystem dims of the joint state, memory first."""
        return (self.dim_t,) + self.x_dims

    @property
    def ty_dims(self) -> tuple:
        return (self.dim_t,) + self.channel.out_dims

    @property
    def split(self):
        return [0], list(range(1, len(self.x_dims) + 1))

    @property
    def ty_split(self):
        return [0], list(range(1, len(self.channel.out_dims) + 1))

    def extended_channel(self) -> KrausChannel:
        """``id_T (x) R``."""
        return extend_identity(self.channel, (self.dim_t,))

    def with_params(self, alpha=None, beta=None) -> "IBProblem":
        return IBProblem(
            self.rho_x,
            self.channel,
            self.alpha if alpha is None else alpha,
            self.beta if beta is None else beta,
            self.dim_t,
            self.x_dims,
        )


def ib_family(p: IBProblem) -> MixtureFamily:
    """States on ``T (x) X`` whose X-marginal is ``rho_X``.

    Constraints ``Tr sigma (I_T (x) B_j) = Tr rho_X B_j`` for a traceless
    Hermitian basis ``B_j`` of X; the trace itself is fixed by normalization.
    """
    basis = traceless_basis(p.d_x)
    ops = [embed(b, left=p.dim_t) for b in basis]
    vals = [float(np.trace(p.rho_x @ b).real) for b in basis]
    return MixtureFamily(ops, vals, p.dims)


class IBOmega(ObjectiveFunctional):
    """``alpha log sigma - alpha log rho_X + (beta-1) log sigma_T
    + beta R^*(log R(rho_X) - log R(sigma))`` with ``R`` acting on X only."""

    def __init__(self, p: IBProblem, eps_clamp: float = 1e-12):
        self.p = p
        self.eps_clamp = eps_clamp
        self.name = f"ib(alpha={p.alpha:g}, beta={p.beta:g})"
        self._ext = p.extended_channel()
        self._d_rest = p.d_x
        self._log_rho_x = embed(log_clamped(p.rho_x, eps_clamp), left=p.dim_t)
        self._log_r_rho_x = embed(log_clamped(apply(p.channel, p.rho_x), eps_clamp), left=p.dim_t)

    def omega(self, sigma):
        p, eps = self.p, self.eps_clamp
        sigma_t = partial_trace(sigma, p.dims, [0])
        log_t = embed(log_clamped(sigma_t, eps), right=self._d_rest)
        r_sigma = apply(self._ext, sigma)
        back = adjoint_apply(self._ext, self._log_r_rho_x - log_clamped(r_sigma, eps))
        out = p.alpha * (log_clamped(sigma, eps) - self._log_rho_x) + (p.beta - 1.0) * log_t + p.beta * back
        return 0.5 * (out + out.conj().T)


def ib_omega(p: IBProblem, eps_clamp: float = 1e-12) -> IBOmega:
    return IBOmega(p, eps_clamp)


@dataclass(frozen=True)
class IBDecomposition:
    i_tx: float
    h_t: float
    i_ty: float
    total: float


def _require_member(p: IBProblem, sigma: np.ndarray):
    sigma = np.asarray(sigma, dtype=complex)
    check_dims(sigma, p.dims)
    marg = partial_trace(sigma, p.dims, range(1, len(p.dims)))
    err = float(np.max(np.abs(marg - p.rho_x)))
    if err > MEMBERSHIP_TOL:
        raise ValueError(f"state is not in M(rho_X): X-marginal deviates by {err:.3e}")
    return sigma


def ib_decompose(p: IBProblem, sigma: np.ndarray) -> IBDecomposition:
    """Entropic terms of the bottleneck objective for a family member."""
    sigma = _require_member(p, sigma)
    i_tx = mutual_info(sigma, p.dims, p.split)
    h_t = von_neumann(partial_trace(sigma, p.dims, [0]))
    i_ty = mutual_info(apply(p.extended_channel(), sigma), p.ty_dims, p.ty_split)
    total = p.alpha * i_tx + (1.0 - p.alpha) * h_t - p.beta * i_ty
    return IBDecomposition(i_tx, h_t, i_ty, total)


def divergence_terms(p: IBProblem, sigma, sigma2):
    """``(D(sigma||sigma'), D(sigma_T||sigma'_T), D(R sigma||R sigma'))``."""
    ext = p.extended_channel()
    d_full = rel_entropy(sigma, sigma2)
    d_t = rel_entropy(partial_trace(sigma, p.dims, [0]), partial_trace(sigma2, p.dims, [0]))
    d_r = rel_entropy(apply(ext, sigma), apply(ext, sigma2))
    return d_full, d_t, d_r


def mms_gap(p: IBProblem, sigma, sigma2, f: IBOmega | None = None) -> float:
    """``alpha D(sigma||sigma') - D_Omega(sigma||sigma')``; non-negative on the family."""
    sigma = _require_member(p, sigma)
    sigma2 = _require_member(p, sigma2)
    f = ib_omega(p) if f is None else f
    return p.alpha * rel_entropy(sigma, sigma2) - d_omega(f, sigma, sigma2)


def xmq_value(p: IBProblem, sigma, sigma2) -> float:
    """``alpha D + (beta-1) D_T - beta D_R`` for a pair of family members."""
    d_full, d_t, d_r = divergence_terms(p, sigma, sigma2)
    return p.alpha * d_full + (p.beta - 1.0) * d_t - p.beta * d_r


def random_member(p: IBProblem, rng: np.random.Generator, factors=None) -> np.ndarray:
    """Family member ``(id_X (x) E)(|phi><phi|)`` for a random channel ``E: X' -> T``.

    ``|phi>`` purifies ``rho_X`` onto a copy ``X'`` of X. ``E`` discards every
    tensor factor of ``X'`` outside ``factors`` and applies a Haar-random
    Stinespring isometry to the rest; ``factors=None`` draws a random
    non-empty subset. Membership is exact by construction.
    """
    n = len(p.x_dims)
    if factors is None:
        mask = 0
        while not mask:
            mask = int(rng.integers(1, 2**n))
        factors = [i for i in range(n) if mask >> i & 1]
    factors = sorted(factors)
    pur = purify(p.rho_x, p.x_dims)
    keep = list(range(n)) + [n + i for i in factors]
    reduced = partial_trace(pur.density(), pur.dims, keep)
    d_sub = int(np.prod([p.x_dims[i] for i in factors]))
    ch = extend_identity(random_channel((d_sub,), (p.dim_t,), rng), p.x_dims)
    sigma_xt = apply(ch, reduced)
    sigma_tx, _ = permute_subsystems(sigma_xt, (p.d_x, p.dim_t), [1, 0])
    return sigma_tx


def xmq_probe(p: IBProblem, trials: int, seed=None):
    """Random search for pairs violating ``alpha D + (beta-1) D_T - beta D_R >= 0``.

    Returns ``(min_value, (sigma, sigma'))``; a negative minimum exhibits a
    violation.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    best, witness = float("inf"), None
    for _ in range(trials):
        s1 = random_member(p, rng)
        s2 = random_member(p, rng)
        val = xmq_value(p, s1, s2)
        if val < best:
            best, witness = val, (s1, s2)
    return best, witness


def ib_objective(p: IBProblem, sigma) -> float:
    return objective(ib_omega(p), sigma)
