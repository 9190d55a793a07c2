"""Amplitude-damping bottleneck experiments: initial states, runs and sweeps."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .algorithm import RunTrace, fmt, run, step
from .bottleneck import IBProblem, ib_decompose, ib_family, ib_omega
from .channels import amplitude_damping_model, purify
from .config import SolverConfig
from .errors import GQABError
from .linop import (
    check_density,
    haar_unitary,
    partial_trace,
    permute_subsystems,
    trace_distance,
)

TRACE_COLUMNS = ["iter", "objective", "i_tx", "h_t", "i_ty", "residual", "step_relent", "proj_iters"]
SWEEP_COLUMNS = ["param", "objective", "iters", "monotone", "fixpoint_residual"]


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]])


def controlled_rx(k: int, n: int) -> np.ndarray:
    """``|0><0| (x) I + |1><1| (x) R_x(2 pi k / n)`` on control (x) target."""
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(p0, np.eye(2)) + np.kron(p1, rx(2.0 * np.pi * k / n))


@dataclass(frozen=True)
class ExperimentConfig:
    lam: float = 0.7
    p: float = 0.3
    n: int = 40
    alpha: float = 1.0
    gamma: float | None = None
    beta: float = 5.0
    k: int = 20
    seed: int = 0
    # memory start state; I/2 would be invariant under the controlled rotation
    rho_t: tuple = ((1.0, 0.0), (0.0, 0.0))
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not 0 <= self.k < self.n:
            raise ValueError(f"k must satisfy 0 <= k < n, got k={self.k}, n={self.n}")
        if self.gamma is None and self.alpha <= 0:
            raise ValueError("alpha = 0 needs an explicit gamma")

    @property
    def effective_gamma(self) -> float:
        return self.alpha if self.gamma is None else self.gamma

    def solver_config(self) -> SolverConfig:
        return replace(self.solver, gamma=self.effective_gamma)

    def problem(self) -> IBProblem:
        rho_x, ch = amplitude_damping_model(self.lam, self.p)
        return IBProblem(rho_x, ch, self.alpha, self.beta, dim_t=2, x_dims=(2, 2))

    def memory_state(self) -> np.ndarray:
        return check_density(np.array(self.rho_t, dtype=complex))

    def random_unitary(self) -> np.ndarray:
        return haar_unitary(4, np.random.default_rng(self.seed))

    def header(self) -> list[str]:
        d = asdict(self)
        d["gamma"] = self.effective_gamma
        solver = d.pop("solver")
        lines = [f"{k}={v}" for k, v in d.items()]
        lines += [f"solver.{k}={v}" for k, v in solver.items()]
        lines.append("units=nats (divide by ln 2 for bits)")
        return lines


def initial_state(cfg: ExperimentConfig, k: int, u_rand: np.ndarray) -> np.ndarray:
    """Correlated start ``sigma^(k)`` on ``T (x) X1 (x) X2``.

    Purify ``rho_X`` onto ancillas ``X1' X2'``, append ``rho_T``, apply
    ``u_rand`` on ``X1' X2'`` followed by a controlled ``R_x(2 pi k / n)`` from
    ``X2'`` onto ``T``, and discard the ancillas. The ancilla-side unitaries
    leave the X marginal equal to ``rho_X``.
    """
    if not 0 <= k < cfg.n:
        raise ValueError(f"k must satisfy 0 <= k < n, got {k}")
    u_rand = np.asarray(u_rand, dtype=complex)
    if u_rand.shape != (4, 4) or np.max(np.abs(u_rand.conj().T @ u_rand - np.eye(4))) > 1e-10:
        raise ValueError("u_rand must be a 4x4 unitary")
    p = cfg.problem()
    pur = purify(p.rho_x, p.x_dims)
    rho_t = cfg.memory_state()
    # subsystems: X1 X2 X1' X2' T
    big = np.kron(pur.density(), rho_t)
    w = np.kron(np.eye(2), controlled_rx(k, cfg.n)) @ np.kron(u_rand, np.eye(2))
    u = np.kron(np.eye(4), w)
    big = u @ big @ u.conj().T
    sigma_xt = partial_trace(big, (2, 2, 2, 2, 2), [0, 1, 4])
    sigma_tx, _ = permute_subsystems(sigma_xt, (2, 2, 2), [2, 0, 1])
    return 0.5 * (sigma_tx + sigma_tx.conj().T)


@dataclass
class SingleRun:
    config: ExperimentConfig
    trace: RunTrace
    decompositions: list
    fixpoint_residual: float

    @property
    def objective(self) -> float:
        return self.trace.final_objective

    def to_csv(self) -> str:
        out = io.StringIO()
        for line in self.config.header():
            out.write(f"# {line}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for row, dec in zip(self.trace.rows(), self.decompositions):
            it, obj, res, rel, piters = row
            w.writerow([fmt(x) for x in (it, obj, dec.i_tx, dec.h_t, dec.i_ty, res, rel, piters)])
        return out.getvalue()


def run_single(cfg: ExperimentConfig, start: np.ndarray | None = None) -> SingleRun:
    """Run the iteration on the configured model from ``sigma^(k)`` (or ``start``)."""
    p = cfg.problem()
    fam = ib_family(p)
    f = ib_omega(p, cfg.solver.eps_clamp)
    solver = cfg.solver_config()
    sigma0 = initial_state(cfg, cfg.k, cfg.random_unitary()) if start is None else start
    trace = run(f, sigma0, fam, solver)
    decs = [ib_decompose(p, s) for s in trace.states]
    fin = trace.final_state
    resid = trace_distance(fin, step(f, fin, fam, solver, tau0=trace.tau))
    return SingleRun(cfg, trace, decs, resid)


@dataclass
class SweepResult:
    name: str
    rows: list
    header: list

    def to_csv(self) -> str:
        out = io.StringIO()
        for line in self.header:
            out.write(f"# {line}\n")
        w = csv.writer(out, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in self.rows:
            w.writerow([fmt(x) for x in r])
        return out.getvalue()


def _sweep_row(args):
    param, cfg = args
    res = run_single(cfg)
    return [param, res.objective, res.trace.iterations, res.trace.monotone_guaranteed, res.fixpoint_residual]


def _sweep(name, items, header, jobs):
    rows = []
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                for row in ex.map(_sweep_row, items):
                    rows.append(row)
        else:
            for it in items:
                rows.append(_sweep_row(it))
    except GQABError as exc:
        # completed rows travel with the error so callers can flush them
        exc.partial = SweepResult(name, rows, header)
        raise
    return SweepResult(name, rows, header)


def sweep_k(cfg: ExperimentConfig, ks=None, jobs: int = 1) -> SweepResult:
    """One converged run per ``k`` with the same random unitary throughout."""
    ks = range(cfg.n) if ks is None else ks
    items = [(k, replace(cfg, k=k)) for k in ks]
    return _sweep("k", items, cfg.header() + ["sweep=k"], jobs)


def inverse_beta_grid(lo: float = 0.11, hi: float = 0.30, step: float = 0.01) -> list[float]:
    count = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def sweep_beta(cfg: ExperimentConfig, inv_betas=None, jobs: int = 1) -> SweepResult:
    """One converged run per ``beta = 1 / x`` for ``x`` in ``inv_betas``; ``param`` is ``1/beta``."""
    inv_betas = inverse_beta_grid() if inv_betas is None else list(inv_betas)
    items = [(x, replace(cfg, beta=1.0 / x)) for x in inv_betas]
    return _sweep("inv_beta", items, cfg.header() + ["sweep=inv_beta"], jobs)

