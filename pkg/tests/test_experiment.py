import math

import numpy as np
import pytest

from gqab.experiment import (
    ExperimentConfig,
    controlled_rx,
    initial_state,
    inverse_beta_grid,
    run_single,
    rx,
    sweep_beta,
    sweep_k,
)
from gqab.linop import haar_unitary, partial_trace


def test_rx_and_controlled():
    assert np.allclose(rx(np.pi), -1j * np.array([[0, 1], [1, 0]]))
    c = controlled_rx(20, 40)
    assert np.allclose(c[:2, :2], np.eye(2))
    assert np.allclose(c[2:, 2:], -1j * np.array([[0, 1], [1, 0]]))
    assert np.allclose(controlled_rx(0, 40), np.eye(4))


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(k=40)
    with pytest.raises(ValueError):
        ExperimentConfig(alpha=0.0)
    assert ExperimentConfig(alpha=0.0, gamma=0.5).effective_gamma == 0.5
    assert ExperimentConfig(alpha=0.5).solver_config().gamma == 0.5


def test_initial_state_k0_is_product():
    cfg = ExperimentConfig()
    sigma = initial_state(cfg, 0, cfg.random_unitary())
    assert np.allclose(sigma, np.kron(cfg.memory_state(), cfg.problem().rho_x), atol=1e-12)


def test_initial_state_marginal_all_k_and_seeds():
    rng = np.random.default_rng(99)
    cfg = ExperimentConfig()
    rho_x = cfg.problem().rho_x
    for _ in range(100):
        k = int(rng.integers(0, cfg.n))
        sigma = initial_state(cfg, k, haar_unitary(4, rng))
        assert np.max(np.abs(partial_trace(sigma, (2, 2, 2), [1, 2]) - rho_x)) < 1e-10
        assert np.min(np.linalg.eigvalsh(sigma)) > -1e-12


def test_initial_state_rejects_non_unitary():
    cfg = ExperimentConfig()
    with pytest.raises(ValueError, match="unitary"):
        initial_state(cfg, 3, 2 * np.eye(4))
    with pytest.raises(ValueError):
        initial_state(cfg, 40, np.eye(4))


def test_mixed_memory_start_is_a_fixed_point():
    cfg = ExperimentConfig(rho_t=((0.5, 0.0), (0.0, 0.5)))
    res = run_single(cfg)
    assert abs(res.objective) < 1e-9
    assert res.trace.iterations <= cfg.solver.patience


def test_run_single_default():
    res = run_single(ExperimentConfig())
    tr = res.trace
    assert tr.reason == "converged" and tr.iterations < 5000
    assert tr.monotone_guaranteed
    assert np.all(np.diff(tr.objectives) <= 1e-9)
    assert res.fixpoint_residual < 1e-6
    again = run_single(ExperimentConfig(), start=tr.final_state)
    assert abs(again.objective - res.objective) < 1e-8
    lines = res.to_csv().splitlines()
    assert any("units=nats" in ln for ln in lines) and any(ln == "# seed=0" for ln in lines)
    header = [ln for ln in lines if not ln.startswith("#")][0]
    assert header == "iter,objective,i_tx,h_t,i_ty,residual,step_relent,proj_iters"


def test_run_single_data_processing_case():
    res = run_single(ExperimentConfig(beta=1.0))
    assert all(d.total >= -1e-12 for d in res.decompositions)


def test_decomposition_columns_agree_with_objective():
    res = run_single(ExperimentConfig(beta=10.0))
    for g, d in zip(res.trace.objectives, res.decompositions):
        assert abs(g - d.total) < 1e-9


def test_sweep_k():
    cfg = ExperimentConfig(beta=2.0)
    sw = sweep_k(cfg)
    assert [r[0] for r in sw.rows] == list(range(40))
    assert sw.rows[0][1] == run_single(ExperimentConfig(beta=2.0, k=0)).objective
    for row in sw.rows:
        assert math.isfinite(row[1]) and row[1] >= -2.0 * np.log(2) - 1e-12
        assert row[3]
    assert sweep_k(cfg, ks=[0, 7]).to_csv() == sweep_k(cfg, ks=[0, 7]).to_csv()


def test_sweep_k_parallel_matches_serial():
    cfg = ExperimentConfig(beta=5.0)
    assert sweep_k(cfg, ks=[5, 20], jobs=2).to_csv() == sweep_k(cfg, ks=[5, 20]).to_csv()


def test_sweep_beta():
    grid = inverse_beta_grid()
    assert len(grid) == 20 and grid[0] == 0.11 and grid[-1] == 0.3
    sw = sweep_beta(ExperimentConfig())
    assert len(sw.rows) == 20
    assert all(r[3] for r in sw.rows)
    single = sweep_beta(ExperimentConfig(), [0.2])
    assert single.rows[0][1] == run_single(ExperimentConfig(beta=5.0)).objective
    assert sw.to_csv().splitlines()[-21] == "param,objective,iters,monotone,fixpoint_residual"
