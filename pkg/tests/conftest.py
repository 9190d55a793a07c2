import numpy as np
import pytest

from gqab.bottleneck import IBProblem
from gqab.channels import amplitude_damping_model

# (number, description, passed, detail) rows filled in by test_acceptance
ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def model_problem(alpha=1.0, beta=5.0, lam=0.7, p=0.3):
    rho_x, ch = amplitude_damping_model(lam, p)
    return IBProblem(rho_x, ch, alpha, beta, dim_t=2, x_dims=(2, 2))


@pytest.fixture
def problem():
    return model_problem()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {desc}: {detail}")
