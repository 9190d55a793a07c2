"""Generalized quantum Arimoto-Blahut iteration under linear constraints,
with the quantum information bottleneck as the worked application."""

from .algorithm import (
    CallableOmega,
    ConstantOmega,
    ObjectiveFunctional,
    RunTrace,
    d_omega,
    f3,
    j_gamma,
    objective,
    run,
    step,
)
from .bottleneck import IBProblem, ib_decompose, ib_family, ib_omega, mms_gap, xmq_probe
from .channels import KrausChannel, amplitude_damping_model, channel_to_state, purify
from .config import SolverConfig
from .entropy import mutual_info, rel_entropy, von_neumann
from .errors import (
    ConvergenceError,
    GQABError,
    InvariantViolation,
    ParseError,
    ProjectionError,
)
from .mixture import MixtureFamily, e_project, log_partition, log_partition_grad

__all__ = [
    "CallableOmega",
    "ConstantOmega",
    "ConvergenceError",
    "GQABError",
    "IBProblem",
    "InvariantViolation",
    "KrausChannel",
    "MixtureFamily",
    "ObjectiveFunctional",
    "ParseError",
    "ProjectionError",
    "RunTrace",
    "SolverConfig",
    "amplitude_damping_model",
    "channel_to_state",
    "d_omega",
    "e_project",
    "f3",
    "ib_decompose",
    "ib_family",
    "ib_omega",
    "j_gamma",
    "log_partition",
    "log_partition_grad",
    "mms_gap",
    "mutual_info",
    "objective",
    "purify",
    "rel_entropy",
    "run",
    "step",
    "von_neumann",
    "xmq_probe",
]
