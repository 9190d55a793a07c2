from __future__ import annotations

from dataclasses import dataclass

from .linop import EPS_CLAMP


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets for the outer iteration and the inner e-projection.

    The outer loop stops once, for ``patience`` consecutive iterations, the
    objective change scaled by ``max(1, |G|)`` is below ``tol_obj`` and the
    trace distance between successive iterates is below ``tol_step``.
    """

    gamma: float = 1.0
    max_iters: int = 5000
    tol_obj: float = 1e-10
    patience: int = 3
    tol_step: float = 1e-8
    tol_proj: float = 1e-10
    max_proj_iters: int = 10000
    eps_clamp: float = EPS_CLAMP

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        for name in ("tol_obj", "tol_step", "tol_proj", "eps_clamp"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1 or self.max_proj_iters < 1 or self.patience < 1:
            raise ValueError("iteration budgets must be at least 1")
