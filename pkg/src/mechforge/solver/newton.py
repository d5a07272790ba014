"""Full Newton iteration on an assembled residual/tangent pair."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..errors import NonConvergence, NonPositiveJacobian
from ..fem.sparse import SparseMatrix, apply_dirichlet
from .linear import linear_solve

log = logging.getLogger(__name__)

# relative size of an increment that is indistinguishable from round-off
INCREMENT_FLOOR = 1e-13
# an increment that inverts an element is halved at most this many times
MAX_BACKTRACKS = 6


@dataclass(frozen=True)
class NewtonSettings:
    max_iterations: int = 50
    abs_tol: float = 1e-9
    rel_tol: float = 1e-10
    max_halvings: int = 4
    linear_solver: str = "lu"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")

    @classmethod
    def from_config(cls, solver_cfg):
        n = solver_cfg.newton
        return cls(n.max_iters, n.abs_tol, n.rel_tol, n.max_halvings,
                   solver_cfg.linear_solver)


@dataclass
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual_norm: float
    history: List[float] = field(default_factory=list)


def _dense_dirichlet(K, rhs, dofs, vals, x):
    K[dofs, :] = 0.0
    K[dofs, dofs] = 1.0
    rhs[dofs] = vals - x[dofs]


def _damped_update(system_fn, x, dx, dofs, vals):
    """Apply ``dx``, halving it while the trial state inverts an element."""
    alpha = 1.0
    for k in range(MAX_BACKTRACKS + 1):
        trial = x + alpha * dx
        if len(dofs):
            trial[dofs] = vals if alpha == 1.0 else x[dofs] + alpha * (vals - x[dofs])
        try:
            return trial, system_fn(trial, True)
        except NonPositiveJacobian:
            if k == MAX_BACKTRACKS:
                raise
            alpha *= 0.5
            log.debug("increment inverts an element; damping to %.4g", alpha)


def newton_solve(system_fn, x0, settings=NewtonSettings(), load_scale=0.0):
    """Drive ``system_fn(x, need_tangent) -> ResidualSystem`` to a root.

    Dirichlet values enter through the first increment and are held by
    zero increments afterwards.  Convergence: the residual on free dofs
    satisfies ``||R|| <= max(abs_tol * max(1, load_scale), rel_tol * ||R_0||)``,
    or the increment drops to round-off level.
    """
    x = np.array(x0, dtype=float, copy=True)
    history = []
    abs_tol = settings.abs_tol * max(1.0, load_scale)
    r0 = None
    sys = system_fn(x, True)
    for it in range(settings.max_iterations + 1):
        dofs = np.asarray(sys.dirichlet_dofs, dtype=np.int64)
        vals = np.asarray(sys.dirichlet_values, dtype=float)
        R = np.array(sys.residual, dtype=float)
        R[dofs] = 0.0
        norm = float(np.linalg.norm(R))
        history.append(norm)
        gap = float(np.max(np.abs(vals - x[dofs]))) if len(dofs) else 0.0
        if r0 is None:
            r0 = norm
        log.debug("newton it %d |R| = %.6e  dirichlet gap %.2e", it, norm, gap)
        if not np.isfinite(norm):
            raise NonConvergence(f"residual is not finite at iteration {it}",
                                 iterations=it, residual=norm)
        if gap == 0.0 and norm <= max(abs_tol, settings.rel_tol * r0):
            return NewtonResult(x, it, norm, history)
        if it == settings.max_iterations:
            break
        K = sys.tangent
        rhs = -R
        if isinstance(K, SparseMatrix):
            apply_dirichlet(K, rhs, dofs, vals, current=x)
        else:
            K = np.array(np.atleast_2d(K), dtype=float)
            _dense_dirichlet(K, rhs, dofs, vals, x)
        dx = linear_solve(K, rhs, settings.linear_solver)
        x, sys = _damped_update(system_fn, x, dx, dofs, vals)
        if gap == 0.0 and np.max(np.abs(dx), initial=0.0) <= \
                INCREMENT_FLOOR * max(1.0, np.max(np.abs(x), initial=0.0)):
            # the residual is at its round-off floor
            return NewtonResult(x, it + 1, norm, history)
    raise NonConvergence(
        f"Newton did not converge in {settings.max_iterations} iterations "
        f"(|R| = {history[-1]:.3e})",
        iterations=settings.max_iterations, residual=history[-1])
