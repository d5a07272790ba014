"""One-step time integrators: theta-method and Newmark."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..formulation.base import ResidualSystem
from .newton import NewtonSettings, newton_solve


@dataclass(frozen=True)
class ThetaScheme:
    """theta = 1 backward Euler, 1/2 Crank-Nicolson, 0 forward Euler."""

    theta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")


def _fd_jacobian(f, y, t, h=1e-7):
    f0 = np.atleast_1d(f(y, t))
    J = np.empty((len(f0), len(y)))
    for j in range(len(y)):
        step = h * max(1.0, abs(y[j]))
        yp = y.copy()
        yp[j] += step
        J[:, j] = (np.atleast_1d(f(yp, t)) - f0) / step
    return J


def theta_step(scheme, M, f, y_n, t_n, dt, jac=None, settings=NewtonSettings()):
    """Advance ``M y' = f(y, t)`` by one step.

    Solves ``M (y - y_n)/dt = theta f(y, t_n + dt) + (1 - theta) f(y_n, t_n)``
    with Newton; ``jac(y, t)`` defaults to a finite-difference Jacobian.
    """
    scalar = np.ndim(y_n) == 0
    y_n = np.atleast_1d(np.asarray(y_n, dtype=float))
    n = len(y_n)
    Mm = np.eye(n) * M if np.ndim(M) == 0 else np.asarray(M, dtype=float)
    th = scheme.theta
    t1 = t_n + dt

    def fv(y, t):
        return np.atleast_1d(np.asarray(f(y[0] if scalar else y, t), dtype=float))

    def jv(y, t):
        if jac is None:
            return _fd_jacobian(fv, y, t)
        return np.atleast_2d(np.asarray(jac(y[0] if scalar else y, t), dtype=float))

    explicit = (1.0 - th) * fv(y_n, t_n) if th < 1.0 else 0.0

    def system(y, need_tangent):
        R = Mm @ (y - y_n) / dt - explicit
        K = Mm / dt
        if th > 0.0:
            R = R - th * fv(y, t1)
            K = K - th * jv(y, t1)
        return ResidualSystem(R, K)

    y = newton_solve(system, y_n, settings).x
    return float(y[0]) if scalar else y


@dataclass(frozen=True)
class NewmarkScheme:
    """Newmark (beta, gamma); (1/4, 1/2) is the average-acceleration rule."""

    beta: float = 0.25
    gamma: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.beta <= 0.5:
            raise ValueError(f"newmark beta must lie in (0, 0.5], got {self.beta}")
        if not 0.5 <= self.gamma <= 1.0:
            raise ValueError(f"newmark gamma must lie in [0.5, 1], got {self.gamma}")


@dataclass
class NewmarkState:
    u: np.ndarray
    v: np.ndarray
    a: np.ndarray
    t: float = 0.0
    iterations: Optional[int] = None


def newmark_step(scheme, system_fn, state, dt, settings=NewtonSettings(), load_scale=0.0):
    """Advance (u, v, a) by ``dt``.

    ``system_fn(u, a, t, mass_coeff, need_tangent)`` must return the
    ResidualSystem of ``M a + N(u) - f(t)`` whose tangent is
    ``dN/du + mass_coeff M``.  The new acceleration follows from the
    displacement update, so Newton iterates on ``u`` alone.
    """
    b, g = scheme.beta, scheme.gamma
    u_n, v_n, a_n = (np.asarray(z, dtype=float) for z in (state.u, state.v, state.a))
    t1 = state.t + dt
    c = 1.0 / (b * dt * dt)
    u_pred = u_n + dt * v_n + 0.5 * dt * dt * (1.0 - 2.0 * b) * a_n

    def accel(u):
        return c * (u - u_pred)

    def system(u, need_tangent):
        return system_fn(u, accel(u), t1, c, need_tangent)

    res = newton_solve(system, u_n, settings, load_scale=load_scale)
    u1 = res.x
    a1 = accel(u1)
    v1 = v_n + dt * ((1.0 - g) * a_n + g * a1)
    return NewmarkState(u1, v1, a1, t1, res.iterations)
