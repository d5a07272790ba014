"""Time loop with adaptive step halving (``full_solve``)."""

from __future__ import annotations

import logging
import time as _time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ..errors import ExponentOverflow, NonConvergence, NonPositiveJacobian
from ..fem.sparse import apply_dirichlet
from ..formulation.base import FieldState
from ..formulation.fluid import FluidProblem
from .linear import linear_solve
from .newton import NewtonSettings, newton_solve
from .time import NewmarkScheme, NewmarkState, ThetaScheme, newmark_step

log = logging.getLogger(__name__)

# failures that a smaller step may cure
RETRYABLE = (NonConvergence, NonPositiveJacobian, ExponentOverflow)


@dataclass
class StepRecord:
    step: int
    time: float
    iterations: int
    residual: float
    halvings: int = 0


@dataclass
class SolveReport:
    steps: List[StepRecord] = field(default_factory=list)
    wall_time: float = 0.0
    probe: List[tuple] = field(default_factory=list)
    state: Optional[FieldState] = None

    @property
    def total_iterations(self):
        return sum(s.iterations for s in self.steps)

    @property
    def halving_events(self):
        return sum(s.halvings for s in self.steps)

    def summary(self):
        return (f"{len(self.steps)} steps, {self.total_iterations} Newton iterations, "
                f"{self.halving_events} step halvings, {self.wall_time:.2f} s")


class _Stepper:
    """One (sub)step of a given problem kind; subclasses own the history."""

    def __init__(self, problem, settings):
        self.problem = problem
        self.settings = settings

    def load_scale(self, x, t):
        return float(np.linalg.norm(self.problem.external_load(x, t)))


class _QuasiStatic(_Stepper):
    def __init__(self, problem, settings, predictor=True):
        super().__init__(problem, settings)
        self.predictor = predictor
        self._prev = None

    def step(self, state, dt):
        t1 = state.t + dt
        x0 = state.x
        if self.predictor and self._prev is not None:
            xp, tp = self._prev
            if state.t > tp:
                x0 = state.x + (state.x - xp) * (dt / (state.t - tp))
        try:
            res = self._solve(x0, t1)
        except RETRYABLE:
            if x0 is state.x:
                raise
            log.debug("predictor start failed at t=%.6g; retrying from last state", t1)
            res = self._solve(state.x, t1)
        self._prev = (state.x, state.t)
        return FieldState(res.x, t1), res

    def _solve(self, x0, t1):
        p = self.problem
        return newton_solve(lambda x, nt: p.assemble(x, t1, need_tangent=nt), x0,
                            self.settings, load_scale=self.load_scale(x0, t1))


class _Dynamic(_Stepper):
    def __init__(self, problem, settings, scheme):
        super().__init__(problem, settings)
        self.scheme = scheme

    def initial(self, state):
        """Consistent initial acceleration M a0 = f - N(u0) on free primary dofs."""
        p = self.problem
        sys = p.assemble(state.x, state.t, need_tangent=False)
        M = p.mass_matrix(p.density)
        n = p.space_u.dim
        rhs = -sys.residual
        free_p = np.arange(n, p.ndof)
        dofs = np.union1d(sys.dirichlet_dofs, free_p).astype(np.int64)
        apply_dirichlet(M, rhs, dofs, np.zeros(len(dofs)))
        a = linear_solve(M, rhs, self.settings.linear_solver)
        a[dofs] = 0.0
        v = np.zeros(p.ndof) if state.v is None else state.v
        return FieldState(state.x, state.t, v, a)

    def step(self, state, dt):
        p = self.problem

        def system(u, a, t, c, nt):
            return p.assemble(u, t, need_tangent=nt, mass_coeff=c, accel=a)

        ns = NewmarkState(state.x, state.v, state.a, state.t)
        out = newmark_step(self.scheme, system, ns, dt, self.settings,
                           load_scale=self.load_scale(state.x, state.t + dt))
        res = _Result(out.u, out.iterations)
        return FieldState(out.u, out.t, out.v, out.a), res


class _Theta(_Stepper):
    def __init__(self, problem, settings, scheme):
        super().__init__(problem, settings)
        self.scheme = scheme

    def step(self, state, dt):
        p = self.problem
        th = self.scheme.theta
        t1 = state.t + dt
        x_n = state.x
        explicit = (1.0 - th) * p.flow_operator(x_n, state.t) if th < 1.0 else 0.0

        def system(x, nt):
            sys = p.assemble(x, t1, need_tangent=nt, weight=th,
                             mass_coeff=1.0 / dt, rate=(x - x_n) / dt)
            sys.residual = sys.residual + explicit
            return sys

        res = newton_solve(system, x_n, self.settings, load_scale=self.load_scale(x_n, t1))
        return FieldState(res.x, t1), res


@dataclass
class _Result:
    x: np.ndarray
    iterations: int
    residual_norm: float = 0.0


class _Probe:
    def __init__(self, problem, point):
        self.problem = problem
        mesh = problem.mesh
        pt = np.zeros(mesh.dim)
        pt[:] = np.asarray(point, dtype=float)[:mesh.dim]
        self.vertex = int(mesh.nearest_vertex(pt))
        self.X = mesh.vertices[self.vertex]

    def sample(self, x):
        d = self.problem.dim
        u = x[self.vertex * d:(self.vertex + 1) * d]
        if isinstance(self.problem, FluidProblem):
            return u.copy()
        return self.X + u


def full_solve(problem, time=None, settings=NewtonSettings(),
               sink: Optional[Callable] = None, probe=None, predictor=True):
    """Solve ``problem`` over ``time`` (a TimeParams) or once at t = 0.

    ``sink(step, t, problem, x)`` receives every output step.  ``probe``
    records the current position (solids) or velocity (fluids) of the
    vertex nearest a point.  Retryable failures halve the step locally,
    at most ``settings.max_halvings`` levels deep.
    """
    start = _time.perf_counter()
    report = SolveReport()
    pr = _Probe(problem, probe) if probe is not None else None
    state = FieldState(np.zeros(problem.ndof), 0.0 if time is None else time.interval[0])

    def emit(step, st, rec):
        report.steps.append(rec)
        report.state = st
        if pr is not None:
            report.probe.append((st.t, pr.sample(st.x)))
        if sink is not None:
            sink(step, st.t, problem, st.x)

    if time is None:
        try:
            res = newton_solve(lambda x, nt: problem.assemble(x, 0.0, need_tangent=nt),
                               state.x, settings,
                               load_scale=float(np.linalg.norm(problem.external_load(state.x, 0.0))))
        except NonConvergence as exc:
            report.wall_time = _time.perf_counter() - start
            exc.report = report
            raise
        emit(0, FieldState(res.x, 0.0), StepRecord(0, 0.0, res.iterations, res.residual_norm))
        report.wall_time = _time.perf_counter() - start
        return report

    if isinstance(problem, FluidProblem):
        stepper = _Theta(problem, settings, ThetaScheme(time.theta))
    elif problem.density > 0:
        stepper = _Dynamic(problem, settings,
                           NewmarkScheme(time.newmark_beta, time.newmark_gamma))
        state = stepper.initial(state)
    else:
        stepper = _QuasiStatic(problem, settings, predictor=predictor)

    t0 = time.interval[0]
    for n in range(1, time.num_steps + 1):
        target = t0 + n * time.dt
        counter = {"iters": 0, "halvings": 0, "res": 0.0}
        try:
            state = _advance(stepper, state, target, 0, settings.max_halvings, counter)
        except RETRYABLE as exc:
            report.wall_time = _time.perf_counter() - start
            msg = (f"step {n} (t={target:.6g}) failed after "
                   f"{settings.max_halvings} step halvings: {exc}")
            raise NonConvergence(msg, iterations=getattr(exc, "iterations", None),
                                 residual=getattr(exc, "residual", None),
                                 report=report) from exc
        log.info("step %d t=%.6g: %d Newton iterations, %d halvings",
                 n, target, counter["iters"], counter["halvings"])
        emit(n, state, StepRecord(n, target, counter["iters"], counter["res"],
                                  counter["halvings"]))
    report.wall_time = _time.perf_counter() - start
    return report


def _advance(stepper, state, target, depth, max_depth, counter):
    try:
        new, res = stepper.step(state, target - state.t)
    except RETRYABLE as exc:
        if depth >= max_depth:
            raise
        log.info("halving step at t=%.6g (%s)", target, type(exc).__name__)
        counter["halvings"] += 1
        mid = 0.5 * (state.t + target)
        half = _advance(stepper, state, mid, depth + 1, max_depth, counter)
        return _advance(stepper, half, target, depth + 1, max_depth, counter)
    counter["iters"] += res.iterations
    counter["res"] = getattr(res, "residual_norm", 0.0)
    new.t = target
    return new
