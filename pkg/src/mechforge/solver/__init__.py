"""Newton, linear solves, time integrators and the time loop."""

from .driver import SolveReport, StepRecord, full_solve
from .linear import linear_solve
from .newton import NewtonResult, NewtonSettings, newton_solve
from .time import NewmarkScheme, NewmarkState, ThetaScheme, newmark_step, theta_step

__all__ = [
    "NewmarkScheme", "NewmarkState", "NewtonResult", "NewtonSettings", "SolveReport",
    "StepRecord", "ThetaScheme", "full_solve", "linear_solve", "newmark_step",
    "newton_solve", "theta_step",
]
