"""Problem definition parsing and boundary-value expressions."""

from .expression import ScalarExpression, evaluate, parse_expression
from .schema import (BoundaryConditions, DirichletBC, FiberSpec, FormulationConfig,
                     MaterialConfig, MeshConfig, NeumannBC, NewtonConfig,
                     ProblemConfig, SolverConfig, TimeParams, dump_config,
                     load_config, parse_config, validate_against_mesh)

__all__ = [
    "BoundaryConditions", "DirichletBC", "FiberSpec", "FormulationConfig",
    "MaterialConfig", "MeshConfig", "NeumannBC", "NewtonConfig", "ProblemConfig",
    "ScalarExpression", "SolverConfig", "TimeParams", "dump_config", "evaluate",
    "load_config", "parse_config", "parse_expression", "validate_against_mesh",
]
