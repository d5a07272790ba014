"""Reference elements, quadrature, dof maps and sparse assembly."""

from .elements import EDGES, ReferenceElement, barycentric, element, tabulate
from .quadrature import QuadratureRule, quadrature
from .sparse import SparseMatrix, apply_dirichlet, scatter_add, scatter_vector
from .spaces import FunctionSpace, MixedSpace, build_mixed, build_single, build_space

__all__ = [
    "EDGES", "FunctionSpace", "MixedSpace", "QuadratureRule", "ReferenceElement",
    "SparseMatrix", "apply_dirichlet", "barycentric", "build_mixed", "build_single",
    "build_space", "element", "quadrature", "scatter_add", "scatter_vector", "tabulate",
]
