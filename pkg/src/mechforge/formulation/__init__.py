"""Discrete residuals and tangents for solid and fluid problems."""

from __future__ import annotations

import os

import numpy as np

from ..config import validate_against_mesh
from ..errors import InvalidCombination
from ..fem import build_mixed, build_single
from ..materials import from_config
from ..mesh import (EllipsoidSpec, attach_fibers, box_mesh, generate_ellipsoid,
                    helix_fibers, material_frame, read_gmsh, read_gmsh_markers,
                    unit_cube, unit_square)
from .base import BaseProblem, FieldState, ResidualSystem, embed3
from .fluid import FluidProblem
from .solid import SolidProblem

__all__ = [
    "BaseProblem", "FieldState", "FluidProblem", "ResidualSystem", "SolidProblem",
    "build_mesh", "build_problem", "build_spaces", "dirichlet_constraints",
    "embed3", "fluid_residual", "pressure_follower_load", "solid_residual",
    "traction_load",
]


def _resolve(cfg, path):
    return path if os.path.isabs(path) else os.path.join(cfg.base_dir, path)


def build_mesh(cfg):
    """Mesh and optional generated fiber fields for a ProblemConfig."""
    m = cfg.mesh
    if m.mesh_file is not None:
        mesh = read_gmsh(_resolve(cfg, m.mesh_file))
        if m.boundaries is not None:
            mesh = read_gmsh_markers(_resolve(cfg, m.boundaries), mesh)
        return mesh, None
    g = dict(m.generate)
    shape = g["shape"]
    if shape == "ellipsoid":
        kw = {}
        if "endo_axes" in g:
            kw["endo_short"], kw["endo_long"] = g["endo_axes"]
        if "epi_axes" in g:
            kw["epi_short"], kw["epi_long"] = g["epi_axes"]
        if "base_z" in g:
            kw["base_z"] = g["base_z"]
        spec = EllipsoidSpec(h=g.get("h", 2000.0), **kw)
        mesh = generate_ellipsoid(spec)
        return mesh, helix_fibers(mesh, spec)
    if shape == "cube":
        return unit_cube(int(g.get("n", 4))), None
    if shape == "square":
        return unit_square(int(g.get("n", 4))), None
    n = g.get("n", 4)
    size = g.get("size", 1.0)
    dim = 3 if shape == "box" else 2
    n = tuple(n) if isinstance(n, (list, tuple)) else (int(n),) * dim
    size = tuple(size) if isinstance(size, (list, tuple)) else (float(size),) * dim
    return box_mesh(n, size), None


def build_spaces(mesh, element):
    if element == "p2-p1":
        return build_mixed(mesh)
    if element in ("p1", "p2"):
        return build_single(mesh, element.upper())
    raise InvalidCombination(f"unsupported element {element!r}")


def _frame(cfg, mesh, generated):
    fib = cfg.material.fibers
    if fib is None:
        return None
    if generated is not None:
        # generated meshes carry their own fields; names pick them in order
        by_name = {f.name: f for f in generated}
        fields = [by_name.get(n, generated[i]) for i, n in enumerate(fib.fiber_names)]
    else:
        files = [_resolve(cfg, p) for p in fib.fiber_files]
        fields = attach_fibers(mesh, files, fib.fiber_names, fib.elementwise)
    return material_frame(fields, mesh)


def build_problem(cfg, mesh=None):
    """Mesh, spaces and material for ``cfg``, wrapped in a Solid/FluidProblem."""
    generated = None
    if mesh is None:
        mesh, generated = build_mesh(cfg)
    validate_against_mesh(cfg, mesh.markers, mesh.dim)
    f = cfg.formulation
    spaces = build_spaces(mesh, f.element)
    material = from_config(cfg.material)
    kw = dict(dirichlet=f.bcs.dirichlet, neumann=f.bcs.neumann,
              body_force=f.body_force, quad_degree=f.quadrature_degree)
    if f.domain == "eulerian":
        return FluidProblem(mesh, spaces, material, **kw)
    frame = _frame(cfg, mesh, generated)
    return SolidProblem(mesh, spaces, material, frame=frame,
                        density=cfg.material.density, **kw)


# functional entry points


def solid_residual(problem, state, need_tangent=True, **kw):
    return problem.assemble(state.x, state.t, need_tangent=need_tangent, **kw)


def fluid_residual(problem, state, need_tangent=True, **kw):
    return problem.assemble(state.x, state.t, need_tangent=need_tangent, **kw)


def pressure_follower_load(problem, state, bc):
    """Residual contribution (and load stiffness) of one follower-pressure condition."""
    R = np.zeros(problem.ndof)
    K = problem.matrix.copy()
    K.zero()
    problem._pressure_load(bc, state.x, state.t, True, R, K)
    return R, K


def traction_load(problem, state, bc):
    """Residual contribution of a dead traction condition (minus the load)."""
    return -problem._traction_vector(bc, state.t)


def dirichlet_constraints(problem, t):
    return problem.dirichlet_constraints(t)
