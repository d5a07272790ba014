"""Simplex meshes, boundary markers, fiber fields and mesh I/O."""

from .core import Mesh, box_mesh, boundary_faces, unit_cube, unit_square
from .ellipsoid import (BASE_MARKER, ENDO_MARKER, EPI_MARKER, EllipsoidSpec,
                        generate_ellipsoid, helix_fibers)
from .fibers import (FiberField, attach_fibers, material_frame, read_fiber_file,
                     write_fiber_file)
from .gmsh import MeshIOError, read_gmsh, read_gmsh_markers, write_gmsh

__all__ = [
    "BASE_MARKER", "ENDO_MARKER", "EPI_MARKER", "EllipsoidSpec", "FiberField",
    "Mesh", "MeshIOError", "attach_fibers", "boundary_faces", "box_mesh",
    "generate_ellipsoid", "helix_fibers", "material_frame", "read_fiber_file",
    "read_gmsh", "read_gmsh_markers", "unit_cube", "unit_square",
    "write_fiber_file", "write_gmsh",
]
