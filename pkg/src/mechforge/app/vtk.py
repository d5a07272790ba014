"""Legacy VTK (3.0, ASCII) output and the per-step output series."""

from __future__ import annotations

import os

import numpy as np

from ..errors import IoError

CELL_TYPE = {2: 5, 3: 10}  # VTK_TRIANGLE, VTK_TETRA
FMT = "%.12g"

# sub-simplices of a P2 cell in local node numbering (vertices, then edges)
_SUBCELLS = {
    2: [(0, 3, 5), (3, 1, 4), (5, 4, 2), (3, 4, 5)],
    3: [(0, 4, 6, 7), (4, 1, 5, 8), (6, 5, 2, 9), (7, 8, 9, 3),
        (4, 5, 6, 8), (4, 6, 7, 8), (5, 6, 8, 9), (6, 7, 8, 9)],
}


def _rows(values):
    return "\n".join(" ".join(FMT % v for v in row) for row in values)


def _pad3(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[1] < 3:
        a = np.hstack([a, np.zeros((len(a), 3 - a.shape[1]))])
    return a


def _extend_to_edges(values, nv, edges):
    """Append edge-midpoint values (averages) to vertex values."""
    values = np.asarray(values, dtype=float)
    if len(values) == nv + len(edges):
        return values
    if len(values) != nv:
        raise ValueError(f"field has {len(values)} rows; expected {nv} or {nv + len(edges)}")
    mids = 0.5 * (values[edges[:, 0]] + values[edges[:, 1]])
    return np.concatenate([values, mids])


def _orient(points, cells):
    """Flip sub-cells with negative orientation."""
    v = points[cells]
    d = cells.shape[1] - 1
    Jm = np.swapaxes(v[:, 1:, :d] - v[:, :1, :d], 1, 2)
    neg = np.linalg.det(Jm) < 0
    cells = cells.copy()
    cells[neg, 0], cells[neg, 1] = cells[neg, 1], cells[neg, 0].copy()
    return cells


def vtk_geometry(mesh, space=None, subdivide=False):
    """(points, cells) for output; with ``subdivide`` each P2 cell is split."""
    if not subdivide:
        return mesh.vertices, mesh.cells
    if space is None or space.element.family != "P2":
        raise ValueError("subdivision needs a P2 function space")
    d = mesh.dim
    pts = space.node_coords
    sub = np.asarray(_SUBCELLS[d])
    cells = space.cell_nodes[:, sub].reshape(-1, d + 1)
    return pts, _orient(pts, cells)


def write_vtk(mesh, fields, path, space=None, subdivide=False, title="mechforge output"):
    """Write a legacy ASCII UNSTRUCTURED_GRID file.

    ``fields`` maps names to arrays: ``(n, dim)`` arrays become VECTORS and
    ``(n,)`` arrays SCALARS.  Rows beyond the vertex count (P2 edge nodes)
    are dropped unless ``subdivide`` is set, in which case vertex-only
    fields are interpolated to edge midpoints.
    """
    points, cells = vtk_geometry(mesh, space, subdivide)
    nv = mesh.num_vertices
    npts = len(points)
    d = mesh.dim
    out = [
        "# vtk DataFile Version 3.0",
        title.replace("\n", " ")[:255],
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {npts} double",
        _rows(_pad3(points)),
        f"CELLS {len(cells)} {len(cells) * (d + 2)}",
        "\n".join(f"{d + 1} " + " ".join(str(int(i)) for i in c) for c in cells),
        f"CELL_TYPES {len(cells)}",
        "\n".join([str(CELL_TYPE[d])] * len(cells)),
        f"POINT_DATA {npts}",
    ]
    for name, values in fields.items():
        values = np.asarray(values, dtype=float)
        if subdivide:
            values = _extend_to_edges(values, nv, space.edges)
        else:
            values = values[:nv]
        if values.ndim == 2 and values.shape[1] > 1:
            out.append(f"VECTORS {name} double")
            out.append(_rows(_pad3(values)))
        else:
            out.append(f"SCALARS {name} double 1")
            out.append("LOOKUP_TABLE default")
            out.append("\n".join(FMT % v for v in values.ravel()))
    text = "\n".join(out) + "\n"
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc.strerror or exc}") from None


def problem_fields(problem, x):
    """Named nodal fields of a solution vector (primary vector field, pressure)."""
    u, p = problem.split(x)
    name = "velocity" if problem.domain == "eulerian" else "displacement"
    fields = {name: u.reshape(-1, problem.dim)}
    if p is not None:
        fields["pressure"] = p
    return fields


class OutputSeries:
    """Per-step VTK files plus an index of ``step time filename`` lines."""

    def __init__(self, directory, prefix="solution", subdivide=False, index_name="index.txt"):
        self.directory = directory
        self.prefix = prefix
        self.subdivide = subdivide
        self.index_path = os.path.join(directory, index_name)
        self.entries = []
        if not os.path.isdir(directory):
            raise IoError(f"output directory does not exist: {directory}")
        try:
            open(self.index_path, "w").close()
        except OSError as exc:
            raise IoError(f"cannot write {self.index_path}: {exc.strerror or exc}") from None

    def __call__(self, step, t, problem, x):
        name = f"{self.prefix}_{step:04d}.vtk"
        write_vtk(problem.mesh, problem_fields(problem, x), os.path.join(self.directory, name),
                  space=problem.space_u, subdivide=self.subdivide,
                  title=f"mechforge step {step} t={FMT % t}")
        self.entries.append((step, t, name))
        try:
            with open(self.index_path, "a") as fh:
                fh.write(f"{step} {FMT % t} {name}\n")
        except OSError as exc:
            raise IoError(f"cannot write {self.index_path}: {exc.strerror or exc}") from None


def read_index(path):
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                s, t, name = line.split()
                out.append((int(s), float(t), name))
    return out
