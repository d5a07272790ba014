"""Gmsh MSH 2.2 ASCII reader and writer (simplices only)."""

from __future__ import annotations

import numpy as np

from ..errors import FormatError, IoError
from .core import Mesh

# gmsh element type -> (topological dim, node count)
_SIMPLEX_TYPES = {15: (0, 1), 1: (1, 2), 2: (2, 3), 4: (3, 4)}
_NAMES = {3: "4-node quadrangle", 5: "8-node hexahedron", 6: "6-node prism",
          7: "5-node pyramid", 8: "3-node line", 9: "6-node triangle",
          10: "9-node quadrangle", 11: "10-node tetrahedron"}


class MeshIOError(IoError):
    pass


def _sections(lines):
    out = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if line.startswith("$") and not line.startswith("$End"):
            name = line[1:]
            end = f"$End{name}"
            j = i + 1
            while j < len(lines) and lines[j].strip() != end:
                j += 1
            if j == len(lines):
                raise FormatError(f"section ${name} is not terminated")
            out[name] = lines[i + 1:j]
            i = j
        i += 1
    return out


def read_gmsh(path):
    """Read an MSH 2.2 ASCII file.

    Cells are the highest-dimensional simplices present; facet markers are
    the first tag of the codimension-one elements.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise MeshIOError(f"cannot read mesh file {path}: {exc.strerror or exc}") from None
    sec = _sections(lines)
    if "MeshFormat" not in sec or not sec["MeshFormat"]:
        raise FormatError(f"{path}: missing $MeshFormat")
    fmt = sec["MeshFormat"][0].split()
    if fmt[0] not in ("2.2", "2.2.0") or (len(fmt) > 1 and fmt[1] != "0"):
        raise FormatError(f"{path}: unsupported MSH version {' '.join(fmt)} (need 2.2 ASCII)")
    if "Nodes" not in sec:
        raise FormatError(f"{path}: missing $Nodes")
    node_lines = sec["Nodes"]
    try:
        count = int(node_lines[0])
        table = np.array([l.split() for l in node_lines[1:count + 1]], dtype=float)
    except (ValueError, IndexError):
        raise FormatError(f"{path}: malformed $Nodes section") from None
    if table.shape != (count, 4):
        raise FormatError(f"{path}: expected {count} nodes")
    ids = table[:, 0].astype(np.int64)
    index = {int(k): i for i, k in enumerate(ids)}
    coords = table[:, 1:]

    if "Elements" not in sec or not sec["Elements"]:
        raise FormatError(f"{path}: no cells ($Elements missing)")
    by_dim = {0: [], 1: [], 2: [], 3: []}
    try:
        for line in sec["Elements"][1:]:
            parts = [int(v) for v in line.split()]
            if not parts:
                continue
            etype, ntags = parts[1], parts[2]
            if etype not in _SIMPLEX_TYPES:
                name = _NAMES.get(etype, f"type {etype}")
                raise FormatError(f"{path}: unsupported element {name} (simplices only)")
            edim, nn = _SIMPLEX_TYPES[etype]
            tags = parts[3:3 + ntags]
            nodes = parts[3 + ntags:3 + ntags + nn]
            if len(nodes) != nn:
                raise FormatError(f"{path}: element {parts[0]} is truncated")
            by_dim[edim].append((tags[0] if tags else 0, [index[v] for v in nodes]))
    except (ValueError, IndexError):
        raise FormatError(f"{path}: malformed $Elements section") from None
    except KeyError as exc:
        raise FormatError(f"{path}: element references unknown node {exc.args[0]}") from None

    dim = 3 if by_dim[3] else 2 if by_dim[2] else 0
    if dim == 0:
        raise FormatError(f"{path}: no cells")
    cells = np.array([n for _, n in by_dim[dim]], dtype=np.int64)
    facets = np.array([n for _, n in by_dim[dim - 1]], dtype=np.int64).reshape(-1, dim)
    markers = np.array([t for t, _ in by_dim[dim - 1]], dtype=np.int64)
    if dim == 2:
        if np.any(np.abs(coords[:, 2]) > 0):
            raise FormatError(f"{path}: 2D mesh with non-zero z coordinates")
        coords = coords[:, :2]
    used = np.unique(np.concatenate([cells.ravel(), facets.ravel()]))
    # drop nodes not referenced by any cell/facet (e.g. geometry points)
    if len(used) != len(coords):
        remap = -np.ones(len(coords), dtype=np.int64)
        remap[used] = np.arange(len(used))
        coords = coords[used]
        cells = remap[cells]
        facets = remap[facets]
    return Mesh(coords, cells, facets, markers)


def read_gmsh_markers(path, mesh):
    """Take boundary markers from a separate MSH file sharing ``mesh``'s vertices."""
    other = read_gmsh(path)
    if other.num_vertices != mesh.num_vertices or not np.allclose(other.vertices, mesh.vertices):
        raise FormatError(f"{path}: boundary file vertices do not match the mesh")
    return Mesh(mesh.vertices, mesh.cells, other.facets, other.facet_markers)


def write_gmsh(mesh, path, cell_tag=1):
    etype_cell = 4 if mesh.dim == 3 else 2
    etype_facet = 2 if mesh.dim == 3 else 1
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
            fh.write(f"$Nodes\n{mesh.num_vertices}\n")
            for i, x in enumerate(mesh.vertices):
                xyz = list(x) + [0.0] * (3 - mesh.dim)
                fh.write(f"{i + 1} {xyz[0]:.17g} {xyz[1]:.17g} {xyz[2]:.17g}\n")
            fh.write("$EndNodes\n")
            total = len(mesh.facets) + mesh.num_cells
            fh.write(f"$Elements\n{total}\n")
            k = 1
            for f, m in zip(mesh.facets, mesh.facet_markers):
                fh.write(f"{k} {etype_facet} 2 {m} {m} " + " ".join(str(v + 1) for v in f) + "\n")
                k += 1
            for c in mesh.cells:
                fh.write(f"{k} {etype_cell} 2 {cell_tag} {cell_tag} "
                         + " ".join(str(v + 1) for v in c) + "\n")
                k += 1
            fh.write("$EndElements\n")
    except OSError as exc:
        raise MeshIOError(f"cannot write mesh file {path}: {exc.strerror or exc}") from None
