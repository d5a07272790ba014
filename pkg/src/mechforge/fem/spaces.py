"""Global degree-of-freedom numbering for P1/P2 spaces and Taylor-Hood pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .elements import EDGES, element


class FunctionSpace:
    """Continuous Lagrange space on a mesh.

    Nodes are numbered vertices first, then edges (P2) in lexicographic
    order of their sorted vertex pairs.  Vector spaces interleave
    components: ``dof = node * dim + component``.
    """

    def __init__(self, mesh, family, value_kind="scalar"):
        self.mesh = mesh
        self.element = element(family, mesh.dim)
        self.value_kind = value_kind
        self.value_size = mesh.dim if value_kind == "vector" else 1
        nv = mesh.num_vertices
        if self.element.family == "P1":
            self.cell_nodes = mesh.cells.copy()
            self.node_coords = mesh.vertices
            self.edges = np.zeros((0, 2), dtype=np.int64)
        else:
            local = EDGES[mesh.dim]
            cell_edges = np.sort(mesh.cells[:, local], axis=2)
            flat = cell_edges.reshape(-1, 2)
            self.edges, inverse = np.unique(flat, axis=0, return_inverse=True)
            edge_ids = inverse.reshape(len(mesh.cells), len(local)) + nv
            self.cell_nodes = np.hstack([mesh.cells, edge_ids])
            mids = 0.5 * (mesh.vertices[self.edges[:, 0]] + mesh.vertices[self.edges[:, 1]])
            self.node_coords = np.vstack([mesh.vertices, mids])
        self.num_nodes = len(self.node_coords)
        self._edge_lookup = None

    @property
    def dim(self):
        return self.num_nodes * self.value_size

    @property
    def dof_map(self):
        """(cells, nodes_per_cell * value_size) global dofs, node-major."""
        k = self.value_size
        if k == 1:
            return self.cell_nodes
        return (self.cell_nodes[:, :, None] * k + np.arange(k)).reshape(len(self.cell_nodes), -1)

    def facet_nodes(self, facet_vertices):
        """All nodes lying on the given facets (vertices plus P2 edge nodes)."""
        facet_vertices = np.asarray(facet_vertices).reshape(-1, self.mesh.dim)
        nodes = [np.unique(facet_vertices)]
        if self.element.family == "P2" and len(facet_vertices):
            if self._edge_lookup is None:
                self._edge_lookup = {tuple(e): i + self.mesh.num_vertices
                                     for i, e in enumerate(self.edges)}
            d = self.mesh.dim
            pairs = [(0, 1)] if d == 2 else [(0, 1), (1, 2), (0, 2)]
            fe = np.sort(np.concatenate([facet_vertices[:, p] for p in pairs]), axis=1)
            nodes.append(np.array([self._edge_lookup[tuple(e)] for e in np.unique(fe, axis=0)],
                                  dtype=np.int64))
        return np.unique(np.concatenate(nodes))

    def interpolate(self, func):
        """Nodal interpolant of ``func(points) -> (n,) or (n, value_size)``."""
        vals = np.asarray(func(self.node_coords), dtype=float)
        return vals.reshape(-1).copy()

    def __repr__(self):
        return (f"FunctionSpace({self.element.family}, {self.value_kind}, "
                f"dofs={self.dim})")


@dataclass
class MixedSpace:
    """Vector primary field (displacement/velocity) plus optional pressure.

    Global vector layout: ``[primary dofs | pressure dofs]``.
    """

    primary: FunctionSpace
    pressure: Optional[FunctionSpace] = None

    @property
    def offsets(self):
        return (0, self.primary.dim)

    @property
    def dim(self):
        return self.primary.dim + (self.pressure.dim if self.pressure else 0)

    def split(self, x):
        n = self.primary.dim
        return x[:n], (x[n:] if self.pressure else None)

    @property
    def cell_dofs(self):
        """Per-cell global dofs: primary block then pressure block."""
        if self.pressure is None:
            return self.primary.dof_map
        return np.hstack([self.primary.dof_map, self.pressure.dof_map + self.primary.dim])


def build_space(mesh, family, value_kind="scalar"):
    return FunctionSpace(mesh, family, value_kind)


def build_mixed(mesh):
    """Taylor-Hood P2 (vector) / P1 (scalar)."""
    return MixedSpace(FunctionSpace(mesh, "P2", "vector"), FunctionSpace(mesh, "P1", "scalar"))


def build_single(mesh, family):
    return MixedSpace(FunctionSpace(mesh, family, "vector"), None)
