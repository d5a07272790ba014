"""Simplex mesh container and structured box generators."""

from __future__ import annotations

import itertools
from math import factorial

import numpy as np

from ..errors import GeometryError, MeshError

# local faces of a simplex, listed by the vertex they omit
_TET_FACES = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
_TRI_FACES = np.array([[1, 2], [0, 2], [0, 1]])


def local_faces(dim):
    return _TET_FACES if dim == 3 else _TRI_FACES


def signed_volumes(vertices, cells):
    x = vertices[cells]
    edges = x[:, 1:, :] - x[:, :1, :]
    dim = vertices.shape[1]
    return np.linalg.det(edges) / factorial(dim)


class Mesh:
    """Affine simplex mesh in 2D (triangles) or 3D (tetrahedra).

    Cells are reoriented on construction so every signed volume is
    positive.  ``facets``/``facet_markers`` hold the tagged boundary
    facets; ``facet_cells``/``facet_local`` give, for each facet, the
    owning cell and the index of the omitted local vertex.
    """

    def __init__(self, vertices, cells, facets=None, facet_markers=None, validate=True):
        vertices = np.ascontiguousarray(vertices, dtype=float)
        cells = np.array(cells, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] not in (2, 3):
            raise MeshError("vertices must be an (n, 2) or (n, 3) array")
        dim = vertices.shape[1]
        if cells.ndim != 2 or cells.shape[1] != dim + 1:
            raise MeshError(f"cells must have {dim + 1} vertices in {dim}D")
        if cells.size and (cells.min() < 0 or cells.max() >= len(vertices)):
            raise MeshError("cell vertex index out of range")
        vol = signed_volumes(vertices, cells)
        flip = vol < 0
        cells[flip, 0], cells[flip, 1] = cells[flip, 1].copy(), cells[flip, 0].copy()
        if validate and np.any(np.abs(vol) <= 1e-14 * max(1.0, np.abs(vol).max(initial=0))):
            bad = int(np.argmin(np.abs(vol)))
            raise GeometryError(f"degenerate cell {bad} (zero volume)")
        self.vertices = vertices
        self.cells = cells
        self.dim = dim

        if facets is None:
            facets = np.zeros((0, dim), dtype=np.int64)
            facet_markers = np.zeros(0, dtype=np.int64)
        facets = np.array(facets, dtype=np.int64).reshape(-1, dim)
        facet_markers = np.asarray(facet_markers, dtype=np.int64).reshape(-1)
        if len(facets) != len(facet_markers):
            raise MeshError("facets and facet_markers differ in length")
        if facets.size and (facets.min() < 0 or facets.max() >= len(vertices)):
            raise MeshError("facet vertex index out of range")
        self.facets = facets
        self.facet_markers = facet_markers
        self.facet_cells, self.facet_local = self._locate_facets()

    # -- topology --------------------------------------------------------------

    def _locate_facets(self):
        if not len(self.facets):
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        lf = local_faces(self.dim)
        faces = np.sort(self.cells[:, lf], axis=2).reshape(-1, self.dim)
        owner = np.repeat(np.arange(len(self.cells)), self.dim + 1)
        local = np.tile(np.arange(self.dim + 1), len(self.cells))
        table = {}
        for key, c, k in zip(map(tuple, faces), owner, local):
            table.setdefault(key, []).append((c, k))
        cells = np.empty(len(self.facets), dtype=np.int64)
        locs = np.empty(len(self.facets), dtype=np.int64)
        for i, f in enumerate(np.sort(self.facets, axis=1)):
            hits = table.get(tuple(f), [])
            if len(hits) != 1:
                raise MeshError(
                    f"boundary facet {i} {tuple(f)} is a face of {len(hits)} cells, expected 1")
            cells[i], locs[i] = hits[0]
        return cells, locs

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_cells(self):
        return len(self.cells)

    @property
    def markers(self):
        return set(int(m) for m in np.unique(self.facet_markers))

    def cell_volumes(self):
        return signed_volumes(self.vertices, self.cells)

    def edges(self):
        """Unique sorted vertex pairs, lexicographically ordered."""
        pairs = np.array(list(itertools.combinations(range(self.dim + 1), 2)))
        e = np.sort(self.cells[:, pairs].reshape(-1, 2), axis=1)
        return np.unique(e, axis=0)

    def facets_with_marker(self, marker):
        return np.flatnonzero(self.facet_markers == marker)

    def facet_areas(self, idx=None):
        f = self.facets if idx is None else self.facets[idx]
        x = self.vertices[f]
        if self.dim == 2:
            return np.linalg.norm(x[:, 1] - x[:, 0], axis=1)
        return 0.5 * np.linalg.norm(np.cross(x[:, 1] - x[:, 0], x[:, 2] - x[:, 0]), axis=1)

    def facet_normals(self, idx=None):
        """Outward unit normals of the tagged facets (reference configuration)."""
        idx = np.arange(len(self.facets)) if idx is None else np.asarray(idx)
        f = self.facets[idx]
        x = self.vertices[f]
        if self.dim == 2:
            t = x[:, 1] - x[:, 0]
            n = np.stack([t[:, 1], -t[:, 0]], axis=1)
        else:
            n = np.cross(x[:, 1] - x[:, 0], x[:, 2] - x[:, 0])
        n /= np.linalg.norm(n, axis=1)[:, None]
        opposite = self.vertices[self.cells[self.facet_cells[idx], self.facet_local[idx]]]
        inward = np.einsum("ij,ij->i", opposite - x[:, 0], n) > 0
        n[inward] *= -1
        return n

    def nearest_vertex(self, point):
        d = np.linalg.norm(self.vertices - np.asarray(point, dtype=float)[None, :self.dim], axis=1)
        return int(np.argmin(d))

    def check(self):
        """Exhaustive consistency checks (used by tests and the readers)."""
        if np.any(self.cell_volumes() <= 0):
            raise GeometryError("non-positive cell volume")
        self._locate_facets()

    def __repr__(self):
        return (f"Mesh(dim={self.dim}, vertices={self.num_vertices}, "
                f"cells={self.num_cells}, markers={sorted(self.markers)})")


def boundary_faces(cells, dim):
    """Faces (sorted vertex tuples) that belong to exactly one cell."""
    lf = local_faces(dim)
    faces = np.sort(cells[:, lf].reshape(-1, dim), axis=1)
    uniq, counts = np.unique(faces, axis=0, return_counts=True)
    return uniq[counts == 1]


# Kuhn (Freudenthal) subdivision: one simplex per axis permutation, all
# sharing the main diagonal.  Neighbouring boxes split conformingly.
def _kuhn_simplices(dim):
    out = []
    for perm in itertools.permutations(range(dim)):
        corner = [0] * dim
        simplex = [tuple(corner)]
        for ax in perm:
            corner[ax] = 1
            simplex.append(tuple(corner))
        out.append(simplex)
    return out


def box_mesh(n, size=None):
    """Structured simplex mesh of ``[0, size_0] x ... `` with ``n`` cells per side.

    ``n`` is an int or one count per axis.  Faces are marked
    ``x=0 -> 1, x=L -> 2, y=0 -> 3, y=L -> 4, z=0 -> 5, z=L -> 6``.
    """
    if np.isscalar(n):
        raise MeshError("box_mesh needs per-axis counts; use unit_square/unit_cube")
    n = [int(k) for k in n]
    dim = len(n)
    if dim not in (2, 3) or min(n) < 1:
        raise MeshError("box_mesh needs 2 or 3 positive counts")
    size = np.ones(dim) if size is None else np.asarray(size, dtype=float)
    axes = [np.linspace(0.0, size[i], n[i] + 1) for i in range(dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    shape = [k + 1 for k in n]

    def vid(idx):
        return np.ravel_multi_index(tuple(idx), shape)

    origins = np.stack(np.meshgrid(*[np.arange(k) for k in n], indexing="ij"),
                       axis=-1).reshape(-1, dim)
    cells = []
    for simplex in _kuhn_simplices(dim):
        cells.append(np.stack([vid((origins + np.array(c)).T) for c in simplex], axis=1))
    cells = np.concatenate(cells, axis=0)
    # order cells box by box for locality
    nbox = len(origins)
    cells = cells.reshape(len(cells) // nbox, nbox, dim + 1).transpose(1, 0, 2).reshape(-1, dim + 1)

    faces = boundary_faces(cells, dim)
    centroid = grid[faces].mean(axis=1)
    markers = np.zeros(len(faces), dtype=np.int64)
    for ax in range(dim):
        tol = 1e-12 * size[ax]
        markers[np.abs(centroid[:, ax]) < tol] = 2 * ax + 1
        markers[np.abs(centroid[:, ax] - size[ax]) < tol] = 2 * ax + 2
    return Mesh(grid, cells, faces, markers)


def unit_square(n):
    return box_mesh((n, n))


def unit_cube(n):
    return box_mesh((n, n, n))
