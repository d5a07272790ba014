"""Shared machinery for the solid and fluid residual/tangent assemblers."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Optional

import numpy as np

from ..config.expression import evaluate
from ..errors import InvalidCombination, UnknownRegion
from ..fem.elements import barycentric
from ..fem.quadrature import quadrature
from ..fem.sparse import SparseMatrix, scatter_vector
from ..mesh.core import local_faces


@dataclass
class FieldState:
    """Primary unknowns of a problem at time ``t``.

    ``x`` is the global vector ``[u or v | p]``; ``v``/``a`` hold the
    velocity/acceleration histories of dynamic solids.
    """

    x: np.ndarray
    t: float = 0.0
    v: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None

    def copy(self):
        return FieldState(self.x.copy(), self.t,
                          None if self.v is None else self.v.copy(),
                          None if self.a is None else self.a.copy())


@dataclass
class ResidualSystem:
    residual: np.ndarray
    tangent: Optional[SparseMatrix] = None
    dirichlet_dofs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    dirichlet_values: np.ndarray = field(default_factory=lambda: np.zeros(0))


class _FacetGroup:
    """Tagged boundary facets of one region, bucketed by local face index."""

    def __init__(self, problem, region, degree):
        mesh = problem.mesh
        idx = mesh.facets_with_marker(region)
        if not len(idx):
            raise UnknownRegion(region, mesh.markers)
        d = mesh.dim
        rule = quadrature(d - 1, degree)
        lf = local_faces(d)
        lam_f = barycentric(rule.points)  # (nq, d) weights on face vertices
        normals = mesh.facet_normals(idx)
        areas = mesh.facet_areas(idx)
        self.buckets = []
        for k in range(d + 1):
            sel = np.flatnonzero(mesh.facet_local[idx] == k)
            if not len(sel):
                continue
            lam = np.zeros((len(lam_f), d + 1))
            lam[:, lf[k]] = lam_f
            xi = lam[:, 1:]
            cells = mesh.facet_cells[idx[sel]]
            N, dN = problem.space_u.element.tabulate(xi)
            verts = mesh.vertices[mesh.cells[cells]]          # (f, d+1, d)
            X = np.einsum("qv,fvi->fqi", lam, verts)           # (f, nq, d)
            w = rule.weights[None, :] * (areas[sel] * factorial(d - 1))[:, None]
            self.buckets.append(dict(cells=cells, N=N, dN=dN, X=X, w=w,
                                     normal=normals[sel]))


class BaseProblem:
    """Mesh, spaces, quadrature, sparsity pattern and boundary data."""

    def __init__(self, mesh, spaces, material, dirichlet=(), neumann=(),
                 body_force=None, quad_degree=None):
        self.mesh = mesh
        self.spaces = spaces
        self.space_u = spaces.primary
        self.space_p = spaces.pressure
        self.material = material
        self.dim = mesh.dim
        self.dirichlet = tuple(dirichlet)
        self.neumann = tuple(neumann)
        self.body_force = body_force
        order = self.space_u.element.degree
        self.quad_degree = quad_degree or 2 * order
        rule = quadrature(self.dim, self.quad_degree)
        self.rule = rule
        self.N_u, self.dN_u_ref = self.space_u.element.tabulate(rule.points)
        if self.space_p is not None:
            self.N_p, _ = self.space_p.element.tabulate(rule.points)
        verts = mesh.vertices[mesh.cells]
        Jc = np.swapaxes(verts[:, 1:, :] - verts[:, :1, :], 1, 2)  # (c, d, d) dX/dxi
        self.detJ = np.linalg.det(Jc)
        self.invJ = np.linalg.inv(Jc)
        self.qpoints = np.einsum("qv,cvi->cqi", barycentric(rule.points), verts)
        self.cell_dofs = spaces.cell_dofs
        self.ndof = spaces.dim
        self.nu_loc = self.space_u.dof_map.shape[1]
        self.matrix = SparseMatrix(self.ndof, self.cell_dofs)
        self._facet_groups = {}
        self._mass_data = None
        for bc in self.neumann:
            self._facets(bc.region)
        mk = mesh.markers
        for bc in self.dirichlet:
            if bc.region not in mk:
                raise UnknownRegion(bc.region, mk)

    # -- geometry helpers ---------------------------------------------------------

    def grad_basis(self, q, cells=None):
        invJ = self.invJ if cells is None else self.invJ[cells]
        return np.einsum("ar,cri->cai", self.dN_u_ref[q], invJ)

    def _facets(self, region):
        if region not in self._facet_groups:
            self._facet_groups[region] = _FacetGroup(self, region, self.quad_degree)
        return self._facet_groups[region]

    def split(self, x):
        return self.spaces.split(x)

    def cell_values(self, x):
        u, p = self.split(x)
        U = u[self.space_u.dof_map].reshape(self.mesh.num_cells, -1, self.dim)
        Pc = None if p is None else p[self.space_p.dof_map]
        return U, Pc

    # -- Dirichlet data -------------------------------------------------------------

    def dirichlet_constraints(self, t):
        """Global (dofs, values) for all Dirichlet conditions at time ``t``.

        Later conditions override earlier ones on shared nodes.
        """
        dofs, vals = [], []
        mesh = self.mesh
        for bc in self.dirichlet:
            facets = mesh.facets[mesh.facets_with_marker(bc.region)]
            if bc.field == "pressure":
                if self.space_p is None:
                    raise InvalidCombination("pressure Dirichlet data on a single-field problem")
                nodes = self.space_p.facet_nodes(facets)
                dofs.append(nodes + self.space_u.dim)
                vals.append(evaluate(bc.values, t, self.space_p.node_coords[nodes]))
                continue
            nodes = self.space_u.facet_nodes(facets)
            X = self.space_u.node_coords[nodes]
            for comp, expr in enumerate(bc.values):
                if expr is None:
                    continue
                dofs.append(nodes * self.dim + comp)
                vals.append(evaluate(expr, t, X))
        if not dofs:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        dofs = np.concatenate(dofs)
        vals = np.concatenate(vals)
        # keep the last assignment of each dof
        rev = dofs[::-1]
        uniq, first = np.unique(rev, return_index=True)
        return uniq, vals[::-1][first]

    # -- loads -------------------------------------------------------------------------

    def _traction_vector(self, bc, t):
        """Dead traction loads: returns the global external load vector."""
        f = np.zeros(self.space_u.dim)
        group = self._facets(bc.region)
        for b in group.buckets:
            X = b["X"].reshape(-1, self.dim)
            tr = np.stack([evaluate(e, t, X) for e in bc.values], axis=1)
            tr = tr.reshape(b["X"].shape)
            local = np.einsum("fq,qa,fqi->fai", b["w"], b["N"], tr)
            dofs = self.space_u.dof_map[b["cells"]]
            f += scatter_vector(self.space_u.dim, dofs, local.reshape(len(dofs), -1))
        return f

    def body_load(self, t):
        if self.body_force is None:
            return np.zeros(self.space_u.dim)
        f = np.zeros(self.space_u.dim)
        wdet = self.rule.weights[None, :] * np.abs(self.detJ)[:, None]
        X = self.qpoints.reshape(-1, self.dim)
        b = np.stack([evaluate(e, t, X) for e in self.body_force], axis=1)
        b = b.reshape(self.qpoints.shape)
        local = np.einsum("cq,qa,cqi->cai", wdet, self.N_u, b)
        return f + scatter_vector(self.space_u.dim, self.space_u.dof_map,
                                  local.reshape(self.mesh.num_cells, -1))

    # -- mass ----------------------------------------------------------------------------

    def mass_data(self, density):
        """Consistent mass matrix entries (primary block only) in the pattern."""
        if self._mass_data is None:
            wdet = self.rule.weights[None, :] * np.abs(self.detJ)[:, None]
            Mab = density * np.einsum("cq,qa,qb->cab", wdet, self.N_u, self.N_u)
            nn = Mab.shape[1]
            d = self.dim
            blk = np.einsum("cab,ij->caibj", Mab, np.eye(d)).reshape(len(Mab), nn * d, nn * d)
            k = self.cell_dofs.shape[1]
            full = np.zeros((len(Mab), k, k))
            full[:, :nn * d, :nn * d] = blk
            m = SparseMatrix.__new__(SparseMatrix)
            m.__dict__.update(self.matrix.__dict__)
            m.data = np.zeros(self.matrix.nnz)
            m.add_cell_blocks(full)
            self._mass_data = m.data
        return self._mass_data

    def mass_matrix(self, density):
        m = self.matrix.copy()
        m.data[:] = self.mass_data(density)
        return m

    # -- assembly helpers -------------------------------------------------------------

    def add_primary_blocks(self, K, cells, blocks):
        """Add (n, nu, nu) primary-block matrices of the given cells into K."""
        k = self.cell_dofs.shape[1]
        nu = self.nu_loc
        sel = (np.arange(k)[:, None] * k + np.arange(k)[None, :])[:nu, :nu].ravel()
        pos = self.matrix.cell_positions[cells][:, sel]
        K.data += np.bincount(pos.ravel(), weights=np.asarray(blocks).ravel(),
                              minlength=K.nnz)

    def _scatter(self, Ru, Rp, K_blocks):
        c = self.mesh.num_cells
        local = Ru.reshape(c, -1)
        if Rp is not None:
            local = np.hstack([local, Rp])
        R = scatter_vector(self.ndof, self.cell_dofs, local)
        K = None
        if K_blocks is not None:
            K = self.matrix.copy()
            K.data[:] = 0.0
            K.add_cell_blocks(K_blocks)
        return R, K


def embed3(M2, dim, fill_identity=True):
    """Embed (..., d, d) tensors into 3x3 (plane strain) if d == 2."""
    if dim == 3:
        return M2
    out = np.zeros(M2.shape[:-2] + (3, 3))
    out[..., :2, :2] = M2
    if fill_identity:
        out[..., 2, 2] = 1.0
    return out
