"""Eulerian incompressible flow (Navier-Stokes / Stokes) on Taylor-Hood spaces.

Momentum:    R_v[w] = int rho (dv/dt + (grad v) v) . w + mu grad v : grad w
                      - p div w dV - loads
Continuity:  R_p[q] = int (div v) q dV

The viscous term is written in its Laplacian (pseudo-traction) form, so an
unconstrained boundary carries the natural condition mu dv/dn - p n = 0.
For divergence-free fields this differs from 2 mu D : grad w by a boundary
term only.
"""

from __future__ import annotations

import numpy as np

from ..config.expression import evaluate
from ..errors import InvalidCombination
from ..fem.sparse import scatter_vector
from .base import BaseProblem, ResidualSystem


class FluidProblem(BaseProblem):
    domain = "eulerian"

    def __init__(self, mesh, spaces, material, **kw):
        if spaces.pressure is None or spaces.primary.element.family != "P2" \
                or spaces.pressure.element.family != "P1":
            raise InvalidCombination("fluid problems require the p2-p1 element")
        super().__init__(mesh, spaces, material, **kw)
        self.mu = material.mu
        self.density = material.density

    def _volume(self, x, need_tangent, weight):
        """Flow terms scaled by ``weight``; pressure and continuity unscaled."""
        c = self.mesh.num_cells
        d = self.dim
        V, Pc = self.cell_values(x)
        nn = V.shape[1]
        nu = nn * d
        npl = self.N_p.shape[1]
        Ru = np.zeros((c, nn, d))
        Rp = np.zeros((c, npl))
        K = np.zeros((c, nu + npl, nu + npl)) if need_tangent else None
        rho, mu = self.density, self.mu
        eye = np.eye(d)
        for q in range(len(self.rule)):
            dN = self.grad_basis(q)
            N = self.N_u[q]
            Np = self.N_p[q]
            L = np.einsum("cai,caj->cij", V, dN)
            vq = np.einsum("a,cai->ci", N, V)
            pq = Pc @ Np
            wq = self.rule.weights[q] * self.detJ
            flow = mu * np.einsum("cij,caj->cai", L, dN)
            if rho:
                flow += rho * np.einsum("a,ci->cai", N, np.einsum("cij,cj->ci", L, vq))
            Ru += wq[:, None, None] * (weight * flow - pq[:, None, None] * dN)
            Rp += (wq * np.trace(L, axis1=1, axis2=2))[:, None] * Np[None, :]
            if not need_tangent:
                continue
            lap = mu * np.einsum("caj,cbj->cab", dN, dN)
            Kvv = np.einsum("cab,ik->caibk", lap, eye)
            if rho:
                adv = np.einsum("cbj,cj->cb", dN, vq)
                Kvv += rho * np.einsum("a,cb,ik->caibk", N, adv, eye)
                Kvv += rho * np.einsum("a,cik,b->caibk", N, L, N)
            K[:, :nu, :nu] += (weight * wq)[:, None, None] * Kvv.reshape(c, nu, nu)
            B = np.einsum("cai,b->caib", dN, Np).reshape(c, nu, npl) * wq[:, None, None]
            K[:, :nu, nu:] -= B
            K[:, nu:, :nu] += np.swapaxes(B, 1, 2)
        return Ru, Rp, K

    def external_load(self, x, t):
        """Dead boundary and body loads on the momentum block."""
        f = self.body_load(t)
        for bc in self.neumann:
            if bc.type == "traction":
                f += self._traction_vector(bc, t)
            else:
                f -= self._normal_pressure(bc, t)
        return f

    def _normal_pressure(self, bc, t):
        d = self.dim
        f = np.zeros(self.space_u.dim)
        for b in self._facets(bc.region).buckets:
            X = b["X"]
            pbar = evaluate(bc.values, t, X.reshape(-1, d)).reshape(X.shape[:2])
            local = np.einsum("fq,qa,fi->fai", b["w"] * pbar, b["N"], b["normal"])
            dofs = self.space_u.dof_map[b["cells"]]
            f += scatter_vector(self.space_u.dim, dofs, local.reshape(len(dofs), -1))
        return f

    def assemble(self, x, t, need_tangent=True, weight=1.0, mass_coeff=0.0, rate=None):
        """Residual/tangent at ``x``.

        ``weight`` scales the flow and load terms (the implicit theta
        fraction); ``rate`` adds ``M rate`` with tangent ``mass_coeff * M``.
        """
        Ru, Rp, Kb = self._volume(x, need_tangent, weight)
        R, K = self._scatter(Ru, Rp, Kb)
        if self.neumann or self.body_force is not None:
            R[:self.space_u.dim] -= weight * self.external_load(x, t)
        if rate is not None and self.density > 0:
            M = self.mass_matrix(self.density)
            R += M.tocsr() @ rate
            if K is not None and mass_coeff:
                K.data += mass_coeff * M.data
        dofs, vals = self.dirichlet_constraints(t)
        return ResidualSystem(R, K, dofs, vals)

    def flow_operator(self, x, t):
        """Flow and load terms alone (no pressure, no continuity)."""
        Pzero = x.copy()
        Pzero[self.space_u.dim:] = 0.0
        Ru, _, _ = self._volume(Pzero, False, 1.0)
        out = np.zeros(self.ndof)
        out[:self.space_u.dim] = scatter_vector(self.space_u.dim, self.space_u.dof_map,
                                                Ru.reshape(self.mesh.num_cells, -1))
        if self.neumann or self.body_force is not None:
            out[:self.space_u.dim] -= self.external_load(x, t)
        return out

    def residual(self, x, t, **kw):
        return self.assemble(x, t, need_tangent=False, **kw).residual

    def stress_at_quadrature(self, x):
        """Cauchy stress at all quadrature points, (c, q, d, d)."""
        V, Pc = self.cell_values(x)
        out = []
        for q in range(len(self.rule)):
            L = np.einsum("cai,caj->cij", V, self.grad_basis(q))
            out.append(self.material.cauchy(L, Pc @ self.N_p[q]))
        return np.stack(out, axis=1)
