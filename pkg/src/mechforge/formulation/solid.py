"""Lagrangian solid mechanics: residual and consistent tangent.

Momentum:    R_u[w] = int P(u, p) : Grad w dV + int rho0 a . w dV - loads
Constraint:  R_p[q] = int g(F) q dV,   g = J - 1   (tr eps for linear_iso)

Incompressible models use P = P_iso(F) - p dg/dF.  Pressure boundary
loads follow the deformation (traction -p J F^-T N on reference facets).
"""

from __future__ import annotations

import numpy as np

from ..config.expression import evaluate
from ..errors import ExponentOverflow, NonPositiveJacobian
from ..fem.sparse import scatter_vector
from .base import BaseProblem, ResidualSystem, embed3

_EXP_EXTRA = 2


class SolidProblem(BaseProblem):
    """Assembler for ``SolidMechanics``-style problems (elastic materials)."""

    domain = "lagrangian"

    def __init__(self, mesh, spaces, material, frame=None, density=0.0, **kw):
        if kw.get("quad_degree") is None and getattr(material, "name", "") in (
                "fung", "guccione", "holzapfel_ogden", "demiray"):
            kw["quad_degree"] = 2 * spaces.primary.element.degree + _EXP_EXTRA
        super().__init__(mesh, spaces, material.at(frame) if frame is not None else material, **kw)
        self.density = float(density)
        self.incompressible = material.incompressible
        if self.incompressible and spaces.pressure is None:
            raise ValueError("incompressible material needs a mixed space")

    # -- volume terms ---------------------------------------------------------------

    def _material_eval(self, F3, q, need_tangent, p_q):
        mat = self.material
        try:
            P, A = mat.pk1_and_tangent(F3)
        except NonPositiveJacobian as exc:
            raise NonPositiveJacobian(
                f"element {exc.cell} inverted (J <= 0) at quadrature point {q}",
                cell=exc.cell, point=q) from None
        except ExponentOverflow as exc:
            raise ExponentOverflow(f"{exc} [quadrature point {q}]", cell=exc.cell, point=q) from None
        G = g = dG = None
        if self.incompressible:
            g, G, dG = mat.constraint_terms(F3, need_tangent)
            P = P - p_q[:, None, None] * G
            if need_tangent:
                A = A - p_q[:, None, None, None, None] * dG
        return P, A, G, g

    def _volume(self, x, need_tangent):
        c = self.mesh.num_cells
        d = self.dim
        U, Pc = self.cell_values(x)
        nn = U.shape[1]
        nu = nn * d
        Ru = np.zeros((c, nu))
        Rp = np.zeros((c, self.N_p.shape[1])) if self.incompressible else None
        K = None
        if need_tangent:
            k = self.cell_dofs.shape[1]
            K = np.zeros((c, k, k))
        B = np.zeros((c, d * d, nu))
        for q in range(len(self.rule)):
            dN = self.grad_basis(q)
            # B maps element dofs to the gradient entries (i, J), row-major
            for i in range(d):
                B[:, i * d:(i + 1) * d, i::d] = np.swapaxes(dN, 1, 2)
            H = (B @ U.reshape(c, nu, 1)).reshape(c, d, d)
            F3 = embed3(np.eye(d) + H, d)
            p_q = Pc @ self.N_p[q] if self.incompressible else None
            P, A, G, g = self._material_eval(F3, q, need_tangent, p_q)
            wq = self.rule.weights[q] * self.detJ
            Bt = np.swapaxes(B, 1, 2)
            P = np.ascontiguousarray(P[:, :d, :d]).reshape(c, d * d, 1)
            Ru += wq[:, None] * (Bt @ P)[:, :, 0]
            if self.incompressible:
                Rp += (wq * g)[:, None] * self.N_p[q][None, :]
            if need_tangent:
                A = np.ascontiguousarray(A[:, :d, :d, :d, :d]).reshape(c, d * d, d * d)
                K[:, :nu, :nu] += wq[:, None, None] * (Bt @ (A @ B))
                if self.incompressible:
                    G = np.ascontiguousarray(G[:, :d, :d]).reshape(c, d * d, 1)
                    GB = (Bt @ G)[:, :, 0]
                    Kup = -(wq[:, None] * GB)[:, :, None] * self.N_p[q][None, None, :]
                    K[:, :nu, nu:] += Kup
                    K[:, nu:, :nu] -= np.swapaxes(Kup, 1, 2)
        return Ru.reshape(c, nn, d), Rp, K

    # -- boundary terms ------------------------------------------------------------------

    def _pressure_load(self, bc, x, t, need_tangent, R, K):
        """Follower pressure: adds int p J F^-T N . w dA to R (and its linearization)."""
        from ..materials.kinematics import cofactor_derivative

        d = self.dim
        u, _ = self.split(x)
        group = self._facets(bc.region)
        for b in group.buckets:
            cells = b["cells"]
            dofs = self.space_u.dof_map[cells]
            Uc = u[dofs].reshape(len(cells), -1, d)
            X = b["X"]
            nq = X.shape[1]
            pbar = evaluate(bc.values, t, X.reshape(-1, d)).reshape(len(cells), nq)
            Rl = np.zeros_like(Uc)
            Kl = np.zeros((len(cells), Uc.shape[1] * d, Uc.shape[1] * d)) if need_tangent else None
            for q in range(nq):
                dN = np.einsum("ar,cri->cai", b["dN"][q], self.invJ[cells])
                F3 = embed3(np.eye(d) + np.einsum("cai,caJ->ciJ", Uc, dN), d)
                cof, dcof = cofactor_derivative(F3)
                N3 = b["normal"] if d == 3 else np.hstack([b["normal"], np.zeros((len(cells), 1))])
                tvec = np.einsum("ciJ,cJ->ci", cof, N3)[:, :d]
                wp = b["w"][:, q] * pbar[:, q]
                Rl += wp[:, None, None] * np.einsum("a,ci->cai", b["N"][q], tvec)
                if need_tangent:
                    nc, nb = len(cells), dN.shape[1]
                    dt = (np.moveaxis(dcof, 2, 4) @ N3[:, None, None, :, None])[..., 0]
                    dt = np.ascontiguousarray(dt[:, :d, :d, :d]).reshape(nc, d * d, d)
                    M = (dt @ np.swapaxes(dN, 1, 2)).reshape(nc, d, d, nb)
                    M = np.transpose(M, (0, 1, 3, 2)).reshape(nc, 1, d * nb * d)
                    blk = b["N"][q][None, :, None] * M
                    # blk index order: (a, i, b, k)
                    Kl += wp[:, None, None] * blk.reshape(Kl.shape)
            R[:self.space_u.dim] += scatter_vector(self.space_u.dim, dofs, Rl.reshape(len(cells), -1))
            if need_tangent:
                self.add_primary_blocks(K, cells, Kl)

    def external_load(self, x, t):
        """Total external load vector on the primary block (Neumann + body)."""
        f = self.body_load(t)
        for bc in self.neumann:
            if bc.type == "traction":
                f += self._traction_vector(bc, t)
            else:
                R = np.zeros(self.ndof)
                self._pressure_load(bc, x, t, False, R, None)
                f -= R[:self.space_u.dim]
        return f

    # -- public API ------------------------------------------------------------------------

    def assemble(self, x, t, need_tangent=True, mass_coeff=0.0, accel=None):
        """Residual (and tangent) at state ``x``, time ``t``.

        ``accel``/``mass_coeff`` add the inertial term rho0 M a and its
        Newmark linearization ``mass_coeff * M``.
        """
        Ru, Rp, Kb = self._volume(x, need_tangent)
        R, K = self._scatter(Ru, Rp, Kb)
        for bc in self.neumann:
            if bc.type == "pressure":
                self._pressure_load(bc, x, t, need_tangent, R, K)
            else:
                R[:self.space_u.dim] -= self._traction_vector(bc, t)
        if self.body_force is not None:
            R[:self.space_u.dim] -= self.body_load(t)
        if self.density > 0 and accel is not None:
            M = self.mass_data(self.density)
            Mm = self.matrix.copy()
            Mm.data[:] = M
            R += Mm.tocsr() @ accel
            if K is not None and mass_coeff:
                K.data += mass_coeff * M
        dofs, vals = self.dirichlet_constraints(t)
        return ResidualSystem(R, K, dofs, vals)

    def residual(self, x, t, **kw):
        return self.assemble(x, t, need_tangent=False, **kw).residual

    def stress_at_quadrature(self, x):
        """First Piola-Kirchhoff stress at all quadrature points, (c, q, d, d)."""
        U, Pc = self.cell_values(x)
        d = self.dim
        out = []
        for q in range(len(self.rule)):
            dN = self.grad_basis(q)
            F3 = embed3(np.eye(d) + np.einsum("cai,caJ->ciJ", U, dN), d)
            p_q = Pc @ self.N_p[q] if self.incompressible else None
            P, _, _, _ = self._material_eval(F3, q, False, p_q)
            out.append(P[:, :d, :d])
        return np.stack(out, axis=1)

    def constraint_residual(self, x):
        R = self.assemble(x, 0.0, need_tangent=False).residual
        return R[self.space_u.dim:]

