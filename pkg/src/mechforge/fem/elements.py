"""Lagrange P1/P2 elements on the reference simplex.

Node order: vertices first, then edge midpoints in ``EDGES[dim]`` order.
Basis functions are written in barycentric coordinates
``lambda_0 = 1 - sum(xi)``, ``lambda_i = xi_{i-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EDGES = {
    2: np.array([[0, 1], [1, 2], [0, 2]]),
    3: np.array([[0, 1], [1, 2], [0, 2], [0, 3], [1, 3], [2, 3]]),
}


def barycentric(points):
    points = np.atleast_2d(points)
    return np.column_stack([1.0 - points.sum(axis=1), points])


def _dlambda(dim):
    """Constant gradients of the barycentric coordinates, (dim+1, dim)."""
    return np.vstack([-np.ones(dim), np.eye(dim)])


@dataclass(frozen=True)
class ReferenceElement:
    family: str  # "P1" or "P2"
    dim: int

    @property
    def degree(self):
        return 1 if self.family == "P1" else 2

    @property
    def num_nodes(self):
        n = self.dim + 1
        return n if self.family == "P1" else n + len(EDGES[self.dim])

    def nodes(self):
        verts = np.vstack([np.zeros(self.dim), np.eye(self.dim)])
        if self.family == "P1":
            return verts
        mids = 0.5 * (verts[EDGES[self.dim][:, 0]] + verts[EDGES[self.dim][:, 1]])
        return np.vstack([verts, mids])

    def tabulate(self, points):
        """Basis values ``(nq, nn)`` and reference gradients ``(nq, nn, dim)``."""
        lam = barycentric(points)
        dl = _dlambda(self.dim)
        if self.family == "P1":
            grads = np.broadcast_to(dl, (len(lam),) + dl.shape).copy()
            return lam, grads
        e = EDGES[self.dim]
        phi_v = lam * (2 * lam - 1)
        phi_e = 4 * lam[:, e[:, 0]] * lam[:, e[:, 1]]
        g_v = (4 * lam - 1)[:, :, None] * dl[None, :, :]
        g_e = 4 * (lam[:, e[:, 1], None] * dl[None, e[:, 0], :]
                   + lam[:, e[:, 0], None] * dl[None, e[:, 1], :])
        return np.hstack([phi_v, phi_e]), np.concatenate([g_v, g_e], axis=1)


def element(family, dim):
    family = family.upper()
    if family not in ("P1", "P2") or dim not in (2, 3):
        raise ValueError(f"unsupported element {family} in {dim}D")
    return ReferenceElement(family, dim)


def tabulate(elem, points):
    return elem.tabulate(points)
