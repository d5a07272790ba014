"""Truncated prolate ellipsoid (idealized left ventricle) mesh generator.

The wall between two ellipsoids of revolution is
parametrized by a transmural coordinate ``s`` (0 endo, 1 epi), a
longitudinal angle ``u`` (pi at the apex, up to the base cut) and a
circumferential angle ``v``::

    x = r_s(s) sin(u) cos(v),  y = r_s(s) sin(u) sin(v),  z = r_l(s) cos(u)

Each transmural layer is a triangulated cap (apex fan + quad strips), and
every prism between layers is split into three tetrahedra with the
diagonal rule based on global vertex numbering, which keeps the split
conforming.  Default dimensions (mm) are those of the cardiac mechanics
benchmark of Land et al. (2015): endo (7, 17), epi (10, 20), base at z=5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError
from .core import Mesh, boundary_faces
from .fibers import FiberField

BASE_MARKER = 10
ENDO_MARKER = 20
EPI_MARKER = 30


@dataclass(frozen=True)
class EllipsoidSpec:
    endo_short: float = 7.0
    endo_long: float = 17.0
    epi_short: float = 10.0
    epi_long: float = 20.0
    base_z: float = 5.0
    h: float = 2000.0  # target edge length, micrometres

    def check(self):
        if not self.h > 0:
            raise GeometryError(f"edge length h must be positive, got {self.h}")
        if not (0 < self.endo_short < self.epi_short and 0 < self.endo_long < self.epi_long):
            raise GeometryError("need 0 < endo axes < epi axes")
        if not -self.endo_long < self.base_z < self.endo_long:
            raise GeometryError(
                f"base plane z={self.base_z} does not cut the endocardial surface")

    def resolution(self):
        """(longitudinal, circumferential, transmural) cell counts for ``h``.

        Calibrated so that h = 2000 um gives the element counts of the
        coarsest benchmark mesh; counts scale like 1/h.
        """
        h_mm = self.h / 1000.0
        n_u = max(2, int(round(18.0 / h_mm)))
        n_v = max(3, int(round(40.0 / h_mm)))
        n_t = max(1, int(round(2.0 / h_mm)))
        return n_u, n_v, n_t


def _radii(spec, s):
    rs = spec.endo_short + s * (spec.epi_short - spec.endo_short)
    rl = spec.endo_long + s * (spec.epi_long - spec.endo_long)
    return rs, rl


def generate_ellipsoid(spec=EllipsoidSpec(), resolution=None):
    """Tetrahedral mesh of the ventricular wall.

    Markers: 10 base plane, 20 endocardium, 30 epicardium.
    """
    spec.check()
    n_u, n_v, n_t = resolution or spec.resolution()
    per_layer = 1 + n_u * n_v

    points = []
    for j in range(n_t + 1):
        s = j / n_t
        rs, rl = _radii(spec, s)
        u_base = np.arccos(spec.base_z / rl)
        layer = [(0.0, 0.0, -rl)]
        for k in range(1, n_u + 1):
            u = np.pi - k / n_u * (np.pi - u_base)
            v = 2 * np.pi * np.arange(n_v) / n_v
            ring = np.stack([rs * np.sin(u) * np.cos(v), rs * np.sin(u) * np.sin(v),
                             np.full(n_v, rl * np.cos(u))], axis=1)
            ring[:, 2] = rl * np.cos(u) if k < n_u else spec.base_z
            layer.extend(map(tuple, ring))
        points.extend(layer)
    vertices = np.array(points)

    def ring_id(k, i):
        return 1 + (k - 1) * n_v + (i % n_v)

    tris = []
    for i in range(n_v):
        tris.append((0, ring_id(1, i), ring_id(1, i + 1)))
    for k in range(1, n_u):
        for i in range(n_v):
            a, b = ring_id(k, i), ring_id(k, i + 1)
            c, d = ring_id(k + 1, i), ring_id(k + 1, i + 1)
            tris.append((a, b, d))
            tris.append((a, d, c))
    tris = np.sort(np.array(tris, dtype=np.int64), axis=1)

    cells = []
    for j in range(n_t):
        bot = tris + j * per_layer
        top = bot + per_layer
        a, b, c = bot.T
        at, bt, ct = top.T
        cells.append(np.stack([a, b, c, ct], axis=1))
        cells.append(np.stack([a, b, bt, ct], axis=1))
        cells.append(np.stack([a, at, bt, ct], axis=1))
    cells = np.concatenate(cells)

    faces = boundary_faces(cells, 3)
    layer_of = np.arange(len(vertices)) // per_layer
    in_layer = layer_of[faces]
    markers = np.full(len(faces), BASE_MARKER, dtype=np.int64)
    markers[np.all(in_layer == 0, axis=1)] = ENDO_MARKER
    markers[np.all(in_layer == n_t, axis=1)] = EPI_MARKER
    base = np.all(np.abs(vertices[faces][:, :, 2] - spec.base_z) < 1e-9, axis=1)
    markers[base] = BASE_MARKER
    if np.any(~base & (markers == BASE_MARKER)):
        raise GeometryError("unclassified boundary facet")
    return Mesh(vertices, cells, faces, markers)


def transmural_coordinate(mesh, spec=EllipsoidSpec()):
    """Approximate transmural depth s in [0, 1] for arbitrary points."""
    x = mesh.vertices
    # solve (r^2/rs(s)^2 + z^2/rl(s)^2) = 1 for s by bisection
    lo = np.zeros(len(x))
    hi = np.ones(len(x))
    r2 = x[:, 0] ** 2 + x[:, 1] ** 2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        rs, rl = _radii(spec, mid)
        inside = r2 / rs ** 2 + x[:, 2] ** 2 / rl ** 2 > 1.0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def helix_fibers(mesh, spec=EllipsoidSpec(), angle_endo=-90.0, angle_epi=90.0):
    """Element-wise fiber and sheet fields from a transmural helix-angle rule.

    The fiber makes angle alpha(s) (linear in depth) with the
    circumferential direction, rotating towards the base-ward meridian
    tangent.  The sheet is the ellipsoid surface normal orthogonalized
    against the fiber.
    """
    s_vert = transmural_coordinate(mesh, spec)
    s = s_vert[mesh.cells].mean(axis=1)
    xc = mesh.vertices[mesh.cells].mean(axis=1)
    rs, rl = _radii(spec, s)
    v = np.arctan2(xc[:, 1], xc[:, 0])
    rho = np.hypot(xc[:, 0], xc[:, 1])
    u = np.arctan2(rho / rs, xc[:, 2] / rl)
    e_circ = np.stack([-np.sin(v), np.cos(v), np.zeros_like(v)], axis=1)
    # d/du of the parametrization points apex-ward; negate for base-ward
    e_long = -np.stack([rs * np.cos(u) * np.cos(v), rs * np.cos(u) * np.sin(v),
                        -rl * np.sin(u)], axis=1)
    e_long /= np.linalg.norm(e_long, axis=1)[:, None]
    alpha = np.deg2rad(angle_endo + s * (angle_epi - angle_endo))
    f = np.cos(alpha)[:, None] * e_circ + np.sin(alpha)[:, None] * e_long
    f /= np.linalg.norm(f, axis=1)[:, None]
    normal = np.stack([xc[:, 0] / rs ** 2, xc[:, 1] / rs ** 2, xc[:, 2] / rl ** 2], axis=1)
    sheet = normal - np.einsum("ij,ij->i", normal, f)[:, None] * f
    sheet /= np.linalg.norm(sheet, axis=1)[:, None]
    return [FiberField("n1", True, f), FiberField("n2", True, sheet)]
