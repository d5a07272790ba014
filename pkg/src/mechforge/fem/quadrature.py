"""Quadrature on the reference simplex.

Reference triangle: (0,0), (1,0), (0,1).  Reference tetrahedron:
(0,0,0), (1,0,0), (0,1,0), (0,0,1).  Low degrees use the classical
symmetric rules, and tetrahedra of degree 5-6 a 24-point symmetric rule
(Keast's positive-weight rule).  Everything else uses collapsed-coordinate
(Stroud conical product) rules built from Gauss-Jacobi points, which are
exact to any degree and have positive weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import roots_jacobi

from ..errors import UnsupportedDegree

MAX_DEGREE = 6


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray   # (nq, dim)
    weights: np.ndarray  # (nq,), sums to 1/dim!
    degree: int

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.weights)


def _gauss_jacobi_01(n, alpha):
    """n-point Gauss rule on [0, 1] for the weight (1 - x)^alpha."""
    x, w = roots_jacobi(n, alpha, 0.0)
    return (x + 1.0) / 2.0, w / 2.0 ** (alpha + 1)


def _conical(dim, degree):
    n = degree // 2 + 1
    if dim == 2:
        a, wa = _gauss_jacobi_01(n, 1.0)
        b, wb = _gauss_jacobi_01(n, 0.0)
        A, B = np.meshgrid(a, b, indexing="ij")
        W = np.outer(wa, wb)
        pts = np.stack([A, B * (1 - A)], axis=-1).reshape(-1, 2)
        return pts, W.ravel()
    a, wa = _gauss_jacobi_01(n, 2.0)
    b, wb = _gauss_jacobi_01(n, 1.0)
    c, wc = _gauss_jacobi_01(n, 0.0)
    A, B, C = np.meshgrid(a, b, c, indexing="ij")
    W = wa[:, None, None] * wb[None, :, None] * wc[None, None, :]
    x = A
    y = B * (1 - A)
    z = C * (1 - A) * (1 - B)
    return np.stack([x, y, z], axis=-1).reshape(-1, 3), W.ravel()


def _symmetric(dim, degree):
    vol = 1.0 / factorial(dim)
    if degree <= 1:
        return np.full((1, dim), 1.0 / (dim + 1)), np.array([vol])
    if dim == 2 and degree == 2:
        pts = np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]])
        return pts, np.full(3, vol / 3)
    if dim == 3 and degree == 2:
        a = (5.0 - np.sqrt(5.0)) / 20.0
        b = 1.0 - 3.0 * a
        pts = np.array([[a, a, a], [b, a, a], [a, b, a], [a, a, b]])
        return pts, np.full(4, vol / 4)
    if dim == 3 and degree in (5, 6):
        return _tet24()
    return None


# (weight, a) for the (a, a, a, 1-3a) orbits and (weight, a, b) for the
# (a, a, b, 1-2a-b) orbit; weights are for the unit-volume-1/6 tetrahedron
_TET24_S31 = ((0.0066537917096945820166, 0.21460287125915202929),
              (0.0016795351758867738247, 0.040673958534611353116),
              (0.0092261969239424536825, 0.32233789014227551034))
_TET24_S211 = (9.0 / 1120.0, 0.063661001875017525299, 0.60300566479164914137)


def _tet24():
    pts, wts = [], []
    for w, a in _TET24_S31:
        for k in range(4):
            lam = [a] * 4
            lam[k] = 1.0 - 3.0 * a
            pts.append(lam)
            wts.append(w)
    w, a, b = _TET24_S211
    c = 1.0 - 2.0 * a - b
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            lam = [a] * 4
            lam[i], lam[j] = b, c
            pts.append(lam)
            wts.append(w)
    pts = np.array(pts)[:, 1:]
    return np.ascontiguousarray(pts), np.array(wts)


@lru_cache(maxsize=None)
def quadrature(dim, degree):
    """Rule on the reference simplex of ``dim`` exact for total degree ``degree``."""
    if dim not in (1, 2, 3):
        raise ValueError(f"unsupported dimension {dim}")
    if not 0 <= degree <= MAX_DEGREE:
        raise UnsupportedDegree(f"quadrature degree {degree} not available (max {MAX_DEGREE})")
    if dim == 1:
        x, w = np.polynomial.legendre.leggauss(degree // 2 + 1)
        pts, wts = ((x + 1) / 2)[:, None], w / 2
    else:
        rule = _symmetric(dim, degree)
        pts, wts = rule if rule is not None else _conical(dim, degree)
    pts.setflags(write=False)
    wts.setflags(write=False)
    return QuadratureRule(pts, wts, degree)
