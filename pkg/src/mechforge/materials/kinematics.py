"""Kinematic quantities at quadrature points (arrays with leading batch axes)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import NonPositiveJacobian

I3 = np.eye(3)


def det3(F):
    return np.linalg.det(F)


def check_jacobian(J, what="deformation gradient"):
    bad = np.flatnonzero(np.ravel(J) <= 0)
    if len(bad):
        raise NonPositiveJacobian(f"{what} has J <= 0 (flat index {int(bad[0])})",
                                  cell=int(bad[0]))


@dataclass
class KinematicState:
    F: np.ndarray
    J: np.ndarray
    C: np.ndarray
    B: np.ndarray
    E: np.ndarray
    I1: np.ndarray
    I4f: Optional[np.ndarray] = None
    I4s: Optional[np.ndarray] = None
    I8fs: Optional[np.ndarray] = None


def kinematics(F, frame=None):
    """KinematicState from ``F`` (``(..., 3, 3)``); ``frame`` columns are f0, s0, n0."""
    F = np.asarray(F, dtype=float)
    J = det3(F)
    C = np.swapaxes(F, -1, -2) @ F
    B = F @ np.swapaxes(F, -1, -2)
    E = 0.5 * (C - I3)
    I1 = np.trace(C, axis1=-2, axis2=-1)
    st = KinematicState(F, J, C, B, E, I1)
    if frame is not None:
        f = frame[..., :, 0]
        s = frame[..., :, 1]
        st.I4f = np.einsum("...i,...ij,...j->...", f, C, f)
        st.I4s = np.einsum("...i,...ij,...j->...", s, C, s)
        st.I8fs = np.einsum("...i,...ij,...j->...", f, C, s)
    return st


@dataclass
class FluidKinematics:
    L: np.ndarray
    D: np.ndarray


def fluid_kinematics(L):
    L = np.asarray(L, dtype=float)
    return FluidKinematics(L, 0.5 * (L + np.swapaxes(L, -1, -2)))


def outer(a, b):
    return np.einsum("...ij,...kl->...ijkl", a, b)


def sym_product(Ci):
    """``Ci_IK Ci_JL + Ci_IL Ci_JK``."""
    return (np.einsum("...ik,...jl->...ijkl", Ci, Ci)
            + np.einsum("...il,...jk->...ijkl", Ci, Ci))


def cofactor_derivative(F):
    """``d(J F^-T)/dF`` as a ``(..., 3, 3, 3, 3)`` array indexed [i, J, k, L].

    Also returns ``J F^-T``.
    """
    J = det3(F)
    Fi = np.linalg.inv(F)
    cof = J[..., None, None] * np.swapaxes(Fi, -1, -2)
    Ft = np.swapaxes(Fi, -1, -2)
    O = Ft[..., :, :, None, None] * Ft[..., None, None, :, :]
    d = J[..., None, None, None, None] * (O - np.swapaxes(O, -3, -1))
    return cof, d
