"""Elastic (Lagrangian) constitutive models.

Hierarchy::

    ElasticMaterial
      LinearIsoMaterial                       small strain
      IsotropicMaterial -> NeoHookeMaterial, DemirayMaterial
      FungMaterial -> GuccioneMaterial        exponential in E (material frame)
      HolzapfelOgdenMaterial                  invariant based, fiber/sheet

Every hyperelastic model supplies the second Piola-Kirchhoff stress S and
its material tangent dS/dE; the first Piola-Kirchhoff stress and dP/dF
follow by push-forward.  Compressible variants add the volumetric energy
U(J) = kappa/2 (ln J)^2 and use isochoric invariants for the isotropic
part, which keeps the reference configuration stress-free.
Incompressible isotropic variants use unsplit invariants; the pressure
term -p J F^-T is added by ``pk1_stress`` / the mixed formulation.  The
Fung family always evaluates its exponential on the isochoric strain
(1/2)(J^-2/3 C - I): with the unsplit strain, the pointwise volume error
of a P2-P1 solution lets compressed regions reach the softening branch
of the exponential law.

All arrays carry arbitrary leading batch axes; tensors are 3x3 (2D
problems embed F in 3D, plane strain).
"""

from __future__ import annotations

import numpy as np

from ..errors import ExponentOverflow
from .kinematics import I3, check_jacobian, cofactor_derivative, det3, outer, sym_product

EXP_LIMIT = 700.0

# Voigt ordering of symmetric tensor components for the Fung quadratic form
VOIGT = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


def _guard_exp(arg, model):
    arg = np.asarray(arg)
    if np.any(arg > EXP_LIMIT):
        flat = int(np.flatnonzero(np.ravel(arg) > EXP_LIMIT)[0])
        idx = np.unravel_index(flat, arg.shape) if arg.ndim else ()
        cell = int(idx[0]) if len(idx) else None
        point = int(idx[1]) if len(idx) > 1 else None
        raise ExponentOverflow(
            f"{model}: exponent {float(np.ravel(arg)[flat]):.4g} exceeds {EXP_LIMIT} "
            f"(cell {cell}, point {point}); reduce the load step",
            cell=cell, point=point)
    return np.exp(arg)


def _isochoric(C, J):
    a = J ** (-2.0 / 3.0)
    return a, a[..., None, None] * C


def _isochoric_stress(C, a, Sb, Db):
    """S and dS/dE of W(C) = Wb(J^-2/3 C) from Sb = 2 dWb/dCb and Db = 2 dSb/dCb."""
    Ci = np.linalg.inv(C)
    s = np.einsum("...ij,...ij->...", Sb, C)
    A2, A4 = a[..., None, None], a[..., None, None, None, None]
    s4 = s[..., None, None, None, None]
    S = A2 * (Sb - (s / 3.0)[..., None, None] * Ci)
    DC = np.einsum("...ijkl,...kl->...ij", Db, C)
    CDC = np.einsum("...ij,...ij->...", C, DC)
    ds = Sb + 0.5 * A2 * (DC - (CDC / 3.0)[..., None, None] * Ci)  # d(Sb:C)/dC
    d_aSb = -A4 / 3.0 * outer(Sb, Ci) + 0.5 * A4 ** 2 * (Db - outer(DC, Ci) / 3.0)
    d_asCi = -A4 / 3.0 * s4 * outer(Ci, Ci) + A4 * outer(Ci, ds) - 0.5 * A4 * s4 * sym_product(Ci)
    return S, 2.0 * (d_aSb - d_asCi / 3.0)


def _sym_identity():
    return 0.5 * (np.einsum("ik,jl->ijkl", I3, I3) + np.einsum("il,jk->ijkl", I3, I3))


def _push_tangent(F, S, D):
    """A_iJkL = delta_ik S_JL + F_iI D_IJKL F_kK, via batched matmuls."""
    batch = F.shape[:-2]
    F2 = F.reshape((-1, 3, 3))
    n = len(F2)
    D2 = np.broadcast_to(D, batch + (3, 3, 3, 3)).reshape(n, 3, 27)
    FD = (F2 @ D2).reshape(n, 3, 3, 3, 3)               # [i, J, K, L]
    FD = np.swapaxes(FD, 3, 4).reshape(n, 27, 3)          # [(i, J, L), K]
    A = (FD @ np.swapaxes(F2, 1, 2)).reshape(n, 3, 3, 3, 3)  # [i, J, L, k]
    A = np.swapaxes(A, 3, 4)
    S2 = np.broadcast_to(S, batch + (3, 3)).reshape(n, 3, 3)
    for i in range(3):
        A[:, i, :, i, :] += S2
    return A.reshape(batch + (3, 3, 3, 3))


class ElasticMaterial:
    """Base class; subclasses implement ``_energy`` and ``_stress_tangent``."""

    name = "elastic"
    anisotropic = False
    small_strain = False

    def __init__(self, incompressible=False, kappa=None):
        self.incompressible = bool(incompressible)
        if not self.incompressible and not self.small_strain:
            if kappa is None or kappa <= 0:
                raise ValueError(f"{self.name}: compressible model needs kappa > 0")
        self.kappa = kappa
        self.frame = None

    def at(self, frame):
        """Copy of this material bound to per-cell frames ``(cells, 3, 3)``."""
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new.frame = None if frame is None else np.asarray(frame, dtype=float)
        new._bind()
        return new

    def _bind(self):
        pass

    def _frame_for(self, F):
        """Broadcast the bound frame against a batch of F with shape (c, [q,] 3, 3)."""
        fr = self.frame
        if fr is None:
            return None
        extra = F.ndim - 2 - (fr.ndim - 2)
        return fr.reshape(fr.shape[:-2] + (1,) * extra + (3, 3)) if extra > 0 else fr

    # -- energies ---------------------------------------------------------------

    def strain_energy(self, F):
        F = np.asarray(F, dtype=float)
        J = det3(F)
        check_jacobian(J)
        C = np.swapaxes(F, -1, -2) @ F
        W = self._energy(C, J)
        if not self.incompressible and not self.small_strain:
            W = W + 0.5 * self.kappa * np.log(J) ** 2
        return W

    # -- stresses ---------------------------------------------------------------

    def second_pk(self, F):
        """S and dS/dE (volumetric part included when compressible)."""
        F = np.asarray(F, dtype=float)
        J = det3(F)
        check_jacobian(J)
        C = np.swapaxes(F, -1, -2) @ F
        S, D = self._stress_tangent(C, J)
        if not self.incompressible:
            Ci = np.linalg.inv(C)
            lnJ = np.log(J)[..., None, None]
            S = S + self.kappa * lnJ * Ci
            D = (D + self.kappa * outer(Ci, Ci)
                 - self.kappa * lnJ[..., None, None] * sym_product(Ci))
        return S, D

    def pk1_and_tangent(self, F):
        """Constitutive part of P and dP/dF (no Lagrange-multiplier term)."""
        F = np.asarray(F, dtype=float)
        S, D = self.second_pk(F)
        P = F @ S
        return P, _push_tangent(F, S, D)

    def pk1_stress(self, F, p=0.0):
        """First Piola-Kirchhoff stress; incompressible models subtract p J F^-T."""
        P, _ = self.pk1_and_tangent(F)
        if self.incompressible:
            cof, _ = cofactor_derivative(np.asarray(F, dtype=float))
            P = P - np.asarray(p)[..., None, None] * cof
        return P

    def pk1_tangent(self, F, p=0.0):
        P, A = self.pk1_and_tangent(F)
        if self.incompressible:
            cof, dcof = cofactor_derivative(np.asarray(F, dtype=float))
            p = np.asarray(p)
            P = P - p[..., None, None] * cof
            A = A - p[..., None, None, None, None] * dcof
        return P, A

    # constraint g(F) = 0 enforced by the pressure field and its derivative
    def constraint(self, F):
        return det3(F) - 1.0

    def constraint_derivative(self, F):
        cof, _ = cofactor_derivative(F)
        return cof

    def constraint_second(self, F):
        """d^2 g / dF dF, contracted against the pressure in the formulation."""
        _, dcof = cofactor_derivative(F)
        return dcof

    def constraint_terms(self, F, second=True):
        """(g, dg/dF, d^2g/dF^2 or None) in one pass."""
        cof, dcof = cofactor_derivative(F)
        return det3(F) - 1.0, cof, (dcof if second else None)

    def reference_pressure(self):
        """Pressure that makes the reference configuration stress-free."""
        return 0.0


class LinearIsoMaterial(ElasticMaterial):
    """sigma = la tr(eps) I + 2 mu eps, eps = sym(grad u)."""

    name = "linear_iso"
    small_strain = True

    def __init__(self, mu, la=0.0, incompressible=False):
        super().__init__(incompressible)
        self.mu = float(mu)
        self.la = 0.0 if incompressible else float(la)
        self._A = (self.la * np.einsum("ij,kl->ijkl", I3, I3) + 2 * self.mu * _sym_identity())

    def stress(self, eps):
        eps = np.asarray(eps, dtype=float)
        tr = np.trace(eps, axis1=-2, axis2=-1)[..., None, None]
        return self.la * tr * I3 + 2 * self.mu * eps

    def strain_energy(self, F):
        eps = _small_strain(F)
        tr = np.trace(eps, axis1=-2, axis2=-1)
        return 0.5 * self.la * tr ** 2 + self.mu * np.einsum("...ij,...ij->...", eps, eps)

    def pk1_and_tangent(self, F):
        F = np.asarray(F, dtype=float)
        sigma = self.stress(_small_strain(F))
        return sigma, np.broadcast_to(self._A, F.shape[:-2] + (3, 3, 3, 3))

    def pk1_stress(self, F, p=0.0):
        P, _ = self.pk1_and_tangent(F)
        if self.incompressible:
            P = P - np.asarray(p)[..., None, None] * I3
        return P

    def pk1_tangent(self, F, p=0.0):
        return self.pk1_stress(F, p), self.pk1_and_tangent(F)[1]

    def constraint(self, F):
        return np.trace(np.asarray(F) - I3, axis1=-2, axis2=-1)

    def constraint_derivative(self, F):
        return np.broadcast_to(I3, np.shape(F)).copy()

    def constraint_second(self, F):
        return np.zeros(np.shape(F)[:-2] + (3, 3, 3, 3))

    def constraint_terms(self, F, second=True):
        return (self.constraint(F), self.constraint_derivative(F),
                self.constraint_second(F) if second else None)


def _small_strain(F):
    H = np.asarray(F, dtype=float) - I3
    return 0.5 * (H + np.swapaxes(H, -1, -2))


class IsotropicMaterial(ElasticMaterial):
    """W = h(I1bar) (compressible) or h(I1) (incompressible)."""

    def _h(self, x):
        raise NotImplementedError

    def _dh(self, x):
        raise NotImplementedError

    def _ddh(self, x):
        raise NotImplementedError

    def _invariant(self, C, J):
        I1 = np.trace(C, axis1=-2, axis2=-1)
        return I1 if self.incompressible else J ** (-2.0 / 3.0) * I1

    def _energy(self, C, J):
        return self._h(self._invariant(C, J))

    def _stress_tangent(self, C, J):
        x = self._invariant(C, J)
        h1 = self._dh(x)[..., None, None]
        h2 = self._ddh(x)[..., None, None, None, None]
        if self.incompressible:
            G = np.broadcast_to(I3, C.shape)
            return 2 * h1 * G, 4 * h2 * outer(G, G)
        Ci = np.linalg.inv(C)
        I1 = np.trace(C, axis1=-2, axis2=-1)[..., None, None]
        alpha = (J ** (-2.0 / 3.0))[..., None, None]
        G = alpha * (I3 - I1 / 3.0 * Ci)
        a4 = alpha[..., None, None]
        i4 = I1[..., None, None]
        dG = (-a4 / 3.0 * (np.einsum("ij,...kl->...ijkl", I3, Ci)
                           + np.einsum("...ij,kl->...ijkl", Ci, I3))
              + a4 * i4 / 9.0 * outer(Ci, Ci)
              + a4 * i4 / 6.0 * sym_product(Ci))
        return 2 * h1 * G, 4 * h2 * outer(G, G) + 4 * h1[..., None, None] * dG


class NeoHookeMaterial(IsotropicMaterial):
    name = "neo_hooke"

    def __init__(self, mu, kappa=None, incompressible=False):
        super().__init__(incompressible, kappa)
        self.mu = float(mu)

    def _h(self, x):
        return 0.5 * self.mu * (x - 3.0)

    def _dh(self, x):
        return np.full(np.shape(x), 0.5 * self.mu)

    def _ddh(self, x):
        return np.zeros(np.shape(x))

    def reference_pressure(self):
        return self.mu if self.incompressible else 0.0


class DemirayMaterial(IsotropicMaterial):
    """W = a/(2b) (exp(b (I1 - 3)) - 1)."""

    name = "demiray"

    def __init__(self, a, b, kappa=None, incompressible=False):
        super().__init__(incompressible, kappa)
        self.a = float(a)
        self.b = float(b)

    def _exp(self, x):
        return _guard_exp(self.b * (x - 3.0), self.name)

    def _h(self, x):
        return self.a / (2 * self.b) * (self._exp(x) - 1.0)

    def _dh(self, x):
        return 0.5 * self.a * self._exp(x)

    def _ddh(self, x):
        return 0.5 * self.a * self.b * self._exp(x)

    def reference_pressure(self):
        return self.a if self.incompressible else 0.0


def _fourth_order_from_voigt(B):
    """Tensor T with E:T:E == Ev . B . Ev for symmetric E (tensor Voigt components)."""
    B = np.asarray(B, dtype=float)
    T = np.zeros((3, 3, 3, 3))
    for m, (a, b) in enumerate(VOIGT):
        wm = 1.0 if a == b else 0.5
        for n, (c, d) in enumerate(VOIGT):
            wn = 1.0 if c == d else 0.5
            v = B[m, n] * wm * wn
            for i, j in {(a, b), (b, a)}:
                for k, l in {(c, d), (d, c)}:
                    T[i, j, k, l] = v
    return T


def _contract(T, E):
    """T_ijkl E_kl for batched T and E."""
    T9 = T.reshape(T.shape[:-4] + (9, 9))
    return (T9 @ E.reshape(E.shape[:-2] + (9, 1))).reshape(E.shape)


def guccione_coefficients(bf, bt, bfs):
    """Fung coefficient matrix reproducing the Guccione exponent."""
    return np.diag([bf, bt, bt, 2 * bt, 2 * bfs, 2 * bfs])


class FungMaterial(ElasticMaterial):
    """W = C/2 (exp(Q) - 1), Q = Ev^T B Ev, Ev = Voigt(Eb) in the material frame.

    Eb = (J^-2/3 C - I)/2 is the isochoric Green-Lagrange strain.

    Voigt order (ff, ss, nn, sn, fn, fs) with tensor (not engineering)
    shear components.
    """

    name = "fung"
    anisotropic = True

    def __init__(self, C, coefficients, kappa=None, incompressible=False):
        super().__init__(incompressible, kappa)
        B = np.asarray(coefficients, dtype=float)
        if B.shape != (6, 6) or not np.allclose(B, B.T, rtol=0, atol=0):
            raise ValueError("Fung coefficient matrix must be symmetric 6x6")
        self.C = float(C)
        self.coefficients = B
        self._T_local = _fourth_order_from_voigt(B)
        self._T = self._T_local

    def _bind(self):
        fr = self.frame
        self._T = np.einsum("...Ia,...Jb,...Kc,...Ld,abcd->...IJKL",
                            fr, fr, fr, fr, self._T_local, optimize=True)

    def _T_for(self, C):
        T = self._T
        if T.ndim == 4:
            return T
        extra = C.ndim - 2 - (T.ndim - 4)
        return T.reshape(T.shape[:-4] + (1,) * extra + (3, 3, 3, 3)) if extra > 0 else T

    def _require_frame(self):
        if self.frame is None:
            raise ValueError(f"{self.name}: material frame not bound (call .at(frame))")

    def _energy(self, C, J):
        self._require_frame()
        E = 0.5 * (_isochoric(C, J)[1] - I3)
        TE = _contract(self._T_for(C), E)
        Q = np.einsum("...ij,...ij->...", E, TE)
        return 0.5 * self.C * (_guard_exp(Q, self.name) - 1.0)

    def _stress_tangent(self, C, J):
        self._require_frame()
        a, Cb = _isochoric(C, J)
        E = 0.5 * (Cb - I3)
        T = self._T_for(C)
        TE = _contract(T, E)
        Q = np.einsum("...ij,...ij->...", E, TE)
        eQ = self.C * _guard_exp(Q, self.name)
        Sb = eQ[..., None, None] * TE
        Db = eQ[..., None, None, None, None] * (T + 2 * outer(TE, TE))
        return _isochoric_stress(C, a, Sb, Db)


class GuccioneMaterial(FungMaterial):
    """Transversely isotropic Fung law with exponents (bf, bt, bfs).

    Q = bf E_ff^2 + bt (E_ss^2 + E_nn^2 + E_sn^2 + E_ns^2)
        + bfs (E_fs^2 + E_sf^2 + E_fn^2 + E_nf^2)
    """

    name = "guccione"

    def __init__(self, C, bf, bt, bfs, kappa=None, incompressible=False):
        super().__init__(C, guccione_coefficients(bf, bt, bfs), kappa, incompressible)
        self.bf, self.bt, self.bfs = float(bf), float(bt), float(bfs)

    def _energy(self, C, J):
        # evaluated directly from frame components, independent of the Fung path
        self._require_frame()
        E = 0.5 * (_isochoric(C, J)[1] - I3)
        fr = self._frame_for(C)
        Em = np.einsum("...Ia,...IJ,...Jb->...ab", fr, E, fr)
        Q = (self.bf * Em[..., 0, 0] ** 2
             + self.bt * (Em[..., 1, 1] ** 2 + Em[..., 2, 2] ** 2
                          + Em[..., 1, 2] ** 2 + Em[..., 2, 1] ** 2)
             + self.bfs * (Em[..., 0, 1] ** 2 + Em[..., 1, 0] ** 2
                           + Em[..., 0, 2] ** 2 + Em[..., 2, 0] ** 2))
        return 0.5 * self.C * (_guard_exp(Q, self.name) - 1.0)


class HolzapfelOgdenMaterial(ElasticMaterial):
    """Orthotropic Holzapfel-Ogden law (passive myocardium).

    W = a/(2b) [exp(b (I1 - 3)) - 1]
        + sum_{i=f,s} a_i/(2 b_i) [exp(b_i <I4i - 1>^2) - 1]
        + a_fs/(2 b_fs) [exp(b_fs I8fs^2) - 1]

    with <x> = max(x, 0).  The constant a/(2b) is subtracted so W(I) = 0;
    compressible variants use I1bar in the isotropic term.
    """

    name = "holzapfel_ogden"
    anisotropic = True

    def __init__(self, a, b, a_f, b_f, a_s=0.0, b_s=1.0, a_fs=0.0, b_fs=1.0,
                 kappa=None, incompressible=False):
        super().__init__(incompressible, kappa)
        self.a, self.b = float(a), float(b)
        self.a_f, self.b_f = float(a_f), float(b_f)
        self.a_s, self.b_s = float(a_s), float(b_s)
        self.a_fs, self.b_fs = float(a_fs), float(b_fs)
        self._iso = _HOIsotropic(self.a, self.b, incompressible, kappa)

    def _structural(self, C):
        fr = self._frame_for(C)
        if fr is None:
            raise ValueError(f"{self.name}: material frame not bound (call .at(frame))")
        f = fr[..., :, 0]
        s = fr[..., :, 1]
        ff = np.einsum("...i,...j->...ij", f, f)
        ss = np.einsum("...i,...j->...ij", s, s)
        fs = 0.5 * (np.einsum("...i,...j->...ij", f, s) + np.einsum("...i,...j->...ij", s, f))
        return ff, ss, fs

    def _terms(self, C):
        ff, ss, fs = self._structural(C)
        I4f = np.einsum("...ij,...ij->...", C, ff)
        I4s = np.einsum("...ij,...ij->...", C, ss)
        I8 = np.einsum("...ij,...ij->...", C, fs)
        return [(self.a_f, self.b_f, np.maximum(I4f - 1.0, 0.0), ff, I4f > 1.0),
                (self.a_s, self.b_s, np.maximum(I4s - 1.0, 0.0), ss, I4s > 1.0),
                (self.a_fs, self.b_fs, I8, fs, None)]

    def _energy(self, C, J):
        W = self._iso._energy(C, J)
        for a, b, x, _, _ in self._terms(C):
            if a == 0.0:
                continue
            W = W + a / (2 * b) * (_guard_exp(b * x ** 2, self.name) - 1.0)
        return W

    def _stress_tangent(self, C, J):
        S, D = self._iso._stress_tangent(C, J)
        for a, b, x, M, active in self._terms(C):
            if a == 0.0:
                continue
            e = _guard_exp(b * x ** 2, self.name)
            psi1 = a * x * e
            psi2 = a * e * (1.0 + 2.0 * b * x ** 2)
            if active is not None:
                psi2 = np.where(active, psi2, 0.0)
            S = S + 2 * psi1[..., None, None] * M
            D = D + 4 * psi2[..., None, None, None, None] * outer(M, M)
        return S, D

    def reference_pressure(self):
        return self.a if self.incompressible else 0.0


class _HOIsotropic(IsotropicMaterial):
    name = "holzapfel_ogden"

    def __init__(self, a, b, incompressible, kappa):
        self.incompressible = incompressible
        self.kappa = kappa
        self.a, self.b = a, b
        self.frame = None

    def _exp(self, x):
        return _guard_exp(self.b * (x - 3.0), self.name)

    def _h(self, x):
        return self.a / (2 * self.b) * (self._exp(x) - 1.0)

    def _dh(self, x):
        return 0.5 * self.a * self._exp(x)

    def _ddh(self, x):
        return 0.5 * self.a * self.b * self._exp(x)


MODELS = {
    "linear_iso": LinearIsoMaterial,
    "neo_hooke": NeoHookeMaterial,
    "demiray": DemirayMaterial,
    "fung": FungMaterial,
    "guccione": GuccioneMaterial,
    "holzapfel_ogden": HolzapfelOgdenMaterial,
}
