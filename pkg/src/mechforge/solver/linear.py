"""Sparse linear solves for Newton increments."""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import SingularMatrix
from ..fem.sparse import SparseMatrix

try:  # UMFPACK through cvxopt is several times faster than SuperLU here
    import cvxopt
    import cvxopt.umfpack as _umfpack
except ImportError:  # pragma: no cover - exercised only without cvxopt
    _umfpack = None

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
_REFINE_STEPS = 3


def _as_csc(K):
    if isinstance(K, SparseMatrix):
        return K.tocsr().tocsc()
    if sp.issparse(K):
        return K.tocsc()
    return sp.csc_matrix(np.atleast_2d(np.asarray(K, dtype=float)))


def _empty_row(A):
    """First row or column with no nonzero entry, or None."""
    A = A.tocsr()
    A.eliminate_zeros()
    rows = np.flatnonzero(np.diff(A.indptr) == 0)
    if len(rows):
        return int(rows[0])
    cols = np.flatnonzero(np.diff(A.tocsc().indptr) == 0)
    return int(cols[0]) if len(cols) else None


def _factor(A, backend=None):
    """LU factorization of CSC ``A``; returns a solve callable."""
    backend = backend or ("umfpack" if _umfpack is not None else "superlu")
    if backend == "umfpack":
        C = A.tocoo()
        M = cvxopt.spmatrix(cvxopt.matrix(C.data), cvxopt.matrix(C.row.astype(np.int64)),
                            cvxopt.matrix(C.col.astype(np.int64)), C.shape)
        numeric = _umfpack.numeric(M, _umfpack.symbolic(M))

        def solve(rhs):
            out = cvxopt.matrix(np.ascontiguousarray(rhs, dtype=float))
            _umfpack.solve(M, numeric, out)
            return np.array(out).ravel()
        return solve
    return spla.splu(A, permc_spec="COLAMD").solve


def linear_solve(K, rhs, method="lu"):
    """Solve ``K x = rhs``; ``method`` is ``"lu"`` (sparse LU) or ``"gmres-ilu"``."""
    A = _as_csc(K)
    b = np.asarray(rhs, dtype=float).ravel()
    if A.shape[0] != A.shape[1] or A.shape[0] != len(b):
        raise ValueError(f"shape mismatch: K {A.shape}, rhs {b.shape}")
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b)
    if method == "lu":
        try:
            solve = _factor(A)
        except (RuntimeError, ArithmeticError) as exc:
            dof = _empty_row(A)
            where = f" (dof {dof} has no coupling)" if dof is not None else ""
            raise SingularMatrix(f"singular matrix: {exc}{where}", dof=dof) from None
        x = solve(b)
        for _ in range(_REFINE_STEPS):
            r = b - A @ x
            if np.linalg.norm(r) <= RESIDUAL_TOL * bnorm:
                break
            x += solve(r)
    elif method == "gmres-ilu":
        try:
            ilu = spla.spilu(A, drop_tol=0.0, fill_factor=1.0)
        except RuntimeError as exc:
            dof = _empty_row(A)
            raise SingularMatrix(f"singular matrix: {exc}", dof=dof) from None
        M = spla.LinearOperator(A.shape, ilu.solve)
        x, info = spla.gmres(A, b, M=M, rtol=1e-12, atol=0.0, restart=200, maxiter=50)
        if info != 0:
            log.warning("gmres stopped without reaching tolerance (info=%d)", info)
    else:
        raise ValueError(f"unknown linear solver {method!r}")
    if not np.all(np.isfinite(x)):
        dof = int(np.flatnonzero(~np.isfinite(x))[0])
        raise SingularMatrix(f"singular matrix: non-finite solution at dof {dof}", dof=dof)
    rel = np.linalg.norm(b - A @ x) / bnorm
    if rel > RESIDUAL_TOL:
        log.warning("linear solve relative residual %.3e exceeds %.0e", rel, RESIDUAL_TOL)
    return x
