"""CSR matrix with a fixed sparsity pattern and element scatter."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import PatternMiss


class SparseMatrix:
    """Square CSR matrix whose pattern is fixed at construction.

    The pattern comes from the union of ``dofs x dofs`` blocks of every
    cell, so element matrices from any cell always fit.
    """

    def __init__(self, n, cell_dofs):
        cell_dofs = np.asarray(cell_dofs, dtype=np.int64)
        nc, k = cell_dofs.shape
        rows = np.repeat(cell_dofs, k, axis=1).ravel()
        cols = np.tile(cell_dofs, (1, k)).ravel()
        key = rows * n + cols
        uniq, inverse = np.unique(key, return_inverse=True)
        self.n = n
        self.indices = (uniq % n).astype(np.int64)
        row_of = uniq // n
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, row_of + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.data = np.zeros(len(uniq))
        # position of every local entry of every cell in ``data``
        self.cell_positions = inverse.reshape(nc, k * k)
        self.entry_rows = row_of
        self._keys = uniq

    @property
    def nnz(self):
        return len(self.data)

    def zero(self):
        self.data[:] = 0.0

    def add_cell_blocks(self, blocks):
        """Accumulate element matrices ``(cells, k, k)`` for all cells at once."""
        self.data += np.bincount(self.cell_positions.ravel(),
                                 weights=np.asarray(blocks).ravel(),
                                 minlength=self.nnz)

    def positions(self, rows, cols):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        key = (rows[:, None] * self.n + cols[None, :]).ravel()
        pos = np.searchsorted(self._keys, key)
        pos = np.minimum(pos, len(self._keys) - 1)
        miss = self._keys[pos] != key
        if np.any(miss):
            bad = int(np.flatnonzero(miss)[0])
            raise PatternMiss(f"entry ({key[bad] // self.n}, {key[bad] % self.n}) "
                              f"is not in the sparsity pattern")
        return pos.reshape(len(rows), len(cols))

    def scatter_add(self, rows, cols, block):
        pos = self.positions(rows, cols)
        np.add.at(self.data, pos.ravel(), np.asarray(block, dtype=float).ravel())

    def get(self, row, col):
        return float(self.data[self.positions([row], [col])[0, 0]])

    def tocsr(self):
        return sp.csr_matrix((self.data.copy(), self.indices, self.indptr), shape=(self.n, self.n))

    def copy(self):
        new = object.__new__(SparseMatrix)
        new.__dict__.update(self.__dict__)
        new.data = self.data.copy()
        return new


def scatter_vector(n, cell_dofs, local):
    """Assemble element vectors ``(cells, k)`` into a global vector of length n."""
    return np.bincount(np.asarray(cell_dofs).ravel(), weights=np.asarray(local).ravel(),
                       minlength=n)


def scatter_add(matrix, rows, cols, local_block):
    matrix.scatter_add(rows, cols, local_block)


def apply_dirichlet(matrix, vector, dofs, values, current=None):
    """Impose ``x[dofs] = values`` on the Newton system ``K dx = vector``.

    Constrained rows become identity rows and the right-hand side is set
    to ``values - current[dofs]`` so the update lands exactly on the data.
    """
    dofs = np.asarray(dofs, dtype=np.int64)
    values = np.asarray(values, dtype=float)
    if not len(dofs):
        return
    mask = np.zeros(matrix.n, dtype=bool)
    mask[dofs] = True
    row_of_entry = matrix.entry_rows
    constrained = mask[row_of_entry]
    matrix.data[constrained] = 0.0
    diag = constrained & (matrix.indices == row_of_entry)
    matrix.data[diag] = 1.0
    cur = 0.0 if current is None else np.asarray(current)[dofs]
    vector[dofs] = values - cur
