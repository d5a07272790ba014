"""Per-element or per-vertex unit vector fields (fiber/sheet directions)."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import CountMismatch, FormatError, ZeroVector
from .gmsh import MeshIOError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiberField:
    name: str
    per_element: bool
    vectors: np.ndarray

    def __post_init__(self):
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise ValueError(f"fiber field {self.name!r} is not unit length")

    def per_cell(self, mesh):
        """Cell-wise directions; vertex fields are averaged and renormalized."""
        if self.per_element:
            return self.vectors
        v = self.vectors[mesh.cells].mean(axis=1)
        n = np.linalg.norm(v, axis=1)
        if np.any(n < 1e-12):
            raise ZeroVector(f"fiber field {self.name!r} averages to zero on a cell")
        return v / n[:, None]


def normalize_vectors(vectors, name="fiber"):
    vectors = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(vectors, axis=1)
    zero = np.flatnonzero(norms == 0)
    if len(zero):
        raise ZeroVector(f"{name}: zero vector at entry {int(zero[0])}")
    off = np.abs(norms - 1.0) > 1e-10
    if np.any(off):
        log.warning("%s: %d vectors were not unit length and have been normalized",
                    name, int(off.sum()))
    return vectors / norms[:, None]


def read_fiber_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [l for l in fh.read().splitlines() if l.strip()]
    except OSError as exc:
        raise MeshIOError(f"cannot read fiber file {path}: {exc.strerror or exc}") from None
    if not lines:
        raise FormatError(f"{path}: empty fiber file")
    try:
        count = int(lines[0])
        vectors = np.array([l.split() for l in lines[1:]], dtype=float)
    except ValueError:
        raise FormatError(f"{path}: malformed fiber file") from None
    if len(vectors) != count:
        raise FormatError(f"{path}: header announces {count} vectors, found {len(vectors)}")
    return vectors.reshape(count, -1)


def write_fiber_file(path, vectors):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(vectors)}\n")
            for v in vectors:
                fh.write(" ".join(f"{c:.17g}" for c in v) + "\n")
    except OSError as exc:
        raise MeshIOError(f"cannot write fiber file {path}: {exc.strerror or exc}") from None


def attach_fibers(mesh, files, names, elementwise=True):
    if len(files) != len(names):
        raise CountMismatch(f"{len(files)} fiber files but {len(names)} names")
    expected = mesh.num_cells if elementwise else mesh.num_vertices
    what = "cells" if elementwise else "vertices"
    out = []
    for path, name in zip(files, names):
        vectors = read_fiber_file(path)
        if len(vectors) != expected:
            raise CountMismatch(
                f"{path}: {len(vectors)} vectors for a mesh with {expected} {what}")
        if vectors.shape[1] != mesh.dim:
            raise CountMismatch(f"{path}: vectors have {vectors.shape[1]} components, "
                                f"mesh is {mesh.dim}D")
        out.append(FiberField(name, elementwise, normalize_vectors(vectors, name)))
    return out


def _pad3(v):
    if v.shape[1] == 3:
        return v
    return np.hstack([v, np.zeros((len(v), 3 - v.shape[1]))])


def material_frame(fields, mesh):
    """Orthonormal (f0, s0, n0) per cell from a fiber and a sheet field.

    The sheet direction is Gram-Schmidt orthogonalized against the fiber;
    n0 completes a right-handed frame.  Returns an array ``(cells, 3, 3)``
    whose columns are f0, s0, n0.
    """
    f = _pad3(fields[0].per_cell(mesh))
    s = _pad3(fields[1].per_cell(mesh))
    s = s - np.einsum("ij,ij->i", s, f)[:, None] * f
    ns = np.linalg.norm(s, axis=1)
    if np.any(ns < 1e-8):
        raise ZeroVector("sheet direction parallel to fiber direction")
    s = s / ns[:, None]
    n = np.cross(f, s)
    return np.stack([f, s, n], axis=2)
