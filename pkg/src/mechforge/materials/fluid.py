"""Viscous (Eulerian) constitutive models."""

from __future__ import annotations

import numpy as np


def newtonian_cauchy(D, p, mu):
    """sigma = -p I + 2 mu D."""
    D = np.asarray(D, dtype=float)
    dim = D.shape[-1]
    return -np.asarray(p, dtype=float)[..., None, None] * np.eye(dim) + 2.0 * mu * D


class NewtonianFluid:
    name = "newtonian"
    incompressible = True

    def __init__(self, mu, density=0.0):
        if mu <= 0:
            raise ValueError("newtonian: viscosity mu must be > 0")
        if density < 0:
            raise ValueError("newtonian: density must be >= 0")
        self.mu = float(mu)
        self.density = float(density)

    def cauchy(self, L, p):
        L = np.asarray(L, dtype=float)
        D = 0.5 * (L + np.swapaxes(L, -1, -2))
        return newtonian_cauchy(D, p, self.mu)


__all__ = ["NewtonianFluid", "newtonian_cauchy"]
