"""Constitutive models: elastic solids and viscous fluids."""

from .elastic import (MODELS, DemirayMaterial, ElasticMaterial, FungMaterial,
                      GuccioneMaterial, HolzapfelOgdenMaterial, IsotropicMaterial,
                      LinearIsoMaterial, NeoHookeMaterial, guccione_coefficients)
from .fluid import NewtonianFluid, newtonian_cauchy
from .kinematics import KinematicState, fluid_kinematics, kinematics

__all__ = [
    "DemirayMaterial", "ElasticMaterial", "FungMaterial", "GuccioneMaterial",
    "HolzapfelOgdenMaterial", "IsotropicMaterial", "KinematicState",
    "LinearIsoMaterial", "MODELS", "NeoHookeMaterial", "NewtonianFluid",
    "fluid_kinematics", "from_config", "guccione_coefficients", "kinematics",
    "linear_iso_stress", "newtonian_cauchy",
]


def linear_iso_stress(eps, mu, la):
    return LinearIsoMaterial(mu, la).stress(eps)


def from_config(material_cfg):
    """Instantiate the model named by a MaterialConfig."""
    p = dict(material_cfg.params)
    inc = material_cfg.incompressible
    name = material_cfg.const_eqn
    if name == "newtonian":
        return NewtonianFluid(p["mu"], material_cfg.density)
    if name == "linear_iso":
        return LinearIsoMaterial(p["mu"], p.get("la", 0.0), incompressible=inc)
    kappa = p.pop("kappa", None)
    if name == "fung":
        return FungMaterial(p["C"], p["coefficients"], kappa=kappa, incompressible=inc)
    return MODELS[name](**p, kappa=kappa, incompressible=inc)
