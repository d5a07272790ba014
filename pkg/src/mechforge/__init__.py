"""mechforge: config-driven nonlinear finite elements for solid and fluid mechanics."""

__version__ = "0.1.0"
