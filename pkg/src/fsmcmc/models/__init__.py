"""Forward models and potentials."""

from .darcy import DarcyModel, DarcyProblem, darcy_potential, darcy_solve
from .density import DensityData, DensityModel, density_gradient, density_potential
from .linear import LinearGaussianTarget, linear_gaussian_potential, posterior_oracle
from .stokes import (
    StokesModel,
    StokesProblem,
    eulerian_potential,
    lagrangian_potential,
    lagrangian_trace,
    stokes_evolve,
)
from .twin import TwinData, synthesize_twin_data

__all__ = [
    "DarcyModel",
    "DarcyProblem",
    "darcy_potential",
    "darcy_solve",
    "DensityData",
    "DensityModel",
    "density_gradient",
    "density_potential",
    "LinearGaussianTarget",
    "linear_gaussian_potential",
    "posterior_oracle",
    "StokesModel",
    "StokesProblem",
    "eulerian_potential",
    "lagrangian_potential",
    "lagrangian_trace",
    "stokes_evolve",
    "TwinData",
    "synthesize_twin_data",
]
