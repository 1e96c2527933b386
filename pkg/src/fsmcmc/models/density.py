"""Nonparametric density estimation with a log-density Gaussian prior.

The density is ``rho(x) = exp(u(x)) / Z(u)`` on ``[-ell, ell]`` and the
potential is ``Phi(u) = -sum_j log rho(y_j)``.  ``u`` lives on a uniform
quadrature grid; ``Z`` uses the composite trapezoid rule and ``u(y_j)`` linear
interpolation, so :meth:`DensityModel.gradient` is the exact gradient of the
discrete potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..function_space import CoefficientState, SpectralPrior
from ..samplers import Target

__all__ = [
    "DensityData",
    "DensityModel",
    "density_potential",
    "density_gradient",
    "true_density",
    "sample_observations",
]


@dataclass(frozen=True, eq=False)
class DensityData:
    observations: np.ndarray
    ell: float = 10.0
    quad_points: int = 2**10 + 1

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float).reshape(-1)
        object.__setattr__(self, "observations", obs)
        if not self.ell > 0:
            raise ValueError("ell must be positive")
        if self.quad_points < 2:
            raise ValueError("quad_points must be >= 2")
        if np.any(np.abs(obs) > self.ell):
            raise ValueError(f"observation outside [-{self.ell}, {self.ell}]")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(-self.ell, self.ell, self.quad_points)

    @property
    def weights(self) -> np.ndarray:
        h = 2.0 * self.ell / (self.quad_points - 1)
        w = np.full(self.quad_points, h)
        w[0] = w[-1] = 0.5 * h
        return w


def _interp_matrix(grid: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Dense matrix ``W`` with ``W @ f(grid) = linear interpolant at points``."""
    h = grid[1] - grid[0]
    pos = (points - grid[0]) / h
    left = np.clip(np.floor(pos).astype(int), 0, grid.size - 2)
    frac = pos - left
    w = np.zeros((points.size, grid.size))
    rows = np.arange(points.size)
    w[rows, left] = 1.0 - frac
    w[rows, left + 1] += frac
    return w


class DensityModel:
    """Precomputed basis matrices for one (data, prior) pair."""

    def __init__(self, data: DensityData, prior: SpectralPrior):
        if prior.dims != 1:
            raise ValueError("density estimation needs a 1-D prior")
        if not math.isclose(prior.ell, data.ell):
            raise ValueError("prior and data disagree on ell")
        self.data = data
        self.prior = prior
        grid = data.grid
        self.log_w = np.log(data.weights)
        # columns scaled by lam_i so that u = basis @ z
        self.grid_basis = prior.basis(grid) * prior.stds
        self.obs_basis = _interp_matrix(grid, data.observations) @ self.grid_basis
        self.obs_sum = self.obs_basis.sum(axis=0)
        self.n_obs = data.observations.size
        self._rows = {}

    def field(self, state: CoefficientState) -> np.ndarray:
        return self.grid_basis @ state.masked_z()

    def log_normalizer(self, u_grid: np.ndarray) -> float:
        a = u_grid + self.log_w
        top = a.max()
        return float(top + np.log(np.exp(a - top).sum()))

    def potential(self, state: CoefficientState) -> float:
        z = state.masked_z()
        u = self.grid_basis @ z
        return self.n_obs * self.log_normalizer(u) - float(self.obs_sum @ z)

    def gradient(self, state: CoefficientState) -> np.ndarray:
        """dPhi/dz: ``lam_i [n_obs <phi_i>_rho - sum_j phi_i(y_j)]`` on active modes."""
        z = state.masked_z()
        u = self.grid_basis @ z
        a = u + self.log_w
        p = np.exp(a - a.max())
        p /= p.sum()
        g = self.n_obs * (p @ self.grid_basis) - self.obs_sum
        return np.where(state.active(), g, 0.0)

    def point_value(self, state: CoefficientState, x: float) -> float:
        row = self._rows.get(x)
        if row is None:
            row = self._rows[x] = self.prior.basis([x])[0] * self.prior.stds
        return float(row @ state.masked_z())

    def target(self) -> Target:
        return Target(prior=self.prior, potential=self.potential, gradient=self.gradient)


@lru_cache(maxsize=16)
def _model(data: DensityData, prior: SpectralPrior) -> DensityModel:
    return DensityModel(data, prior)


def density_potential(state: CoefficientState, data: DensityData, prior: SpectralPrior) -> float:
    return _model(data, prior).potential(state)


def density_gradient(state: CoefficientState, data: DensityData, prior: SpectralPrior) -> np.ndarray:
    return _model(data, prior).gradient(state)


def true_density(name: str, x, ell: float = 10.0) -> np.ndarray:
    """Unnormalized test densities: ``rho1`` (two unit Gaussians at -3, 3)
    and ``rho2`` (``exp(sin(15 pi x / ell))``), zero outside ``(-ell, ell)``."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= ell
    if name == "rho1":
        val = np.exp(-0.5 * (x + 3.0) ** 2) + np.exp(-0.5 * (x - 3.0) ** 2)
    elif name == "rho2":
        val = np.exp(np.sin(15.0 * np.pi * x / ell))
    else:
        raise ValueError(f"unknown density {name!r}; expected 'rho1' or 'rho2'")
    return np.where(inside, val, 0.0)


def sample_observations(name: str, n: int, rng, ell: float = 10.0, quad_points: int = 2**10 + 1) -> np.ndarray:
    """Inverse-CDF draws from a test density, CDF built by the trapezoid rule."""
    grid = np.linspace(-ell, ell, quad_points)
    f = true_density(name, grid, ell)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(grid))])
    cdf /= cdf[-1]
    return np.interp(rng.random(n), cdf, grid)
