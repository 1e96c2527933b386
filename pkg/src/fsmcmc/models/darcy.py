"""Groundwater flow: ``-div(exp(u) grad p) = g`` on the unit square, ``p = h`` on the boundary.

Nodes sit at ``(i/J, j/J)``.  The log-permeability is supplied on the
half-step grid ``(a/(2J), b/(2J))``, shape ``(2J+1, 2J+1)``, so that every
cell-face midpoint of the 5-point stencil is a grid point and the face
permeability is ``exp(u)`` evaluated there.  Arrays are indexed ``[x1, x2]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import solveh_banded

from ..function_space import CoefficientState, SpectralPrior
from ..samplers import GaussianMisfit, Target, misfit_target

__all__ = [
    "DarcyProblem",
    "DarcyModel",
    "darcy_solve",
    "darcy_potential",
    "bilinear",
    "DEFAULT_POINTS",
]

DEFAULT_POINTS = ((0.5, 0.5), (0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75))


@dataclass(frozen=True, eq=False)
class DarcyProblem:
    grid_size: int = 32
    source: float = 1.0
    boundary: float = 0.0
    measurement_points: tuple = DEFAULT_POINTS
    noise_sigma: float = 0.01
    data: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.grid_size < 4:
            raise ValueError("grid_size must be >= 4")
        pts = np.asarray(self.measurement_points, dtype=float).reshape(-1, 2)
        if np.any(pts <= 0.0) or np.any(pts >= 1.0):
            raise ValueError("measurement points must lie strictly inside the unit square")
        object.__setattr__(self, "measurement_points", tuple(map(tuple, pts)))
        if not self.noise_sigma > 0:
            raise ValueError("noise_sigma must be positive")
        if self.data is not None:
            d = np.asarray(self.data, dtype=float).reshape(-1)
            if d.size != pts.shape[0]:
                raise ValueError("one datum per measurement point required")
            object.__setattr__(self, "data", d)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.grid_size + 1)

    @property
    def half_nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, 2 * self.grid_size + 1)


def darcy_solve(log_perm_half: np.ndarray, problem: DarcyProblem, source=None) -> np.ndarray:
    """Head on the ``(J+1, J+1)`` node grid.

    ``source`` overrides ``problem.source`` with a scalar or node array.
    The symmetric positive definite system is solved by banded Cholesky.
    """
    J = problem.grid_size
    u = np.asarray(log_perm_half, dtype=float)
    if u.shape != (2 * J + 1, 2 * J + 1):
        raise ValueError(f"log-permeability must have shape {(2 * J + 1, 2 * J + 1)}")
    if not np.all(np.isfinite(u)):
        raise ValueError("log-permeability must be finite")
    h = 1.0 / J
    n = J - 1
    hb = float(problem.boundary)
    g = problem.source if source is None else source
    g = np.broadcast_to(np.asarray(g, dtype=float), (J + 1, J + 1))

    # faces: kx[i, j] between nodes (i, j) and (i+1, j); ky[i, j] between (i, j) and (i, j+1)
    kx = np.exp(u[1::2, 0::2]) / h**2  # (J, J+1)
    ky = np.exp(u[0::2, 1::2]) / h**2  # (J+1, J)
    ii = slice(1, J)
    k_w = kx[0 : J - 1, ii]
    k_e = kx[1:J, ii]
    k_s = ky[ii, 0 : J - 1]
    k_n = ky[ii, 1:J]
    diag = k_w + k_e + k_s + k_n  # (n, n) indexed [i-1, j-1]

    rhs = g[ii, ii].copy()
    rhs[0, :] += k_w[0, :] * hb
    rhs[-1, :] += k_e[-1, :] * hb
    rhs[:, 0] += k_s[:, 0] * hb
    rhs[:, -1] += k_n[:, -1] * hb

    # unknown index m = (i-1) + (j-1) n, x1 fastest; upper banded storage
    ab = np.zeros((n + 1, n * n))
    ab[n] = diag.T.reshape(-1)
    off1 = -k_w.copy()
    off1[0, :] = 0.0  # no west neighbour inside the grid
    ab[n - 1] = off1.T.reshape(-1)
    offn = -k_s.copy()
    ab[0] = offn.T.reshape(-1)
    ab[0, :n] = 0.0  # first row of unknowns has no south neighbour inside
    try:
        sol = solveh_banded(ab, rhs.T.reshape(-1), lower=False, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"Darcy system is singular: {exc}") from exc
    p = np.full((J + 1, J + 1), hb)
    p[ii, ii] = sol.reshape(n, n).T
    return p


def bilinear(values: np.ndarray, points) -> np.ndarray:
    """Bilinear interpolation of node values on a uniform grid of ``[0,1]^2``."""
    J = values.shape[0] - 1
    pts = np.asarray(points, dtype=float).reshape(-1, 2) * J
    i = np.clip(np.floor(pts[:, 0]).astype(int), 0, J - 1)
    j = np.clip(np.floor(pts[:, 1]).astype(int), 0, J - 1)
    fx = pts[:, 0] - i
    fy = pts[:, 1] - j
    return ((1 - fx) * (1 - fy) * values[i, j] + fx * (1 - fy) * values[i + 1, j]
            + (1 - fx) * fy * values[i, j + 1] + fx * fy * values[i + 1, j + 1])


class DarcyModel:
    """Forward map ``u -> p(x_j)`` for a 2-D square-domain prior."""

    def __init__(self, problem: DarcyProblem, prior: SpectralPrior):
        if prior.dims != 2 or prior.domain != "square":
            raise ValueError("Darcy model needs a 2-D prior on the square domain")
        self.problem = problem
        self.prior = prior
        x = problem.half_nodes
        pts = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1).reshape(-1, 2)
        self.half_basis = prior.basis(pts) * prior.stds
        self.shape = (x.size, x.size)

    def log_permeability(self, state: CoefficientState) -> np.ndarray:
        return (self.half_basis @ state.masked_z()).reshape(self.shape)

    def head(self, state: CoefficientState) -> np.ndarray:
        return darcy_solve(self.log_permeability(state), self.problem)

    def forward(self, state: CoefficientState) -> np.ndarray:
        return bilinear(self.head(state), self.problem.measurement_points)

    def misfit(self, data=None) -> GaussianMisfit:
        y = self.problem.data if data is None else np.asarray(data, dtype=float)
        if y is None:
            raise ValueError("Darcy problem has no data")
        return GaussianMisfit(self.forward, y, self.problem.noise_sigma**2)

    def potential(self, state: CoefficientState, data=None) -> float:
        r = self.misfit(data).residual(state)
        return 0.5 * float(r @ r) / self.problem.noise_sigma**2

    def target(self, data=None) -> Target:
        return misfit_target(self.prior, self.misfit(data))

    def kappa_at(self, state: CoefficientState, point) -> float:
        return float(np.exp(self.prior.basis([point])[0] @ (self.prior.stds * state.masked_z())))


@lru_cache(maxsize=8)
def _model(problem: DarcyProblem, prior: SpectralPrior) -> DarcyModel:
    return DarcyModel(problem, prior)


def darcy_potential(state: CoefficientState, problem: DarcyProblem, prior: SpectralPrior) -> float:
    """``|y - G(u)|^2 / (2 sigma^2)`` with ``y = problem.data``."""
    return _model(problem, prior).potential(state)
