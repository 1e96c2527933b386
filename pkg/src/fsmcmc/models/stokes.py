"""Stokes flow on the unit torus with Eulerian or Lagrangian observations.

Velocity fields are expanded in real divergence-free Fourier modes
``sqrt(2) cos/sin(2 pi k.x) e_k`` with ``e_k = (-k2, k1) / |k|`` for integer
wavevectors ``k`` in the upper half plane (the ordering of a torus
:class:`~fsmcmc.function_space.SpectralPrior`).  Each mode decays exactly as
``exp(-nu |2 pi k|^2 t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..function_space import CoefficientState, SpectralPrior
from ..samplers import GaussianMisfit, Target, misfit_target

__all__ = [
    "StokesProblem",
    "StokesModel",
    "stokes_prior",
    "stokes_evolve",
    "eulerian_potential",
    "lagrangian_trace",
    "lagrangian_potential",
    "grid_positions",
    "even_times",
    "periodic_residual",
]


def grid_positions(n_side: int) -> tuple:
    """``n_side**2`` points on an even grid of the torus, cell-centred."""
    x = (np.arange(n_side) + 0.5) / n_side
    return tuple(map(tuple, np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1).reshape(-1, 2)))


def even_times(m: int, final: float = 1.0) -> tuple:
    return tuple(final * (np.arange(m) + 1) / m)


@dataclass(frozen=True, eq=False)
class StokesProblem:
    viscosity: float = 0.1
    mode_cutoff: int = 100
    obs_kind: str = "eulerian"
    obs_times: tuple = even_times(10)
    positions: tuple = grid_positions(3)
    euler_dt: float = 0.01
    noise_sigma: float = 1e-2
    data: np.ndarray | None = None

    def __post_init__(self):
        if not self.viscosity > 0:
            raise ValueError("viscosity must be positive")
        if self.obs_kind not in ("eulerian", "lagrangian"):
            raise ValueError("obs_kind must be 'eulerian' or 'lagrangian'")
        if not self.euler_dt > 0:
            raise ValueError("euler_dt must be positive")
        t = np.asarray(self.obs_times, dtype=float)
        if t.size == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0):
            raise ValueError("observation times must be nonnegative and increasing")
        object.__setattr__(self, "obs_times", tuple(t))
        pts = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "positions", tuple(map(tuple, pts)))
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.data is not None:
            object.__setattr__(self, "data", np.asarray(self.data, dtype=float).reshape(-1))

    @property
    def n_obs(self) -> int:
        return 2 * len(self.positions) * len(self.obs_times)


def stokes_prior(problem: StokesProblem, delta: float = 400.0, alpha: float = 2.0) -> SpectralPrior:
    """``N(0, delta A^-alpha)`` with ``A = nu (-Laplacian)`` on divergence-free fields."""
    return SpectralPrior(alpha=alpha, scale=delta * problem.viscosity ** (-alpha), dims=2,
                         mode_count=problem.mode_cutoff, domain="torus")


def stokes_evolve(modes, wavevectors, nu: float, t: float) -> np.ndarray:
    """Multiply each mode by ``exp(-nu |k|^2 t)``; ``wavevectors`` are physical.

    ``modes`` may be scalar amplitudes ``(n,)`` or vector coefficients ``(n, 2)``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    k = np.asarray(wavevectors, dtype=float).reshape(-1, 2)
    factor = np.exp(-nu * np.sum(k * k, axis=1) * t)
    m = np.asarray(modes, dtype=float)
    return m * (factor if m.ndim == 1 else factor[:, None])


def periodic_residual(y: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Minimum-image difference on the unit torus."""
    d = y - g
    return d - np.round(d)


class StokesModel:
    def __init__(self, problem: StokesProblem, prior: SpectralPrior):
        if prior.dims != 2 or prior.domain != "torus":
            raise ValueError("Stokes model needs a 2-D torus prior")
        self.problem = problem
        self.prior = prior
        kint = prior.wavevectors.astype(float)
        self.kint = kint
        self.kphys = 2.0 * math.pi * kint
        norm = np.linalg.norm(kint, axis=1)
        self.direction = np.stack([-kint[:, 1], kint[:, 0]], axis=1) / norm[:, None]
        self.is_sine = prior.is_sine
        self.positions = np.asarray(problem.positions, dtype=float)

    def amplitudes(self, state: CoefficientState, t: float = 0.0) -> np.ndarray:
        a0 = self.prior.stds * state.masked_z()
        return stokes_evolve(a0, self.kphys, self.problem.viscosity, t)

    def velocity(self, amplitudes: np.ndarray, points) -> np.ndarray:
        """Velocity at ``points`` (shape ``(n, 2)``) for given mode amplitudes."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        arg = 2.0 * math.pi * (pts @ self.kint.T)
        basis = math.sqrt(2.0) * np.where(self.is_sine, np.sin(arg), np.cos(arg))
        return basis @ (amplitudes[:, None] * self.direction)

    def eulerian(self, state: CoefficientState) -> np.ndarray:
        out = [self.velocity(self.amplitudes(state, t), self.positions) for t in self.problem.obs_times]
        return np.stack(out)  # (M, N, 2)

    def trace(self, state: CoefficientState, dt: float | None = None) -> np.ndarray:
        """Forward-Euler tracer positions at the observation times, wrapped to ``[0,1)^2``."""
        dt = self.problem.euler_dt if dt is None else dt
        a0 = self.prior.stds * state.masked_z()
        decay = self.problem.viscosity * np.sum(self.kphys**2, axis=1)
        z = self.positions.copy()
        out = []
        step = 0
        for t_obs in self.problem.obs_times:
            n_target = int(round(t_obs / dt))
            if not math.isclose(n_target * dt, t_obs, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError(f"observation time {t_obs} is not a multiple of dt={dt}")
            while step < n_target:
                amp = a0 * np.exp(-decay * step * dt)
                z = z + dt * self.velocity(amp, z % 1.0)
                step += 1
            out.append(z % 1.0)
        return np.stack(out)  # (M, N, 2)

    def forward(self, state: CoefficientState) -> np.ndarray:
        if self.problem.obs_kind == "eulerian":
            return self.eulerian(state).reshape(-1)
        return self.trace(state).reshape(-1)

    def misfit(self, data=None) -> GaussianMisfit:
        y = self.problem.data if data is None else np.asarray(data, dtype=float)
        if y is None:
            raise ValueError("Stokes problem has no data")
        res = periodic_residual if self.problem.obs_kind == "lagrangian" else None
        return GaussianMisfit(self.forward, y, self.problem.noise_sigma**2, residual_fn=res)

    def potential(self, state: CoefficientState, data=None) -> float:
        r = self.misfit(data).residual(state)
        return 0.5 * float(r @ r) / self.problem.noise_sigma**2

    def target(self, data=None) -> Target:
        return misfit_target(self.prior, self.misfit(data))


@lru_cache(maxsize=8)
def _model(problem: StokesProblem, prior: SpectralPrior) -> StokesModel:
    return StokesModel(problem, prior)


def eulerian_potential(state: CoefficientState, problem: StokesProblem, prior: SpectralPrior) -> float:
    if problem.obs_kind != "eulerian":
        raise ValueError("problem is not Eulerian")
    return _model(problem, prior).potential(state)


def lagrangian_trace(state: CoefficientState, problem: StokesProblem, prior: SpectralPrior) -> np.ndarray:
    if problem.obs_kind != "lagrangian":
        raise ValueError("problem is not Lagrangian")
    return _model(problem, prior).trace(state)


def lagrangian_potential(state: CoefficientState, problem: StokesProblem, prior: SpectralPrior) -> float:
    if problem.obs_kind != "lagrangian":
        raise ValueError("problem is not Lagrangian")
    return _model(problem, prior).potential(state)
