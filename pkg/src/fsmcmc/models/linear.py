"""Linear-Gaussian reference target with a closed-form posterior.

Observations ``y_i = h_i lam_i z_i + N(0, sigma^2)`` for the first ``m``
modes; the posterior factorizes per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..function_space import CoefficientState, SpectralPrior
from ..samplers import GaussianMisfit, Target, misfit_target

__all__ = ["LinearGaussianTarget", "linear_gaussian_potential", "posterior_oracle"]


@dataclass(frozen=True, eq=False)
class LinearGaussianTarget:
    weights: np.ndarray
    noise_var: float
    data: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.weights, dtype=float).reshape(-1)
        y = np.asarray(self.data, dtype=float).reshape(-1)
        if h.shape != y.shape:
            raise ValueError("weights and data must have equal length")
        if not self.noise_var > 0:
            raise ValueError("noise_var must be positive")
        object.__setattr__(self, "weights", h)
        object.__setattr__(self, "data", y)

    @property
    def m(self) -> int:
        return self.weights.size

    def forward_fn(self, prior: SpectralPrior):
        if self.m > prior.mode_count:
            raise ValueError("more observed modes than prior modes")
        coef = self.weights * prior.stds[: self.m]

        def forward(state: CoefficientState) -> np.ndarray:
            return coef * state.masked_z()[: self.m]

        return forward

    def misfit(self, prior: SpectralPrior) -> GaussianMisfit:
        return GaussianMisfit(self.forward_fn(prior), self.data, self.noise_var)

    def target(self, prior: SpectralPrior) -> Target:
        return misfit_target(prior, self.misfit(prior))


def linear_gaussian_potential(state: CoefficientState, target: LinearGaussianTarget,
                              prior: SpectralPrior) -> float:
    r = target.data - target.forward_fn(prior)(state)
    return 0.5 * float(r @ r) / target.noise_var


def posterior_oracle(target: LinearGaussianTarget, prior: SpectralPrior):
    """Whitened per-mode posterior ``(mean, variance)`` for the observed modes."""
    c = target.weights * prior.stds[: target.m]
    var = 1.0 / (1.0 + c * c / target.noise_var)
    mean = var * c * target.data / target.noise_var
    return mean, var
