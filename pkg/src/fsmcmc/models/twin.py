"""Identical-twin data: the inference forward model plus Gaussian noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..function_space import CoefficientState

__all__ = ["TwinData", "synthesize_twin_data"]


@dataclass(frozen=True, eq=False)
class TwinData:
    observations: np.ndarray
    clean: np.ndarray
    truth: CoefficientState
    noise_sigma: float
    seed: Optional[int] = None


def synthesize_twin_data(truth: CoefficientState, forward: Callable[[CoefficientState], np.ndarray],
                         noise_sigma: float, rng: np.random.Generator | int) -> TwinData:
    """Run ``forward`` at ``truth`` and add ``N(0, noise_sigma^2)`` per observation.

    An integer ``rng`` is treated as a seed and recorded.
    """
    seed = None
    if not isinstance(rng, np.random.Generator):
        seed = int(rng)
        rng = np.random.default_rng(seed)
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be nonnegative")
    clean = np.asarray(forward(truth), dtype=float).reshape(-1)
    noisy = clean + noise_sigma * rng.standard_normal(clean.size) if noise_sigma > 0 else clean.copy()
    return TwinData(noisy, clean, truth, noise_sigma, seed)
