"""Gaussian random-field priors in Karhunen-Loeve coordinates.

States are stored in whitened form: ``z[i]`` is a standard normal coordinate
and the field coefficient is ``xi[i] = lam[i] * z[i]`` where ``lam[i]**2`` is
the i-th covariance eigenvalue.  Three bases are supported:

* ``dims=1``: real Fourier basis on ``[-ell, ell]`` ordered
  ``1, cos(pi x/ell), sin(pi x/ell), cos(2 pi x/ell), ...`` with eigenvalues
  ``scale * i**(-2 alpha)``, ``i = 1, 2, ...``.
* ``dims=2, domain="square"``: real Fourier basis on ``[0,1]^2``, a constant
  mode followed by ``cos/sin(2 pi (p x1 + q x2))`` for wavevectors ``(p, q)``
  in the upper half plane; standard deviation ``(p^2+q^2)^(-alpha)`` times
  ``sqrt(scale)`` and 1 for the constant mode.
* ``dims=2, domain="torus"``: the same wavevectors without the constant mode
  and eigenvalues ``scale * (4 pi^2 (p^2+q^2))^(-alpha)``, i.e. the covariance
  ``scale * (-Laplacian)^(-alpha)`` on mean-zero fields.  Used for the
  divergence-free velocity fields of the Stokes model.

Two-dimensional wavevectors are sorted by ``p^2+q^2``, ties broken
lexicographically on ``(p, q)``, cosine before sine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional

import numpy as np

__all__ = [
    "SpectralPrior",
    "CoefficientState",
    "TruncationLaw",
    "SieveLaw",
    "eigenvalues",
    "sample_prior",
    "sample_truncation",
    "synthesize",
    "project",
    "prior_sq_norm",
    "sieve_log_prior",
    "half_plane_wavevectors",
]

DOMAINS_2D = ("square", "torus")


def half_plane_wavevectors(n_pairs: int) -> np.ndarray:
    """Return the first ``n_pairs`` nonzero integer wavevectors of the upper
    half plane (``p > 0`` or ``p == 0, q > 0``) in canonical order."""
    if n_pairs <= 0:
        return np.zeros((0, 2), dtype=int)
    radius = int(math.ceil(math.sqrt(n_pairs))) + 1
    while True:
        ks = [
            (p, q)
            for p in range(0, radius + 1)
            for q in range(-radius, radius + 1)
            if p > 0 or q > 0
        ]
        ks.sort(key=lambda k: (k[0] ** 2 + k[1] ** 2, k[0], k[1]))
        chosen = ks[:n_pairs]
        # completeness: every vector with |k| <= radius is enumerated
        if len(chosen) == n_pairs and chosen[-1][0] ** 2 + chosen[-1][1] ** 2 <= radius**2:
            return np.array(chosen, dtype=int)
        radius *= 2


@dataclass(frozen=True)
class SpectralPrior:
    """Centered Gaussian measure ``N(0, C)`` diagonal in a Fourier basis."""

    alpha: float
    scale: float = 1.0
    dims: int = 1
    mode_count: int = 64
    ell: float = 10.0
    domain: str = "square"

    def __post_init__(self):
        if self.dims not in (1, 2):
            raise ValueError(f"dims must be 1 or 2, got {self.dims}")
        if int(self.mode_count) != self.mode_count or self.mode_count < 1:
            raise ValueError(f"mode_count must be a positive integer, got {self.mode_count}")
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.dims == 1 and not self.ell > 0:
            raise ValueError(f"ell must be positive, got {self.ell}")
        if self.dims == 2 and self.domain not in DOMAINS_2D:
            raise ValueError(f"domain must be one of {DOMAINS_2D}, got {self.domain!r}")
        bound = self.trace_class_bound
        if not self.alpha > bound:
            raise ValueError(
                f"trace-class rule violated: alpha={self.alpha} must exceed {bound} "
                f"for dims={self.dims}"
                + (f", domain={self.domain!r}" if self.dims == 2 else "")
                + " so that the eigenvalues are summable"
            )

    @property
    def trace_class_bound(self) -> float:
        # 1-D: sum i^(-2a) < inf iff a > 1/2.  Square: variance |k|^(-4a) over
        # Z^2 needs a > 1/2.  Torus: variance |k|^(-2a) over Z^2 needs a > 1.
        if self.dims == 2 and self.domain == "torus":
            return 1.0
        return 0.5

    @cached_property
    def wavevectors(self) -> np.ndarray:
        """Integer wavevector per mode, shape ``(mode_count, 2)``; the
        constant mode of the square domain has ``(0, 0)``.  1-D priors use
        the frequency index in column 0."""
        n = self.mode_count
        if self.dims == 1:
            idx = np.arange(n)
            return np.stack([(idx + 1) // 2, np.zeros(n, dtype=int)], axis=1)
        offset = 1 if self.domain == "square" else 0
        pairs = half_plane_wavevectors((n - offset + 1) // 2)
        ks = np.repeat(pairs, 2, axis=0)
        if offset:
            ks = np.vstack([np.zeros((1, 2), dtype=int), ks])
        return ks[:n]

    @cached_property
    def is_sine(self) -> np.ndarray:
        """Boolean mask marking sine modes (the rest are cosine/constant)."""
        n = self.mode_count
        if self.dims == 1:
            idx = np.arange(n)
            return (idx > 0) & (idx % 2 == 0)
        offset = 1 if self.domain == "square" else 0
        idx = np.arange(n) - offset
        return (idx >= 0) & (idx % 2 == 1)

    @cached_property
    def variances(self) -> np.ndarray:
        n = self.mode_count
        if self.dims == 1:
            i = np.arange(1, n + 1, dtype=float)
            return self.scale * i ** (-2.0 * self.alpha)
        k2 = np.sum(self.wavevectors.astype(float) ** 2, axis=1)
        if self.domain == "square":
            out = np.ones(n)
            nz = k2 > 0
            out[nz] = k2[nz] ** (-2.0 * self.alpha)
            return self.scale * out
        return self.scale * (4.0 * math.pi**2 * k2) ** (-self.alpha)

    @cached_property
    def stds(self) -> np.ndarray:
        return np.sqrt(self.variances)

    def contains(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.dims == 1:
            return (pts >= -self.ell) & (pts <= self.ell)
        pts = pts.reshape(-1, 2)
        return np.all((pts >= 0.0) & (pts <= 1.0), axis=1)

    def basis(self, points) -> np.ndarray:
        """Orthonormal basis functions evaluated at ``points``.

        Returns an array of shape ``(n_points, mode_count)``.  1-D points are a
        flat vector; 2-D points have shape ``(n, 2)``.
        """
        pts = np.asarray(points, dtype=float)
        if self.dims == 1:
            pts = pts.reshape(-1)
            if not np.all(self.contains(pts)):
                raise ValueError(f"points outside [-{self.ell}, {self.ell}]")
            freq = self.wavevectors[:, 0]
            arg = np.pi * np.outer(pts, freq) / self.ell
            out = np.where(self.is_sine, np.sin(arg), np.cos(arg)) / math.sqrt(self.ell)
            out[:, 0] = 1.0 / math.sqrt(2.0 * self.ell)
            return out
        pts = pts.reshape(-1, 2)
        if not np.all(self.contains(pts)):
            raise ValueError("points outside the unit square")
        arg = 2.0 * np.pi * (pts @ self.wavevectors.T.astype(float))
        out = math.sqrt(2.0) * np.where(self.is_sine, np.sin(arg), np.cos(arg))
        if self.domain == "square":
            out[:, 0] = 1.0
        return out


@dataclass(frozen=True, eq=False)
class CoefficientState:
    """Whitened KL coefficients plus an optional truncation level or switch vector."""

    z: np.ndarray
    trunc: Optional[int] = None
    switches: Optional[np.ndarray] = None

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float).reshape(-1)
        object.__setattr__(self, "z", z)
        if self.trunc is not None and self.switches is not None:
            raise ValueError("a state carries at most one of trunc/switches")
        if self.trunc is not None:
            if not 1 <= int(self.trunc) <= z.size:
                raise ValueError(f"trunc must lie in [1, {z.size}], got {self.trunc}")
            object.__setattr__(self, "trunc", int(self.trunc))
        if self.switches is not None:
            s = np.asarray(self.switches)
            if s.shape != z.shape or not ((s == 0) | (s == 1)).all():
                raise ValueError("switches must be a 0/1 vector matching z")
            object.__setattr__(self, "switches", s.astype(np.int8, copy=False))

    @property
    def size(self) -> int:
        return self.z.size

    def active(self) -> np.ndarray:
        """Boolean mask of modes that contribute to the field."""
        if self.trunc is not None:
            m = np.zeros(self.z.size, dtype=bool)
            m[: self.trunc] = True
            return m
        if self.switches is not None:
            return self.switches.astype(bool)
        return np.ones(self.z.size, dtype=bool)

    def masked_z(self) -> np.ndarray:
        if self.trunc is None and self.switches is None:
            return self.z
        if self.switches is not None:
            return self.z * self.switches
        return np.where(self.active(), self.z, 0.0)

    def with_z(self, z) -> "CoefficientState":
        return replace(self, z=np.asarray(z, dtype=float))

    def check(self, prior: SpectralPrior) -> None:
        if self.z.size != prior.mode_count:
            raise ValueError(f"state has {self.z.size} modes, prior has {prior.mode_count}")


@dataclass(frozen=True)
class TruncationLaw:
    """``p(i) ∝ exp(-rate * i)`` on ``1..mode_count``."""

    rate: float
    mode_count: int

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if self.mode_count < 1:
            raise ValueError("mode_count must be >= 1")

    def log_pmf_unnormalized(self, i) -> np.ndarray:
        return -self.rate * np.asarray(i, dtype=float)

    @cached_property
    def pmf(self) -> np.ndarray:
        logp = self.log_pmf_unnormalized(np.arange(1, self.mode_count + 1))
        logp -= logp.max()
        p = np.exp(logp)
        return p / p.sum()

    def mean(self) -> float:
        # closed form for a geometric law truncated to 1..N
        r = math.exp(-self.rate)
        n = self.mode_count
        if r == 0.0:
            return 1.0
        return 1.0 / (1.0 - r) - n * r**n / (1.0 - r**n)


@dataclass(frozen=True)
class SieveLaw:
    """Sieve switch prior: density ``exp(-rate * sum(chi))`` against fair coins."""

    rate: float = 0.0

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"rate must be nonnegative, got {self.rate}")


def eigenvalues(prior: SpectralPrior, n: int) -> np.ndarray:
    """First ``n`` covariance eigenvalues ``lam_i**2`` in canonical order."""
    if not 1 <= n <= prior.mode_count:
        raise ValueError(f"n must lie in [1, {prior.mode_count}], got {n}")
    return prior.variances[:n].copy()


def sample_prior(prior: SpectralPrior, rng: np.random.Generator) -> CoefficientState:
    return CoefficientState(rng.standard_normal(prior.mode_count))


def sample_truncation(law: TruncationLaw, rng: np.random.Generator) -> int:
    return int(rng.choice(law.mode_count, p=law.pmf)) + 1


def synthesize(prior: SpectralPrior, state: CoefficientState, grid) -> np.ndarray:
    """Evaluate ``u(x) = sum_active lam_i z_i phi_i(x)`` on ``grid``."""
    state.check(prior)
    return prior.basis(grid) @ (prior.stds * state.masked_z())


def project(state: CoefficientState, d: int) -> CoefficientState:
    """Zero every coefficient above mode ``d`` (1-based)."""
    if not 1 <= d <= state.size:
        raise ValueError(f"d must lie in [1, {state.size}], got {d}")
    z = state.z.copy()
    z[d:] = 0.0
    return state.with_z(z)


def prior_sq_norm(state: CoefficientState) -> float:
    """Half the squared Cameron-Martin norm, ``0.5 * sum_active z_i**2``."""
    zm = state.masked_z()
    return 0.5 * float(zm @ zm)


def sieve_log_prior(switches, law: SieveLaw) -> float:
    s = np.asarray(switches)
    if not np.all((s == 0) | (s == 1)):
        raise ValueError("switches must be 0/1")
    return -law.rate * float(s.sum())
