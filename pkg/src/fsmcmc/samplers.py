"""Proposal kernels, Metropolis-Hastings rules and Gibbs compositions.

All kernels act on whitened coefficients ``z`` (see :mod:`fsmcmc.function_space`).
Every Crank-Nicolson-type proposal is then a per-mode affine map
``z_v = A * z_u + B * g`` with ``g`` standard normal, and gradients are taken
with respect to ``z`` as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .function_space import (
    CoefficientState,
    SieveLaw,
    SpectralPrior,
    TruncationLaw,
)

__all__ = [
    "KINDS",
    "RandomStep",
    "ProposalConfig",
    "GaussianMisfit",
    "Target",
    "ChainState",
    "PrecisionHyperprior",
    "beta_from_delta",
    "delta_from_beta",
    "theta_cn_coefficients",
    "propose_pcn",
    "propose_theta_cn",
    "propose_rw",
    "propose_langevin",
    "propose",
    "accept_log_ratio",
    "mh_step",
    "init_chain",
    "fd_gradient",
    "default_partition",
    "mwg_update",
    "mwg_sweep",
    "rtm_step",
    "truncation_move",
    "sieve_step",
    "sieve_switch_move",
    "sample_precision",
    "marginal_potential",
    "misfit_target",
    "precision_gibbs_step",
    "random_delta_wrap",
]

KINDS = ("RW-I", "RW-C", "THETA-CN", "PCN", "CNL", "PCNL", "INDEP")
PRECONDS = ("identity", "covariance")


def beta_from_delta(delta: float) -> float:
    """pCN correlation parameter, ``beta**2 = 8 delta / (2 + delta)**2``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return math.sqrt(8.0 * delta) / (2.0 + delta)


def delta_from_beta(beta: float) -> float:
    """Inverse of :func:`beta_from_delta` on the branch ``delta in [0, 2]``."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if beta == 0.0:
        return 0.0
    b2 = beta * beta
    c = 8.0 - 4.0 * b2
    disc = max(c * c - 16.0 * b2 * b2, 0.0)
    # smaller root written to avoid cancellation
    return 8.0 * b2 / (c + math.sqrt(disc))


@dataclass(frozen=True)
class RandomStep:
    """Uniform law on ``[low, high]`` for the step parameter ``param``."""

    low: float
    high: float
    param: str = "beta"

    def __post_init__(self):
        if self.param not in ("beta", "delta"):
            raise ValueError("param must be 'beta' or 'delta'")
        if not 0.0 <= self.low <= self.high:
            raise ValueError("need 0 <= low <= high")
        if self.param == "beta" and self.high > 1.0:
            raise ValueError("beta interval must lie inside [0, 1]")

    def draw(self, rng: np.random.Generator) -> float:
        if self.low == self.high:
            return self.low
        return float(rng.uniform(self.low, self.high))


@dataclass(frozen=True)
class ProposalConfig:
    kind: str
    delta: Optional[float] = None
    beta: Optional[float] = None
    theta: float = 0.5
    precond: str = "identity"
    random_delta: Optional[RandomStep] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown proposal kind {self.kind!r}; expected one of {KINDS}")
        if self.precond not in PRECONDS:
            raise ValueError(f"precond must be one of {PRECONDS}")
        if self.kind == "RW-I":
            object.__setattr__(self, "precond", "identity")
        elif self.kind == "RW-C":
            object.__setattr__(self, "precond", "covariance")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if self.beta is not None and not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.delta is not None and self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.kind == "INDEP":
            if self.beta not in (None, 1.0) or self.delta not in (None, 2.0):
                raise ValueError("INDEP is pCN with beta=1 (delta=2)")
            object.__setattr__(self, "beta", 1.0)
            object.__setattr__(self, "delta", 2.0)
        if self.beta is not None and self.delta is not None:
            if not math.isclose(beta_from_delta(self.delta), self.beta, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError("beta and delta are inconsistent: need beta^2 = 8 delta/(2+delta)^2")
        if self.kind == "PCN" and self.beta is None and self.delta is not None:
            if self.delta > 2.0:
                raise ValueError("pCN in beta form needs delta <= 2")
            object.__setattr__(self, "beta", beta_from_delta(self.delta))
        if self.kind == "PCN" and self.delta is None and self.beta is not None:
            object.__setattr__(self, "delta", delta_from_beta(self.beta))
        if self.delta is None and self.beta is None and self.random_delta is None:
            raise ValueError(f"{self.kind} needs delta or beta")
        if self.kind != "PCN" and self.delta is None and self.beta is not None:
            raise ValueError(f"{self.kind} is parameterized by delta")

    @property
    def step(self) -> float:
        """The scalar a tuner adapts: beta for pCN, delta otherwise."""
        return self.beta if self.kind in ("PCN", "INDEP") else self.delta

    def with_step(self, value: float) -> "ProposalConfig":
        if self.kind in ("PCN", "INDEP"):
            return replace(self, beta=value, delta=None)
        return replace(self, delta=value, beta=None)


@dataclass(frozen=True)
class GaussianMisfit:
    """Gaussian likelihood ``y = G(u) + N(0, noise_var I)``.

    ``residual`` may be overridden for observation spaces that are not
    Euclidean (tracer positions on a torus).
    """

    forward: Callable[[CoefficientState], np.ndarray]
    data: np.ndarray
    noise_var: float = 1.0
    residual_fn: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def residual(self, state: CoefficientState) -> np.ndarray:
        g = np.asarray(self.forward(state), dtype=float).reshape(-1)
        y = np.asarray(self.data, dtype=float).reshape(-1)
        if self.residual_fn is not None:
            return self.residual_fn(y, g)
        return y - g

    @property
    def n_obs(self) -> int:
        return int(np.asarray(self.data).size)


@dataclass
class Target:
    """Posterior ``dmu/dmu0 ∝ exp(-potential)`` over states of ``prior``."""

    prior: SpectralPrior
    potential: Callable[[CoefficientState], float]
    gradient: Optional[Callable[[CoefficientState], np.ndarray]] = None
    misfit: Optional[GaussianMisfit] = None

    def phi(self, state: CoefficientState) -> float:
        value = float(self.potential(state))
        if not math.isfinite(value):
            raise FloatingPointError(f"non-finite potential {value}")
        return value

    def grad(self, state: CoefficientState) -> np.ndarray:
        if self.gradient is not None:
            return np.asarray(self.gradient(state), dtype=float)
        return fd_gradient(self, state)


@dataclass(frozen=True)
class ChainState:
    state: CoefficientState
    phi: float
    step_index: int = 0
    accepted_last: bool = False
    grad: Optional[np.ndarray] = None
    aux_accepted: Optional[bool] = None


@dataclass(frozen=True)
class PrecisionHyperprior:
    """Gamma(shape, rate) prior on the noise precision ``tau = sigma**-2``."""

    alpha_sigma: float = 1e-4
    beta_sigma: float = 1e-4

    def __post_init__(self):
        if not (self.alpha_sigma > 0 and self.beta_sigma > 0):
            raise ValueError("Gamma hyperparameters must be strictly positive")


def fd_gradient(target: Target, state: CoefficientState, h: float = 1e-5) -> np.ndarray:
    """Central differences of the potential over the active modes."""
    grad = np.zeros(state.size)
    for i in np.flatnonzero(state.active()):
        zp = state.z.copy()
        zm = state.z.copy()
        zp[i] += h
        zm[i] -= h
        grad[i] = (target.phi(state.with_z(zp)) - target.phi(state.with_z(zm))) / (2 * h)
    return grad


def _mask(state: CoefficientState, mask) -> np.ndarray:
    return state.active() if mask is None else np.asarray(mask, dtype=bool)


def _affine_move(u: CoefficientState, a, b, rng, mask) -> CoefficientState:
    m = _mask(u, mask)
    z = u.z.copy()
    noise = rng.standard_normal(int(m.sum()))
    a_m = a[m] if np.ndim(a) else a
    b_m = b[m] if np.ndim(b) else b
    z[m] = a_m * z[m] + b_m * noise
    return u.with_z(z)


def propose_pcn(u: CoefficientState, beta: float, rng, mask=None) -> CoefficientState:
    """``z_v = sqrt(1 - beta^2) z_u + beta g`` on the masked modes (default: active)."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    return _affine_move(u, math.sqrt(1.0 - beta * beta), beta, rng, mask)


def theta_cn_coefficients(variances, delta: float, theta: float, precond: str):
    """Per-mode ``(A, B)`` with ``z_v = A z_u + B g`` for the theta-scheme.

    Solves ``(I + delta theta K L) v = (I - delta (1-theta) K L) u + sqrt(2 delta K) xi``
    in whitened coordinates; ``K = I`` or ``K = C``.
    """
    lam2 = np.asarray(variances, dtype=float)
    if precond == "covariance":
        kl = np.ones_like(lam2)
        noise = math.sqrt(2.0 * delta) * np.ones_like(lam2)
    elif precond == "identity":
        with np.errstate(divide="ignore", over="ignore"):
            kl = 1.0 / lam2
            noise = math.sqrt(2.0 * delta) / np.sqrt(lam2)
    else:
        raise ValueError(f"precond must be one of {PRECONDS}")
    with np.errstate(over="ignore", invalid="ignore"):
        denom = 1.0 + delta * theta * kl
        a = (1.0 - delta * (1.0 - theta) * kl) / denom
        b = noise / denom
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise FloatingPointError(
            "degenerate theta-scheme denominator: delta*theta/lambda^2 overflows; "
            "use precond='covariance' or fewer modes"
        )
    return a, b


def propose_theta_cn(u, delta, theta, precond, prior: SpectralPrior, rng, mask=None):
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    a, b = theta_cn_coefficients(prior.variances, delta, theta, precond)
    return _affine_move(u, a, b, rng, mask)


def rw_increment(variances, delta: float, precond: str) -> np.ndarray:
    lam2 = np.asarray(variances, dtype=float)
    if precond == "covariance":
        return math.sqrt(2.0 * delta) * np.ones_like(lam2)
    return math.sqrt(2.0 * delta) / np.sqrt(lam2)


def propose_rw(u, delta, precond, prior: SpectralPrior, rng, mask=None):
    """Standard random walk ``v = u + sqrt(2 delta K) xi``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return _affine_move(u, 1.0, rw_increment(prior.variances, delta, precond), rng, mask)


def _langevin_coefficients(variances, delta, variant):
    lam2 = np.asarray(variances, dtype=float)
    if variant == "PCNL":
        denom = 2.0 + delta
        a = (2.0 - delta) / denom * np.ones_like(lam2)
        drift = -2.0 * delta / denom * np.ones_like(lam2)
        b = math.sqrt(8.0 * delta) / denom * np.ones_like(lam2)
    elif variant == "CNL":
        denom = 2.0 * lam2 + delta
        a = (2.0 * lam2 - delta) / denom
        drift = -2.0 * delta / denom
        b = math.sqrt(8.0 * delta) * np.sqrt(lam2) / denom
    else:
        raise ValueError("variant must be 'CNL' or 'PCNL'")
    return a, drift, b


def propose_langevin(u, delta, variant, grad, prior: SpectralPrior, rng, mask=None):
    """Crank-Nicolson Langevin proposals; ``grad`` is dPhi/dz at ``u``."""
    if grad is None:
        raise ValueError("Langevin proposals need the potential gradient")
    grad = np.asarray(grad, dtype=float)
    if not np.all(np.isfinite(grad)):
        raise FloatingPointError("non-finite gradient")
    a, drift, b = _langevin_coefficients(prior.variances, delta, variant)
    m = _mask(u, mask)
    z = u.z.copy()
    noise = rng.standard_normal(int(m.sum()))
    z[m] = a[m] * z[m] + drift[m] * grad[m] + b[m] * noise
    return u.with_z(z)


def _effective(config: ProposalConfig, rng) -> ProposalConfig:
    return random_delta_wrap(config, rng) if config.random_delta is not None else config


def propose(u: CoefficientState, config: ProposalConfig, prior: SpectralPrior, rng, grad=None, mask=None):
    """Dispatch on ``config.kind``; ``config`` must carry a fixed step."""
    kind = config.kind
    if kind in ("PCN", "INDEP"):
        return propose_pcn(u, config.beta, rng, mask)
    if kind in ("RW-I", "RW-C"):
        return propose_rw(u, config.delta, config.precond, prior, rng, mask)
    if kind == "THETA-CN":
        return propose_theta_cn(u, config.delta, config.theta, config.precond, prior, rng, mask)
    return propose_langevin(u, config.delta, kind, grad, prior, rng, mask)


def _rho_langevin(zu, zv, g, lam2, delta, phi_u, variant):
    # paper's rho(u, v) written in whitened coordinates: <a, b>_X = sum xi_a xi_b
    # with xi = lam z and DPhi in xi-coordinates equal to g / lam
    diff = float((zv - zu) @ g)
    if variant == "CNL":
        return (phi_u + 0.5 * diff + 0.25 * delta * float(((zu + zv) * g) @ (1.0 / lam2))
                + 0.25 * delta * float((g * g) @ (1.0 / lam2)))
    return phi_u + 0.5 * diff + 0.25 * delta * float((zu + zv) @ g) + 0.25 * delta * float(g @ g)


def accept_log_ratio(config: ProposalConfig, u: CoefficientState, v: CoefficientState,
                     phi_u: float, phi_v: float, prior: SpectralPrior,
                     grad_u=None, grad_v=None, mask=None) -> float:
    """Log Metropolis-Hastings ratio for a move ``u -> v`` under ``config``."""
    if not (math.isfinite(phi_u) and math.isfinite(phi_v)):
        raise FloatingPointError("non-finite potential in acceptance ratio")
    kind = config.kind
    if kind in ("PCN", "INDEP"):
        return phi_u - phi_v
    if kind == "THETA-CN" and config.theta == 0.5:
        return phi_u - phi_v
    m = _mask(u, mask)
    zu, zv = u.z[m], v.z[m]
    lam2 = prior.variances[m]
    if kind in ("RW-I", "RW-C"):
        return phi_u - phi_v + 0.5 * float(zu @ zu) - 0.5 * float(zv @ zv)
    if kind == "THETA-CN":
        return phi_u - phi_v + theta_cn_log_correction(zu, zv, lam2, config.delta, config.theta, config.precond)
    if grad_u is None or grad_v is None:
        raise ValueError("Langevin acceptance needs gradients at both states")
    gu, gv = np.asarray(grad_u)[m], np.asarray(grad_v)[m]
    return (_rho_langevin(zu, zv, gu, lam2, config.delta, phi_u, kind)
            - _rho_langevin(zv, zu, gv, lam2, config.delta, phi_v, kind))


def theta_cn_log_correction(zu, zv, lam2, delta, theta, precond) -> float:
    """Prior ratio plus Gaussian transition-density ratio in whitened coordinates."""
    if delta == 0.0:
        return 0.0
    a, b = theta_cn_coefficients(lam2, delta, theta, precond)
    inv_b2 = 1.0 / (b * b)
    fwd = -0.5 * float(((zv - a * zu) ** 2) @ inv_b2)
    rev = -0.5 * float(((zu - a * zv) ** 2) @ inv_b2)
    return 0.5 * float(zu @ zu) - 0.5 * float(zv @ zv) + rev - fwd


def init_chain(target: Target, state: CoefficientState, need_grad: bool = False) -> ChainState:
    state.check(target.prior)
    grad = target.grad(state) if need_grad else None
    return ChainState(state=state, phi=target.phi(state), grad=grad)


def _accept(log_ratio: float, rng) -> bool:
    # log-space comparison; min(1, .) is implicit
    return log_ratio >= 0.0 or math.log(rng.random()) < log_ratio


def mh_step(chain: ChainState, target: Target, config: ProposalConfig, rng, mask=None) -> ChainState:
    """One propose/accept step; caches Phi (and DPhi for Langevin kinds)."""
    cfg = _effective(config, rng)
    langevin = cfg.kind in ("CNL", "PCNL")
    u = chain.state
    grad_u = chain.grad
    if langevin and grad_u is None:
        grad_u = target.grad(u)
    v = propose(u, cfg, target.prior, rng, grad=grad_u, mask=mask)
    phi_v = target.phi(v)
    grad_v = target.grad(v) if langevin else None
    log_r = accept_log_ratio(cfg, u, v, chain.phi, phi_v, target.prior, grad_u, grad_v, mask=mask)
    if _accept(log_r, rng):
        return ChainState(v, phi_v, chain.step_index + 1, True, grad_v)
    return ChainState(u, chain.phi, chain.step_index + 1, False, grad_u)


def default_partition(n_modes: int, n_blocks: Optional[int] = None) -> list:
    """Blocks ``{0}, {1}, ..., {J-2}, {J-1, ..., n-1}`` (0-based); singletons by default."""
    j = n_modes if n_blocks is None else n_blocks
    if not 1 <= j <= n_modes:
        raise ValueError("n_blocks must lie in [1, n_modes]")
    blocks = [np.array([i]) for i in range(j - 1)]
    blocks.append(np.arange(j - 1, n_modes))
    return blocks


def mwg_update(chain: ChainState, target: Target, block, rng) -> ChainState:
    """Resample one block from its prior conditional; accept on Phi difference."""
    block = np.asarray(block, dtype=int)
    if block.size == 0:
        raise ValueError("empty block")
    u = chain.state
    z = u.z.copy()
    z[block] = rng.standard_normal(block.size)
    v = u.with_z(z)
    phi_v = target.phi(v)
    if _accept(chain.phi - phi_v, rng):
        return ChainState(v, phi_v, chain.step_index + 1, True)
    return ChainState(u, chain.phi, chain.step_index + 1, False)


def mwg_sweep(chain: ChainState, target: Target, partition: Sequence, rng) -> ChainState:
    """One systematic scan over ``partition``; ``step_index`` advances per block."""
    covered = np.zeros(chain.state.size, dtype=bool)
    for block in partition:
        covered[np.asarray(block, dtype=int)] = True
    if not np.all(covered[chain.state.active()]):
        raise ValueError("partition must cover every active mode")
    for block in partition:
        chain = mwg_update(chain, target, block, rng)
    return chain


def truncation_move(chain: ChainState, target: Target, law: TruncationLaw, rng) -> ChainState:
    """+-1 move on the truncation level with reflection at 1 and ``mode_count``."""
    u = chain.state
    d, n = u.trunc, u.size
    if n == 1:
        return replace(chain, aux_accepted=False)
    if d == 1:
        d_new = 2
    elif d == n:
        d_new = n - 1
    else:
        d_new = d + (1 if rng.random() < 0.5 else -1)

    def q(a, b):
        return 1.0 if a in (1, n) else 0.5

    v = replace(u, trunc=d_new)
    phi_v = target.phi(v)
    log_r = (chain.phi - phi_v
             + float(law.log_pmf_unnormalized(d_new) - law.log_pmf_unnormalized(d))
             + math.log(q(d_new, d) / q(d, d_new)))
    if _accept(log_r, rng):
        return replace(chain, state=v, phi=phi_v, aux_accepted=True, grad=None)
    return replace(chain, aux_accepted=False)


def rtm_step(chain: ChainState, target: Target, law: TruncationLaw, beta: float, rng) -> ChainState:
    """pCN on the active coefficients given the truncation level, then a level move."""
    if chain.state.trunc is None:
        raise ValueError("random-truncation step needs a state with trunc")
    chain = mh_step(chain, target, ProposalConfig("PCN", beta=beta), rng)
    return truncation_move(chain, target, law, rng)


def sieve_switch_move(chain: ChainState, target: Target, law: SieveLaw, rng) -> ChainState:
    """Switch one mode on or off (probability 1/2 each when both are legal)."""
    u = chain.state
    s = u.switches
    n = s.size
    n_on = int(s.sum())

    def p_on(k):
        return 1.0 if k == 0 else (0.0 if k == n else 0.5)

    activate = rng.random() < p_on(n_on)
    s_new = s.copy()
    if activate:
        choices = (s == 0).nonzero()[0]
        s_new[choices[rng.integers(choices.size)]] = 1
        q_fwd = p_on(n_on) / (n - n_on)
        q_rev = (1.0 - p_on(n_on + 1)) / (n_on + 1)
    else:
        choices = s.nonzero()[0]
        s_new[choices[rng.integers(choices.size)]] = 0
        q_fwd = (1.0 - p_on(n_on)) / n_on
        q_rev = p_on(n_on - 1) / (n - n_on + 1)
    v = replace(u, switches=s_new)
    phi_v = target.phi(v)
    dn = 1 if activate else -1
    log_r = chain.phi - phi_v - law.rate * dn + math.log(q_rev / q_fwd)
    if _accept(log_r, rng):
        return replace(chain, state=v, phi=phi_v, aux_accepted=True, grad=None)
    return replace(chain, aux_accepted=False)


def sieve_step(chain: ChainState, target: Target, law: SieveLaw, beta: float, rng) -> ChainState:
    if chain.state.switches is None:
        raise ValueError("sieve step needs a state with switches")
    if chain.state.switches.any():
        chain = mh_step(chain, target, ProposalConfig("PCN", beta=beta), rng)
    else:
        chain = replace(chain, step_index=chain.step_index + 1, accepted_last=False)
    return sieve_switch_move(chain, target, law, rng)


def sample_precision(misfit: Optional[GaussianMisfit], u: CoefficientState,
                     hyper: PrecisionHyperprior, rng) -> float:
    """Draw ``tau | u ~ Gamma(alpha + J/2, rate = beta + |r|^2 / 2)``."""
    if misfit is None:
        raise ValueError("precision update needs a Gaussian misfit")
    r = misfit.residual(u)
    shape = hyper.alpha_sigma + 0.5 * r.size
    rate = hyper.beta_sigma + 0.5 * float(r @ r)
    return float(rng.gamma(shape, 1.0 / rate))


def marginal_potential(misfit: Optional[GaussianMisfit], hyper: PrecisionHyperprior,
                       u: CoefficientState) -> float:
    """Negative log likelihood with ``tau`` integrated out, up to a constant."""
    if misfit is None:
        raise ValueError("marginal potential needs a Gaussian misfit")
    r = misfit.residual(u)
    return (hyper.alpha_sigma + 0.5 * r.size) * math.log(hyper.beta_sigma + 0.5 * float(r @ r))


def misfit_target(prior: SpectralPrior, misfit: GaussianMisfit, tau: Optional[float] = None) -> Target:
    """``Phi(u) = tau |r(u)|^2 / 2`` with ``tau = 1/noise_var`` unless given."""
    prec = 1.0 / misfit.noise_var if tau is None else tau

    def potential(state):
        r = misfit.residual(state)
        return 0.5 * prec * float(r @ r)

    return Target(prior=prior, potential=potential, misfit=misfit)


def precision_gibbs_step(chain: ChainState, misfit: GaussianMisfit, prior: SpectralPrior,
                         hyper: PrecisionHyperprior, config: ProposalConfig, rng):
    """``tau | u`` by a Gamma draw, then one MH step for ``u | tau``.

    Returns ``(chain, tau)``; the chain's cached potential refers to ``tau``.
    """
    tau = sample_precision(misfit, chain.state, hyper, rng)
    target = misfit_target(prior, misfit, tau)
    chain = replace(chain, phi=target.phi(chain.state), grad=None)
    return mh_step(chain, target, config, rng), tau


def random_delta_wrap(config: ProposalConfig, rng) -> ProposalConfig:
    """Fix one step size drawn from ``config.random_delta`` (independent of the state)."""
    law = config.random_delta
    if law is None:
        return config
    value = law.draw(rng)
    if law.param == "beta":
        if config.kind in ("PCN", "INDEP"):
            return replace(config, beta=value, delta=None, random_delta=None, kind="PCN")
        return replace(config, delta=delta_from_beta(value), beta=None, random_delta=None)
    if config.kind in ("PCN", "INDEP"):
        return replace(config, beta=beta_from_delta(min(value, 2.0)), delta=None,
                       random_delta=None, kind="PCN")
    return replace(config, delta=value, beta=None, random_delta=None)
