"""Step kernels with a single tunable scale, and a chain driver that records traces."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional

import numpy as np

from .function_space import CoefficientState, SieveLaw, TruncationLaw
from .samplers import (
    ChainState,
    ProposalConfig,
    Target,
    default_partition,
    init_chain,
    mh_step,
    mwg_update,
    rtm_step,
    sieve_step,
)

__all__ = ["Kernel", "ChainOutput", "run_chain", "GIBBS_KINDS"]

GIBBS_KINDS = ("MWG", "RTM-PCN", "SIEVE-PCN")


@dataclass(frozen=True)
class Kernel:
    """One Markov transition.

    ``kind`` is a proposal kind (see :data:`fsmcmc.samplers.KINDS`) or one of
    ``MWG`` (one block update per step, systematic scan), ``RTM-PCN`` and
    ``SIEVE-PCN`` (a pCN coefficient move followed by a truncation/switch move).
    """

    kind: str
    proposal: Optional[ProposalConfig] = None
    beta: Optional[float] = None
    truncation: Optional[TruncationLaw] = None
    sieve: Optional[SieveLaw] = None
    n_blocks: Optional[int] = None
    partition: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind in GIBBS_KINDS:
            if self.kind == "RTM-PCN" and (self.truncation is None or self.beta is None):
                raise ValueError("RTM-PCN needs a truncation law and beta")
            if self.kind == "SIEVE-PCN" and (self.sieve is None or self.beta is None):
                raise ValueError("SIEVE-PCN needs a sieve law and beta")
        elif self.proposal is None:
            raise ValueError(f"kernel {self.kind!r} needs a proposal config")

    @classmethod
    def from_proposal(cls, config: ProposalConfig) -> "Kernel":
        return cls(kind=config.kind, proposal=config)

    @property
    def step(self) -> Optional[float]:
        if self.kind in ("RTM-PCN", "SIEVE-PCN"):
            return self.beta
        if self.kind == "MWG":
            return None
        return self.proposal.step

    @property
    def step_bounds(self) -> tuple:
        if self.kind in ("RTM-PCN", "SIEVE-PCN", "PCN", "INDEP"):
            return (1e-6, 1.0)
        return (1e-8, 1e3)

    def with_step(self, value: float) -> "Kernel":
        if self.kind in ("RTM-PCN", "SIEVE-PCN"):
            return replace(self, beta=value)
        if self.kind == "MWG":
            raise ValueError("MwG has no tunable step")
        return replace(self, proposal=self.proposal.with_step(value))

    def initial_state(self, target: Target, rng) -> CoefficientState:
        z = rng.standard_normal(target.prior.mode_count)
        if self.kind == "RTM-PCN":
            return CoefficientState(z, trunc=int(rng.choice(z.size, p=self.truncation.pmf)) + 1)
        if self.kind == "SIEVE-PCN":
            return CoefficientState(z, switches=(rng.random(z.size) < 0.5).astype(int))
        return CoefficientState(z)

    def blocks(self, n_modes: int):
        if self.partition is not None:
            return [np.asarray(b, dtype=int) for b in self.partition]
        return default_partition(n_modes, self.n_blocks)

    def __call__(self, chain: ChainState, target: Target, rng, _blocks=None) -> ChainState:
        if self.kind == "MWG":
            blocks = _blocks if _blocks is not None else self.blocks(chain.state.size)
            return mwg_update(chain, target, blocks[chain.step_index % len(blocks)], rng)
        if self.kind == "RTM-PCN":
            return rtm_step(chain, target, self.truncation, self.beta, rng)
        if self.kind == "SIEVE-PCN":
            return sieve_step(chain, target, self.sieve, self.beta, rng)
        return mh_step(chain, target, self.proposal, rng)

    @property
    def needs_grad(self) -> bool:
        return self.kind in ("CNL", "PCNL")


@dataclass
class ChainOutput:
    """Recorded traces after burn-in and thinning."""

    traces: Dict[str, np.ndarray]
    accepted: np.ndarray
    aux_accepted: Optional[np.ndarray]
    final: ChainState
    burn_in: int
    thin: int
    n_steps: int
    phi: Optional[np.ndarray] = None

    @property
    def acceptance_rate(self) -> float:
        return float(self.accepted.mean()) if self.accepted.size else float("nan")


def run_chain(target: Target, kernel: Kernel, n_steps: int, rng,
              initial: Optional[CoefficientState | ChainState] = None,
              observables: Optional[Dict[str, Callable[[CoefficientState], float]]] = None,
              burn_in: int = 0, thin: int = 1) -> ChainOutput:
    """Run ``n_steps`` transitions; statistics exclude the first ``burn_in`` steps."""
    if n_steps <= burn_in:
        raise ValueError("n_steps must exceed burn_in")
    if thin < 1:
        raise ValueError("thin must be >= 1")
    observables = observables or {}
    if initial is None:
        initial = kernel.initial_state(target, rng)
    chain = initial if isinstance(initial, ChainState) else init_chain(target, initial, kernel.needs_grad)
    blocks = kernel.blocks(chain.state.size) if kernel.kind == "MWG" else None
    kept = range(burn_in, n_steps, thin)
    n_kept = len(kept)
    traces = {name: np.empty(n_kept) for name in observables}
    accepted = np.empty(n_kept, dtype=bool)
    phi = np.empty(n_kept)
    aux = np.empty(n_kept, dtype=bool) if kernel.kind in ("RTM-PCN", "SIEVE-PCN") else None
    k = 0
    for step in range(n_steps):
        chain = kernel(chain, target, rng, blocks)
        if step >= burn_in and (step - burn_in) % thin == 0:
            accepted[k] = chain.accepted_last
            phi[k] = chain.phi
            if aux is not None:
                aux[k] = bool(chain.aux_accepted)
            for name, fn in observables.items():
                traces[name][k] = fn(chain.state)
            k += 1
    return ChainOutput(traces, accepted, aux, chain, burn_in, thin, n_steps, phi)
