"""Autocorrelation, integrated autocorrelation time, acceptance sweeps and step tuning."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .chains import Kernel, run_chain
from .samplers import ChainState, Target, init_chain

__all__ = [
    "DegenerateTraceWarning",
    "Trace",
    "autocorrelation",
    "iact",
    "iact_auto",
    "AcceptanceCurve",
    "acceptance_sweep",
    "TuneResult",
    "tune_step",
    "summary",
    "summary_json",
    "summary_csv",
    "trace_csv",
    "cell_rng",
]


class DegenerateTraceWarning(UserWarning):
    """The trace is constant; its autocorrelation is defined as a unit impulse."""


@dataclass
class Trace:
    values: np.ndarray
    burn_in: int = 0
    observable: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.values.size <= self.burn_in:
            raise ValueError("trace must be longer than its burn-in")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trace has non-finite entries")

    @property
    def usable(self) -> np.ndarray:
        return self.values[self.burn_in:]


def _values(trace) -> np.ndarray:
    return trace.usable if isinstance(trace, Trace) else np.asarray(trace, dtype=float).reshape(-1)


def autocorrelation(trace, max_lag: int) -> np.ndarray:
    """Biased empirical ACF at lags ``0..max_lag`` (FFT, centred values)."""
    x = _values(trace)
    n = x.size
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must lie in [0, {n - 1}]")
    x = x - x.mean()
    c0 = float(x @ x)
    if c0 == 0.0:
        warnings.warn("constant trace: ACF set to 1 at lag 0 and 0 elsewhere", DegenerateTraceWarning)
        out = np.zeros(max_lag + 1)
        out[0] = 1.0
        return out
    size = 1 << int(math.ceil(math.log2(2 * n)))
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conj(f), size)[: max_lag + 1]
    acf = acov / acov[0]
    acf[0] = 1.0
    return acf


def iact(trace, max_lag: int = 100) -> float:
    """``1 + 2 sum_{k=1}^{max_lag} ACF(k)`` with a fixed window."""
    acf = autocorrelation(trace, max_lag)
    return float(1.0 + 2.0 * acf[1:].sum())


def iact_auto(trace, c: float = 5.0, max_lag: Optional[int] = None) -> tuple:
    """IACT with the self-consistent window: smallest ``M`` with ``M >= c * tau(M)``.

    Returns ``(tau, M)``.  The search stops at ``max_lag`` (default ``n // 10``);
    hitting that cap means the trace is too short for a reliable estimate.
    """
    x = _values(trace)
    cap = max(1, x.size // 10) if max_lag is None else max_lag
    acf = autocorrelation(x, cap)
    taus = 1.0 + 2.0 * np.cumsum(acf[1:])
    ok = np.nonzero(np.arange(1, cap + 1) >= c * taus)[0]
    m = int(ok[0]) + 1 if ok.size else cap
    return float(taus[m - 1]), m


def cell_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream for ``(seed, key...)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


@dataclass
class AcceptanceCurve:
    beta_grid: np.ndarray
    mesh_sizes: np.ndarray
    mean_acceptance: np.ndarray
    steps_per_cell: int
    seed: int = 0
    kind: str = ""

    def rows(self) -> List[tuple]:
        return [
            (int(m), float(b), float(self.mean_acceptance[i, j]), self.steps_per_cell, self.seed)
            for i, m in enumerate(self.mesh_sizes)
            for j, b in enumerate(self.beta_grid)
        ]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mesh", "beta", "mean_acceptance", "steps", "seed"])
        for m, b, a, s, seed in self.rows():
            w.writerow([m, repr(b), repr(a), s, seed])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def acceptance_sweep(target_family: Callable[[int], Target], kernel: Kernel, beta_grid: Sequence[float],
                     mesh_sizes: Sequence[int], steps: int, seed: int,
                     burn_in: Optional[int] = None) -> AcceptanceCurve:
    """Mean acceptance per (mesh, step) cell.

    ``target_family(d)`` builds the target discretized with ``d`` modes.  The
    grid values are the kernel's step parameter (beta for pCN, delta for the
    other proposals).  Each cell owns the stream ``cell_rng(seed, i, j)`` and
    discards ``burn_in`` steps (default 10%) before recording.
    """
    if len(beta_grid) == 0 or len(mesh_sizes) == 0:
        raise ValueError("beta_grid and mesh_sizes must be nonempty")
    burn = steps // 10 if burn_in is None else burn_in
    acc = np.zeros((len(mesh_sizes), len(beta_grid)))
    for i, d in enumerate(mesh_sizes):
        target = target_family(int(d))
        for j, b in enumerate(beta_grid):
            rng = cell_rng(seed, i, j)
            out = run_chain(target, kernel.with_step(float(b)), burn + steps, rng, burn_in=burn)
            acc[i, j] = out.acceptance_rate
    return AcceptanceCurve(np.asarray(beta_grid, dtype=float), np.asarray(mesh_sizes, dtype=int),
                           acc, steps, seed, kernel.kind)


@dataclass
class TuneResult:
    value: float
    acceptance: float
    flagged: bool
    history: List[tuple] = field(default_factory=list)
    chain: Optional[ChainState] = None
    message: str = ""


def tune_step(target: Target, kernel: Kernel, rng, target_acceptance: float = 0.234,
              burst_length: int = 100, max_bursts: int = 200, c0: float = 1.0,
              initial: Optional[ChainState] = None, bounds: Optional[tuple] = None) -> TuneResult:
    """Adaptive burn-in: ``step <- step * exp(c_k (burst_acceptance - target))``, ``c_k = c0/sqrt(k)``.

    The step is clipped to ``bounds`` (default ``(0, 1]`` for beta-type
    kernels).  The result is flagged when the step saturates at a bound or the
    last bursts miss the target by more than 0.05.
    """
    if not 0.0 < target_acceptance < 1.0:
        raise ValueError("target_acceptance must lie in (0, 1)")
    if kernel.step is None:
        raise ValueError(f"kernel {kernel.kind} has no tunable step")
    lo, hi = kernel.step_bounds if bounds is None else bounds
    value = float(np.clip(kernel.step, lo, hi))
    chain = initial
    if chain is None:
        chain = init_chain(target, kernel.initial_state(target, rng), kernel.needs_grad)
    history = []
    for k in range(1, max_bursts + 1):
        kern = kernel.with_step(value)
        blocks = kern.blocks(chain.state.size) if kern.kind == "MWG" else None
        hits = 0
        for _ in range(burst_length):
            chain = kern(chain, target, rng, blocks)
            hits += chain.accepted_last
        rate = hits / burst_length
        history.append((value, rate))
        value = float(np.clip(value * math.exp(c0 / math.sqrt(k) * (rate - target_acceptance)), lo, hi))
    tail = [r for _, r in history[-max(1, max_bursts // 10):]]
    recent = float(np.mean(tail))
    saturated = (value >= hi and recent > target_acceptance) or (value <= lo and recent < target_acceptance)
    missed = abs(recent - target_acceptance) > 0.05
    msg = "saturated at bound" if saturated else ("did not settle near target" if missed else "")
    if msg:
        warnings.warn(f"tune_step: {msg} (step={value:.4g}, acceptance={recent:.3f})", RuntimeWarning)
    return TuneResult(value, recent, saturated or missed, history, chain, msg)


def summary(traces: Dict[str, np.ndarray], max_lag: int = 100, burn_in: int = 0) -> List[dict]:
    """Per-observable mean, variance, MCSE (``std * sqrt(iact / n)``) and IACT."""
    rows = []
    for name, values in traces.items():
        x = np.asarray(values, dtype=float)
        n = x.size
        lag = min(max_lag, n - 1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateTraceWarning)
            tau = iact(x, lag) if n > 1 else 1.0
        var = float(x.var())
        rows.append({
            "observable": name,
            "mean": float(x.mean()),
            "variance": var,
            "mcse": math.sqrt(var * max(tau, 0.0) / n),
            "iact": tau,
            "n": n,
            "burn_in": burn_in,
        })
    return rows


def summary_json(rows: List[dict]) -> str:
    return json.dumps(rows, indent=2, sort_keys=False)


def summary_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    fields = ["observable", "mean", "variance", "mcse", "iact", "n", "burn_in"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def trace_csv(values: Iterable[float], accepted: Iterable[bool], start: int = 0, thin: int = 1) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "value", "accepted"])
    for k, (v, a) in enumerate(zip(values, accepted)):
        w.writerow([start + k * thin, repr(float(v)), int(bool(a))])
    return buf.getvalue()
