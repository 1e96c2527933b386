"""Experiment orchestration: build targets and kernels from a config, run, persist.

Random streams: every stream is ``PCG64(SeedSequence(seed, spawn_key=key))``
(see :func:`fsmcmc.diagnostics.cell_rng`).  Chain ``c`` of a sample
experiment uses key ``(c,)``, sampler ``k`` of a compare experiment ``(k,)``,
sweep cell ``(i, j)`` uses ``(i, j)``.  Twin truths and twin noise use the
reserved keys below so they never collide with chain streams.
"""

from __future__ import annotations

import json
import math
import os
import platform
import re
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
import scipy

from . import __version__
from .chains import Kernel, run_chain
from .diagnostics import (
    acceptance_sweep,
    cell_rng,
    iact,
    iact_auto,
    summary,
    summary_csv,
    trace_csv,
    tune_step,
)
from .function_space import CoefficientState, SieveLaw, SpectralPrior, TruncationLaw
from .models.darcy import DEFAULT_POINTS, DarcyModel, DarcyProblem
from .models.density import DensityData, DensityModel, sample_observations
from .models.linear import LinearGaussianTarget
from .models.stokes import StokesModel, StokesProblem, even_times, grid_positions
from .models.twin import synthesize_twin_data
from .samplers import ProposalConfig, RandomStep, Target

__all__ = [
    "RNG_NAME",
    "TRUTH_KEY",
    "NOISE_KEY",
    "Problem",
    "build_kernel",
    "build_problem",
    "make_observables",
    "load_dataset",
    "dataset_document",
    "run",
    "RunResult",
]

RNG_NAME = "numpy PCG64/SeedSequence"
TRUTH_KEY = 2**31 - 1
NOISE_KEY = 2**31 - 2

_OBS = re.compile(r"^(phi|trunc|n_on|z\[(\d+)\]|xi\[(\d+)\]|u\(([^)]*)\))$")


def build_kernel(spec, mode_count: int) -> Kernel:
    """Kernel for a :class:`fsmcmc.config.SamplerSpec`."""
    if spec.kind == "MWG":
        n_blocks = None if spec.n_blocks is None else min(spec.n_blocks, mode_count)
        return Kernel("MWG", n_blocks=n_blocks)
    if spec.kind in ("RTM-PCN", "SIEVE-PCN"):
        beta = spec.beta if spec.beta is not None else (
            ProposalConfig("PCN", delta=spec.delta).beta if spec.delta is not None else 0.5)
        if spec.kind == "RTM-PCN":
            return Kernel("RTM-PCN", beta=beta, truncation=TruncationLaw(spec.truncation_rate, mode_count))
        return Kernel("SIEVE-PCN", beta=beta, sieve=SieveLaw(spec.sieve_rate))
    rd = None
    if spec.random_delta is not None:
        rd = RandomStep(spec.random_delta.low, spec.random_delta.high, spec.random_delta.param)
    return Kernel.from_proposal(ProposalConfig(spec.kind, delta=spec.delta, beta=spec.beta, theta=spec.theta,
                                               precond=spec.precond, random_delta=rd))


@dataclass
class Problem:
    """A built posterior plus whatever is needed to evaluate observables."""

    target: Target
    prior: SpectralPrior
    model: object = None
    truth: Optional[CoefficientState] = None
    dataset: Optional[dict] = None
    point_eval: Optional[Callable] = None


def load_dataset(path: str) -> dict:
    with open(path, "r") as fh:
        doc = json.load(fh)
    if "observations" not in doc:
        raise ValueError(f"dataset {path} has no 'observations'")
    return doc


def dataset_document(model: str, twin, problem_fields: dict) -> dict:
    return {
        "model": model,
        "observations": [float(v) for v in twin.observations],
        "clean": [float(v) for v in twin.clean],
        "truth": [float(v) for v in twin.truth.z],
        "noise_sigma": float(twin.noise_sigma),
        "seed": twin.seed,
        "problem": problem_fields,
    }


def _forward_model(tspec, prior: SpectralPrior):
    """Model object and forward map for a darcy/stokes/linear target, without data."""
    if tspec.model == "darcy":
        pts = DEFAULT_POINTS if tspec.measurement_points is None else tuple(map(tuple, tspec.measurement_points))
        prob = DarcyProblem(tspec.grid_size, tspec.source, tspec.boundary, pts, tspec.noise_sigma)
        model = DarcyModel(prob, prior)
        return model, model.forward, tspec.noise_sigma
    if tspec.model == "stokes":
        prob = StokesProblem(viscosity=tspec.viscosity, mode_cutoff=prior.mode_count, obs_kind=tspec.obs_kind,
                             obs_times=even_times(tspec.n_times, tspec.final_time),
                             positions=grid_positions(tspec.n_side), euler_dt=tspec.euler_dt,
                             noise_sigma=tspec.noise_sigma)
        model = StokesModel(prob, prior)
        return model, model.forward, tspec.noise_sigma
    lin = LinearGaussianTarget(np.asarray(tspec.weights), tspec.noise_var, np.zeros(len(tspec.weights)))
    return lin, lin.forward_fn(prior), math.sqrt(tspec.noise_var)


def make_twin(config, prior: SpectralPrior):
    """Truth drawn from the prior and noisy data from the forward model."""
    tspec = config.target
    twin_spec = tspec.twin
    model, forward, sigma_lik = _forward_model(tspec, prior)
    sigma = sigma_lik if twin_spec is None or twin_spec.noise_sigma is None else twin_spec.noise_sigma
    truth_rng = cell_rng(twin_spec.truth_seed, 0) if twin_spec and twin_spec.truth_seed is not None \
        else cell_rng(config.seed, TRUTH_KEY)
    truth = CoefficientState(truth_rng.standard_normal(prior.mode_count))
    twin = synthesize_twin_data(truth, forward, sigma, cell_rng(config.seed, NOISE_KEY))
    fields = tspec.model_dump(mode="json", exclude={"dataset", "twin"})
    doc = dataset_document(tspec.model, twin, fields)
    doc["seed"] = config.seed
    return doc


def build_problem(config) -> Problem:
    prior = config.prior.build()
    tspec = config.target
    if tspec.model == "zero":
        return Problem(Target(prior, lambda s: 0.0, gradient=lambda s: np.zeros(s.size)), prior)
    if tspec.model == "density":
        if tspec.dataset is not None:
            obs = np.asarray(load_dataset(tspec.dataset)["observations"], dtype=float)
        else:
            obs = sample_observations(tspec.density, tspec.n_obs, cell_rng(tspec.data_seed),
                                      prior.ell, tspec.quad_points)
        model = DensityModel(DensityData(obs, prior.ell, tspec.quad_points), prior)
        return Problem(model.target(), prior, model, point_eval=lambda s, x: model.point_value(s, x[0]))
    doc = load_dataset(tspec.dataset) if tspec.dataset is not None else make_twin(config, prior)
    model, forward, _ = _forward_model(tspec, prior)
    y = np.asarray(doc["observations"], dtype=float)
    truth = None if doc.get("truth") is None else CoefficientState(np.asarray(doc["truth"], dtype=float))
    if tspec.model == "linear":
        lin = LinearGaussianTarget(np.asarray(tspec.weights), tspec.noise_var, y)
        target = lin.target(prior)
        model = lin
    else:
        target = model.target(y)
    rows = {}

    def point_eval(state, x):
        key = tuple(x)
        if key not in rows:
            rows[key] = prior.basis([x] if prior.dims == 2 else x)[0] * prior.stds
        return float(rows[key] @ state.masked_z())

    return Problem(target, prior, model, truth, doc, point_eval)


def make_observables(names: List[str], problem: Problem) -> Dict[str, Callable]:
    """Parse observable names: ``phi``, ``trunc``, ``n_on``, ``z[i]``, ``xi[i]``, ``u(x)``/``u(x1,x2)``.

    ``phi`` is read from the chain's cached potential, so it maps to ``None``.
    """
    prior = problem.prior
    out: Dict[str, Optional[Callable]] = {}
    for name in names:
        m = _OBS.match(name.replace(" ", ""))
        if m is None:
            raise ValueError(f"unknown observable {name!r}")
        tag = m.group(1)
        if tag == "phi":
            out[name] = None
        elif tag == "trunc":
            out[name] = lambda s: float(s.trunc if s.trunc is not None else s.size)
        elif tag == "n_on":
            out[name] = lambda s: float(s.active().sum())
        elif m.group(2) is not None or m.group(3) is not None:
            i = int(m.group(2) or m.group(3))
            if i >= prior.mode_count:
                raise ValueError(f"observable {name!r}: mode index out of range")
            lam = float(prior.stds[i]) if m.group(3) is not None else 1.0
            out[name] = (lambda i, lam: lambda s: lam * float(s.masked_z()[i]))(i, lam)
        else:
            x = tuple(float(v) for v in m.group(4).split(","))
            if len(x) != prior.dims:
                raise ValueError(f"observable {name!r} needs {prior.dims} coordinate(s)")
            if not np.all(prior.contains(np.asarray(x) if prior.dims == 1 else [x])):
                raise ValueError(f"observable {name!r}: point outside the domain")
            if problem.point_eval is None:
                raise ValueError(f"observable {name!r} is not available for this target")
            out[name] = (lambda x: lambda s: problem.point_eval(s, x))(x)
    return out


def _run_observed(problem: Problem, kernel: Kernel, n_steps: int, rng, observables, burn_in=0, thin=1,
                  initial=None):
    fns = {k: v for k, v in observables.items() if v is not None}
    out = run_chain(problem.target, kernel, n_steps, rng, initial=initial, observables=fns,
                    burn_in=burn_in, thin=thin)
    traces = {}
    for name, fn in observables.items():
        traces[name] = out.phi if fn is None else out.traces[name]
    return out, traces


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", name).strip("_")


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


@dataclass
class RunResult:
    status: int
    output_dir: str
    report: dict = field(default_factory=dict)


def _sample(config, problem, out_dir) -> dict:
    kernel = build_kernel(config.sampler, problem.prior.mode_count)
    observables = make_observables(config.observables, problem)
    chains = []
    for c in range(config.n_chains):
        rng = cell_rng(config.seed, c)
        out, traces = _run_observed(problem, kernel, config.n_steps, rng, observables,
                                    config.burn_in, config.thin)
        rows = summary(traces, config.max_lag, config.burn_in)
        for name, values in traces.items():
            _write(os.path.join(out_dir, f"trace_c{c}_{_safe(name)}.csv"),
                   trace_csv(values, out.accepted, config.burn_in, config.thin))
        _write(os.path.join(out_dir, f"summary_c{c}.csv"), summary_csv(rows))
        chains.append({"chain": c, "acceptance": out.acceptance_rate, "summary": rows})
    _write(os.path.join(out_dir, "summary.json"), _dump({"chains": chains}))
    return {"chains": len(chains), "acceptance": [ch["acceptance"] for ch in chains]}


def _sweep(config, problem_factory, out_dir) -> dict:
    kernel = build_kernel(config.sampler, max(config.mesh_sizes))

    def family(d):
        return problem_factory(d).target

    burn = config.burn_in if config.burn_in > 0 else None
    curve = acceptance_sweep(family, kernel, config.step_grid, config.mesh_sizes, config.n_steps,
                             config.seed, burn_in=burn)
    _write(os.path.join(out_dir, "acceptance_curve.csv"), curve.to_csv())
    return {"cells": len(curve.rows())}


def _tune(config, problem, kernel, rng):
    res = tune_step(problem.target, kernel, rng, config.target_acceptance, config.burst_length,
                    config.max_bursts)
    return res


def _tune_report(res, kernel) -> dict:
    value = res.value
    rep = {"step": value, "acceptance": res.acceptance, "flagged": res.flagged, "message": res.message,
           "history": [[float(v), float(a)] for v, a in res.history]}
    if kernel.kind in ("PCN", "RTM-PCN", "SIEVE-PCN", "INDEP"):
        rep["beta"] = value
        rep["delta"] = ProposalConfig("PCN", beta=min(value, 1.0)).delta
    else:
        rep["delta"] = value
    return rep


def _compare(config, problem, out_dir) -> dict:
    observables = make_observables(config.observables, problem)
    rows = []
    timings = {}
    for k, spec in enumerate(config.samplers):
        rng = cell_rng(config.seed, k)
        kernel = build_kernel(spec, problem.prior.mode_count)
        warm = config.burst_length * config.max_bursts
        tuned = None
        if config.tune_first and kernel.step is not None:
            res = _tune(config, problem, kernel, rng)
            kernel = kernel.with_step(res.value)
            initial = res.chain
            tuned = _tune_report(res, kernel)
        else:
            initial = run_chain(problem.target, kernel, warm, rng).final
        t0 = time.perf_counter()
        out, traces = _run_observed(problem, kernel, config.n_steps, rng, observables, config.burn_in,
                                    config.thin, initial=initial)
        timings[spec.name] = time.perf_counter() - t0
        for name, values in traces.items():
            if config.iact_window == "auto":
                tau, window = iact_auto(values)
            else:
                window = min(config.max_lag, values.size - 1)
                tau = iact(values, window)
            row = {"sampler": spec.name, "observable": name, "iact": tau, "window": window,
                   "acceptance": out.acceptance_rate, "mean": float(np.mean(values)),
                   "step": kernel.step}
            if tuned is not None:
                row["tuned_delta"] = tuned["delta"]
                row["tune_flagged"] = tuned["flagged"]
            rows.append(row)
    header = ["sampler", "observable", "iact", "window", "acceptance", "mean", "step"]
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(repr(r[h]) if isinstance(r[h], float) else str(r[h]) for h in header))
    _write(os.path.join(out_dir, "compare.csv"), "\n".join(lines) + "\n")
    _write(os.path.join(out_dir, "compare.json"), _dump(rows))
    # timings go to the manifest only, so every other artifact is reproducible bit for bit
    return {"rows": rows, "timings": timings}


def run(config, output_dir: Optional[str] = None) -> RunResult:
    """Execute ``config`` and write its artifacts plus ``manifest.json``.

    Raises on failure; :func:`fsmcmc.cli.main` turns exceptions into exit codes.
    """
    out_dir = output_dir or config.output_dir
    config = config.model_copy(update={"output_dir": out_dir})
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.perf_counter()
    extra: dict = {}
    if config.kind == "validate":
        from .validation import run_suite
        report = run_suite(config.suite, config.seed)
        _write(os.path.join(out_dir, "validate.json"), _dump(report))
        extra = {"suite": config.suite, "passed": report["passed"]}
    elif config.kind == "twin":
        prior = config.prior.build()
        doc = make_twin(config, prior)
        model, forward, sigma_lik = _forward_model(config.target, prior)
        r = np.asarray(doc["observations"]) - np.asarray(forward(CoefficientState(np.asarray(doc["truth"]))))
        if config.target.model == "stokes" and config.target.obs_kind == "lagrangian":
            r = r - np.round(r)
        extra["phi_at_truth"] = 0.5 * float(r @ r) / sigma_lik**2
        _write(os.path.join(out_dir, "dataset.json"), _dump(doc))
    elif config.kind == "sweep":
        def factory(d):
            return build_problem(config.model_copy(update={"prior": config.prior.model_copy(
                update={"mode_count": int(d)})}))
        extra = _sweep(config, factory, out_dir)
    else:
        problem = build_problem(config)
        if problem.truth is not None:
            extra["phi_at_truth"] = problem.target.phi(problem.truth)
        if config.kind == "sample":
            extra.update(_sample(config, problem, out_dir))
        elif config.kind == "tune":
            kernel = build_kernel(config.sampler, problem.prior.mode_count)
            res = _tune(config, problem, kernel, cell_rng(config.seed, 0))
            rep = _tune_report(res, kernel)
            _write(os.path.join(out_dir, "tune.json"), _dump(rep))
            extra.update({k: rep[k] for k in ("step", "acceptance", "flagged")})
        else:
            extra.update(_compare(config, problem, out_dir))
    manifest = {
        "config": config.model_dump(mode="json"),
        "seed": config.seed,
        "rng": {"name": RNG_NAME, "numpy": np.__version__},
        "versions": {"fsmcmc": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "wall_time_s": time.perf_counter() - t0,
        "sampler_seconds": extra.get("timings", {}),
        "result": {k: v for k, v in extra.items() if k not in ("rows", "timings")},
    }
    _write(os.path.join(out_dir, "manifest.json"), _dump(manifest))
    status = 0
    return RunResult(status, out_dir, manifest)
