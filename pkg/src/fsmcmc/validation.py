"""Self-checks runnable from the command line (``fsmcmc validate``).

Each suite returns a report ``{"suite", "passed", "checks": [...]}`` where
every check records its measured statistics and threshold.  Sizes are chosen
so that each suite finishes within about a minute on one core.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Dict

import numpy as np

from .chains import Kernel, run_chain
from .diagnostics import cell_rng, iact
from .function_space import CoefficientState, SieveLaw, SpectralPrior, TruncationLaw
from .models.darcy import DarcyProblem, darcy_solve
from .models.density import DensityData, DensityModel, sample_observations
from .models.linear import LinearGaussianTarget, posterior_oracle
from .models.stokes import StokesModel, StokesProblem, stokes_evolve, stokes_prior
from .samplers import (
    GaussianMisfit,
    PrecisionHyperprior,
    ProposalConfig,
    Target,
    init_chain,
    sample_precision,
    sieve_switch_move,
)

__all__ = ["SUITES", "run_suite", "darcy_manufactured_error", "stokes_shear_error"]


def _check(name, passed, **measured) -> dict:
    return {"name": name, "passed": bool(passed), **{k: _plain(v) for k, v in measured.items()}}


def _plain(v):
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


def _zero_target(prior: SpectralPrior) -> Target:
    return Target(prior, lambda s: 0.0)


def prior_preservation(seed: int) -> list:
    prior = SpectralPrior(alpha=1.0, mode_count=20)
    target = _zero_target(prior)
    names = [f"z{i}" for i in range(10)]
    obs = {n: (lambda i: lambda s: s.z[i])(i) for i, n in enumerate(names)}
    n = 100_000
    out = run_chain(target, Kernel.from_proposal(ProposalConfig("PCN", beta=0.5)), n, cell_rng(seed, 0),
                    observables=obs)
    checks = [_check("acceptance identically 1", out.accepted.all(), acceptance=out.acceptance_rate)]
    for i, name in enumerate(names):
        xi = prior.stds[i] * out.traces[name]
        var = float(np.mean(xi**2))
        tau = max(iact(out.traces[name] ** 2, 200), 1.0)
        se = prior.variances[i] * math.sqrt(2.0 * tau / n)
        checks.append(_check(f"mode {i + 1} variance", abs(var - prior.variances[i]) <= 3 * se,
                             variance=var, expected=float(prior.variances[i]), se=se))
    return checks


def _mesh_acceptance(kernel: Kernel, meshes, steps, seed) -> list:
    out = []
    for i, d in enumerate(meshes):
        prior = SpectralPrior(alpha=1.0, mode_count=d)
        out.append(run_chain(_zero_target(prior), kernel, steps, cell_rng(seed, i)).acceptance_rate)
    return out


def theta_degeneracy(seed: int) -> list:
    meshes = (16, 64, 256, 1024)
    bad = _mesh_acceptance(Kernel.from_proposal(ProposalConfig("THETA-CN", delta=0.5, theta=0.3,
                                                               precond="covariance")), meshes, 4000, seed)
    good = _mesh_acceptance(Kernel.from_proposal(ProposalConfig("THETA-CN", delta=0.5, theta=0.5,
                                                                precond="covariance")), meshes, 1000, seed)
    return [
        _check("theta=0.3 acceptance strictly decreasing", all(np.diff(bad) < 0), meshes=meshes, acceptance=bad),
        _check("theta=0.5 acceptance identically 1", all(a == 1.0 for a in good), meshes=meshes, acceptance=good),
    ]


def rw_degeneracy(seed: int) -> list:
    meshes = (16, 64, 256, 1024)
    rw = _mesh_acceptance(Kernel.from_proposal(ProposalConfig("RW-C", delta=0.05)), meshes, 4000, seed)
    pcn = _mesh_acceptance(Kernel.from_proposal(ProposalConfig("PCN", beta=0.2)), meshes, 1000, seed)
    return [
        _check("RW-C acceptance decreasing", all(np.diff(rw) < 0), meshes=meshes, acceptance=rw),
        _check("pCN acceptance identically 1", all(a == 1.0 for a in pcn), meshes=meshes, acceptance=pcn),
    ]


def truncation_invariance(seed: int) -> list:
    law = TruncationLaw(0.5, 10)
    prior = SpectralPrior(alpha=1.0, mode_count=10)
    n = 100_000
    out = run_chain(_zero_target(prior), Kernel("RTM-PCN", beta=0.5, truncation=law), n, cell_rng(seed, 0),
                    observables={"d": lambda s: s.trunc})
    d = out.traces["d"]
    checks = []
    for level in (1, 2):
        ind = (d == level).astype(float)
        freq = float(ind.mean())
        se = math.sqrt(freq * (1 - freq) * max(iact(ind, 200), 1.0) / n)
        checks.append(_check(f"P(d={level})", abs(freq - law.pmf[level - 1]) <= 3 * se,
                             frequency=freq, expected=float(law.pmf[level - 1]), se=se))
    return checks


def sieve_target_law(phi: Callable, n: int, rate: float) -> Dict[tuple, float]:
    """Brute-force stationary law of the switch vector at fixed coefficients."""
    states = list(itertools.product((0, 1), repeat=n))
    logw = np.array([-phi(np.array(s)) - rate * sum(s) for s in states])
    w = np.exp(logw - logw.max())
    return dict(zip(states, w / w.sum()))


def sieve_balance(seed: int, moves: int = 1_000_000) -> list:
    n, rate = 8, 0.3
    rng = cell_rng(seed, 0)
    z = rng.standard_normal(n)
    c = np.linspace(-1.0, 1.0, n)

    def phi_switch(s):
        return float(np.sum(c * s * z)) + 0.5 * float(np.sum(s * z)) ** 2 / n

    prior = SpectralPrior(alpha=1.0, mode_count=n)
    target = Target(prior, lambda st: phi_switch(st.switches))
    exact = sieve_target_law(phi_switch, n, rate)
    chain = init_chain(target, CoefficientState(z, switches=np.zeros(n, dtype=int)))
    law = SieveLaw(rate)
    counts = np.zeros(2**n)
    powers = 2 ** np.arange(n)[::-1]
    for _ in range(moves):
        chain = sieve_switch_move(chain, target, law, rng)
        counts[int(chain.state.switches @ powers)] += 1
    emp = counts / moves
    ref = np.array([exact[s] for s in itertools.product((0, 1), repeat=n)])
    tv = 0.5 * float(np.abs(emp - ref).sum())
    return [_check("switch law TV distance <= 0.02", tv <= 0.02, tv=tv, moves=moves)]


def gradient_check(seed: int) -> list:
    prior = SpectralPrior(alpha=2.0, mode_count=64)
    rng = cell_rng(seed, 0)
    model = DensityModel(DensityData(sample_observations("rho1", 100, rng)), prior)
    worst = 0.0
    for _ in range(10):
        z = rng.standard_normal(prior.mode_count)
        e = rng.standard_normal(prior.mode_count)
        e /= np.linalg.norm(e)
        h = 1e-5
        fd = (model.potential(CoefficientState(z + h * e)) - model.potential(CoefficientState(z - h * e))) / (2 * h)
        an = float(model.gradient(CoefficientState(z)) @ e)
        worst = max(worst, abs(fd - an) / max(abs(an), 1e-8))
    return [_check("directional derivative relative error <= 1e-5", worst <= 1e-5, worst=worst)]


def linear_gaussian(seed: int) -> list:
    prior = SpectralPrior(alpha=1.0, mode_count=10)
    rng = cell_rng(seed, 0)
    lin = LinearGaussianTarget(np.array([1.0, 2.0, 0.5]), 0.1, rng.standard_normal(3))
    mean, var = posterior_oracle(lin, prior)
    n = 100_000
    obs = {f"z{i}": (lambda i: lambda s: s.z[i])(i) for i in range(lin.m)}
    out = run_chain(lin.target(prior), Kernel.from_proposal(ProposalConfig("PCN", beta=0.5)), n + 5000,
                    rng, observables=obs, burn_in=5000)
    checks = []
    for i in range(lin.m):
        x = out.traces[f"z{i}"]
        mcse = math.sqrt(x.var() * max(iact(x, 500), 1.0) / x.size)
        checks.append(_check(f"mode {i + 1} posterior mean", abs(x.mean() - mean[i]) <= 3 * mcse,
                             mean=float(x.mean()), expected=float(mean[i]), mcse=mcse))
    return checks


def darcy_manufactured_error(J: int) -> float:
    """Max nodal error for ``p = sin(pi x) sin(pi y)``, ``log kappa = sin(2 pi x) cos(2 pi y) / 2``."""
    prob = DarcyProblem(grid_size=J)

    def logk(x, y):
        return 0.5 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)

    xh = prob.half_nodes
    u = logk(*np.meshgrid(xh, xh, indexing="ij"))
    X, Y = np.meshgrid(prob.nodes, prob.nodes, indexing="ij")
    k = np.exp(logk(X, Y))
    kx = k * np.pi * np.cos(2 * np.pi * X) * np.cos(2 * np.pi * Y)
    ky = -k * np.pi * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y)
    px = np.pi * np.cos(np.pi * X) * np.sin(np.pi * Y)
    py = np.pi * np.sin(np.pi * X) * np.cos(np.pi * Y)
    lap = -2 * np.pi**2 * np.sin(np.pi * X) * np.sin(np.pi * Y)
    g = -(kx * px + ky * py + k * lap)
    p = darcy_solve(u, prob, source=g)
    return float(np.abs(p - np.sin(np.pi * X) * np.sin(np.pi * Y)).max())


def darcy_convergence(seed: int) -> list:
    errs = [darcy_manufactured_error(J) for J in (16, 32, 64)]
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    return [_check("error ratio per doubling in [3.5, 4.5]", all(3.5 <= r <= 4.5 for r in ratios),
                   errors=errs, ratios=ratios)]


def stokes_shear_error(dt: float, amplitude: float = 0.3, nu: float = 0.1, final: float = 1.0) -> float:
    """Euler tracer error for the single cosine shear mode ``k = (0, 1)``.

    The velocity is ``-sqrt(2) a(t) cos(2 pi y) e_1`` so ``y`` stays fixed and
    ``x(T) = x0 - sqrt(2) cos(2 pi y0) a0 (1 - exp(-c T)) / c`` with ``c = 4 pi^2 nu``.
    """
    prob = StokesProblem(viscosity=nu, mode_cutoff=4, obs_kind="lagrangian", obs_times=(final,),
                         positions=((0.3, 0.2), (0.7, 0.55)), euler_dt=dt)
    prior = stokes_prior(prob)
    model = StokesModel(prob, prior)
    z = np.zeros(prior.mode_count)
    z[0] = amplitude / prior.stds[0]
    got = model.trace(CoefficientState(z))[-1]
    c = 4 * np.pi**2 * nu
    pts = np.asarray(prob.positions)
    x_exact = pts[:, 0] - math.sqrt(2) * np.cos(2 * np.pi * pts[:, 1]) * amplitude * (1 - math.exp(-c * final)) / c
    d = got[:, 0] - x_exact
    d -= np.round(d)
    return float(np.abs(d).max())


def stokes_forward(seed: int) -> list:
    rng = cell_rng(seed, 0)
    k = rng.integers(-5, 6, size=(20, 2)).astype(float) * 2 * np.pi
    modes = rng.standard_normal(20)
    t, nu = 0.37, 0.1
    got = stokes_evolve(modes, k, nu, t)
    rel = float(np.max(np.abs(got - modes * np.exp(-nu * np.sum(k * k, axis=1) * t)) / np.abs(modes)))
    e1, e2 = stokes_shear_error(0.02), stokes_shear_error(0.01)
    return [
        _check("decay factor relative error <= 1e-12", rel <= 1e-12, rel_error=rel),
        _check("Euler error ratio in [1.8, 2.2]", 1.8 <= e1 / e2 <= 2.2, errors=[e1, e2], ratio=e1 / e2),
    ]


def precision_mean(seed: int) -> list:
    rng = cell_rng(seed, 0)
    y = rng.standard_normal(50)
    misfit = GaussianMisfit(lambda s: np.zeros(50), y, 1.0)
    hyper = PrecisionHyperprior(1.0, 1.0)
    state = CoefficientState(np.zeros(1))
    n = 100_000
    draws = np.array([sample_precision(misfit, state, hyper, rng) for _ in range(n)])
    shape, rate = 1.0 + 25.0, 1.0 + 0.5 * float(y @ y)
    se = math.sqrt(shape) / rate / math.sqrt(n)
    return [_check("Gamma mean within 3 SE", abs(draws.mean() - shape / rate) <= 3 * se,
                   mean=float(draws.mean()), expected=shape / rate, se=se)]


SUITES: Dict[str, Callable[[int], list]] = {
    "prior-preservation": prior_preservation,
    "theta-degeneracy": theta_degeneracy,
    "rw-degeneracy": rw_degeneracy,
    "truncation-invariance": truncation_invariance,
    "sieve-detailed-balance": sieve_balance,
    "gradient-check": gradient_check,
    "linear-gaussian": linear_gaussian,
    "darcy-convergence": darcy_convergence,
    "stokes-forward": stokes_forward,
    "precision": precision_mean,
}


def run_suite(name: str, seed: int = 0) -> dict:
    """Run one suite, or every suite for ``name == "all"``."""
    if name == "all":
        reports = [run_suite(n, seed) for n in SUITES]
        return {"suite": "all", "passed": all(r["passed"] for r in reports), "suites": reports}
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(sorted(SUITES))}, all")
    checks = SUITES[name](seed)
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}
