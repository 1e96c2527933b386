"""Experiment configuration documents (JSON) and their validation.

Every model forbids unknown keys.  Validation errors carry the dotted path of
the offending field, e.g. ``prior.alpha`` or ``sampler.kind``.
"""

from __future__ import annotations

import json
import os
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .chains import GIBBS_KINDS
from .function_space import SpectralPrior
from .samplers import KINDS

__all__ = [
    "ConfigError",
    "PriorSpec",
    "TwinSpec",
    "DensityTarget",
    "DarcyTarget",
    "StokesTarget",
    "LinearTarget",
    "ZeroTarget",
    "SamplerSpec",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "EXPERIMENT_KINDS",
]

EXPERIMENT_KINDS = ("sample", "sweep", "tune", "compare", "twin", "validate")
SEED_MAX = 2**64 - 1


class ConfigError(ValueError):
    """Malformed or invalid experiment document; ``errors`` lists ``(path, message)``."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{path or '<root>'}: {msg}" for path, msg in self.errors]
        super().__init__("invalid config:\n  " + "\n  ".join(lines))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PriorSpec(_Strict):
    alpha: float
    scale: float = 1.0
    dims: Literal[1, 2] = 1
    mode_count: int = 100
    ell: float = 10.0
    domain: Literal["square", "torus"] = "square"

    @model_validator(mode="after")
    def _gate(self):
        self.build()
        return self

    def build(self, mode_count: Optional[int] = None) -> SpectralPrior:
        return SpectralPrior(alpha=self.alpha, scale=self.scale, dims=self.dims,
                             mode_count=self.mode_count if mode_count is None else mode_count,
                             ell=self.ell, domain=self.domain)


class TwinSpec(_Strict):
    """Synthetic data from a prior draw; ``noise_sigma`` is the generating noise
    level and may differ from (or be zero unlike) the likelihood's."""

    noise_sigma: Optional[float] = Field(default=None, ge=0.0)
    truth_seed: Optional[int] = Field(default=None, ge=0, le=SEED_MAX)


class _ModelBase(_Strict):
    dataset: Optional[str] = None
    twin: Optional[TwinSpec] = None

    @field_validator("dataset")
    @classmethod
    def _exists(cls, v):
        if v is not None and not os.path.isfile(v):
            raise ValueError(f"dataset file {v!r} does not exist")
        return v

    @model_validator(mode="after")
    def _one_source(self):
        if self.dataset is not None and self.twin is not None:
            raise ValueError("give either dataset or twin, not both")
        return self


class DensityTarget(_ModelBase):
    model: Literal["density"]
    density: Literal["rho1", "rho2"] = "rho1"
    n_obs: int = Field(default=100, ge=1)
    data_seed: int = Field(default=0, ge=0, le=SEED_MAX)
    quad_points: int = Field(default=2**10 + 1, ge=2)

    @model_validator(mode="after")
    def _no_twin(self):
        if self.twin is not None:
            raise ValueError("density data are drawn from rho1/rho2, not twin-generated")
        return self


class DarcyTarget(_ModelBase):
    model: Literal["darcy"]
    grid_size: int = Field(default=32, ge=4)
    source: float = 1.0
    boundary: float = 0.0
    measurement_points: Optional[List[Tuple[float, float]]] = None
    noise_sigma: float = Field(default=0.01, gt=0.0)


class StokesTarget(_ModelBase):
    model: Literal["stokes"]
    viscosity: float = Field(default=0.1, gt=0.0)
    obs_kind: Literal["eulerian", "lagrangian"] = "eulerian"
    n_times: int = Field(default=10, ge=1)
    final_time: float = Field(default=1.0, gt=0.0)
    n_side: int = Field(default=3, ge=1)
    euler_dt: float = Field(default=0.01, gt=0.0)
    noise_sigma: float = Field(default=0.01, gt=0.0)


class LinearTarget(_ModelBase):
    model: Literal["linear"]
    weights: List[float] = Field(default_factory=lambda: [1.0, 1.0, 1.0])
    noise_var: float = Field(default=0.01, gt=0.0)


class ZeroTarget(_Strict):
    """``Phi = 0``: the posterior is the prior."""

    model: Literal["zero"]


TargetSpec = Annotated[Union[DensityTarget, DarcyTarget, StokesTarget, LinearTarget, ZeroTarget],
                       Field(discriminator="model")]


class RandomStepSpec(_Strict):
    low: float = Field(ge=0.0)
    high: float = Field(ge=0.0)
    param: Literal["beta", "delta"] = "beta"


class SamplerSpec(_Strict):
    kind: str
    delta: Optional[float] = None
    beta: Optional[float] = None
    theta: float = 0.5
    precond: Literal["identity", "covariance"] = "identity"
    random_delta: Optional[RandomStepSpec] = None
    truncation_rate: float = Field(default=0.01, gt=0.0)
    sieve_rate: float = Field(default=0.0, ge=0.0)
    n_blocks: Optional[int] = Field(default=None, ge=1)
    label: Optional[str] = None

    @field_validator("kind")
    @classmethod
    def _kind(cls, v):
        if v not in KINDS + GIBBS_KINDS:
            raise ValueError(f"unknown sampler kind {v!r}; expected one of {KINDS + GIBBS_KINDS}")
        return v

    @model_validator(mode="after")
    def _buildable(self):
        from .runner import build_kernel  # local: runner imports this module
        build_kernel(self, mode_count=1 if self.n_blocks is None else self.n_blocks)
        return self

    @property
    def name(self) -> str:
        return self.label or self.kind


class ExperimentConfig(_Strict):
    kind: Literal["sample", "sweep", "tune", "compare", "twin", "validate"]
    seed: int = Field(ge=0, le=SEED_MAX)
    prior: Optional[PriorSpec] = None
    target: Optional[TargetSpec] = None
    sampler: Optional[SamplerSpec] = None
    samplers: Optional[List[SamplerSpec]] = None
    n_steps: int = Field(default=10_000, ge=1)
    burn_in: int = Field(default=0, ge=0)
    thin: int = Field(default=1, ge=1)
    n_chains: int = Field(default=1, ge=1)
    observables: List[str] = Field(default_factory=lambda: ["phi", "z[0]"])
    max_lag: int = Field(default=100, ge=1)
    iact_window: Literal["fixed", "auto"] = "fixed"
    output_dir: str = "out"
    # sweep
    mesh_sizes: Optional[List[int]] = None
    step_grid: Optional[List[float]] = None
    # tune
    target_acceptance: float = Field(default=0.234, gt=0.0, lt=1.0)
    burst_length: int = Field(default=100, ge=1)
    max_bursts: int = Field(default=200, ge=1)
    tune_first: bool = True
    # validate
    suite: Optional[str] = None

    @field_validator("suite")
    @classmethod
    def _suite(cls, v):
        from .validation import SUITES
        if v is not None and v != "all" and v not in SUITES:
            raise ValueError(f"unknown suite {v!r}; available: {', '.join(sorted(SUITES))}, all")
        return v

    @model_validator(mode="after")
    def _requirements(self):
        if self.burn_in >= self.n_steps:
            raise ValueError("burn_in must be smaller than n_steps")
        needs = {
            "sample": ("prior", "target", "sampler"),
            "sweep": ("prior", "target", "sampler", "mesh_sizes", "step_grid"),
            "tune": ("prior", "target", "sampler"),
            "compare": ("prior", "target", "samplers"),
            "twin": ("prior", "target"),
            "validate": ("suite",),
        }[self.kind]
        missing = [k for k in needs if getattr(self, k) is None]
        if missing:
            raise ValueError(f"{self.kind} experiment requires: {', '.join(missing)}")
        if self.kind == "twin" and isinstance(self.target, (DensityTarget, ZeroTarget)):
            raise ValueError("twin generation needs a darcy, stokes or linear target")
        if self.prior is not None and self.target is not None:
            _check_pairing(self.prior, self.target)
        return self


def _check_pairing(prior: PriorSpec, target) -> None:
    want = {"density": (1, None), "darcy": (2, "square"), "stokes": (2, "torus"), "linear": (None, None)}
    dims, domain = want.get(target.model, (None, None))
    if dims is not None and prior.dims != dims:
        raise ValueError(f"{target.model} target needs a {dims}-D prior")
    if domain is not None and prior.domain != domain:
        raise ValueError(f"{target.model} target needs domain={domain!r}")
    if isinstance(target, LinearTarget) and len(target.weights) > prior.mode_count:
        raise ValueError("more observed modes than prior modes")


_TAGS = ("density", "darcy", "stokes", "linear", "zero")


def _path(loc) -> str:
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += ("." if out else "") + str(part)
    return out


def parse_config(document: Union[str, bytes, dict]) -> ExperimentConfig:
    """Validate a JSON document (text or already-decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError([("", f"malformed JSON: {exc}")]) from None
    if not isinstance(document, dict):
        raise ConfigError([("", "top level must be a JSON object")])
    try:
        return ExperimentConfig.model_validate(document)
    except ValidationError as exc:
        errs = []
        for e in exc.errors():
            # drop the union tag pydantic inserts after "target"
            loc = [p for i, p in enumerate(e["loc"])
                   if not (i > 0 and e["loc"][i - 1] == "target" and p in _TAGS)]
            msg = e["msg"]
            if e["type"] == "extra_forbidden":
                msg = f"unknown key {e['loc'][-1]!r}"
            errs.append((_path(loc), msg.removeprefix("Value error, ")))
        raise ConfigError(errs) from None


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([("", f"cannot read {path}: {exc}")]) from None
    return parse_config(text)
