"""Experiment configuration: one JSON document fully determines a run.

Unknown keys are rejected at every nesting level so that a typo cannot
silently fall back to a default.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ._codec import decode_complex, encode_complex
from .algebra import TernaryAlgebra
from .control import ControlFunction
from .exceptions import ConfigError
from .funceq import Permutation3
from .maps import EvalGrid, MapSpec, Perturbation, check_degree, check_direction, check_scale, perturbation_from_dict

KINDS = ("derivation_stability", "sigma_hom_stability", "superstability", "axioms", "funceq_check")
SEED_ENV = "ULAM_LAB_SEED"


def _check_keys(data, cls, what: str) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{what} must be a mapping")
    allowed = {f.name for f in fields(cls)}
    extra = set(data) - allowed
    if extra:
        raise ConfigError(f"unknown {what} keys: {sorted(extra)}")


def _simple(cls, data, what):
    if data is None:
        return cls()
    _check_keys(data, cls, what)
    return cls(**data)


@dataclass(frozen=True)
class AlgebraSpec:
    dim: int = 1
    product: str = "derived"
    mutation: str | None = None

    def build(self) -> TernaryAlgebra:
        return TernaryAlgebra(self.dim, self.product, self.mutation)


@dataclass(frozen=True)
class GridSpec:
    rho: float = 1.0
    shells: int = 9
    directions: int = 4
    seed: int = 0

    def build(self, a: int, dim: int) -> EvalGrid:
        return EvalGrid(float(self.rho), int(self.shells), a, int(self.directions), int(self.seed), dim)


@dataclass(frozen=True)
class ControlSpec:
    """A control family; ``theta = None`` means fit it on the grid."""

    family: str
    exponent: float
    theta: float | None = None
    delta: float = 0.0

    def __post_init__(self):
        self.build()

    def build(self) -> ControlFunction:
        return ControlFunction(self.family, float(self.exponent), 1.0 if self.theta is None else float(self.theta), float(self.delta))

    @classmethod
    def from_dict(cls, data):
        if data is None:
            return None
        _check_keys(data, cls, "control")
        return cls(**data)

    def to_dict(self) -> dict:
        return {"family": self.family, "exponent": self.exponent, "theta": self.theta, "delta": self.delta}


@dataclass(frozen=True)
class Tolerances:
    residual: float = 1e-9
    monomial: float = 1e-10
    rounding: float = 1e-12
    closed_form: float = 1e-12
    rate: float = 0.1
    homogeneity: float = 1e-10
    axiom: float = 1e-12


@dataclass(frozen=True)
class FunceqSpec:
    m_values: tuple = (1, 2, 3, 4)
    a_values: tuple = (2, 3, -2)
    coeffs: tuple = (1.0, 2.0, 1 + 1j)
    maps: int = 20
    pairs: int = 100

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(check_degree(m) for m in self.m_values))
        object.__setattr__(self, "a_values", tuple(check_scale(a) for a in self.a_values))
        object.__setattr__(self, "coeffs", tuple(decode_complex(c) for c in self.coeffs))

    def to_dict(self) -> dict:
        return {
            "m_values": list(self.m_values),
            "a_values": list(self.a_values),
            "coeffs": [encode_complex(c) for c in self.coeffs],
            "maps": self.maps,
            "pairs": self.pairs,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    algebra: AlgebraSpec = field(default_factory=AlgebraSpec)
    base: MapSpec = field(default_factory=MapSpec)
    perturbation: Perturbation | None = None
    second_perturbation: Perturbation | None = None
    m: int = 1
    a: int = 2
    direction: str = "shrink"
    phi: ControlSpec | None = None
    psi: ControlSpec | None = None
    depth: int = 20
    grid: GridSpec = field(default_factory=GridSpec)
    sigma: tuple | None = None
    seed: int = 0
    samples: int = 100
    triple_budget: int = 10_000
    funceq: FunceqSpec = field(default_factory=FunceqSpec)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        check_degree(self.m)
        check_scale(self.a)
        check_direction(self.direction)
        if self.base.perturbation is not None:
            raise ConfigError("put the perturbation under 'perturbation', not inside 'base'")
        if (self.sigma is not None) != (self.kind == "sigma_hom_stability"):
            raise ConfigError("'sigma' must be given exactly for sigma_hom_stability experiments")
        if self.sigma is not None:
            object.__setattr__(self, "sigma", Permutation3(tuple(self.sigma)).images)
        if self.kind in ("derivation_stability", "sigma_hom_stability") and self.phi is None:
            raise ConfigError(f"{self.kind} needs a 'phi' control family")
        if self.samples < 1 or self.triple_budget < 1:
            raise ConfigError("samples and triple_budget must be positive")
        if not 1 <= self.depth <= 40:
            raise ConfigError("depth must be in 1..40")

    # -- overrides ------------------------------------------------------------

    def with_overrides(self, *, seed=None, shells=None, depth=None) -> "ExperimentConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=int(seed), grid=replace(cfg.grid, seed=int(seed)))
        if shells is not None:
            cfg = replace(cfg, grid=replace(cfg.grid, shells=int(shells)))
        if depth is not None:
            cfg = replace(cfg, depth=int(depth))
        return cfg

    # -- serialization --------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        _check_keys(data, cls, "config")
        if "kind" not in data:
            raise ConfigError("config needs a 'kind'")
        kw = dict(data)
        try:
            kw["algebra"] = _simple(AlgebraSpec, data.get("algebra"), "algebra")
            kw["base"] = MapSpec.from_dict(data["base"]) if data.get("base") is not None else MapSpec()
            kw["perturbation"] = perturbation_from_dict(data.get("perturbation"))
            kw["second_perturbation"] = perturbation_from_dict(data.get("second_perturbation"))
            kw["phi"] = ControlSpec.from_dict(data.get("phi"))
            kw["psi"] = ControlSpec.from_dict(data.get("psi"))
            kw["grid"] = _simple(GridSpec, data.get("grid"), "grid")
            kw["funceq"] = _simple(FunceqSpec, data.get("funceq"), "funceq")
            kw["tolerances"] = _simple(Tolerances, data.get("tolerances"), "tolerances")
            if data.get("sigma") is not None:
                kw["sigma"] = tuple(data["sigma"])
            return cls(**kw)
        except (TypeError, KeyError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "algebra": {"dim": self.algebra.dim, "product": self.algebra.product, "mutation": self.algebra.mutation},
            "base": self.base.to_dict(),
            "perturbation": None if self.perturbation is None else self.perturbation.to_dict(),
            "second_perturbation": None if self.second_perturbation is None else self.second_perturbation.to_dict(),
            "m": self.m,
            "a": self.a,
            "direction": self.direction,
            "phi": None if self.phi is None else self.phi.to_dict(),
            "psi": None if self.psi is None else self.psi.to_dict(),
            "depth": self.depth,
            "grid": {"rho": self.grid.rho, "shells": self.grid.shells, "directions": self.grid.directions, "seed": self.grid.seed},
            "sigma": None if self.sigma is None else list(self.sigma),
            "seed": self.seed,
            "samples": self.samples,
            "triple_budget": self.triple_budget,
            "funceq": self.funceq.to_dict(),
            "tolerances": {f.name: getattr(self.tolerances, f.name) for f in fields(Tolerances)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None
