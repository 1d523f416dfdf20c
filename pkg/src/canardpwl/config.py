"""Run configuration: schema, defaults and TOML/JSON loading."""

import json
import os
from pathlib import Path
from typing import Literal, Optional

import tomli
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .cycles import IntegratorConfig
from .errors import CanardError
from .pwl import AffinePlanarField, PwlSystem

__all__ = ["ConfigError", "RunConfig", "SweepSpec", "IntegratorSettings", "load_config", "parse_sweep", "OUT_ENV"]

OUT_ENV = "CANARDPWL_OUT"

DEFAULT_SEEDS = {"hopf": (0.3,), "jump": (0.75, 0.85)}


class ConfigError(CanardError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class IntegratorSettings(_Strict):
    method: Literal["DOP853", "RK45", "Radau", "BDF", "LSODA"] = "DOP853"
    rel_tol: float = Field(1e-13, gt=0)
    abs_tol: float = Field(1e-16, gt=0)
    event_tol: float = Field(1e-16, gt=0)
    max_step: float = Field(float("inf"), gt=0)
    t_max: float = Field(2e4, gt=0)
    extended_precision: bool = False

    @model_validator(mode="after")
    def _event_below_abs(self):
        if self.event_tol > self.abs_tol:
            raise ValueError("event_tol must not exceed abs_tol")
        return self

    def build(self):
        return IntegratorConfig(**self.model_dump())


class SweepSpec(_Strict):
    lo: float = -5e-3
    hi: float = 5e-3
    n: int = Field(41, ge=20)

    @model_validator(mode="after")
    def _ordered(self):
        if not self.lo < self.hi:
            raise ValueError("sweep needs lo < hi")
        return self


class PwlSpec(_Strict):
    X: list[float]
    Y: list[float]

    @field_validator("X", "Y")
    @classmethod
    def _six(cls, v):
        if len(v) != 6:
            raise ValueError("an affine field has 6 coefficients")
        return v

    def build(self):
        return PwlSystem(AffinePlanarField.from_list(self.X), AffinePlanarField.from_list(self.Y))


class RunConfig(_Strict):
    kind: Literal["hopf", "jump"] = "hopf"
    seeds: Optional[tuple[float, ...]] = None
    delta: float = 1e-2
    eta: float = 0.5
    c_plus: float = 3.0
    c_minus: float = 1.0
    pwl: Optional[PwlSpec] = None
    rho: Optional[float] = Field(None, gt=0, lt=1)
    window_x: Optional[float] = None
    eps: tuple[float, ...] = (0.05,)
    sweep: SweepSpec = SweepSpec()
    n_y: int = Field(400, ge=20)
    n_coarse: int = Field(16, ge=4)
    sdi_grid: int = Field(200, ge=200)
    sdi_interval: Optional[tuple[float, float]] = None
    out_dir: str = "out"
    integrator: IntegratorSettings = IntegratorSettings()

    @model_validator(mode="after")
    def _fill(self):
        if self.seeds is None:
            object.__setattr__(self, "seeds", DEFAULT_SEEDS[self.kind])
        if self.pwl is not None:
            X, Y = self.pwl.X, self.pwl.Y
            for c in (X, Y):
                if (c[1], c[2], c[4], c[5]) != (0.0, 1.0, -1.0, 0.0):
                    raise ValueError("pwl fields must be linear centres (c + y ... , alpha - x)")
            if X[3] != Y[3]:
                raise ValueError("pwl fields must share the constant of the second component")
            object.__setattr__(self, "c_plus", -X[0])
            object.__setattr__(self, "c_minus", -Y[0])
        if any(e <= 0 for e in self.eps):
            raise ValueError("eps values must be positive")
        return self

    def output_dir(self, override=None):
        return Path(override or os.environ.get(OUT_ENV) or self.out_dir)

    def model(self):
        from .build import make_model

        return make_model(self.kind, self.seeds, self.delta, self.eta, self.c_plus, self.c_minus)


def parse_sweep(text):
    """``"a=-1e-3:1e-3:41"`` -> (name, SweepSpec)."""
    try:
        name, rng = text.split("=", 1)
        lo, hi, n = rng.split(":")
        return name.strip(), SweepSpec(lo=float(lo), hi=float(hi), n=int(n))
    except (ValueError, ValidationError) as exc:
        raise ConfigError(f"bad sweep spec {text!r}: expected name=lo:hi:n") from exc


def load_config(path=None, **overrides):
    """Read a TOML or JSON file (or nothing) and apply CLI overrides."""
    data = {}
    if path is not None:
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(raw) if path.suffix == ".json" else tomli.loads(raw.decode())
        except (ValueError, tomli.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
