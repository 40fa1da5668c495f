"""Run configuration of the command line tool.

Configurations are JSON documents validated strictly: unknown keys fail.
Sets are sorted integer arrays and complex gains are [re, im] pairs.
"""

import json
import logging
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .exceptions import ConfigurationError
from .network_model import validate_network
from .pydantic_models import (
    CompositeModel,
    CompressionConfig,
    GaussianNetwork,
    MonteCarloConfig,
    SchemeName,
    SchemeParams,
    StrategyAssignment,
    StrategyMode,
)

log = logging.getLogger(__name__)

COMMANDS = ("rate", "gap", "outage", "epscap", "curves")

Gain = Union[float, Tuple[float, float]]


def _sorted_grid(values: List[float], name: str) -> List[float]:
    if not values:
        raise ValueError(f"{name} must not be empty")
    if list(values) != sorted(values):
        raise ValueError(f"{name} must be sorted")
    return values


class NetworkSpec(BaseModel):
    """Raw network block; noise variances are folded into the gains"""
    model_config = ConfigDict(extra="forbid")

    n_relays: Optional[int] = Field(default=None, ge=0)
    gains: List[List[Gain]]
    power: Union[float, List[float]] = 1.0
    noise: Optional[List[float]] = None

    def build(self, power: Optional[float] = None) -> GaussianNetwork:
        spec = self.model_dump(exclude_none=True)
        if power is not None:
            spec["power"] = power
        return validate_network(spec)


class StrategySpec(BaseModel):
    """Coding scheme of the ``rate`` and ``gap`` commands.

    ``betas`` lists the private power fractions of the source and the DF
    relays in increasing node order; left unset they are searched.
    """
    model_config = ConfigDict(extra="forbid")

    scheme: Literal["mnnc", "nnc", "fd_nnc", "noncoop", "lmnnc", "two_relay"] = "mnnc"
    cf_set: List[int] = Field(default_factory=list)
    mode: StrategyMode = "general"
    betas: Optional[List[float]] = None
    dest_decode: Optional[List[int]] = None
    layering: Optional[List[List[int]]] = None
    max_layers: Optional[int] = Field(default=None, ge=1)

    @field_validator("cf_set", "dest_decode")
    @classmethod
    def _sorted_set(cls, value):
        if value is not None and (list(value) != sorted(set(value))):
            raise ValueError("sets are sorted arrays of distinct integers")
        return value

    def assignment(self, n_relays: int) -> StrategyAssignment:
        try:
            return StrategyAssignment(
                n_relays=n_relays,
                cf_set=frozenset(self.cf_set),
                dest_decode=None if self.dest_decode is None else frozenset(self.dest_decode),
                layering=None if self.layering is None else tuple(frozenset(l) for l in self.layering),
                mode=self.mode,
            )
        except ValidationError as err:
            raise ConfigurationError.from_validation_error(err, prefix="strategy") from err


class SearchSpec(BaseModel):
    """Grid search over superposition fractions"""
    model_config = ConfigDict(extra="forbid")

    step: float = Field(default=0.01, gt=0.0, le=1.0)
    restarts: int = Field(default=5, ge=0)


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    parameter: Literal["nhat", "power", "beta"]
    grid: List[float]

    @field_validator("grid")
    @classmethod
    def _grid(cls, value):
        return _sorted_grid(value, "sweep.grid")


class OutageSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rates: List[float] = Field(default_factory=lambda: [0.5])
    schemes: List[SchemeName] = Field(
        default_factory=lambda: ["df", "cf_partial", "cf_full", "scs_partial", "scs_full"])
    lower_bound: bool = True

    @field_validator("rates")
    @classmethod
    def _rates(cls, value):
        return _sorted_grid(value, "outage.rates")


class EpscapSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps: List[float] = Field(default_factory=lambda: [0.01])
    schemes: List[SchemeName] = Field(default_factory=lambda: ["scs_partial"])

    @field_validator("eps")
    @classmethod
    def _eps(cls, value):
        return _sorted_grid(value, "epscap.eps")


class CurvesSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r_grid: List[float] = Field(default_factory=lambda: [round(0.1 * i, 1) for i in range(1, 21)])
    snr_grid: List[float] = Field(default_factory=lambda: [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0])
    eps: float = Field(default=0.01, gt=0.0, lt=1.0)
    P: float = Field(default=1.0, gt=0.0)
    P1: float = Field(default=1.0, gt=0.0)

    @field_validator("r_grid", "snr_grid")
    @classmethod
    def _grids(cls, value):
        return _sorted_grid(value, "curves grid")


class RunConfig(BaseModel):
    """One command with the blocks it reads"""
    model_config = ConfigDict(extra="forbid")

    command: Literal["rate", "gap", "outage", "epscap", "curves"]
    network: Optional[NetworkSpec] = None
    model: Optional[CompositeModel] = None
    strategy: StrategySpec = Field(default_factory=StrategySpec)
    scheme: SchemeParams = Field(default_factory=SchemeParams)
    nhat: Union[float, List[float]] = 1.0
    search: SearchSpec = Field(default_factory=SearchSpec)
    sweep: Optional[SweepSpec] = None
    outage: OutageSpec = Field(default_factory=OutageSpec)
    epscap: EpscapSpec = Field(default_factory=EpscapSpec)
    curves: CurvesSpec = Field(default_factory=CurvesSpec)
    mc: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    out: Optional[str] = None

    @model_validator(mode="after")
    def _blocks(self):
        if self.command in ("rate", "gap") and self.network is None:
            raise ValueError(f"command {self.command!r} needs a network block")
        if self.command in ("outage", "epscap") and self.model is None:
            raise ValueError(f"command {self.command!r} needs a model block")
        if self.sweep is not None and self.command != "rate":
            raise ValueError("sweep is only read by the rate command")
        return self

    def compression(self, n_relays: int, nhat: Optional[float] = None) -> CompressionConfig:
        if nhat is not None:
            return CompressionConfig.uniform(n_relays, nhat)
        if isinstance(self.nhat, list):
            if len(self.nhat) != n_relays:
                raise ConfigurationError(f"nhat lists {len(self.nhat)} values for {n_relays} relays",
                                         [("nhat", "length mismatch")])
            return CompressionConfig(nhat=self.nhat)
        return CompressionConfig.uniform(n_relays, self.nhat)


def parse_config(document: Union[str, bytes, Dict[str, Any]],
                 overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Validate a JSON document (text or already decoded) into a RunConfig.

    ``overrides`` replaces top-level keys, ``mc`` keys merge into the block.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise ConfigurationError(f"config is not valid JSON: {err}", [("$", str(err))]) from err
    if not isinstance(document, dict):
        raise ConfigurationError("config must be a JSON object", [("$", "expected object")])
    document = dict(document)
    for key, value in (overrides or {}).items():
        if key == "mc":
            document["mc"] = {**document.get("mc", {}), **value}
        elif key == "command" and document.get("command", value) != value:
            raise ConfigurationError(
                f"config is for command {document['command']!r}, not {value!r}",
                [("command", "mismatch")])
        else:
            document[key] = value
    try:
        return RunConfig.model_validate(document)
    except ValidationError as err:
        raise ConfigurationError.from_validation_error(err) from err


def dump_config(config: RunConfig) -> str:
    return json.dumps(config.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)
