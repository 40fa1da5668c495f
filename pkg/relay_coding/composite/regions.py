"""Decision regions: which relays run CF on each draw of θ_r.

A region evaluator maps a batch of draws to integer CF masks, bit k-1 set
when relay k compresses. Evaluators are looked up by family name.
"""

import logging
import math
from typing import Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..exceptions import ConfigurationError
from ..pydantic_models import CompositeModel, DecisionRegion
from .sampler import ThetaSample

log = logging.getLogger(__name__)


def mask_of(cf_set, n_relays: int) -> int:
    mask = 0
    for k in cf_set:
        if not 1 <= k <= n_relays:
            raise ConfigurationError(f"relay {k} outside 1..{n_relays}")
        mask |= 1 << (k - 1)
    return mask


def set_of(mask: int) -> frozenset:
    return frozenset(bit + 1 for bit in range(mask.bit_length()) if mask >> bit & 1)


def source_relay_gains(model: CompositeModel, sample: ThetaSample) -> np.ndarray:
    """|g_0k| per draw and relay, shape (draws, N)"""
    if model.layout == "single_relay":
        return np.abs(sample.theta[:, [1]])
    size = model.n_relays + 1
    return np.abs(sample.theta[:, [k * size for k in range(model.n_relays)]])


class RegionContext(BaseModel):
    """Everything a region evaluator may look at"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_relays: int
    source_gains: np.ndarray
    table_idx: Optional[np.ndarray] = None
    rate: float = 0.0
    beta: float = 1.0
    power: float = 1.0

    @classmethod
    def build(cls, model: CompositeModel, sample: ThetaSample, rate: float, beta: float = 1.0):
        return cls(
            n_relays=model.n_relays,
            source_gains=source_relay_gains(model, sample),
            table_idx=sample.table_idx,
            rate=rate,
            beta=beta,
            power=model.power[0],
        )


def _threshold(region: DecisionRegion, ctx: RegionContext) -> np.ndarray:
    thresholds = region.parameters.get("thresholds")
    if thresholds is None or len(thresholds) != ctx.n_relays:
        raise ConfigurationError(f"threshold_on_magnitude needs {ctx.n_relays} thresholds",
                                 [("region.parameters.thresholds", "length mismatch")])
    masks = np.zeros(ctx.source_gains.shape[0], dtype=np.int64)
    for k, level in enumerate(thresholds):
        level = math.inf if level is None else float(level)
        # below threshold: compress
        masks |= np.where(ctx.source_gains[:, k] < level, 1 << k, 0)
    return masks


def _analytic(region: DecisionRegion, ctx: RegionContext) -> np.ndarray:
    beta = float(region.parameters.get("beta", ctx.beta))
    power = float(region.parameters.get("power", ctx.power))
    decodable = np.log2(1.0 + beta * ctx.source_gains ** 2 * power) > ctx.rate
    masks = np.zeros(ctx.source_gains.shape[0], dtype=np.int64)
    for k in range(ctx.n_relays):
        masks |= np.where(decodable[:, k], 0, 1 << k)
    return masks


def _indexed(region: DecisionRegion, ctx: RegionContext) -> np.ndarray:
    draws = ctx.source_gains.shape[0]
    default = region.index.get("*")
    if ctx.table_idx is None:
        if default is None:
            raise ConfigurationError("indexed_partition over a continuous model needs a '*' cell")
        return np.full(draws, mask_of(default, ctx.n_relays), dtype=np.int64)
    masks = np.empty(draws, dtype=np.int64)
    for pos in np.unique(ctx.table_idx):
        cell = region.index.get(str(int(pos)), default)
        if cell is None:
            raise ConfigurationError(f"indexed_partition has no cell for table entry {pos}")
        masks[ctx.table_idx == pos] = mask_of(cell, ctx.n_relays)
    return masks


class RegionRegistry:
    """Registry of decision-region families"""

    def __init__(self):
        self.regions: Dict[str, Callable] = {}

    def register_region(self, name: str, evaluator: Callable):
        """Register a region family"""
        self.regions[name] = evaluator

    def get_region(self, name: str) -> Callable:
        if name not in self.regions:
            raise ConfigurationError(f"Unknown decision region family: {name}")
        return self.regions[name]

    def list_regions(self):
        return list(self.regions.keys())


region_registry = RegionRegistry()


def register_default_regions():
    region_registry.register_region("threshold_on_magnitude", _threshold)
    region_registry.register_region("analytic_DF_region", _analytic)
    region_registry.register_region("indexed_partition", _indexed)


register_default_regions()


def cf_masks(region: DecisionRegion, ctx: RegionContext) -> np.ndarray:
    """CF mask of every draw under ``region``"""
    return region_registry.get_region(region.family)(region, ctx)
