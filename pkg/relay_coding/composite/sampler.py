"""Deterministic chunked sampling of channel parameters θ.

Draws come in fixed blocks of ``BLOCK`` rows. Block b is generated by its own
``numpy.random.default_rng`` seeded with the b-th output of a splitmix64
stream started at the master seed, so any chunking of a run reproduces the
same sequence of draws.
"""

import logging
from typing import Iterator, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict

from ..exceptions import ConfigurationError
from ..pydantic_models import CompositeModel, MonteCarloConfig

log = logging.getLogger(__name__)

BLOCK = 4096
_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """Finalizer of the splitmix64 generator"""
    z = (state + _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def block_seed(master: int, block: int) -> int:
    return splitmix64((master + block * _GAMMA) & _MASK)


def derived_seed(master: int, salt: int) -> int:
    """Seed of an auxiliary stream (pilot samples) independent of the main one"""
    return splitmix64(master ^ splitmix64(salt))


class ThetaSample(BaseModel):
    """A batch of draws; ``table_idx`` is set for finite-table models"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta: np.ndarray
    table_idx: Optional[np.ndarray] = None

    def __len__(self):
        return self.theta.shape[0]

    def subset(self, rows) -> "ThetaSample":
        return ThetaSample(
            theta=self.theta[rows],
            table_idx=None if self.table_idx is None else self.table_idx[rows],
        )


def _table(model: CompositeModel) -> Tuple[np.ndarray, np.ndarray]:
    values = np.array([[complex(re, im) for re, im in entry.theta] for entry in model.table])
    probs = np.array([entry.probability for entry in model.table], dtype=float)
    return values, probs / probs.sum()


def _self_gain_columns(model: CompositeModel) -> List[int]:
    if model.layout != "network":
        return []
    size = model.n_relays + 1
    # receiver row j holds relay j+1, whose own transmitter column is j+1
    return [j * size + (j + 1) for j in range(model.n_relays)]


def _block(model: CompositeModel, master: int, block: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    rng = np.random.default_rng(block_seed(master, block))
    dim = model.theta_dim
    if model.family == "finite_table":
        values, probs = _table(model)
        idx = rng.choice(len(values), size=BLOCK, p=probs)
        return values[idx], idx
    scale = np.sqrt(np.broadcast_to(np.asarray(model.variance, dtype=float), (dim,)))
    draws = (rng.standard_normal((BLOCK, dim)) + 1j * rng.standard_normal((BLOCK, dim))) / np.sqrt(2.0)
    draws *= scale
    draws[:, _self_gain_columns(model)] = 0.0
    return draws, None


def sample_theta(model: CompositeModel, seed: int, start: int, count: int) -> ThetaSample:
    """Draws ``start .. start+count-1`` of the stream of ``seed``"""
    if start < 0 or count < 0:
        raise ConfigurationError("sample range must be nonnegative")
    if count == 0:
        return ThetaSample(theta=np.zeros((0, model.theta_dim), dtype=complex),
                           table_idx=np.zeros(0, dtype=int) if model.family == "finite_table" else None)
    first, last = start // BLOCK, (start + count - 1) // BLOCK
    thetas, indices = [], []
    for block in range(first, last + 1):
        theta, idx = _block(model, seed, block)
        thetas.append(theta)
        indices.append(idx)
    offset = start - first * BLOCK
    theta = np.concatenate(thetas)[offset:offset + count]
    table_idx = None
    if model.family == "finite_table":
        table_idx = np.concatenate(indices)[offset:offset + count]
    return ThetaSample(theta=theta, table_idx=table_idx)


def chunk_ranges(config: MonteCarloConfig) -> List[Tuple[int, int]]:
    return [(start, min(config.chunk, config.samples - start))
            for start in range(0, config.samples, config.chunk)]


def iter_theta(model: CompositeModel, config: MonteCarloConfig) -> Iterator[ThetaSample]:
    """Stream of draws in chunks of ``config.chunk``"""
    for start, count in chunk_ranges(config):
        yield sample_theta(model, config.seed, start, count)


def draw_theta(model: CompositeModel, config: MonteCarloConfig) -> ThetaSample:
    """All ``config.samples`` draws, chunks generated on ``config.threads`` workers"""
    ranges = chunk_ranges(config)
    if config.threads > 1 and len(ranges) > 1:
        parts = Parallel(n_jobs=config.threads)(
            delayed(sample_theta)(model, config.seed, start, count) for start, count in ranges)
    else:
        parts = [sample_theta(model, config.seed, start, count) for start, count in ranges]
    theta = np.concatenate([part.theta for part in parts])
    table_idx = None
    if model.family == "finite_table":
        table_idx = np.concatenate([part.table_idx for part in parts])
    log.debug("drew %d samples of dimension %d", theta.shape[0], model.theta_dim)
    return ThetaSample(theta=theta, table_idx=table_idx)


def pilot_sample(model: CompositeModel, config: MonteCarloConfig, count: int = BLOCK) -> ThetaSample:
    """Draws of an independent stream for choosing parameters before sampling"""
    return sample_theta(model, derived_seed(config.seed, 1), 0, min(count, config.samples))


def table_sample(model: CompositeModel) -> Tuple[ThetaSample, np.ndarray]:
    """Every entry of a finite table once, with its probability"""
    if model.family != "finite_table":
        raise ConfigurationError("table_sample needs a finite_table model")
    values, probs = _table(model)
    return ThetaSample(theta=values, table_idx=np.arange(len(values))), probs
