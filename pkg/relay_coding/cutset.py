"""Cut-set upper bounds"""

import logging
import math
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np

from utils.optimize import SuperpositionGridOptimizer

from .exceptions import ConfigurationError
from .gauss_core import assemble_covariance, conditional_mi
from .network_model import (
    MAX_ENUM_RELAYS,
    build_input_covariance,
    check_enumeration_cap,
    enumerate_subsets,
)
from .pydantic_models import (
    CompressionConfig,
    GaussianNetwork,
    InputCovariance,
    StrategyAssignment,
    format_set,
)

log = logging.getLogger(__name__)


def _xs(nodes):
    return [f"X{k}" for k in sorted(nodes)]


def _ys(nodes):
    return [f"Y{k}" for k in sorted(nodes)]


def exact_cut_terms(network: GaussianNetwork, inputs: InputCovariance,
                    enum_cap: int = MAX_ENUM_RELAYS) -> Dict[FrozenSet[int], float]:
    """I(X X_S; Y_{S^c} Y | X_{S^c}) for every S ⊆ N"""
    check_enumeration_cap(network.n_relays, enum_cap)
    # compression variances do not enter the cut values
    cov = assemble_covariance(network, inputs, CompressionConfig.uniform(network.n_relays))
    nodes = network.nodes
    terms = {}
    for S in enumerate_subsets(nodes):
        sc = nodes - S
        terms[S] = conditional_mi(cov, ["X"] + _xs(S), _ys(sc) + ["Y"], _xs(sc))
    return terms


def cutset_exact(network: GaussianNetwork, inputs: InputCovariance,
                 enum_cap: int = MAX_ENUM_RELAYS) -> float:
    """Cut-set bound min over S ⊆ N at the given input covariance"""
    return min(exact_cut_terms(network, inputs, enum_cap).values())


def cutset_exact_search(network: GaussianNetwork, cf_set: Iterable[int] = (),
                        step: float = 0.01, restarts: int = 5, seed: int = 0,
                        enum_cap: int = MAX_ENUM_RELAYS) -> Tuple[float, Dict[int, float]]:
    """Exact cut-set bound maximized over the superposition family of ``cf_set``"""
    strategy = StrategyAssignment(n_relays=network.n_relays, cf_set=frozenset(cf_set))
    nodes = [0] + sorted(strategy.df_set)

    def objective(params):
        return -cutset_exact(network, build_input_covariance(network, strategy, list(params)), enum_cap)

    found = SuperpositionGridOptimizer(objective, len(nodes), step=step, restarts=restarts,
                                       seed=seed).optimize(seeds=[np.ones(len(nodes))])
    return -float(found.fun), dict(zip(nodes, (float(b) for b in found.x)))


def relaxed_cut_terms(network: GaussianNetwork, inputs: InputCovariance,
                      cf_set: Iterable[int], enum_cap: int = MAX_ENUM_RELAYS) -> Dict[FrozenSet[int], float]:
    """Relaxed cut values for every V^c ⊆ S ⊆ N.

    ½ log2 det(I + ½ G Σ Gᵀ) over the cut, plus the penalty
    (1 + min(|S^c|, |S|))/2 · log2(4·max(1, |S ∩ V|)).
    """
    if network.is_complex:
        raise ConfigurationError("the relaxed cut-set bound is defined for real networks")
    check_enumeration_cap(network.n_relays, enum_cap)
    cf_set = frozenset(cf_set)
    nodes = network.nodes
    df = nodes - cf_set
    gain = network.gain_matrix
    sigma = inputs.matrix
    terms = {}
    for S in enumerate_subsets(nodes, lower=df):
        sc = nodes - S
        receivers = [j - 1 for j in sorted(sc)] + [network.n_relays]
        senders = [0] + sorted(S)
        block = gain[np.ix_(receivers, senders)]
        mat = np.eye(len(receivers)) + 0.5 * block @ sigma[np.ix_(senders, senders)] @ block.T
        _, logdet = np.linalg.slogdet(mat)
        capacity = 0.5 * logdet / math.log(2.0)
        penalty = (1 + min(len(sc), len(S))) / 2.0 * math.log2(4 * max(1, len(S & cf_set)))
        terms[S] = capacity + penalty
    return terms


def cutset_relaxed_search(network: GaussianNetwork, cf_set: Iterable[int],
                          step: float = 0.01, restarts: int = 5, seed: int = 0,
                          enum_cap: int = MAX_ENUM_RELAYS
                          ) -> Tuple[float, Dict[int, float], Dict[FrozenSet[int], float]]:
    """Relaxed cut-set bound maximized over the superposition fractions.

    Returns the bound, the maximizing fractions and the per-cut terms there.
    """
    strategy = StrategyAssignment(n_relays=network.n_relays, cf_set=frozenset(cf_set))
    nodes = [0] + sorted(strategy.df_set)

    def objective(params):
        inputs = build_input_covariance(network, strategy, list(params))
        return -min(relaxed_cut_terms(network, inputs, strategy.cf_set, enum_cap).values())

    found = SuperpositionGridOptimizer(objective, len(nodes), step=step, restarts=restarts,
                                       seed=seed).optimize(seeds=[np.ones(len(nodes))])
    betas = dict(zip(nodes, (float(b) for b in found.x)))
    terms = relaxed_cut_terms(network, build_input_covariance(network, strategy, betas),
                              strategy.cf_set, enum_cap)
    log.debug("relaxed cut-set %.6f at betas %s", -found.fun, betas)
    return -float(found.fun), betas, terms


def cutset_bound_relaxed(network: GaussianNetwork, cf_set: Iterable[int], step: float = 0.01,
                         restarts: int = 5, seed: int = 0) -> float:
    """Relaxed cut-set bound of the MNNC gap analysis, in bits"""
    value, _, _ = cutset_relaxed_search(network, cf_set, step=step, restarts=restarts, seed=seed)
    return value


def _c(x):
    return 0.5 * np.log2(1.0 + x)


def _cutset_df_curve(g1, g2, g3, P, noise, betas):
    broadcast = _c((g1 ** 2 + g3 ** 2) * betas * P / noise)
    coherent = _c((g3 ** 2 * P + g2 ** 2 * P + 2.0 * np.sqrt((1.0 - betas) * g2 ** 2 * g3 ** 2) * P) / noise)
    return np.minimum(broadcast, coherent)


def cutset_df_single(g1: float, g2: float, g3: float, P: float, noise: float, beta: float) -> float:
    """Single-relay cut-set bound at correlation 1-β (gain names as in rate_df_single)"""
    if not 0.0 <= beta <= 1.0:
        raise ConfigurationError(f"beta={beta} out of range [0, 1]")
    return float(_cutset_df_curve(g1, g2, g3, P, noise, np.array([beta]))[0])


def cutset_df_single_opt(g1: float, g2: float, g3: float, P: float, noise: float,
                         step: float = 1e-3) -> Tuple[float, float]:
    """Grid-maximized single-relay cut-set bound and its β"""
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    curve = _cutset_df_curve(g1, g2, g3, P, noise, grid)
    idx = int(np.argmax(curve))
    return float(curve[idx]), float(grid[idx])


def describe_cuts(terms: Dict[FrozenSet[int], float], prefix: str = "cut") -> Dict[str, float]:
    """Cut values keyed by printable labels"""
    return {f"{prefix}[S={format_set(S)}]": value for S, value in terms.items()}
