"""Outage probabilities, selective coding and ε-capacity bounds of composite models.

Every estimator accepts an optional ``sample``; passing the same sample to
several estimators evaluates them on common random numbers.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, ValidationError

from ..exceptions import BracketError, ConfigurationError
from ..network_model import build_input_covariance
from ..pydantic_models import (
    CompositeModel,
    CompressionConfig,
    DecisionRegion,
    GaussianNetwork,
    MonteCarloConfig,
    OutageEstimate,
    SchemeParams,
    StrategyAssignment,
)
from ..rate_engine import rate_mnnc, rate_noncoop
from .channel import cf_prime_rate, cf_rate, cutset_rate, df_rate, direct_rate, nhat_opt, split_single
from .regions import RegionContext, cf_masks, set_of, source_relay_gains
from .sampler import ThetaSample, draw_theta, pilot_sample, table_sample

log = logging.getLogger(__name__)

NHAT_GRID = np.geomspace(0.01, 100.0, 32)
BRACKET = (0.0, 20.0)
BISECT_ITERATIONS = 30
THRESHOLD_STEP = 0.01
NETWORK_THRESHOLD_STEP = 0.05
NETWORK_PILOT = 64
# cells per source-relay magnitude when θ_r is continuous
THETA_R_CELLS = 2


def _draws(model: CompositeModel, config: MonteCarloConfig, sample: Optional[ThetaSample]) -> ThetaSample:
    return sample if sample is not None else draw_theta(model, config)


def _single(model: CompositeModel, sample: ThetaSample):
    if model.layout != "single_relay":
        raise ConfigurationError("this estimator needs the single_relay layout")
    g1, g2, g3 = split_single(sample.theta)
    return g1, g2, g3, model.power[0], model.power[1]


def _estimate(r: float, rates: np.ndarray) -> OutageEstimate:
    return OutageEstimate.from_indicators(r > rates)


def _best_nhat(r: float, rates_for: Callable[[float], np.ndarray]) -> float:
    """Grid value with the fewest outages on the pilot draws (first on ties)"""
    outages = [np.count_nonzero(r > rates_for(nhat)) for nhat in NHAT_GRID]
    return float(NHAT_GRID[int(np.argmin(outages))])


# single relay


def outage_direct(r: float, model: CompositeModel, config: MonteCarloConfig,
                  sample: Optional[ThetaSample] = None) -> OutageEstimate:
    """Outage of direct transmission with the relay input as interference"""
    g1, _, g3, P, P1 = _single(model, _draws(model, config, sample))
    return _estimate(r, direct_rate(g1, g3, P, P1))


def outage_df(r: float, model: CompositeModel, beta: float, config: MonteCarloConfig,
              sample: Optional[ThetaSample] = None) -> OutageEstimate:
    """P[r > I_DF(θ)] with β fixed before sampling"""
    g1, g2, g3, P, P1 = _single(model, _draws(model, config, sample))
    return _estimate(r, df_rate(g1, g2, g3, beta, P, P1))


def _fixed_nhat(r: float, model: CompositeModel, config: MonteCarloConfig,
                masks_for: Optional[Callable[[ThetaSample], np.ndarray]] = None,
                beta: float = 1.0) -> float:
    pilot = pilot_sample(model, config)
    g1, g2, g3, P, P1 = _single(model, pilot)
    if masks_for is None:
        return _best_nhat(r, lambda nhat: cf_rate(g1, g2, g3, P, P1, nhat))
    use_cf = masks_for(pilot).astype(bool)
    df = df_rate(g1, g2, g3, beta, P, P1)
    return _best_nhat(r, lambda nhat: np.where(use_cf, cf_rate(g1, g2, g3, P, P1, nhat), df))


def outage_cf(r: float, model: CompositeModel, config: MonteCarloConfig,
              nhat_policy: Union[str, float] = "optimal",
              sample: Optional[ThetaSample] = None) -> OutageEstimate:
    """CF outage.

    ``"optimal"``: full CSI, N̂ optimal per draw, rate I'_CF.
    ``"fixed"`` or a number: partial CSI, one N̂ for all draws, rate I_CF
    (with the interference branch); ``"fixed"`` picks it on a pilot sample.
    """
    g1, g2, g3, P, P1 = _single(model, _draws(model, config, sample))
    if nhat_policy == "optimal":
        return _estimate(r, cf_prime_rate(g1, g2, g3, P, P1, nhat_opt(g1, g2, g3, P, P1)))
    if nhat_policy == "fixed":
        nhat = _fixed_nhat(r, model, config)
    else:
        nhat = float(nhat_policy)
    return _estimate(r, cf_rate(g1, g2, g3, P, P1, nhat))


def outage_scs_relay(r: float, model: CompositeModel, beta: float, region: DecisionRegion,
                     config: MonteCarloConfig, csi: str = "partial", nhat: Optional[float] = None,
                     sample: Optional[ThetaSample] = None) -> OutageEstimate:
    """Selective coding: DF on the region's DF cell, CF elsewhere"""
    if csi not in ("partial", "full"):
        raise ConfigurationError(f"csi must be 'partial' or 'full', got {csi!r}")
    sample = _draws(model, config, sample)
    g1, g2, g3, P, P1 = _single(model, sample)

    def masks_for(draws: ThetaSample) -> np.ndarray:
        return cf_masks(region, RegionContext.build(model, draws, r, beta)) & 1

    use_cf = masks_for(sample).astype(bool)
    df = df_rate(g1, g2, g3, beta, P, P1)
    if csi == "full":
        cf = cf_prime_rate(g1, g2, g3, P, P1, nhat_opt(g1, g2, g3, P, P1))
    else:
        if nhat is None:
            nhat = _fixed_nhat(r, model, config, masks_for, beta)
        cf = cf_rate(g1, g2, g3, P, P1, nhat)
    return _estimate(r, np.where(use_cf, cf, df))


# networks


def single_as_network(theta: np.ndarray) -> np.ndarray:
    """Map single-relay draws (g1, g2, g3) onto flattened 2x2 gain matrices"""
    g1, g2, g3 = split_single(theta)
    zero = np.zeros_like(g1)
    return np.stack([g2, zero, g1, g3], axis=1)


def network_from_theta(model: CompositeModel, row: np.ndarray) -> GaussianNetwork:
    size = model.n_relays + 1
    gains = np.asarray(row).reshape(size, size)
    try:
        return GaussianNetwork(
            n_relays=model.n_relays,
            gains=gains.real.tolist(),
            gains_imag=gains.imag.tolist(),
            power=list(model.power),
        )
    except ValidationError as err:
        raise ConfigurationError.from_validation_error(err, prefix="model.theta") from err


def _network_theta(model: CompositeModel, sample: ThetaSample) -> np.ndarray:
    if model.layout == "single_relay":
        return single_as_network(sample.theta)
    return sample.theta


# per mask: (compression grid, DF relay β grid); the first β is the baseline
Choice = Tuple[Tuple[float, ...], Tuple[float, ...]]


def _draw_rates(model: CompositeModel, row: np.ndarray, params: SchemeParams,
                choices: Sequence[Choice]) -> np.ndarray:
    """Rate of every CF mask; N̂ is searched first, then the relay β at that N̂"""
    network = network_from_theta(model, row)
    n = model.n_relays
    rates = np.empty(1 << n)
    for mask, (nhats, betas) in enumerate(choices):
        cf_set = set_of(mask)
        strategy = StrategyAssignment(n_relays=n, cf_set=cf_set)

        def rate(nhat, beta):
            betas_of = {0: params.beta}
            betas_of.update({k: beta for k in strategy.df_set})
            inputs = build_input_covariance(network, strategy, betas_of)
            compression = CompressionConfig.uniform(n, nhat)
            if params.variant == "noncoop":
                return rate_noncoop(network, inputs, compression, cf_set).rate
            return rate_mnnc(network, inputs, compression, strategy).rate

        best, best_nhat = -math.inf, nhats[0]
        for nhat in (nhats if cf_set else nhats[:1]):
            value = rate(nhat, betas[0])
            if value > best:
                best, best_nhat = value, nhat
        for beta in (betas[1:] if strategy.df_set else ()):
            best = max(best, rate(best_nhat, beta))
        rates[mask] = best
    return rates


def _rate_chunk(model, rows, params, choices) -> np.ndarray:
    return np.array([_draw_rates(model, row, params, choices) for row in rows]).reshape(len(rows), -1)


def _choice_table(model: CompositeModel, sample: ThetaSample, params: SchemeParams,
                  choices: Sequence[Choice], config: Optional[MonteCarloConfig] = None) -> np.ndarray:
    theta = _network_theta(model, sample)
    chunk = config.chunk if config is not None else theta.shape[0] or 1
    threads = config.threads if config is not None else 1
    pieces = [theta[start:start + chunk] for start in range(0, theta.shape[0], chunk)]
    if threads > 1 and len(pieces) > 1:
        parts = Parallel(n_jobs=threads)(delayed(_rate_chunk)(model, rows, params, choices) for rows in pieces)
    else:
        parts = [_rate_chunk(model, rows, params, choices) for rows in pieces]
    if not parts:
        return np.zeros((0, 1 << model.n_relays))
    return np.concatenate(parts)


def network_rate_table(model: CompositeModel, sample: ThetaSample, params: SchemeParams,
                       nhats: Sequence[float], config: Optional[MonteCarloConfig] = None,
                       relay_betas: Optional[Sequence[float]] = None) -> np.ndarray:
    """Per-draw MNNC rate for every CF mask, shape (draws, 2^N).

    With several compression variances or relay β values each entry is the
    best of a coordinate search over them (N̂ first).
    """
    nhats = tuple(float(v) for v in nhats)
    betas = tuple(float(v) for v in relay_betas) if relay_betas is not None else (params.relay_beta,)
    return _choice_table(model, sample, params, [(nhats, betas)] * (1 << model.n_relays), config)


def _table_outage(r: float, table: np.ndarray, masks: np.ndarray) -> OutageEstimate:
    return _estimate(r, table[np.arange(table.shape[0]), masks])


def _nhat_grid(params: SchemeParams) -> np.ndarray:
    return np.geomspace(0.01, 100.0, params.nhat_grid_points)


def _beta_grid(params: SchemeParams) -> np.ndarray:
    return np.linspace(0.0, 1.0, params.beta_grid_points)


class RelayParameterPolicy(BaseModel):
    """Relay-side parameters chosen per θ_r class and CF mask.

    Finite tables classify draws by their exact θ_r; continuous families by
    the cell of each source-relay magnitude among pilot quantiles.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    edges: Optional[np.ndarray] = None
    table_classes: Optional[np.ndarray] = None
    nhat: np.ndarray
    relay_beta: np.ndarray

    def classes(self, model: CompositeModel, sample: ThetaSample) -> np.ndarray:
        if self.table_classes is not None:
            return self.table_classes[sample.table_idx]
        gains = source_relay_gains(model, sample)
        classes = np.zeros(len(sample), dtype=np.int64)
        for k in range(gains.shape[1]):
            cell = np.searchsorted(self.edges[:, k], gains[:, k], side="right")
            classes = classes * THETA_R_CELLS + cell
        return classes

    def choices(self, cls: int) -> List[Choice]:
        return [((float(nhat),), (float(beta),)) for nhat, beta in zip(self.nhat[cls], self.relay_beta[cls])]


def _table_classes(model: CompositeModel) -> np.ndarray:
    keys = {}
    return np.array([keys.setdefault(tuple(entry.theta[i] for i in model.split_r), len(keys))
                     for entry in model.table])


def _class_fails(r: float, table: np.ndarray, weights: np.ndarray, classes: np.ndarray,
                 n_classes: int) -> np.ndarray:
    """Weighted outage per class and mask; the extra last row pools every draw"""
    fails = (r > table) * weights[:, None]
    acc = np.zeros((n_classes + 1, table.shape[1]))
    np.add.at(acc, classes, fails)
    acc[-1] = fails.sum(axis=0)
    return acc


def select_relay_parameters(r: float, model: CompositeModel, params: SchemeParams,
                            config: MonteCarloConfig) -> RelayParameterPolicy:
    """Grid choice of N̂ and the DF relay β per θ_r class and CF mask (partial CSI).

    Each class keeps the N̂ with the fewest outages at ``params.relay_beta``,
    then moves to a β of the linear grid only on a strict improvement.
    Finite tables are scored exactly with their probabilities, other
    families on an independent pilot stream. A class without selection
    draws takes the N̂ chosen on all of them and the configured β.
    """
    if model.family == "finite_table":
        sample, weights = table_sample(model)
        table_classes = _table_classes(model)
        n_classes = int(table_classes.max()) + 1
        policy = RelayParameterPolicy(table_classes=table_classes, nhat=np.zeros((0, 0)),
                                      relay_beta=np.zeros((0, 0)))
    else:
        sample = pilot_sample(model, config, NETWORK_PILOT)
        weights = np.ones(len(sample))
        levels = np.arange(1, THETA_R_CELLS) / THETA_R_CELLS
        edges = np.quantile(source_relay_gains(model, sample), levels, axis=0)
        n_classes = THETA_R_CELLS ** model.n_relays
        policy = RelayParameterPolicy(edges=edges.reshape(THETA_R_CELLS - 1, model.n_relays),
                                      nhat=np.zeros((0, 0)), relay_beta=np.zeros((0, 0)))
    classes = policy.classes(model, sample)
    seen = np.bincount(classes, minlength=n_classes) > 0

    nhat_grid = _nhat_grid(params)
    by_nhat = np.stack([
        _class_fails(r, network_rate_table(model, sample, params, [value]), weights, classes, n_classes)
        for value in nhat_grid
    ])
    nhat = nhat_grid[np.argmin(by_nhat, axis=0)]
    nhat[:-1][~seen] = nhat[-1]
    best = np.min(by_nhat, axis=0)[:-1]
    nhat = nhat[:-1]
    relay_beta = np.full_like(nhat, params.relay_beta)

    for beta in _beta_grid(params):
        table = np.zeros((len(sample), 1 << model.n_relays))
        for cls in np.flatnonzero(seen):
            rows = np.flatnonzero(classes == cls)
            choices = [((float(value),), (float(beta),)) for value in nhat[cls]]
            table[rows] = _choice_table(model, sample.subset(rows), params, choices)
        fails = _class_fails(r, table, weights, classes, n_classes)[:-1]
        better = (fails < best) & seen[:, None]
        best = np.where(better, fails, best)
        relay_beta = np.where(better, beta, relay_beta)

    log.debug("relay parameters for %d θ_r classes at r=%.4g", n_classes, r)
    return policy.model_copy(update={"nhat": nhat, "relay_beta": relay_beta})


def _partial_table(r: float, model: CompositeModel, sample: ThetaSample, params: SchemeParams,
                   config: MonteCarloConfig) -> np.ndarray:
    policy = select_relay_parameters(r, model, params, config)
    classes = policy.classes(model, sample)
    table = np.zeros((len(sample), 1 << model.n_relays))
    for cls in np.unique(classes):
        rows = np.flatnonzero(classes == cls)
        table[rows] = _choice_table(model, sample.subset(rows), params, policy.choices(int(cls)), config)
    return table


def _network_table(r: float, model: CompositeModel, sample: ThetaSample, params: SchemeParams,
                   config: MonteCarloConfig, csi: str) -> np.ndarray:
    if csi == "full":
        return network_rate_table(model, sample, params, _nhat_grid(params), config,
                                  relay_betas=[params.relay_beta, *_beta_grid(params)])
    if params.nhat is not None:
        return network_rate_table(model, sample, params, [params.nhat], config)
    return _partial_table(r, model, sample, params, config)


def outage_scs_network(r: float, model: CompositeModel, strategy_params: SchemeParams,
                       partition: DecisionRegion, config: MonteCarloConfig,
                       variant: Optional[str] = None, csi: str = "partial",
                       sample: Optional[ThetaSample] = None,
                       table: Optional[np.ndarray] = None) -> OutageEstimate:
    """Selective MNNC outage: each draw uses the CF set its partition cell names.

    Partial CSI takes N̂ and the relay β from ``select_relay_parameters``
    unless ``nhat`` is fixed; full CSI searches both grids per draw.
    ``table`` reuses a precomputed ``network_rate_table`` of the same sample.
    """
    if csi not in ("partial", "full"):
        raise ConfigurationError(f"csi must be 'partial' or 'full', got {csi!r}")
    if variant is not None:
        strategy_params = strategy_params.model_copy(update={"variant": variant})
    sample = _draws(model, config, sample)
    masks = cf_masks(partition, RegionContext.build(model, sample, r, strategy_params.beta))
    if table is None:
        table = _network_table(r, model, sample, strategy_params, config, csi)
    return _table_outage(r, table, masks)


# decision regions


def _best_threshold_single(r: float, gains: np.ndarray, table: np.ndarray, step: float) -> float:
    """Brute-force |g| threshold: DF at or above it, CF below"""
    order = np.argsort(gains, kind="stable")
    sorted_gains = gains[order]
    df_fail = (r > table[order, 0]).astype(int)
    cf_fail = (r > table[order, 1]).astype(int)
    cum_cf = np.concatenate([[0], np.cumsum(cf_fail)])
    cum_df = np.concatenate([[0], np.cumsum(df_fail)])
    top = float(sorted_gains[-1]) if sorted_gains.size else 0.0
    grid = np.arange(0.0, top + 2 * step, step)
    below = np.searchsorted(sorted_gains, grid, side="left")
    outages = cum_cf[below] + (cum_df[-1] - cum_df[below])
    return float(grid[int(np.argmin(outages))])


def _threshold_region(thresholds: Sequence[Optional[float]]) -> DecisionRegion:
    return DecisionRegion(family="threshold_on_magnitude", parameters={"thresholds": list(thresholds)})


def _coordinate_thresholds(r: float, model: CompositeModel, sample: ThetaSample,
                           table: np.ndarray, params: SchemeParams, step: float,
                           max_sweeps: int = 20) -> DecisionRegion:
    n = model.n_relays
    ctx = RegionContext.build(model, sample, r, params.beta)

    def outage(thresholds):
        masks = cf_masks(_threshold_region(thresholds), ctx)
        return np.count_nonzero(r > table[np.arange(table.shape[0]), masks])

    # constant partitions: threshold 0 always decodes, None always compresses
    best, best_count = None, None
    for mask in range(1 << n):
        thresholds = [None if mask >> k & 1 else 0.0 for k in range(n)]
        count = outage(thresholds)
        if best is None or count < best_count:
            best, best_count = thresholds, count
    for _ in range(max_sweeps):
        improved = False
        for k in range(n):
            top = float(ctx.source_gains[:, k].max()) if table.shape[0] else 0.0
            for level in list(np.arange(0.0, top + 2 * step, step)) + [None]:
                trial = list(best)
                trial[k] = None if level is None else float(level)
                count = outage(trial)
                if count < best_count:
                    best, best_count, improved = trial, count, True
        if not improved:
            break
    return _threshold_region(best)


def _indexed_region(r: float, model: CompositeModel, sample: ThetaSample, table: np.ndarray) -> DecisionRegion:
    if sample.table_idx is None:
        raise ConfigurationError("indexed_partition optimization needs a finite_table model")
    index = {}
    for pos in np.unique(sample.table_idx):
        rows = sample.table_idx == pos
        fails = [np.count_nonzero(r > table[rows, mask]) for mask in range(table.shape[1])]
        index[str(int(pos))] = set_of(int(np.argmin(fails)))
    return DecisionRegion(family="indexed_partition", index=index)


def _single_table(r: float, model: CompositeModel, sample: ThetaSample, params: SchemeParams,
                  config: MonteCarloConfig, csi: str) -> np.ndarray:
    g1, g2, g3, P, P1 = _single(model, sample)
    df = df_rate(g1, g2, g3, params.beta, P, P1)
    if csi == "full":
        cf = cf_prime_rate(g1, g2, g3, P, P1, nhat_opt(g1, g2, g3, P, P1))
    else:
        nhat = params.nhat if params.nhat is not None else _fixed_nhat(r, model, config)
        cf = cf_rate(g1, g2, g3, P, P1, nhat)
    return np.stack([df, cf], axis=1)


def optimize_decision_region(r: float, model: CompositeModel, family: str, config: MonteCarloConfig,
                             params: Optional[SchemeParams] = None, csi: str = "partial",
                             sample: Optional[ThetaSample] = None) -> DecisionRegion:
    """Decision region of ``family`` minimizing the estimated outage at rate r.

    The analytic family is closed form; thresholds are searched on the draws
    (single relay: exhaustive 0.01 grid; networks: coordinate descent on a
    0.05 grid from the best constant partition); indexed partitions pick the
    best CF set per table entry.
    """
    params = params or SchemeParams()
    if family == "analytic_DF_region":
        return DecisionRegion(family=family, parameters={"beta": params.beta, "power": model.power[0]})
    if family not in ("threshold_on_magnitude", "indexed_partition"):
        raise ConfigurationError(f"unsupported decision region family {family!r}")
    sample = _draws(model, config, sample)
    if model.layout == "single_relay":
        table = _single_table(r, model, sample, params, config, csi)
    else:
        table = _network_table(r, model, sample, params, config, csi)
    if family == "indexed_partition":
        return _indexed_region(r, model, sample, table)
    if model.n_relays == 1:
        gains = RegionContext.build(model, sample, r, params.beta).source_gains[:, 0]
        return _threshold_region([_best_threshold_single(r, gains, table, THRESHOLD_STEP)])
    return _coordinate_thresholds(r, model, sample, table, params, NETWORK_THRESHOLD_STEP)


# lower bound and ε-capacity


def network_cutset(model: CompositeModel, sample: ThetaSample) -> np.ndarray:
    """Per-draw relaxed cut-set min_S log2 det(I + (Σ_{{0}∪S} P_i) G_S G_Sᴴ)"""
    theta = _network_theta(model, sample)
    n = model.n_relays
    size = n + 1
    gains = theta.reshape(-1, size, size)
    best = np.full(theta.shape[0], np.inf)
    for mask in range(1 << n):
        S = sorted(set_of(mask))
        receivers = [k - 1 for k in range(1, n + 1) if k not in S] + [n]
        senders = [0] + S
        block = gains[:, receivers][:, :, senders]
        total = sum(model.power[i] for i in senders)
        mat = np.eye(len(receivers)) + total * block @ np.conj(np.swapaxes(block, 1, 2))
        _, logdet = np.linalg.slogdet(mat)
        best = np.minimum(best, logdet / math.log(2.0))
    return best


def error_lower_bound(r: float, model: CompositeModel, config: MonteCarloConfig,
                      sample: Optional[ThetaSample] = None) -> OutageEstimate:
    """P[r > C_CB(θ)], a lower bound on the asymptotic error probability"""
    sample = _draws(model, config, sample)
    if model.layout == "single_relay":
        g1, g2, g3, P, P1 = _single(model, sample)
        return _estimate(r, cutset_rate(g1, g2, g3, P, P1))
    return _estimate(r, network_cutset(model, sample))


def scheme_outage(r: float, model: CompositeModel, params: SchemeParams, config: MonteCarloConfig,
                  sample: Optional[ThetaSample] = None) -> OutageEstimate:
    """Outage of the scheme named in ``params``"""
    sample = _draws(model, config, sample)
    scheme = params.scheme
    if scheme == "best":
        estimates = [scheme_outage(r, model, params.model_copy(update={"scheme": name}), config, sample)
                     for name in ("df", "cf_partial", "cf_full", "scs_partial", "scs_full")]
        return min(estimates, key=lambda est: est.p_hat)
    csi = "full" if scheme.endswith("_full") else "partial"
    if model.layout == "single_relay":
        if scheme == "df":
            return outage_df(r, model, params.beta, config, sample)
        if scheme == "direct":
            return outage_direct(r, model, config, sample)
        if scheme == "cf_partial":
            return outage_cf(r, model, config, params.nhat or "fixed", sample)
        if scheme == "cf_full":
            return outage_cf(r, model, config, "optimal", sample)
        region = params.region or optimize_decision_region(r, model, "analytic_DF_region", config, params)
        return outage_scs_relay(r, model, params.beta, region, config, csi, params.nhat, sample)
    everyone = frozenset(range(1, model.n_relays + 1))
    if scheme == "direct":
        raise ConfigurationError("the direct scheme is defined for the single_relay layout")
    if scheme == "df":
        partition = DecisionRegion.constant(frozenset())
    elif scheme.startswith("cf"):
        partition = DecisionRegion.constant(everyone)
    else:
        partition = params.region or optimize_decision_region(r, model, "analytic_DF_region", config, params)
    return outage_scs_network(r, model, params, partition, config, csi=csi, sample=sample)


def _guarded(estimate: OutageEstimate, guard: float, sign: float) -> float:
    return estimate.p_hat + sign * guard * estimate.std_err


def eps_capacity_bounds(eps: float, model: CompositeModel, scheme_params: SchemeParams,
                        config: MonteCarloConfig, sample: Optional[ThetaSample] = None,
                        bracket: Tuple[float, float] = BRACKET,
                        iterations: int = BISECT_ITERATIONS) -> Tuple[float, float]:
    """Bounds on the ε-capacity by bisection on r.

    lower = sup{r : outage(r) + kσ <= ε} for the chosen scheme,
    upper = inf{r : P[r > C_CB] - kσ > ε}.
    """
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eps must lie in (0, 1), got {eps}")
    sample = _draws(model, config, sample)
    guard = scheme_params.guard
    low, high = bracket

    def achievable(r):
        return _guarded(scheme_outage(r, model, scheme_params, config, sample), guard, 1.0) <= eps

    def violated(r):
        return _guarded(error_lower_bound(r, model, config, sample), guard, -1.0) > eps

    if not achievable(low):
        raise BracketError(f"outage exceeds eps={eps} already at r={low}")
    if achievable(high):
        log.warning("lower bound reached the bracket top %.3g bits", high)
        lower = high
    else:
        lo, hi = low, high
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if achievable(mid):
                lo = mid
            else:
                hi = mid
        lower = lo

    if violated(low):
        raise BracketError(f"cut-set violation exceeds eps={eps} already at r={low}")
    if not violated(high):
        log.warning("upper bound reached the bracket top %.3g bits", high)
        upper = high
    else:
        lo, hi = low, high
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if violated(mid):
                hi = mid
            else:
                lo = mid
        upper = hi
    log.info("eps=%.3g scheme=%s: %.6f <= C_eps <= %.6f", eps, scheme_params.scheme, lower, upper)
    return lower, upper
