"""Rayleigh-fading single-relay channel: per-draw rates and outage curves.

Gains follow the composite single-relay layout: g1 source-destination, g2
source-relay (known at the relay), g3 relay-destination. Rates use the
complex convention C(x) = log2(1 + x).
"""

import logging
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..composite import channel
from ..composite.outage import (
    eps_capacity_bounds,
    error_lower_bound,
    outage_cf,
    outage_df,
    outage_scs_relay,
)
from ..composite.sampler import ThetaSample, draw_theta
from ..exceptions import ConfigurationError
from ..helper.log import progress_enabled
from ..pydantic_models import CompositeModel, DecisionRegion, FadingDraw, MonteCarloConfig, SchemeParams

log = logging.getLogger(__name__)

ERROR_VS_RATE_COLUMNS = ["r", "lower_bound", "DF", "CF_partial", "CF_full", "SCS_partial", "SCS_full"]
EPSCAP_COLUMNS = ["snr_dB", "lower_SCS", "upper_cutset"]


def _check_powers(P: float, P1: float) -> None:
    if not (P > 0 and P1 > 0):
        raise ConfigurationError(f"powers must be positive, got P={P}, P1={P1}")


def i_df_fading(draw: FadingDraw, beta: float, P: float, P1: float) -> float:
    """DF rate of one draw"""
    _check_powers(P, P1)
    return float(channel.df_rate(draw.g1, draw.g2, draw.g3, beta, P, P1))


def i_cf_prime(draw: FadingDraw, P: float, P1: float, nhat: float) -> float:
    """CF rate of one draw without the interference branch"""
    _check_powers(P, P1)
    return float(channel.cf_prime_rate(draw.g1, draw.g2, draw.g3, P, P1, nhat))


def i_cf_fading(draw: FadingDraw, P: float, P1: float, nhat: float) -> float:
    """CF rate of one draw, best of compress-forward and treating the relay as noise"""
    _check_powers(P, P1)
    return float(channel.cf_rate(draw.g1, draw.g2, draw.g3, P, P1, nhat))


def nhat_opt(draw: FadingDraw, P: float, P1: float) -> float:
    """Compression variance equalizing both CF branches; +inf when g3 = 0"""
    _check_powers(P, P1)
    return float(channel.nhat_opt(draw.g1, draw.g2, draw.g3, P, P1))


def cutset_fading(draw: FadingDraw, P: float, P1: float) -> float:
    """Cut-set bound of one draw, maximized over the β grid"""
    _check_powers(P, P1)
    return float(channel.cutset_rate(draw.g1, draw.g2, draw.g3, P, P1)[0])


def rayleigh_model(P: float = 1.0, P1: float = 1.0) -> CompositeModel:
    """Unit-variance complex Gaussian gains"""
    return CompositeModel(layout="single_relay", n_relays=1, family="complex_gaussian",
                          variance=1.0, power=[P, P1])


def optimize_beta(r: float, model: CompositeModel, sample: ThetaSample, step: float = 0.01) -> float:
    """β on a grid minimizing the DF outage at rate r (smallest β on ties)"""
    g1, g2, g3 = channel.split_single(sample.theta)
    P, P1 = model.power
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    outages = [np.count_nonzero(r > channel.df_rate(g1, g2, g3, beta, P, P1)) for beta in grid]
    return float(grid[int(np.argmin(outages))])


def curve_error_vs_rate(r_grid: Sequence[float], config: MonteCarloConfig, P: float = 1.0,
                        P1: float = 1.0, beta: Optional[float] = None,
                        sample: Optional[ThetaSample] = None) -> pd.DataFrame:
    """Error probability bounds vs rate, every scheme on the same draws.

    β is chosen once against the DF outage at the middle of the rate grid.
    """
    r_grid = [float(r) for r in r_grid]
    if not r_grid:
        raise ConfigurationError("rate grid is empty")
    model = rayleigh_model(P, P1)
    sample = sample if sample is not None else draw_theta(model, config)
    if beta is None:
        beta = optimize_beta(0.5 * (min(r_grid) + max(r_grid)), model, sample)
    log.info("error vs rate: %d draws, beta=%.2f", len(sample), beta)

    rows = []
    for r in tqdm(r_grid, desc="error vs rate", disable=not progress_enabled()):
        region = DecisionRegion(family="analytic_DF_region", parameters={"beta": beta, "power": P})
        rows.append({
            "r": r,
            "lower_bound": error_lower_bound(r, model, config, sample).p_hat,
            "DF": outage_df(r, model, beta, config, sample).p_hat,
            "CF_partial": outage_cf(r, model, config, "fixed", sample).p_hat,
            "CF_full": outage_cf(r, model, config, "optimal", sample).p_hat,
            "SCS_partial": outage_scs_relay(r, model, beta, region, config, "partial", sample=sample).p_hat,
            "SCS_full": outage_scs_relay(r, model, beta, region, config, "full", sample=sample).p_hat,
        })
    return pd.DataFrame(rows, columns=ERROR_VS_RATE_COLUMNS)


def _df_eps_lower(rates: np.ndarray, eps: float, guard: float) -> float:
    """Largest sampled rate whose guarded DF outage stays within ε"""
    ordered = np.sort(rates)
    n = ordered.size
    # outage at r = ordered[i] is i/n (strict inequality)
    p_hat = np.arange(n) / n
    ok = p_hat + guard * np.sqrt(p_hat * (1.0 - p_hat) / n) <= eps
    return float(ordered[ok][-1]) if np.any(ok) else 0.0


def curve_epscap_vs_snr(eps: float, snr_grid: Sequence[float], config: MonteCarloConfig,
                        P1: float = 1.0, guard: float = 3.0, step: float = 0.01) -> pd.DataFrame:
    """ε-capacity bounds vs source SNR in dB (P = 10^(snr/10), unit noise)"""
    snr_grid = [float(s) for s in snr_grid]
    if not snr_grid:
        raise ConfigurationError("SNR grid is empty")
    rows = []
    for snr in tqdm(snr_grid, desc="eps-capacity", disable=not progress_enabled()):
        P = 10.0 ** (snr / 10.0)
        model = rayleigh_model(P, P1)
        sample = draw_theta(model, config)
        g1, g2, g3 = channel.split_single(sample.theta)
        grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
        scores = [_df_eps_lower(channel.df_rate(g1, g2, g3, b, P, P1), eps, guard) for b in grid]
        beta = float(grid[int(np.argmax(scores))])
        params = SchemeParams(scheme="scs_partial", beta=beta, guard=guard)
        lower, upper = eps_capacity_bounds(eps, model, params, config, sample)
        log.debug("snr %.1f dB: beta=%.2f lower=%.4f upper=%.4f", snr, beta, lower, upper)
        rows.append({"snr_dB": snr, "lower_SCS": lower, "upper_cutset": upper})
    return pd.DataFrame(rows, columns=EPSCAP_COLUMNS)
