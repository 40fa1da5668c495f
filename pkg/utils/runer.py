import logging
from typing import Dict

import pandas as pd
from tqdm import tqdm

from relay_coding.composite.outage import eps_capacity_bounds, error_lower_bound, scheme_outage
from relay_coding.composite.sampler import draw_theta
from relay_coding.config import RunConfig
from relay_coding.fading import curve_epscap_vs_snr, curve_error_vs_rate
from relay_coding.gap_analysis import gap_empirical
from relay_coding.helper.log import progress_enabled
from relay_coding.network_model import build_input_covariance, independent_inputs
from relay_coding.pydantic_models import format_set
from relay_coding.rate_engine import (
    rate_fd_nnc,
    rate_lmnnc,
    rate_mnnc,
    rate_mnnc_search,
    rate_nnc,
    rate_noncoop,
    rate_two_relay,
)

log = logging.getLogger(__name__)

RATE_COLUMNS = ["rate_bits", "binding_subset", "V", "T"]
GAP_COLUMNS = ["N", "V", "delta1", "delta2", "empirical", "nnc_constant"]
OUTAGE_COLUMNS = ["r", "scheme", "p_hat", "std_err", "samples"]
EPSCAP_COLUMNS = ["eps", "scheme", "lower_bits", "upper_bits"]


def _rate_result(config: RunConfig, power=None, nhat=None, beta=None):
    """单点速率计算"""
    network = config.network.build(power=power)
    spec = config.strategy
    n = network.n_relays
    strategy = spec.assignment(n)
    compression = config.compression(n, nhat)
    betas = spec.betas
    if beta is not None:
        betas = [beta] * (1 + len(strategy.df_set))

    if spec.scheme == "nnc":
        return rate_nnc(network, independent_inputs(network), compression)
    if spec.scheme == "fd_nnc":
        return rate_fd_nnc(network, independent_inputs(network), compression)
    if spec.scheme == "lmnnc":
        return rate_lmnnc(network, betas or [1.0] * (1 + len(strategy.df_set)), compression,
                          strategy.cf_set, layering=spec.layering, max_layers=spec.max_layers)
    if betas is None:
        if spec.scheme != "mnnc":
            betas = [1.0] * (1 + len(strategy.df_set))
        else:
            result, _ = rate_mnnc_search(network, compression, strategy, step=config.search.step,
                                         restarts=config.search.restarts, seed=config.mc.seed)
            return result
    inputs = build_input_covariance(network, strategy, betas)
    if spec.scheme == "noncoop":
        return rate_noncoop(network, inputs, compression, strategy.cf_set)
    if spec.scheme == "two_relay":
        return rate_two_relay(network, inputs, compression)
    return rate_mnnc(network, inputs, compression, strategy)


def run_rate(config: RunConfig) -> pd.DataFrame:
    """rate 命令: 单点或沿 sweep 网格计算速率"""
    sweep = config.sweep
    points = [None] if sweep is None else sweep.grid
    rows = []
    for value in tqdm(points, desc="rate", disable=not progress_enabled() or sweep is None):
        kwargs = {} if sweep is None else {sweep.parameter: value}
        result = _rate_result(config, **kwargs)
        row = {} if sweep is None else {sweep.parameter: value}
        row.update({
            "rate_bits": result.rate,
            "binding_subset": format_set(result.binding_subset),
            "V": format_set(result.chosen_V),
            "T": format_set(result.chosen_T) if result.chosen_T is not None else "",
        })
        rows.append(row)
        log.info("rate point %s -> %.6f bits via %s", value, result.rate, result.binding_constraint)
    columns = ([sweep.parameter] if sweep is not None else []) + RATE_COLUMNS
    return pd.DataFrame(rows, columns=columns)


def run_gap(config: RunConfig) -> pd.DataFrame:
    """gap 命令"""
    network = config.network.build()
    cf_set = frozenset(config.strategy.cf_set)
    report = gap_empirical(network, None, config.compression(network.n_relays), cf_set,
                           step=config.search.step, restarts=config.search.restarts,
                           seed=config.mc.seed)
    log.info("gap: empirical %.6f, delta1 %.6f, delta2 %.6f, stated constant %.2f",
             report.empirical_gap, report.delta1, report.delta2, report.stated_constant)
    return pd.DataFrame([{
        "N": network.n_relays,
        "V": format_set(cf_set),
        "delta1": report.delta1,
        "delta2": report.delta2,
        "empirical": report.empirical_gap,
        "nnc_constant": report.nnc_constant,
    }], columns=GAP_COLUMNS)


def run_outage(config: RunConfig) -> pd.DataFrame:
    """outage 命令: 所有方案使用相同的随机样本"""
    model, mc = config.model, config.mc
    sample = draw_theta(model, mc)
    rows = []
    for r in tqdm(config.outage.rates, desc="outage", disable=not progress_enabled()):
        if config.outage.lower_bound:
            est = error_lower_bound(r, model, mc, sample)
            rows.append({"r": r, "scheme": "lower_bound", "p_hat": est.p_hat,
                         "std_err": est.std_err, "samples": est.samples})
        for name in config.outage.schemes:
            params = config.scheme.model_copy(update={"scheme": name})
            est = scheme_outage(r, model, params, mc, sample)
            rows.append({"r": r, "scheme": name, "p_hat": est.p_hat,
                         "std_err": est.std_err, "samples": est.samples})
    return pd.DataFrame(rows, columns=OUTAGE_COLUMNS)


def run_epscap(config: RunConfig) -> pd.DataFrame:
    """epscap 命令"""
    model, mc = config.model, config.mc
    sample = draw_theta(model, mc)
    rows = []
    for eps in config.epscap.eps:
        for name in config.epscap.schemes:
            params = config.scheme.model_copy(update={"scheme": name})
            lower, upper = eps_capacity_bounds(eps, model, params, mc, sample)
            rows.append({"eps": eps, "scheme": name, "lower_bits": lower, "upper_bits": upper})
    return pd.DataFrame(rows, columns=EPSCAP_COLUMNS)


def run_curves(config: RunConfig) -> Dict[str, pd.DataFrame]:
    """curves 命令: 两张曲线表"""
    spec, mc = config.curves, config.mc
    return {
        "error_vs_rate": curve_error_vs_rate(spec.r_grid, mc, P=spec.P, P1=spec.P1),
        "epscap_vs_snr": curve_epscap_vs_snr(spec.eps, spec.snr_grid, mc, P1=spec.P1),
    }


RUNNERS = {
    "rate": run_rate,
    "gap": run_gap,
    "outage": run_outage,
    "epscap": run_epscap,
    "curves": run_curves,
}


def run_command(config: RunConfig):
    """Run the command of ``config``; ``curves`` returns a dict of tables"""
    return RUNNERS[config.command](config)
