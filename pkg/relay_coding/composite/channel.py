"""Per-draw rates of the single-relay fading channel (complex convention).

g1 is the source-destination gain, g2 source-relay and g3 relay-destination.
All functions broadcast over arrays of draws; C(x) = log2(1 + x).
"""

import numpy as np

from ..exceptions import ConfigurationError

BETA_STEP = 0.01


def cap(x):
    return np.log2(1.0 + x)


def _check_beta(beta):
    if np.any((np.asarray(beta) < 0.0) | (np.asarray(beta) > 1.0)):
        raise ConfigurationError(f"beta={beta} out of range [0, 1]")


def df_rate(g1, g2, g3, beta, P, P1):
    """min{C(β|g2|²P), C(|g1|²P + |g3|²P1 + 2√(β̄PP1) Re{g1 g3*})}"""
    _check_beta(beta)
    decode = cap(beta * np.abs(g2) ** 2 * P)
    cross = 2.0 * np.sqrt((1.0 - beta) * P * P1) * np.real(g1 * np.conj(g3))
    coherent = cap(np.abs(g1) ** 2 * P + np.abs(g3) ** 2 * P1 + cross)
    return np.minimum(decode, coherent)


def cf_prime_rate(g1, g2, g3, P, P1, nhat):
    """min{C(|g1|²P + |g2|²P/(N̂+1)), C(|g1|²P + |g3|²P1) - C(1/N̂)}"""
    nhat = np.asarray(nhat, dtype=float)
    if np.any(nhat <= 0):
        raise ConfigurationError("compression variance must be positive")
    with np.errstate(divide="ignore"):
        described = cap(np.abs(g1) ** 2 * P + np.abs(g2) ** 2 * P / (nhat + 1.0))
        forwarded = cap(np.abs(g1) ** 2 * P + np.abs(g3) ** 2 * P1) - cap(1.0 / nhat)
    return np.minimum(described, forwarded)


def direct_rate(g1, g3, P, P1):
    """Relay input treated as interference"""
    return cap(np.abs(g1) ** 2 * P / (np.abs(g3) ** 2 * P1 + 1.0))


def cf_rate(g1, g2, g3, P, P1, nhat):
    """CF rate with the interference branch"""
    return np.maximum(cf_prime_rate(g1, g2, g3, P, P1, nhat), direct_rate(g1, g3, P, P1))


def nhat_opt(g1, g2, g3, P, P1):
    """(P(|g1|²+|g2|²) + 1)/(|g3|²P1); +inf where g3 = 0"""
    num = P * (np.abs(g1) ** 2 + np.abs(g2) ** 2) + 1.0
    den = np.abs(g3) ** 2 * P1
    with np.errstate(divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def cutset_rate(g1, g2, g3, P, P1, step: float = BETA_STEP):
    """Cut-set bound maximized over the β grid with phase-aligned relay input"""
    g1, g2, g3 = (np.atleast_1d(np.asarray(g)) for g in (g1, g2, g3))
    betas = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)[:, None]
    a1, a2, a3 = np.abs(g1)[None, :], np.abs(g2)[None, :], np.abs(g3)[None, :]
    broadcast = cap(betas * (a1 ** 2 + a2 ** 2) * P)
    coherent = cap(a1 ** 2 * P + a3 ** 2 * P1 + 2.0 * np.sqrt((1.0 - betas) * P * P1) * a1 * a3)
    return np.max(np.minimum(broadcast, coherent), axis=0)


def split_single(theta: np.ndarray):
    """(g1, g2, g3) columns of single-relay draws"""
    return theta[:, 0], theta[:, 1], theta[:, 2]
