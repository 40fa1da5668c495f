"""Network validation, input parameterizations and set enumeration"""

import itertools
import logging
import math
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from .exceptions import ConfigurationError, EnumerationCapError
from .pydantic_models import GaussianNetwork, InputCovariance, StrategyAssignment

log = logging.getLogger(__name__)

# 2^N destination sets times 2^N cuts
MAX_ENUM_RELAYS = 10
MAX_LAYERED_RELAYS = 8

BetaSpec = Union[Sequence[float], Mapping[int, float]]


def _split_gain(value: Any, path: str) -> Tuple[float, float]:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigurationError(f"{path}: complex gains are [re, im] pairs", [(path, "expected [re, im]")])
        return float(value[0]), float(value[1])
    if isinstance(value, complex):
        return value.real, value.imag
    return float(value), 0.0


def validate_network(spec: Mapping[str, Any]) -> GaussianNetwork:
    """Validate a raw network record into a GaussianNetwork.

    Accepted keys: ``n_relays``, ``gains`` (real numbers or [re, im] pairs),
    ``power`` (one budget for all transmitters or one per transmitter) and
    ``noise`` (per-receiver variance, folded into the gains).
    """
    spec = dict(spec)
    unknown = set(spec) - {"n_relays", "gains", "power", "noise"}
    if unknown:
        raise ConfigurationError(
            f"unknown network fields {sorted(unknown)}",
            [(f"network.{key}", "extra fields not permitted") for key in sorted(unknown)],
        )
    gains = spec.get("gains")
    if gains is None:
        raise ConfigurationError("network.gains is required", [("network.gains", "field required")])
    n_relays = spec.get("n_relays", len(gains) - 1)
    size = int(n_relays) + 1

    real_rows, imag_rows, is_complex = [], [], False
    try:
        for j, row in enumerate(gains):
            real_row, imag_row = [], []
            for i, value in enumerate(row):
                re, im = _split_gain(value, f"network.gains[{j}][{i}]")
                is_complex = is_complex or isinstance(value, (list, tuple, complex))
                real_row.append(re)
                imag_row.append(im)
            real_rows.append(real_row)
            imag_rows.append(imag_row)
    except (TypeError, ValueError) as err:
        if isinstance(err, ConfigurationError):
            raise
        raise ConfigurationError(f"network.gains: {err}", [("network.gains", str(err))]) from err

    violations = []
    for relay in range(1, min(size, len(real_rows) + 1)):
        row = real_rows[relay - 1]
        if relay < len(row) and (row[relay] != 0.0 or imag_rows[relay - 1][relay] != 0.0):
            violations.append((f"network.gains[{relay - 1}][{relay}]",
                               f"self gain g_{relay}{relay} must be 0"))
    power = spec.get("power", 1.0)
    if not isinstance(power, (list, tuple)):
        power = [power] * size
    for idx, value in enumerate(power):
        if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
            violations.append((f"network.power[{idx}]", "power must be positive and finite"))
    noise = spec.get("noise", [1.0] * size)
    if len(noise) != size:
        violations.append(("network.noise", f"expected {size} receiver noise variances"))
    for idx, value in enumerate(noise):
        if not (value > 0 and math.isfinite(value)):
            violations.append((f"network.noise[{idx}]", "noise variance must be positive"))
    if violations:
        raise ConfigurationError(
            "; ".join(f"{path}: {msg}" for path, msg in violations), violations)

    scale = [1.0 / math.sqrt(v) for v in noise]
    real_rows = [[g * scale[j] for g in row] for j, row in enumerate(real_rows)]
    imag_rows = [[g * scale[j] for g in row] for j, row in enumerate(imag_rows)]
    try:
        return GaussianNetwork(
            n_relays=n_relays,
            gains=real_rows,
            gains_imag=imag_rows if is_complex else None,
            power=list(power),
        )
    except ValidationError as err:
        raise ConfigurationError.from_validation_error(err, prefix="network") from err


def _beta_map(strategy: StrategyAssignment, betas: BetaSpec) -> Dict[int, float]:
    """Resolve betas given as a sequence over (0, sorted DF relays) or a dict"""
    nodes = [0] + sorted(strategy.df_set)
    if isinstance(betas, Mapping):
        missing = [node for node in nodes if node not in betas]
        if missing:
            raise ConfigurationError(f"missing beta for nodes {missing}",
                                     [(f"betas[{node}]", "missing") for node in missing])
        resolved = {node: float(betas[node]) for node in nodes}
    else:
        betas = list(betas)
        if len(betas) != len(nodes):
            raise ConfigurationError(
                f"expected {len(nodes)} betas for nodes {nodes}, got {len(betas)}",
                [("betas", "length mismatch")])
        resolved = dict(zip(nodes, (float(b) for b in betas)))
    for node, beta in resolved.items():
        if not 0.0 <= beta <= 1.0:
            raise ConfigurationError(f"beta[{node}]={beta} out of range [0, 1]",
                                     [(f"betas[{node}]", "out of range")])
    return resolved


def build_input_covariance(network: GaussianNetwork,
                           strategy: StrategyAssignment,
                           betas: BetaSpec) -> InputCovariance:
    """Superposition inputs sharing one unit auxiliary V.

    X_i = sqrt(β_i P_i) X̃_i + sqrt((1-β_i) P_i) V for the source and DF relays;
    CF relays are independent with variance P_i.
    """
    beta = _beta_map(strategy, betas)
    size = network.n_relays + 1
    loading = np.zeros(size)
    private = np.array(network.power, dtype=float)
    for node, frac in beta.items():
        loading[node] = math.sqrt((1.0 - frac) * network.power[node])
        private[node] = frac * network.power[node]
    sigma = np.diag(private) + np.outer(loading, loading)
    return InputCovariance(
        sigma=sigma.tolist(),
        structure="superposition",
        betas=beta,
        aux_labels=["V"],
        aux_loading=[loading.tolist()],
    )


def build_layered_covariance(network: GaussianNetwork,
                             strategy: StrategyAssignment,
                             layering: Sequence[Iterable[int]],
                             betas: BetaSpec) -> InputCovariance:
    """Layered superposition over unit auxiliaries U1..UT.

    A node of layer t splits its common power equally over U1..Ut; the source
    spreads over every layer. One layer reproduces the single-V covariance.
    """
    beta = _beta_map(strategy, betas)
    layers = [frozenset(layer) for layer in layering]
    n_layers = len(layers)
    size = network.n_relays + 1
    loading = np.zeros((n_layers, size))
    private = np.array(network.power, dtype=float)
    if n_layers == 0:
        # nothing to superpose on
        return InputCovariance(sigma=np.diag(private).tolist(), structure="layered",
                               betas={0: 1.0})
    common0 = (1.0 - beta[0]) * network.power[0]
    loading[:, 0] = math.sqrt(common0 / n_layers)
    private[0] = beta[0] * network.power[0]
    for t, layer in enumerate(layers, start=1):
        for node in layer:
            common = (1.0 - beta[node]) * network.power[node]
            loading[:t, node] = math.sqrt(common / t)
            private[node] = beta[node] * network.power[node]
    sigma = np.diag(private) + loading.T @ loading
    return InputCovariance(
        sigma=sigma.tolist(),
        structure="layered",
        betas=beta,
        aux_labels=[f"U{t}" for t in range(1, n_layers + 1)],
        aux_loading=loading.tolist(),
    )


def independent_inputs(network: GaussianNetwork) -> InputCovariance:
    """Independent full-power inputs"""
    return InputCovariance(sigma=np.diag(np.asarray(network.power, dtype=float)).tolist())


def check_enumeration_cap(n_nodes: int, cap: int = MAX_ENUM_RELAYS) -> None:
    if n_nodes > cap:
        raise EnumerationCapError(
            f"{n_nodes} relays exceed the enumeration cap {cap}; raise enum_cap to override")


def enumerate_subsets(ground: Iterable[int],
                      lower: Iterable[int] = (),
                      upper: Optional[Iterable[int]] = None) -> List[frozenset]:
    """All S with lower ⊆ S ⊆ upper.

    Order is binary counting over the free elements with the smallest element
    as the least significant bit, e.g. ∅, {1}, {2}, {1,2}.
    """
    ground = frozenset(ground)
    lower = frozenset(lower)
    upper = ground if upper is None else frozenset(upper)
    if not (lower <= upper <= ground):
        raise ConfigurationError(
            f"enumerate_subsets needs lower ⊆ upper ⊆ ground, got {sorted(lower)}, {sorted(upper)}, {sorted(ground)}")
    free = sorted(upper - lower)
    subsets = []
    for mask in range(1 << len(free)):
        picked = [free[bit] for bit in range(len(free)) if mask >> bit & 1]
        subsets.append(lower | frozenset(picked))
    return subsets


def ordered_bell(n: int) -> int:
    """Number of ordered set partitions of an n-set (Fubini number)"""
    table = [1]
    for m in range(1, n + 1):
        table.append(sum(math.comb(m, k) * table[m - k] for k in range(1, m + 1)))
    return table[n]


def enumerate_ordered_partitions(ground: Iterable[int],
                                 max_layers: Optional[int] = None) -> List[Tuple[frozenset, ...]]:
    """Ordered partitions of ``ground`` into at most ``max_layers`` nonempty layers.

    Fewer layers come first; within a layer count, layer labels are assigned
    to the sorted elements in lexicographic order.
    """
    elements = sorted(frozenset(ground))
    if len(elements) > MAX_LAYERED_RELAYS:
        raise EnumerationCapError(
            f"{len(elements)} DF relays exceed the layering cap {MAX_LAYERED_RELAYS}")
    if not elements:
        return [()]
    limit = len(elements) if max_layers is None else min(max_layers, len(elements))
    if limit < 1:
        raise ConfigurationError("max_layers must be at least 1")
    partitions = []
    for n_layers in range(1, limit + 1):
        for labels in itertools.product(range(n_layers), repeat=len(elements)):
            if len(set(labels)) != n_layers:
                continue
            layers = tuple(
                frozenset(e for e, lab in zip(elements, labels) if lab == t)
                for t in range(n_layers)
            )
            partitions.append(layers)
    return partitions
