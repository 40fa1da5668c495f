"""Domain records of the relay_coding package.

Every record is a pydantic model so that configurations coming from JSON and
values built in code go through the same validation.
"""

import math
from typing import Any, Dict, FrozenSet, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

StrategyMode = Literal[
    "general",
    "fully_cooperative",
    "partially_cooperative",
    "non_cooperative",
    "forward_decoding",
]


def format_set(nodes) -> str:
    """Render a node set as ``{1,2}`` for labels and CSV cells"""
    return "{" + ",".join(str(n) for n in sorted(nodes)) + "}"


class GaussianNetwork(BaseModel):
    """Unicast Gaussian relay network with unit noise at every receiver.

    ``gains[j-1][i]`` is the gain from transmitter ``i`` (0 = source, 1..N =
    relays) to receiver ``j`` (1..N = relays, N+1 = destination).
    ``gains_imag`` holds imaginary parts for complex channels.
    """
    model_config = ConfigDict(frozen=True)

    n_relays: int = Field(ge=0, description="Number of relays N")
    gains: List[List[float]] = Field(description="(N+1)x(N+1) real part of G")
    gains_imag: Optional[List[List[float]]] = Field(
        default=None,
        description="Imaginary part of G, only for complex channels",
    )
    power: List[float] = Field(description="Power budget of transmitters 0..N")

    @model_validator(mode="after")
    def _check_shape(self):
        size = self.n_relays + 1
        blocks = [("gains", self.gains)]
        if self.gains_imag is not None:
            blocks.append(("gains_imag", self.gains_imag))
        for name, block in blocks:
            if len(block) != size or any(len(row) != size for row in block):
                raise ValueError(f"{name} must be a {size}x{size} matrix")
            if not all(math.isfinite(v) for row in block for v in row):
                raise ValueError(f"{name} must be finite")
            for relay in range(1, size):
                if block[relay - 1][relay] != 0.0:
                    raise ValueError(
                        f"{name}[{relay - 1}][{relay}]: self gain g_{relay}{relay} must be 0"
                    )
        if len(self.power) != size:
            raise ValueError(f"power must list {size} budgets")
        for idx, value in enumerate(self.power):
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"power[{idx}] must be positive and finite")
        return self

    @property
    def is_complex(self) -> bool:
        return self.gains_imag is not None

    @property
    def gain_matrix(self) -> np.ndarray:
        real = np.asarray(self.gains, dtype=float)
        if self.gains_imag is None:
            return real
        return real + 1j * np.asarray(self.gains_imag, dtype=float)

    @property
    def nodes(self) -> FrozenSet[int]:
        return frozenset(range(1, self.n_relays + 1))

    @property
    def destination(self) -> int:
        return self.n_relays + 1

    def gain(self, src: int, dst: int):
        """Gain from transmitter ``src`` to receiver ``dst``"""
        return self.gain_matrix[dst - 1, src]


class InputCovariance(BaseModel):
    """Joint covariance of (X, X1..XN) and its auxiliary loading.

    ``aux_loading[a][i]`` is Cov(aux_a, X_i); auxiliaries have unit variance
    and are independent of each other.
    """
    model_config = ConfigDict(frozen=True)

    sigma: List[List[float]] = Field(description="(N+1)x(N+1) input covariance")
    structure: Literal["explicit", "superposition", "layered"] = Field(default="explicit")
    betas: Dict[int, float] = Field(
        default_factory=dict,
        description="Private-power fraction per superposed node",
    )
    aux_labels: List[str] = Field(default_factory=list)
    aux_loading: List[List[float]] = Field(default_factory=list)

    @field_validator("betas")
    @classmethod
    def _check_betas(cls, value):
        for node, beta in value.items():
            if not 0.0 <= beta <= 1.0:
                raise ValueError(f"beta[{node}]={beta} out of range [0, 1]")
        return value

    @model_validator(mode="after")
    def _check_matrix(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] == 0:
            raise ValueError("sigma must be a nonempty square matrix")
        if not np.all(np.isfinite(sigma)):
            raise ValueError("sigma must be finite")
        scale = max(1.0, float(np.max(np.abs(sigma))))
        if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=1e-12 * scale):
            raise ValueError("sigma must be symmetric")
        tol = 1e-10 * max(1.0, float(np.trace(sigma)))
        if np.linalg.eigvalsh(sigma).min() < -tol:
            raise ValueError("sigma must be positive semidefinite")
        if len(self.aux_labels) != len(self.aux_loading):
            raise ValueError("aux_labels and aux_loading must have the same length")
        if self.aux_loading:
            loading = np.asarray(self.aux_loading, dtype=float)
            if loading.shape[1] != sigma.shape[0]:
                raise ValueError("aux_loading rows must match sigma dimension")
            # auxiliaries must fit inside the input covariance
            if np.linalg.eigvalsh(sigma - loading.T @ loading).min() < -tol:
                raise ValueError("aux_loading exceeds the input covariance")
        return self

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.sigma, dtype=float)

    @property
    def loading(self) -> np.ndarray:
        size = len(self.sigma)
        if not self.aux_loading:
            return np.zeros((0, size))
        return np.asarray(self.aux_loading, dtype=float)


class StrategyAssignment(BaseModel):
    """Split of the relays into CF (``cf_set``) and DF nodes plus decode sets.

    ``dest_decode`` / ``relay_decode`` left at ``None`` are searched.
    """
    model_config = ConfigDict(frozen=True)

    n_relays: int = Field(ge=0)
    cf_set: FrozenSet[int] = Field(default_factory=frozenset)
    dest_decode: Optional[FrozenSet[int]] = None
    relay_decode: Optional[Dict[int, FrozenSet[int]]] = None
    layering: Optional[Tuple[FrozenSet[int], ...]] = None
    mode: StrategyMode = "general"

    @model_validator(mode="after")
    def _check_sets(self):
        nodes = frozenset(range(1, self.n_relays + 1))
        if not self.cf_set <= nodes:
            raise ValueError(f"cf_set {format_set(self.cf_set)} not within relays {format_set(nodes)}")
        df_set = nodes - self.cf_set
        if self.dest_decode is not None and not self.dest_decode <= nodes:
            raise ValueError("dest_decode must be a subset of the relays")
        for k, decode in (self.relay_decode or {}).items():
            if k not in df_set:
                raise ValueError(f"relay_decode[{k}]: relay {k} is not a DF relay")
            if k in decode or not decode <= nodes:
                raise ValueError(f"relay_decode[{k}] must be a subset of the other relays")
        if self.layering is not None:
            seen = set()
            for layer in self.layering:
                if not layer:
                    raise ValueError("layering contains an empty layer")
                if seen & layer:
                    raise ValueError("layering layers overlap")
                seen |= layer
            if frozenset(seen) != df_set:
                raise ValueError("layering must partition the DF relays")
        if self.mode in ("partially_cooperative", "non_cooperative"):
            if self.dest_decode is not None and not self.dest_decode <= self.cf_set:
                raise ValueError(f"{self.mode} mode requires dest_decode within cf_set")
            for k, decode in (self.relay_decode or {}).items():
                if not decode <= self.cf_set:
                    raise ValueError(f"{self.mode} mode requires relay_decode[{k}] within cf_set")
        elif self.mode == "fully_cooperative":
            if self.dest_decode is not None and self.dest_decode != nodes:
                raise ValueError("fully_cooperative mode requires dest_decode equal to all relays")
            for k, decode in (self.relay_decode or {}).items():
                if decode != nodes - {k}:
                    raise ValueError(f"fully_cooperative mode requires relay_decode[{k}] = relays - {{{k}}}")
        elif self.mode == "forward_decoding" and self.cf_set != nodes:
            raise ValueError("forward_decoding mode requires every relay in cf_set")
        return self

    @property
    def nodes(self) -> FrozenSet[int]:
        return frozenset(range(1, self.n_relays + 1))

    @property
    def df_set(self) -> FrozenSet[int]:
        return self.nodes - self.cf_set


class CompressionConfig(BaseModel):
    """Compression noise variance of every relay description"""
    model_config = ConfigDict(frozen=True)

    nhat: List[float] = Field(default_factory=list)

    @field_validator("nhat")
    @classmethod
    def _check_nhat(cls, value):
        for idx, variance in enumerate(value):
            if not (variance > 0 and math.isfinite(variance)):
                raise ValueError(f"nhat[{idx}] must be positive and finite")
        return value

    @classmethod
    def uniform(cls, n_relays: int, nhat: float = 1.0) -> "CompressionConfig":
        return cls(nhat=[nhat] * n_relays)


class RateResult(BaseModel):
    """Achievable rate with the certificate of how it was obtained"""

    rate: float = Field(description="Rate in bits per channel use, floored at 0")
    raw_rate: float = Field(description="Value of the min/max structure before the floor")
    binding_subset: FrozenSet[int] = Field(default_factory=frozenset)
    binding_constraint: str = Field(default="", description="Label of the term attaining the rate")
    chosen_T: Optional[FrozenSet[int]] = None
    chosen_T_k: Dict[int, FrozenSet[int]] = Field(default_factory=dict)
    chosen_V: FrozenSet[int] = Field(default_factory=frozenset)
    chosen_layering: Optional[Tuple[FrozenSet[int], ...]] = None
    term_breakdown: Dict[str, float] = Field(default_factory=dict)
    feasible: bool = True
    zero_rate: bool = False
    scheme: str = "mnnc"
    certificate: Dict[str, Any] = Field(default_factory=dict)


class GapReport(BaseModel):
    """Analytic gap expression next to the gap measured on an instance"""

    analytic_gap: float
    empirical_gap: float
    bound_formula_id: str
    per_subset_terms: Dict[str, float] = Field(default_factory=dict)
    verified: bool = False
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    nnc_constant: Optional[float] = None
    stated_constant: Optional[float] = Field(
        default=None,
        description="Constant 0.5N+0.7 quoted for the all-DF regime, reported beside the formula",
    )
    betas: Dict[int, float] = Field(default_factory=dict)


class TableEntry(BaseModel):
    """One (θ, probability) pair of a finite composite model"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    theta: List[Tuple[float, float]] = Field(description="Complex coordinates as [re, im] pairs")
    probability: float = Field(ge=0.0, le=1.0)


class CompositeModel(BaseModel):
    """Distribution of the channel parameters θ = (θ_d, θ_r).

    ``single_relay`` layout: θ = (g1, g2, g3), g1 source-destination, g2
    source-relay, g3 relay-destination, θ_r = (g2,).
    ``network`` layout: θ is the flattened (N+1)x(N+1) gain matrix, θ_r the
    relay rows and θ_d the destination row.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    layout: Literal["single_relay", "network"] = "single_relay"
    n_relays: int = Field(default=1, ge=1)
    family: Literal["complex_gaussian", "finite_table"] = "complex_gaussian"
    variance: Union[float, List[float]] = Field(default=1.0, description="Per-coordinate E|g|^2")
    table: List[TableEntry] = Field(default_factory=list)
    power: List[float] = Field(default_factory=lambda: [1.0, 1.0])
    theta_r: Optional[List[int]] = None
    theta_d: Optional[List[int]] = None

    @model_validator(mode="after")
    def _check_model(self):
        if self.layout == "single_relay" and self.n_relays != 1:
            raise ValueError("single_relay layout has exactly one relay")
        if len(self.power) != self.n_relays + 1:
            raise ValueError(f"power must list {self.n_relays + 1} budgets")
        if any(not (p > 0 and math.isfinite(p)) for p in self.power):
            raise ValueError("power budgets must be positive and finite")
        dim = self.theta_dim
        split = sorted(self.split_r + self.split_d)
        if split != list(range(dim)):
            raise ValueError("theta_r and theta_d must cover every coordinate exactly once")
        if isinstance(self.variance, list):
            if len(self.variance) != dim or any(v < 0 for v in self.variance):
                raise ValueError(f"variance must list {dim} nonnegative values")
        elif self.variance < 0:
            raise ValueError("variance must be nonnegative")
        if self.family == "finite_table":
            if not self.table:
                raise ValueError("finite_table family needs table entries")
            if any(len(entry.theta) != dim for entry in self.table):
                raise ValueError(f"table entries must have {dim} coordinates")
            total = math.fsum(entry.probability for entry in self.table)
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"table probabilities sum to {total}, not 1")
        return self

    @property
    def theta_dim(self) -> int:
        if self.layout == "single_relay":
            return 3
        return (self.n_relays + 1) ** 2

    @property
    def split_r(self) -> List[int]:
        if self.theta_r is not None:
            return list(self.theta_r)
        if self.layout == "single_relay":
            return [1]
        return list(range(self.n_relays * (self.n_relays + 1)))

    @property
    def split_d(self) -> List[int]:
        if self.theta_d is not None:
            return list(self.theta_d)
        if self.layout == "single_relay":
            return [0, 2]
        start = self.n_relays * (self.n_relays + 1)
        return list(range(start, self.theta_dim))


class DecisionRegion(BaseModel):
    """Indexed partition of Θ_r; each cell names the CF set used on it.

    ``threshold_on_magnitude``: relay k runs DF iff |g_0k| >= thresholds[k-1].
    ``analytic_DF_region``: relay k runs DF iff it can decode at rate r alone.
    ``indexed_partition``: ``index`` maps table-entry indices (as strings) or
    ``"*"`` (every other draw) to a CF set.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Literal["threshold_on_magnitude", "analytic_DF_region", "indexed_partition"]
    parameters: Dict[str, Any] = Field(default_factory=dict)
    index: Dict[str, FrozenSet[int]] = Field(default_factory=dict)

    @classmethod
    def constant(cls, cf_set) -> "DecisionRegion":
        """Single-cell partition: the same CF set on all of Θ_r"""
        return cls(family="indexed_partition", index={"*": frozenset(cf_set)})


class MonteCarloConfig(BaseModel):
    """Sample size, master seed and chunking of a Monte Carlo run"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    samples: int = Field(default=10000, ge=1)
    seed: int = Field(default=0, ge=0, le=2 ** 64 - 1)
    chunk: int = Field(default=4096, ge=1)
    threads: int = Field(default=1, ge=1)


class OutageEstimate(BaseModel):
    """Fraction of draws in outage with its binomial standard error"""

    p_hat: float = Field(ge=0.0, le=1.0)
    std_err: float = Field(ge=0.0)
    samples: int = Field(ge=1)
    count: int = Field(ge=0)

    @classmethod
    def from_indicators(cls, indicators) -> "OutageEstimate":
        flags = np.asarray(indicators, dtype=bool)
        samples = int(flags.size)
        count = int(np.count_nonzero(flags))
        p_hat = count / samples
        return cls(
            p_hat=p_hat,
            std_err=math.sqrt(p_hat * (1.0 - p_hat) / samples),
            samples=samples,
            count=count,
        )


class FadingDraw(BaseModel):
    """Gains of one single-relay fading realization (complex convention)"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    g1: complex
    g2: complex
    g3: complex
    complex_channel: bool = True

    @field_validator("g1", "g2", "g3", mode="before")
    @classmethod
    def _to_complex(cls, value):
        if isinstance(value, (list, tuple)):
            value = complex(value[0], value[1])
        value = complex(value)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError("gain must be finite")
        return value

    def as_array(self) -> np.ndarray:
        return np.array([self.g1, self.g2, self.g3], dtype=complex)


SchemeName = Literal["df", "cf_partial", "cf_full", "scs_partial", "scs_full", "direct", "best"]


class SchemeParams(BaseModel):
    """Coding scheme evaluated on a composite model.

    ``beta`` is the private fraction of the source power, ``relay_beta`` that
    of DF relays in network models. ``nhat`` fixes the compression variance
    under partial CSI; left unset, network models choose N̂ and the relay β
    per θ_r class on the two grids.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    scheme: SchemeName = "scs_partial"
    beta: float = Field(default=1.0, ge=0.0, le=1.0)
    relay_beta: float = Field(default=0.0, ge=0.0, le=1.0)
    nhat: Optional[float] = Field(default=None, gt=0.0)
    nhat_grid_points: int = Field(default=32, ge=1, description="Log grid of N̂ in [0.01, 100] for the relay-side search")
    beta_grid_points: int = Field(default=32, ge=1, description="Linear grid of the DF relay β in [0, 1]")
    variant: Literal["mnnc", "noncoop"] = "mnnc"
    region: Optional[DecisionRegion] = None
    guard: float = Field(default=3.0, ge=0.0, description="Standard errors added to outage in bisection")
