"""Joint Gaussian covariance of a relay network and log-det mutual information.

All mutual informations are in bits. Real networks use h = ½ log det(2πe Σ),
complex (circularly symmetric) networks use h = log det(πe Σ), so the MI of a
complex network carries no ½ factor.
"""

import logging
import math
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import linalg

from .exceptions import ConfigurationError, DegenerateCovarianceError
from .pydantic_models import CompressionConfig, GaussianNetwork, InputCovariance

log = logging.getLogger(__name__)

JITTER = 1e-12
# relative threshold below which a conditional variance counts as zero
NULL_TOL = 1e-10


def network_labels(n_relays: int) -> List[str]:
    """Labels of the network variables in index_map order"""
    return (
        ["X"]
        + [f"X{k}" for k in range(1, n_relays + 1)]
        + [f"Y{k}" for k in range(1, n_relays + 1)]
        + ["Y"]
        + [f"Yh{k}" for k in range(1, n_relays + 1)]
    )


class VariableSet(BaseModel):
    """Ordered set of variable labels"""
    model_config = ConfigDict(frozen=True)

    labels: Tuple[str, ...] = ()

    @field_validator("labels", mode="before")
    @classmethod
    def _unique(cls, value):
        value = tuple(value)
        if len(set(value)) != len(value):
            raise ValueError(f"duplicate labels in {value}")
        return value

    @classmethod
    def of(cls, *groups: Iterable[str]) -> "VariableSet":
        """Union of label groups keeping first-seen order"""
        seen = []
        for group in groups:
            for label in ([group] if isinstance(group, str) else group):
                if label not in seen:
                    seen.append(label)
        return cls(labels=tuple(seen))

    def __iter__(self):
        return iter(self.labels)

    def __len__(self):
        return len(self.labels)


class JointCovariance(BaseModel):
    """Covariance of (X, X_N, Y_N, Y, Ŷ_N, auxiliaries) with its label map"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    index_map: Dict[str, int]
    n_relays: int = Field(ge=0)
    aux_labels: Tuple[str, ...] = ()
    complex_channel: bool = False

    @model_validator(mode="after")
    def _check(self):
        mat = self.matrix
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("covariance must be square")
        if sorted(self.index_map.values()) != list(range(mat.shape[0])):
            raise ValueError("index_map must map labels onto distinct rows")
        scale = max(1.0, float(np.max(np.abs(mat))))
        if not np.allclose(mat, mat.conj().T, rtol=1e-12, atol=1e-12 * scale):
            raise ValueError("covariance must be symmetric")
        return self

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def indices(self, labels: Iterable[str]) -> List[int]:
        try:
            return [self.index_map[label] for label in labels]
        except KeyError as err:
            raise ConfigurationError(f"unknown variable label {err.args[0]!r}") from err

    def permuted(self, order: Sequence[str]) -> "JointCovariance":
        """Same covariance with rows reordered to ``order``"""
        idx = self.indices(order)
        mat = self.matrix[np.ix_(idx, idx)]
        return JointCovariance(
            matrix=mat,
            index_map={label: pos for pos, label in enumerate(order)},
            n_relays=self.n_relays,
            aux_labels=self.aux_labels,
            complex_channel=self.complex_channel,
        )


def gauss_cap(x: float, complex_channel: bool = False) -> float:
    """Gaussian capacity C(x): ½ log2(1+x), or log2(1+x) for complex channels"""
    if x < 0:
        raise ConfigurationError(f"gauss_cap needs a nonnegative SNR, got {x}")
    if math.isinf(x):
        return math.inf
    value = math.log2(1.0 + x)
    return value if complex_channel else 0.5 * value


def _ldl_logdet(matrix: np.ndarray) -> float:
    _, d, _ = linalg.ldl(matrix, lower=True, hermitian=True)
    # d is block diagonal with 1x1 and 2x2 pivots
    values = linalg.eigvalsh(d)
    if not np.all(values > 0):
        raise linalg.LinAlgError("indefinite pivot")
    return float(np.sum(np.log(values)))


def logdet_psd(matrix: np.ndarray) -> float:
    """Natural log-determinant of a positive definite matrix by LDLᵀ.

    One retry with 1e-12·trace jitter; failure raises DegenerateCovarianceError.
    """
    if matrix.shape[0] == 0:
        return 0.0
    try:
        return _ldl_logdet(matrix)
    except linalg.LinAlgError:
        jitter = JITTER * max(float(np.real(np.trace(matrix))), 1e-300)
        try:
            value = _ldl_logdet(matrix + jitter * np.eye(matrix.shape[0]))
        except linalg.LinAlgError as err:
            raise DegenerateCovarianceError(
                f"covariance block of size {matrix.shape[0]} is not positive definite"
            ) from err
        log.debug("ldl needed jitter %.3g", jitter)
        return value


def _conditional_block(mat: np.ndarray, keep: List[int], given: List[int]) -> np.ndarray:
    """Covariance of ``keep`` conditioned on ``given`` (Schur complement)"""
    block = mat[np.ix_(keep, keep)]
    if not given:
        return block
    cross = mat[np.ix_(keep, given)]
    inner = linalg.pinvh(mat[np.ix_(given, given)])
    cond = block - cross @ inner @ cross.conj().T
    return 0.5 * (cond + cond.conj().T)


def _null_tol(mat: np.ndarray, idx: List[int]) -> float:
    """Null threshold scaled to the unconditioned variances of ``idx``"""
    scale = float(np.max(np.real(np.diag(mat)[idx])))
    return NULL_TOL * max(scale, np.finfo(float).tiny)


def _range_basis(block: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the eigen-directions of ``block`` above ``tol``"""
    values, vectors = linalg.eigh(block)
    return vectors[:, values > tol]


def conditional_mi(cov: JointCovariance, A, B, C=()) -> float:
    """I(A; B | C) in bits on a jointly Gaussian covariance.

    Labels in C are dropped from A and B. Labels shared by A and B are moved
    into C when they are deterministic given C, otherwise the call is rejected.
    Directions of A or B that are deterministic given C carry no information
    and are projected out before the log-determinants are taken.
    """
    cond = list(dict.fromkeys(C))
    a_set = [label for label in dict.fromkeys(A) if label not in cond]
    b_set = [label for label in dict.fromkeys(B) if label not in cond]
    mat = cov.matrix
    shared = [label for label in a_set if label in b_set]
    if shared:
        given = cov.indices(cond)
        for label in shared:
            (idx,) = cov.indices([label])
            residual = np.real(_conditional_block(mat, [idx], given)[0, 0])
            if residual > _null_tol(mat, [idx]):
                raise ConfigurationError(
                    f"variable {label} appears on both sides of I(.;.|.) and is not determined by the condition"
                )
        cond.extend(shared)
        a_set = [label for label in a_set if label not in shared]
        b_set = [label for label in b_set if label not in shared]
    if not a_set or not b_set:
        return 0.0

    a_idx, b_idx, c_idx = cov.indices(a_set), cov.indices(b_set), cov.indices(cond)
    joint = _conditional_block(mat, a_idx + b_idx, c_idx)
    n_a = len(a_idx)
    basis_a = _range_basis(joint[:n_a, :n_a], _null_tol(mat, a_idx))
    basis_b = _range_basis(joint[n_a:, n_a:], _null_tol(mat, b_idx))
    if basis_a.shape[1] == 0 or basis_b.shape[1] == 0:
        return 0.0
    proj = linalg.block_diag(basis_a, basis_b)
    reduced = proj.conj().T @ joint @ proj
    reduced = 0.5 * (reduced + reduced.conj().T)
    k_a = basis_a.shape[1]
    nats = (
        logdet_psd(reduced[:k_a, :k_a])
        + logdet_psd(reduced[k_a:, k_a:])
        - logdet_psd(reduced)
    )
    bits = nats / math.log(2.0)
    return bits if cov.complex_channel else 0.5 * bits


def assemble_covariance(network: GaussianNetwork,
                        inputs: InputCovariance,
                        compression: CompressionConfig) -> JointCovariance:
    """Covariance of every network variable.

    Built as L W Lᴴ with W the covariance of (aux, X_M, Z_D, Ẑ_N) and L the
    linear map Y_D = G X_M + Z_D, Ŷ_N = Y_N + Ẑ_N.
    """
    n = network.n_relays
    size = n + 1
    sigma = inputs.matrix
    if sigma.shape != (size, size):
        raise ConfigurationError(
            f"input covariance is {sigma.shape[0]}x{sigma.shape[1]}, network needs {size}x{size}",
            [("inputs.sigma", "dimension mismatch")],
        )
    if len(compression.nhat) != n:
        raise ConfigurationError(
            f"compression lists {len(compression.nhat)} variances for {n} relays",
            [("compression.nhat", "dimension mismatch")],
        )
    for node, budget in enumerate(network.power):
        if sigma[node, node] > budget * (1.0 + 1e-9):
            raise ConfigurationError(
                f"input power of node {node} exceeds its budget {budget}",
                [(f"inputs.sigma[{node}][{node}]", "power budget exceeded")],
            )
    gain = network.gain_matrix
    loading = inputs.loading
    n_aux = loading.shape[0]

    w_x = np.block([[np.eye(n_aux), loading], [loading.T, sigma]])
    w = linalg.block_diag(w_x, np.eye(size), np.diag(np.asarray(compression.nhat, dtype=float)))
    cols = n_aux + size + size + n
    aux_c, x_c, z_c, zh_c = 0, n_aux, n_aux + size, n_aux + 2 * size
    dtype = complex if network.is_complex else float

    rows = []
    for i in range(size):
        row = np.zeros(cols, dtype=dtype)
        row[x_c + i] = 1.0
        rows.append(row)
    for j in range(size):
        row = np.zeros(cols, dtype=dtype)
        row[x_c:x_c + size] = gain[j]
        row[z_c + j] = 1.0
        rows.append(row)
    for k in range(n):
        row = rows[size + k].copy()
        row[zh_c + k] = 1.0
        rows.append(row)
    for a in range(n_aux):
        row = np.zeros(cols, dtype=dtype)
        row[aux_c + a] = 1.0
        rows.append(row)
    lin = np.vstack(rows)
    mat = lin @ w @ lin.conj().T
    mat = 0.5 * (mat + mat.conj().T)

    labels = network_labels(n) + list(inputs.aux_labels)
    return JointCovariance(
        matrix=mat,
        index_map={label: pos for pos, label in enumerate(labels)},
        n_relays=n,
        aux_labels=tuple(inputs.aux_labels),
        complex_channel=network.is_complex,
    )
