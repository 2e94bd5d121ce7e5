"""
Hybrid Cramér-Rao lower bound for range-based localization.

The Fisher information is laid out as a 3K×3K matrix of 3×3 coordinate blocks
[Φxx Φxy Φxz; Φyx Φyy Φyz; Φzx Φzy Φzz], each block K×K, so the entry for
axis ``a`` of node ``m`` sits at index ``a*K + m``.

Known (anchor) nodes are marginalized by deleting their rows and columns
before inversion.
"""

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt
from scipy import linalg
from scipy.stats import norm

from .arrays import FloatArray, Real, as_float_array, like
from .errors import CoincidentNodesError, NumericalError, SingularFisherError
from .network import NodePose, RangeObservation, positions_of

logger = logging.getLogger(__name__)

SINGULAR_TOLERANCE = 1e-12

CrossTerms = Literal["product", "squared"]


@dataclass(frozen=True)
class NoiseLawParams:
    """Range-noise law ψ²(r) = ε·r^(δ-1)."""

    epsilon: float
    delta: float = 1.0

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")

    def psi_d_sq(self, r: Real) -> Real:
        d = as_float_array(r)
        return like(r, self.epsilon * np.power(d, self.delta - 1.0))

    def scaled(self, factor: float) -> "NoiseLawParams":
        return NoiseLawParams(self.epsilon * factor, self.delta)


def _pair_distance(m_pos: npt.ArrayLike, n_pos: npt.ArrayLike) -> float:
    d = float(np.linalg.norm(np.asarray(m_pos, dtype=np.float64) - np.asarray(n_pos, dtype=np.float64)))
    if d == 0.0:
        raise CoincidentNodesError("Log-likelihood is singular for coincident node positions")
    return d


def range_log_likelihood(
    rho: float, m_pos: npt.ArrayLike, n_pos: npt.ArrayLike, law: NoiseLawParams
) -> float:
    """
    Per-pair log-likelihood
    -log sqrt(2πε) - (δ/4)·log‖α_m - α_n‖² - (ρ - d)² / (2ε·d^δ).

    This is the Gaussian log-density of ρ around d with variance ε·d^δ.
    """
    d = _pair_distance(m_pos, n_pos)
    eps, delta = law.epsilon, law.delta
    return (
        -math.log(math.sqrt(2.0 * math.pi * eps))
        - 0.25 * delta * math.log(d * d)
        - (rho - d) ** 2 / (2.0 * eps * d**delta)
    )


def joint_log_likelihood(
    positions: npt.ArrayLike,
    measured: Mapping[tuple[int, int], float],
    law: NoiseLawParams,
) -> float:
    """
    Sum over measured pairs of the Gaussian log-density of ρ_mn with mean
    ‖α_m - α_n‖ and variance ψ²(‖α_m - α_n‖). Its expected negative Hessian
    is the information ``build_fim`` assembles.
    """
    pos = np.asarray(positions, dtype=np.float64)
    total = 0.0
    for (m, n), rho in measured.items():
        d = _pair_distance(pos[m], pos[n])
        total += float(norm.logpdf(rho, loc=d, scale=math.sqrt(law.psi_d_sq(d))))
    return total


def beta_factor(r: Real, law: NoiseLawParams) -> Real:
    """β = 1 + (δ²ε/2)·r^(δ-2)."""
    d = as_float_array(r)
    return like(r, 1.0 + 0.5 * law.delta**2 * law.epsilon * np.power(d, law.delta - 2.0))


@dataclass(frozen=True)
class FisherInfo:
    matrix: FloatArray
    k: int

    def index(self, node: int, axis: int) -> int:
        return axis * self.k + node

    def block(self, m: int, n: int) -> FloatArray:
        """3×3 coordinate block between nodes ``m`` and ``n``."""
        idx_m = [self.index(m, a) for a in range(3)]
        idx_n = [self.index(n, a) for a in range(3)]
        return self.matrix[np.ix_(idx_m, idx_n)]

    def degenerate_nodes(self, nodes: Iterable[int] | None = None) -> list[int]:
        """Nodes whose own 3×3 information block is rank deficient."""
        candidates = range(self.k) if nodes is None else nodes
        degenerate = []
        for m in candidates:
            eig = linalg.eigvalsh(self.block(m, m))
            if eig[-1] <= 0.0 or eig[0] <= SINGULAR_TOLERANCE * eig[-1]:
                degenerate.append(int(m))
        return degenerate


def _assemble(
    positions: FloatArray,
    pairs: npt.NDArray[np.int64],
    information: FloatArray,
    cross_terms: CrossTerms,
) -> FloatArray:
    k = positions.shape[0]
    phi = np.zeros((3 * k, 3 * k))
    if pairs.size == 0:
        return phi
    m, n = pairs[:, 0], pairs[:, 1]
    diff = positions[m] - positions[n]
    dist_sq = np.sum(diff**2, axis=1)
    if np.any(dist_sq == 0.0):
        raise CoincidentNodesError("Fisher information is undefined for coincident nodes")

    for a in range(3):
        for b in range(3):
            if a == b or cross_terms == "product":
                geometry = diff[:, a] * diff[:, b] / dist_sq
            else:
                # Squared-difference variant, kept for comparison only; not PSD.
                geometry = diff[:, a] ** 2 * diff[:, b] ** 2 / dist_sq
            weight = information * geometry
            rows_m, rows_n = a * k + m, a * k + n
            cols_m, cols_n = b * k + m, b * k + n
            np.add.at(phi, (rows_m, cols_m), weight)
            np.add.at(phi, (rows_n, cols_n), weight)
            np.add.at(phi, (rows_m, cols_n), -weight)
            np.add.at(phi, (rows_n, cols_m), -weight)
    return phi


def build_fim(
    nodes: Sequence[NodePose],
    neighbor_sets: Mapping[int, Iterable[int]],
    law: NoiseLawParams,
    *,
    pair_variances: Mapping[tuple[int, int], float] | None = None,
    cross_terms: CrossTerms = "product",
) -> FisherInfo:
    """
    Fisher information of all node coordinates given one range per neighbor
    pair. Each pair contributes (β/ψ²)·u·uᵀ, u being the unit vector between
    the nodes, to both diagonal blocks and minus that to the off-diagonal
    blocks. With ``pair_variances`` the per-pair information is 1/variance.
    """
    positions = positions_of(nodes)
    k = positions.shape[0]
    pair_set = {
        (min(m, n), max(m, n))
        for m, neighbors in neighbor_sets.items()
        for n in neighbors
        if m != n
    }
    pairs = np.array(sorted(pair_set), dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        dist = np.linalg.norm(positions[pairs[:, 0]] - positions[pairs[:, 1]], axis=1)
        if pair_variances is not None:
            info = np.array([1.0 / pair_variances[(int(m), int(n))] for m, n in pairs])
        else:
            safe = np.where(dist > 0, dist, 1.0)
            info = beta_factor(safe, law) / law.psi_d_sq(safe)
    else:
        info = np.zeros(0)

    fim = FisherInfo(_assemble(positions, pairs, info, cross_terms), k)
    logger.debug(f"Assembled {3 * k}x{3 * k} Fisher information from {len(pairs)} pairs")
    return fim


def observation_fim(
    nodes: Sequence[NodePose],
    observations: Sequence[RangeObservation],
    *,
    delta: float | None = None,
) -> FisherInfo:
    """
    Fisher information from actual observations, evaluated at the true
    positions. Every observation contributes, so fused technologies add up.

    With ``delta`` set, the recorded variance is read as ψ² of the distance
    law and the β correction applies; otherwise the information is 1/variance.
    """
    positions = positions_of(nodes)
    if not observations:
        return FisherInfo(np.zeros((3 * len(positions), 3 * len(positions))), len(positions))
    pairs = np.array([(obs.m, obs.n) for obs in observations], dtype=np.int64)
    variance = np.array([obs.variance for obs in observations])
    info = 1.0 / variance
    if delta is not None:
        dist = np.linalg.norm(positions[pairs[:, 0]] - positions[pairs[:, 1]], axis=1)
        epsilon = variance / np.power(dist, delta - 1.0)
        info = info * (1.0 + 0.5 * delta**2 * epsilon * np.power(dist, delta - 2.0))
    return FisherInfo(_assemble(positions, pairs, info, "product"), len(positions))


@dataclass(frozen=True)
class CrlbReport:
    """
    ``h_crlb`` is sqrt(Tr(Φ⁻¹)/K_unknown), comparable with the per-node RMSE.
    ``trace`` is the raw Tr(Φ⁻¹) in m². ``per_node_bound`` is zero for known
    nodes.
    """

    h_crlb: float
    trace: float
    per_node_bound: FloatArray


def h_crlb(fim: FisherInfo, unknown_ids: Iterable[int]) -> CrlbReport:
    """
    Inverts the information of the unknown nodes.

    Raises:
        SingularFisherError: if that information is singular; the error lists
            the nodes that span its null space.
        NumericalError: if the eigensolver or the Cholesky factorization fails.
    """
    unknown = sorted(set(int(i) for i in unknown_ids))
    k_u = len(unknown)
    per_node = np.zeros(fim.k)
    if k_u == 0:
        return CrlbReport(0.0, 0.0, per_node)

    idx = [fim.index(m, a) for a in range(3) for m in unknown]
    sub = fim.matrix[np.ix_(idx, idx)]
    try:
        values, vectors = linalg.eigh(sub)
    except linalg.LinAlgError as e:
        raise NumericalError(f"Eigendecomposition of the Fisher information failed: {e}") from e
    scale = max(float(values[-1]), 0.0)
    null = values <= SINGULAR_TOLERANCE * scale if scale > 0 else np.ones_like(values, dtype=bool)
    if np.any(null):
        weight = np.sum(vectors[:, null] ** 2, axis=1).reshape(3, k_u).sum(axis=0)
        null_nodes = [unknown[j] for j in np.flatnonzero(weight > 1e-8)]
        raise SingularFisherError(null_nodes)

    try:
        inverse = linalg.cho_solve(linalg.cho_factor(sub), np.eye(len(idx)))
    except linalg.LinAlgError as e:
        raise NumericalError(f"Cholesky factorization of the Fisher information failed: {e}") from e
    diag = np.diag(inverse).reshape(3, k_u)
    per_node[unknown] = np.sqrt(diag.sum(axis=0))
    trace = float(np.trace(inverse))
    report = CrlbReport(math.sqrt(trace / k_u), trace, per_node)
    logger.debug(f"H-CRLB over {k_u} unknown nodes: {report.h_crlb:.4g} m (trace {trace:.4g} m²)")
    return report
