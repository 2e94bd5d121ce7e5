"""
Range graph construction and all-pairs shortest-path completion of the
distance matrix.

Completion runs Dijkstra from every source over the sparse range graph, which
costs O(K³) in the worst case for K nodes.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .arrays import FloatArray
from .errors import DisconnectedGraphError, OutputError
from .network import RangeObservation

logger = logging.getLogger(__name__)


class Provenance(IntEnum):
    SELF = 0
    DIRECT = 1
    SHORTEST_PATH = 2


@dataclass(frozen=True)
class RangeGraph:
    """
    Undirected weighted graph over K nodes. ``ranges`` holds the fused
    measured range per edge and NaN where no edge exists; ``variances`` holds
    the matching fused variance.
    """

    k: int
    ranges: FloatArray
    variances: FloatArray

    @property
    def edge_mask(self) -> npt.NDArray[np.bool_]:
        return ~np.isnan(self.ranges)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.edge_mask, k=1)))

    def neighbors(self, m: int) -> list[int]:
        return [int(n) for n in np.flatnonzero(self.edge_mask[m])]

    def adjacency(self) -> dict[int, set[int]]:
        return {m: set(self.neighbors(m)) for m in range(self.k)}

    def to_csgraph(self) -> csr_matrix:
        rows, cols = np.nonzero(self.edge_mask)
        return csr_matrix((self.ranges[rows, cols], (rows, cols)), shape=(self.k, self.k))

    @classmethod
    def from_matrix(cls, distances: npt.ArrayLike) -> "RangeGraph":
        """Every off-diagonal finite entry becomes a direct edge."""
        d = np.array(distances, dtype=np.float64)
        k = d.shape[0]
        ranges = np.where(np.isfinite(d), d, np.nan)
        np.fill_diagonal(ranges, np.nan)
        variances = np.where(np.isnan(ranges), np.nan, 1.0)
        return cls(k, ranges, variances)


def build_graph(observations: Sequence[RangeObservation], k: int) -> RangeGraph:
    """
    One edge per observed pair. Several observations of the same pair are
    fused into their inverse-variance weighted mean, with fused variance
    1 / Σ weights.

    Raises:
        ValueError: if an observation names a node outside [0, k).
    """
    weight_sum = np.zeros((k, k))
    weighted_range = np.zeros((k, k))
    for obs in observations:
        if not (0 <= obs.m < k and 0 <= obs.n < k) or obs.m == obs.n:
            raise ValueError(f"Observation ({obs.m}, {obs.n}) is outside a {k}-node graph")
        weight_sum[obs.m, obs.n] += obs.weight
        weighted_range[obs.m, obs.n] += obs.weight * obs.measured_range

    weight_sum = weight_sum + weight_sum.T
    weighted_range = weighted_range + weighted_range.T
    has_edge = weight_sum > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        ranges = np.where(has_edge, weighted_range / weight_sum, np.nan)
        variances = np.where(has_edge, 1.0 / weight_sum, np.nan)
    graph = RangeGraph(k, ranges, variances)
    logger.debug(f"Built range graph: {k} nodes, {graph.edge_count} edges")
    return graph


@dataclass(frozen=True)
class CompletedDistanceMatrix:
    k: int
    squared: FloatArray
    provenance: npt.NDArray[np.int8]
    hop_count: npt.NDArray[np.int64]

    @property
    def distances(self) -> FloatArray:
        return np.sqrt(self.squared)

    def provenance_of(self, m: int, n: int) -> Provenance:
        return Provenance(int(self.provenance[m, n]))


def _hop_counts(predecessors: npt.NDArray[np.int32]) -> npt.NDArray[np.int64]:
    k = predecessors.shape[0]
    sources = np.arange(k)[:, None]
    current = np.broadcast_to(np.arange(k)[None, :], (k, k)).copy()
    hops = np.zeros((k, k), dtype=np.int64)
    for _ in range(k):
        moving = (current != sources) & (current >= 0)
        if not np.any(moving):
            break
        hops += moving
        step = predecessors[np.broadcast_to(sources, (k, k)), np.where(moving, current, 0)]
        current = np.where(moving, step, current)
    return hops


def complete_matrix(graph: RangeGraph) -> CompletedDistanceMatrix:
    """
    Fills every pair with the squared length of its shortest path. Directly
    measured pairs keep their measured range even if a multi-hop path is
    shorter.

    Raises:
        DisconnectedGraphError: if the graph has more than one component.
    """
    k = graph.k
    if k == 0:
        empty = np.zeros((0, 0))
        return CompletedDistanceMatrix(0, empty, empty.astype(np.int8), empty.astype(np.int64))

    csgraph = graph.to_csgraph()
    n_components, labels = connected_components(csgraph, directed=False)
    if n_components > 1:
        components = [np.flatnonzero(labels == c).tolist() for c in range(n_components)]
        components.sort(key=len, reverse=True)
        raise DisconnectedGraphError(components)

    dist, predecessors = shortest_path(
        csgraph, method="D", directed=False, return_predecessors=True
    )
    direct = graph.edge_mask
    dist = np.where(direct, graph.ranges, dist)
    np.fill_diagonal(dist, 0.0)

    provenance = np.full((k, k), Provenance.SHORTEST_PATH, dtype=np.int8)
    provenance[direct] = Provenance.DIRECT
    np.fill_diagonal(provenance, Provenance.SELF)

    hops = _hop_counts(predecessors)
    hops[direct] = 1

    logger.debug(
        f"Completed {k}x{k} distance matrix: "
        f"{int(np.count_nonzero(np.triu(direct, 1)))} direct, "
        f"{int(np.count_nonzero(np.triu(~direct, 1)))} shortest-path entries"
    )
    return CompletedDistanceMatrix(k, dist**2, provenance, hops)


def matrix_frame(matrix: CompletedDistanceMatrix) -> pd.DataFrame:
    m_idx, n_idx = np.triu_indices(matrix.k, k=1)
    return pd.DataFrame(
        {
            "m": m_idx,
            "n": n_idx,
            "range_m": matrix.distances[m_idx, n_idx],
            "squared_m2": matrix.squared[m_idx, n_idx],
            "provenance": [
                Provenance(int(p)).name.lower() for p in matrix.provenance[m_idx, n_idx]
            ],
            "hops": matrix.hop_count[m_idx, n_idx],
        }
    )


def dump_matrix_csv(matrix: CompletedDistanceMatrix, path: str | Path) -> None:
    """Writes one row per unordered pair for debugging."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        matrix_frame(matrix).to_csv(target, index=False, float_format="%.9g")
    except OSError as e:
        raise OutputError(f"Could not write distance matrix to {target}: {e}") from e
    logger.info(f"Wrote completed distance matrix to {target}")
