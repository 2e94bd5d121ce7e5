"""
Classical MDS, similarity (Procrustes) fitting against anchors, and the
weighted-centroid baseline.

Pipeline cost beyond completion: the eigendecomposition in ``classical_mds``
is O(K³), the anchor fit is O(M) plus a constant-size SVD, and applying the
transform is O(K).
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import pandas as pd
from scipy import linalg

from .arrays import FloatArray
from .completion import CompletedDistanceMatrix, build_graph
from .errors import GeometryError, NumericalError
from .metrics import rmse
from .network import NodePose, RangeObservation, Region, anchor_ids, positions_of

logger = logging.getLogger(__name__)

EIGEN_CLAMP_TOLERANCE = 1e-8
COPLANAR_TOLERANCE = 1e-9
MIN_WCL_DISTANCE = 1e-9


@dataclass(frozen=True)
class RelativeMap:
    coords: FloatArray
    eigenvalues: FloatArray
    stress: float
    non_euclidean: bool = False


@dataclass(frozen=True)
class SimilarityTransform:
    """
    Maps relative-frame rows ``y`` onto the absolute frame as
    ``scale * y @ rotation + translation``.
    """

    scale: float
    rotation: FloatArray
    translation: FloatArray
    residual: float = 0.0

    @property
    def is_proper(self) -> bool:
        return bool(np.linalg.det(self.rotation) > 0)

    def inverse(self) -> "SimilarityTransform":
        rotation = self.rotation.T
        return SimilarityTransform(
            scale=1.0 / self.scale,
            rotation=rotation,
            translation=-(self.translation @ rotation) / self.scale,
        )


@dataclass(frozen=True)
class LocalizationResult:
    absolute: FloatArray
    transform: SimilarityTransform
    stress: float
    rmse: float
    relative: RelativeMap

    def to_frame(self, nodes: Sequence[NodePose]) -> pd.DataFrame:
        """One row per node: id, role, true and estimated coordinates, error (m)."""
        ordered = sorted(nodes, key=lambda node: node.id)
        truth = positions_of(ordered)
        error = np.linalg.norm(self.absolute - truth, axis=1)
        return pd.DataFrame(
            {
                "node_id": [node.id for node in ordered],
                "role": [node.role.value for node in ordered],
                "x": truth[:, 0],
                "y": truth[:, 1],
                "z": truth[:, 2],
                "x_est": self.absolute[:, 0],
                "y_est": self.absolute[:, 1],
                "z_est": self.absolute[:, 2],
                "error_m": error,
            }
        )


def _squared(r: CompletedDistanceMatrix | npt.ArrayLike) -> FloatArray:
    if isinstance(r, CompletedDistanceMatrix):
        return r.squared
    return np.asarray(r, dtype=np.float64)


def double_center(r: CompletedDistanceMatrix | npt.ArrayLike) -> FloatArray:
    """Γ = -½·A·R·A with the centering operator A = I - (1/K)·11ᵀ."""
    squared = _squared(r)
    k = squared.shape[0]
    centering = np.eye(k) - np.full((k, k), 1.0 / max(k, 1))
    gamma = -0.5 * centering @ squared @ centering
    return 0.5 * (gamma + gamma.T)


def kruskal_stress(r: CompletedDistanceMatrix | npt.ArrayLike, coords: npt.ArrayLike) -> float:
    """sqrt(Σ_{m≠n} (ρ_mn - r_mn)²) / Σ_{m≠n} ρ_mn², r_mn being embedding distances."""
    squared = _squared(r)
    y = np.asarray(coords, dtype=np.float64)
    if y.shape[0] != squared.shape[0]:
        raise ValueError(
            f"Embedding has {y.shape[0]} rows but the matrix is {squared.shape[0]}x{squared.shape[0]}"
        )
    rho = np.sqrt(np.maximum(squared, 0.0))
    embedded = np.linalg.norm(y[:, None, :] - y[None, :, :], axis=-1)
    off = ~np.eye(len(y), dtype=bool)
    denominator = float(np.sum(squared[off]))
    if denominator == 0.0:
        return 0.0
    return float(np.sqrt(np.sum((rho[off] - embedded[off]) ** 2)) / denominator)


def classical_mds(
    gamma: npt.ArrayLike,
    dims: int = 3,
    squared: CompletedDistanceMatrix | npt.ArrayLike | None = None,
) -> RelativeMap:
    """
    Embeds the double-centered matrix ``gamma`` in ``dims`` dimensions using
    its largest eigenpairs: coords = u·sqrt(v).

    Slightly negative eigenvalues (within 1e-8 of the largest) are treated as
    zero. More negative ones among the kept eigenvalues are also clamped, and
    the map is flagged non-Euclidean. Stress is computed when ``squared`` is
    given and is NaN otherwise.

    Raises:
        NumericalError: if the eigensolver does not converge.
    """
    g = np.asarray(gamma, dtype=np.float64)
    k = g.shape[0]
    if k == 0:
        return RelativeMap(np.zeros((0, dims)), np.zeros(0), 0.0)

    try:
        values, vectors = linalg.eigh(g)
    except linalg.LinAlgError as e:
        raise NumericalError(f"Eigendecomposition of the {k}x{k} MDS matrix failed: {e}") from e
    order = np.argsort(values)[::-1][: min(dims, k)]
    top = values[order]
    basis = vectors[:, order]

    scale = max(float(np.max(np.abs(values))), 0.0)
    tolerance = EIGEN_CLAMP_TOLERANCE * scale
    non_euclidean = bool(np.any(top < -tolerance))
    if non_euclidean:
        logger.warning(
            f"Distance matrix is not Euclidean: kept eigenvalues {top.tolist()} include "
            "negative values; clamping to zero"
        )
    clamped = np.maximum(top, 0.0)

    coords = basis * np.sqrt(clamped)
    if coords.shape[1] < dims:
        coords = np.hstack([coords, np.zeros((k, dims - coords.shape[1]))])
    coords = coords - coords.mean(axis=0)

    stress = float("nan") if squared is None else kruskal_stress(squared, coords)
    return RelativeMap(coords, clamped, stress, non_euclidean)


def procrustes_fit(
    anchors_true: npt.ArrayLike,
    anchors_est: npt.ArrayLike,
    *,
    allow_reflection: bool = True,
) -> SimilarityTransform:
    """
    Least-squares similarity transform taking ``anchors_est`` onto
    ``anchors_true``.

    The orthogonal factor comes from the SVD of the centered cross-covariance.
    MDS maps are only defined up to reflection, so by default the optimum may
    be improper (det = -1). With ``allow_reflection=False`` the smallest
    singular direction is flipped to force a proper rotation.

    Raises:
        GeometryError: with fewer than 4 anchors, or coplanar anchors.
        NumericalError: if the SVD does not converge.
    """
    truth = np.asarray(anchors_true, dtype=np.float64)
    est = np.asarray(anchors_est, dtype=np.float64)
    if truth.shape != est.shape or truth.ndim != 2 or truth.shape[1] != 3:
        raise ValueError(f"Anchor sets must both be (M, 3), got {truth.shape} and {est.shape}")
    if truth.shape[0] < 4:
        raise GeometryError(f"A 3D similarity fit needs at least 4 anchors, got {truth.shape[0]}")

    c0 = truth.mean(axis=0)
    b0 = est.mean(axis=0)
    c = truth - c0
    b = est - b0

    spread = linalg.svdvals(c)
    if spread[0] == 0.0 or spread[-1] / spread[0] < COPLANAR_TOLERANCE:
        raise GeometryError(f"Anchors are coplanar or collinear (singular values {spread})")
    norm_b = float(np.sum(b**2))
    if norm_b == 0.0:
        raise GeometryError("Estimated anchor positions all coincide")

    try:
        u, s, vt = linalg.svd(b.T @ c)
    except linalg.LinAlgError as e:
        raise NumericalError(f"SVD of the anchor cross-covariance failed: {e}") from e
    signs = np.ones(3)
    if not allow_reflection and np.linalg.det(u @ vt) < 0:
        signs[-1] = -1.0
    rotation = u @ np.diag(signs) @ vt
    scale = float(np.sum(s * signs) / norm_b)
    translation = c0 - scale * b0 @ rotation

    fitted = scale * est @ rotation + translation
    residual = float(np.sum((fitted - truth) ** 2))
    logger.debug(f"Procrustes fit over {truth.shape[0]} anchors: scale={scale:.6g}, q={residual:.3g}")
    return SimilarityTransform(scale, rotation, translation, residual)


def apply_transform(
    relative: RelativeMap | npt.ArrayLike, transform: SimilarityTransform
) -> FloatArray:
    coords = relative.coords if isinstance(relative, RelativeMap) else np.asarray(relative, dtype=np.float64)
    return transform.scale * coords @ transform.rotation + transform.translation


def localize(
    matrix: CompletedDistanceMatrix,
    nodes: Sequence[NodePose],
    *,
    allow_reflection: bool = True,
) -> LocalizationResult:
    """Relative map by classical MDS, then anchored into the absolute frame."""
    if matrix.k != len(nodes):
        raise ValueError(f"Matrix covers {matrix.k} nodes but {len(nodes)} were given")
    relative = classical_mds(double_center(matrix), dims=3, squared=matrix)
    truth = positions_of(nodes)
    anchors = anchor_ids(nodes)
    transform = procrustes_fit(
        truth[anchors], relative.coords[anchors], allow_reflection=allow_reflection
    )
    absolute = apply_transform(relative, transform)
    error = rmse(truth, absolute)
    logger.debug(
        f"Localized {matrix.k} nodes: stress={relative.stress:.3g}, rmse={error:.4g} m "
        f"(cost ~ K^3 + M^2 + K with K={matrix.k}, M={len(anchors)})"
    )
    return LocalizationResult(absolute, transform, relative.stress, error, relative)


def wcl_baseline(
    observations: Sequence[RangeObservation],
    anchors: Sequence[NodePose],
    *,
    k: int,
    completed: CompletedDistanceMatrix | None = None,
    region: Region | None = None,
) -> FloatArray:
    """
    Weighted centroid localization: each node is placed at the mean of the
    anchor positions weighted by 1/d̂.

    Directly measured anchor ranges are used where a node has any; otherwise
    the completed distances are. Anchors keep their own positions. A node
    with no anchor information lands at the region centroid (or the anchor
    centroid when no region is given).
    """
    anchor_list = sorted(anchors, key=lambda node: node.id)
    if not anchor_list:
        raise GeometryError("WCL needs at least one anchor")
    ids = [node.id for node in anchor_list]
    anchor_pos = np.array([node.position for node in anchor_list], dtype=np.float64)

    ranges = build_graph(observations, k).ranges[:, ids]
    has_direct = np.any(~np.isnan(ranges), axis=1)
    if completed is not None:
        fallback = completed.distances[:, ids]
        ranges = np.where(has_direct[:, None], ranges, fallback)

    weights = np.where(np.isnan(ranges), 0.0, 1.0 / np.maximum(np.nan_to_num(ranges), MIN_WCL_DISTANCE))
    total = weights.sum(axis=1)
    fallback_point = region.centroid if region is not None else anchor_pos.mean(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        estimate = (weights @ anchor_pos) / total[:, None]
    unreachable = total == 0
    unreachable[ids] = False
    if np.any(unreachable):
        logger.warning(
            f"WCL: {int(np.count_nonzero(unreachable))} nodes hear no anchor; "
            "placing them at the fallback centroid"
        )
    estimate[total == 0] = fallback_point
    estimate[ids] = anchor_pos
    return estimate
