"""Localization error and communication-energy metrics."""

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .arrays import FloatArray, Real, as_float_array, like


@dataclass(frozen=True)
class EnergyParams:
    """Energy model constants: J per bit, J per node of circuitry, carrier wavelength (m)."""

    e_bit: float = 1e-6
    e_fundamental: float = 0.0
    wavelength: float = 1.0

    def __post_init__(self) -> None:
        if self.e_bit < 0 or self.e_fundamental < 0 or self.wavelength <= 0:
            raise ValueError(f"Invalid energy parameters: {self}")


def _node_errors(true_pos: npt.ArrayLike, est_pos: npt.ArrayLike) -> FloatArray:
    truth = np.asarray(true_pos, dtype=np.float64)
    est = np.asarray(est_pos, dtype=np.float64)
    if truth.shape != est.shape or truth.ndim != 2:
        raise ValueError(
            f"Position arrays must share a (K, 3) shape, got {truth.shape} and {est.shape}"
        )
    return np.linalg.norm(est - truth, axis=1)


def rmse(true_pos: npt.ArrayLike, est_pos: npt.ArrayLike) -> float:
    """Mean over nodes of the Euclidean position error (mean of norms)."""
    errors = _node_errors(true_pos, est_pos)
    if errors.size == 0:
        return 0.0
    return float(errors.mean())


def node_tx_energy(p: EnergyParams, r: Real) -> Real:
    """Transmit energy of one node with range ``r``: E_B·(4πr/λ)²."""
    d = as_float_array(r)
    return like(r, p.e_bit * (4.0 * math.pi * d / p.wavelength) ** 2)


def total_energy(p: EnergyParams, ranges: npt.ArrayLike) -> float:
    """
    Network energy K·E_F + K·Σ E_R over the K nodes.

    The transmission sum is multiplied by the node count as the energy model
    is stated; see docs/REPRODUCING.md.
    """
    r = np.asarray(ranges, dtype=np.float64)
    k = r.size
    if k < 1:
        raise ValueError("total_energy needs at least one node")
    tx = float(np.sum(node_tx_energy(p, r)))
    return k * p.e_fundamental + k * tx


def energy_error_product(
    p: EnergyParams,
    ranges: npt.ArrayLike,
    true_pos: npt.ArrayLike,
    est_pos: npt.ArrayLike,
) -> float:
    """
    Energy-error trade-off C(R) = E_B·(4π/λ)²·Σ R_m² · Σ_m ‖err_m‖ / K.

    Identical to ``sum(node_tx_energy) * rmse`` by construction.
    """
    r = np.asarray(ranges, dtype=np.float64)
    errors = _node_errors(true_pos, est_pos)
    if r.shape != (errors.shape[0],):
        raise ValueError(
            f"Expected one range per node ({errors.shape[0]}), got shape {r.shape}"
        )
    k = errors.shape[0]
    scale = p.e_bit * (4.0 * math.pi / p.wavelength) ** 2
    return float(scale * np.sum(r**2) * np.sum(errors) / k)
