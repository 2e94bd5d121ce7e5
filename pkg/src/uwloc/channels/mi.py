"""Magnetic-induction ranging: coupled-coil received power with skin-depth loss."""

import logging
import math

import numpy as np

from ..arrays import FloatArray, Real, as_float_array, like
from ..errors import NonPositiveDistanceError, RangeOutOfBracketError
from .link import LinkModel, Technology
from .params import MiParams

logger = logging.getLogger(__name__)

_BISECTION_STEPS = 80


def skin_depth(params: MiParams) -> float:
    """Skin depth δ = sqrt(2 / (ω μ σ)) in metres; infinite for σ = 0."""
    if params.sigma <= 0:
        return math.inf
    return math.sqrt(2.0 / (params.omega * params.mu * params.sigma))


def skin_depth_factor(params: MiParams, r: Real) -> Real:
    """Field attenuation G = exp(-r/δ), in (0, 1]."""
    d = as_float_array(r)
    return like(r, np.exp(-d / skin_depth(params)))


def _log_coupling(params: MiParams) -> float:
    """Natural log of the distance-independent factor of the coil equation."""
    numerator = (
        params.omega
        * params.mu
        * params.p_t
        * params.z_t
        * params.z_r
        * params.d_t**3
        * params.d_r**3
        * math.sin(params.theta_mn) ** 2
    )
    if numerator <= 0:
        return -math.inf
    d0 = math.sqrt(params.d0_t * params.d0_r)
    return math.log(numerator / (16.0 * d0))


def _log_power(params: MiParams, r: FloatArray) -> FloatArray:
    # ln P = ln C - 2 ln r - 2 r / δ
    return _log_coupling(params) - 2.0 * np.log(r) - 2.0 * r / skin_depth(params)


def mi_received_power(params: MiParams, r: Real) -> Real:
    """Received power (W) at distance ``r``: the coil equation times G²."""
    d = as_float_array(r)
    if np.any(d <= 0):
        raise NonPositiveDistanceError("MI power requires r > 0")
    return like(r, np.exp(_log_power(params, d)))


def _bisect_log_power(
    params: MiParams, log_power: FloatArray, bracket: tuple[float, float]
) -> FloatArray:
    lo = np.full_like(log_power, math.log(bracket[0]))
    hi = np.full_like(log_power, math.log(bracket[1]))
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        # Power falls with distance: too much power at mid means the root is further out.
        further = _log_power(params, np.exp(mid)) > log_power
        lo = np.where(further, mid, lo)
        hi = np.where(further, hi, mid)
    return np.exp(0.5 * (lo + hi))


def mi_invert_range(
    params: MiParams,
    observed_power: Real,
    bracket: tuple[float, float] = (1e-3, 100.0),
) -> Real:
    """
    Distance at which the forward model yields ``observed_power`` (W).

    The forward model is monotone, so the inverse is found by bisection in
    log-distance over ``bracket``.

    Raises:
        RangeOutOfBracketError: if the power is not reachable inside the bracket.
    """
    p = as_float_array(observed_power)
    with np.errstate(divide="ignore"):
        log_p = np.log(p)
    high = float(_log_power(params, as_float_array(bracket[0])))
    low = float(_log_power(params, as_float_array(bracket[1])))
    if not np.isfinite(high) or np.any((log_p < low) | (log_p > high)):
        raise RangeOutOfBracketError(
            f"MI power outside achievable range "
            f"[{math.exp(low):.6g}, {math.exp(high):.6g}] W",
            bracket,
        )
    return like(observed_power, _bisect_log_power(params, log_p, bracket))


class MiLink(LinkModel):
    def __init__(self, params: MiParams, bracket: tuple[float, float]) -> None:
        super().__init__(bracket)
        self.params = params

    @property
    def technology(self) -> Technology:
        return Technology.MI

    def _level_db(self, r: FloatArray) -> FloatArray:
        return _log_power(self.params, r) * (10.0 / math.log(10.0))

    def _invert_level_db(self, level_db: FloatArray) -> FloatArray:
        log_p = level_db * (math.log(10.0) / 10.0)
        return _bisect_log_power(self.params, log_p, self.bracket)
