"""
Line-of-sight optical ranging.

The chain is: received power (beam spreading and exponential extinction),
photon count per slot, and the IM-DD on/off-keying bit error rate. Inverting
the photon count through the Lambert W function gives the range.
"""

import math

import numpy as np
from scipy import special as sp

from ..arrays import FloatArray, Real, as_float_array, like
from ..errors import BerTargetError, GeometryError, NonPositiveDistanceError
from ..special import erfc_inv, lambert_w0
from .link import LinkModel, Technology
from .params import OpticalParams


def _check_geometry(params: OpticalParams) -> None:
    if not 0.0 < params.theta0 < math.pi:
        raise GeometryError(
            f"Optical divergence angle must lie in (0, pi), got {params.theta0}"
        )
    if math.cos(params.theta) <= 0.0:
        raise GeometryError(
            f"Optical trajectory angle must satisfy cos(theta) > 0, got {params.theta}"
        )


def optical_loss_factor(params: OpticalParams, r: Real) -> Real:
    """Extinction exp(-l·r) with l = scattering + absorption."""
    d = as_float_array(r)
    return like(r, np.exp(-params.loss_coefficient * d))


def _beam_gain(params: OpticalParams) -> float:
    return (
        params.p_t
        * params.eta_m
        * params.eta_n
        * params.area_n
        * math.cos(params.theta)
        / (2.0 * math.pi * (1.0 - math.cos(params.theta0)))
    )


def optical_received_power(params: OpticalParams, r: Real) -> Real:
    """Received power (W) at distance ``r``."""
    _check_geometry(params)
    d = as_float_array(r)
    if np.any(d <= 0):
        raise NonPositiveDistanceError("Optical power requires r > 0")
    return like(r, _beam_gain(params) * np.exp(-params.loss_coefficient * d) / d**2)


def _photons_per_watt(params: OpticalParams) -> float:
    return (
        params.eta_n
        * params.wavelength
        / (params.t_slot * params.data_rate * params.planck * params.c_water)
    )


def optical_photon_count(params: OpticalParams, p_r: Real) -> Real:
    """Photons collected in one counting interval for received power ``p_r``."""
    return like(p_r, as_float_array(p_r) * _photons_per_watt(params))


def optical_ber(params: OpticalParams, d_n: Real) -> Real:
    """On/off-keying bit error rate when ``d_n`` signal photons arrive."""
    noise = params.dark_count + params.background
    photons = as_float_array(d_n)
    gap = np.sqrt(noise + photons) - math.sqrt(noise)
    return like(d_n, 0.5 * sp.erfc(math.sqrt(params.t_slot / 2.0) * gap))


def optical_required_photons(params: OpticalParams) -> float:
    """
    Signal photons needed to meet ``params.ber_target``.

    Raises:
        BerTargetError: if the target is outside (0, 0.5].
    """
    g = params.ber_target
    if not 0.0 < g <= 0.5:
        raise BerTargetError(f"BER target must lie in (0, 0.5], got {g}")
    noise = params.dark_count + params.background
    root = math.sqrt(noise) + math.sqrt(2.0 / params.t_slot) * erfc_inv(2.0 * g)
    return max(root**2 - noise, 0.0)


def optical_range_from_photons(
    params: OpticalParams, photons: Real, *, printed_form: bool = False
) -> Real:
    """
    Distance at which ``photons`` signal photons are collected per slot.

    With ρ = C·exp(-l·r)/r², r = (2/l)·W0((l/2)·sqrt(C/ρ)). ``printed_form``
    applies the variant that divides l by cos(theta); it coincides with the
    exact inverse only at theta = 0.
    """
    _check_geometry(params)
    rho = as_float_array(photons)
    constant = _beam_gain(params) * _photons_per_watt(params)
    with np.errstate(divide="ignore"):
        reach = np.sqrt(constant / rho)
    extinction = params.loss_coefficient
    if extinction == 0:
        return like(photons, reach)
    if printed_form:
        extinction = extinction / math.cos(params.theta)
    finite = np.where(np.isinf(reach), 0.0, 0.5 * extinction * reach)
    r = (2.0 / extinction) * as_float_array(lambert_w0(finite))
    return like(photons, np.where(np.isinf(reach), np.inf, r))


def optical_invert_range(params: OpticalParams, *, printed_form: bool = False) -> float:
    """Longest range at which the link still meets its BER target."""
    return float(
        optical_range_from_photons(
            params, optical_required_photons(params), printed_form=printed_form
        )
    )


class OpticalLink(LinkModel):
    def __init__(self, params: OpticalParams, bracket: tuple[float, float]) -> None:
        _check_geometry(params)
        super().__init__(bracket)
        self.params = params

    @property
    def technology(self) -> Technology:
        return Technology.OPTICAL

    def _level_db(self, r: FloatArray) -> FloatArray:
        return 10.0 * np.log10(optical_received_power(self.params, r))

    def _invert_level_db(self, level_db: FloatArray) -> FloatArray:
        power = np.power(10.0, level_db / 10.0)
        photons = optical_photon_count(self.params, power)
        return optical_range_from_photons(self.params, photons)
