"""Acoustic ranging from spherical spreading plus Thorp absorption."""

import math

import numpy as np

from ..arrays import FloatArray, Real, as_float_array, like
from ..errors import NonPositiveDistanceError
from ..special import lambert_w0
from .link import LinkModel, Technology
from .params import AcousticParams

# dB per neper-of-range: 20·log10(r) = SPREADING·ln(r)
SPREADING = 20.0 / math.log(10.0)


def thorp_absorption(f: Real) -> Real:
    """Thorp absorption (dB/km) for a carrier at ``f`` kHz."""
    f2 = as_float_array(f) ** 2
    return like(f, 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2))


def acoustic_path_loss(params: AcousticParams, r: Real) -> Real:
    """Transmission loss (dB) over ``r`` metres, cylindrical spreading ignored."""
    d = as_float_array(r)
    if np.any(d <= 0):
        raise NonPositiveDistanceError("Acoustic path loss requires r > 0")
    phi = thorp_absorption(params.f)
    return like(r, 20.0 * np.log10(d) + 1e-3 * phi * d)


def acoustic_invert_range(
    params: AcousticParams, loss: Real, *, printed_constants: bool = False
) -> Real:
    """
    Distance whose transmission loss equals ``loss`` dB.

    Solves k·ln(r) + a·r = loss with k = 20/ln 10 and a = 1e-3·φ, giving
    r = (k/a)·W0((a/k)·exp(loss/k)).

    ``printed_constants`` evaluates the same expression with the rounded
    constants 2e4/2.3, 1.15e-4 and 0.11; those miss the exact round trip by
    several dB and are kept only for comparison.
    """
    level = as_float_array(loss)
    phi = thorp_absorption(params.f)
    if phi == 0:
        return like(loss, np.power(10.0, level / 20.0))
    if printed_constants:
        r = 2e4 * lambert_w0(1.15e-4 * phi * np.exp(0.11 * level)) / (2.3 * phi)
        return like(loss, as_float_array(r))
    a = 1e-3 * phi
    r = (SPREADING / a) * lambert_w0((a / SPREADING) * np.exp(level / SPREADING))
    return like(loss, as_float_array(r))


class AcousticLink(LinkModel):
    def __init__(self, params: AcousticParams, bracket: tuple[float, float]) -> None:
        super().__init__(bracket)
        self.params = params

    @property
    def technology(self) -> Technology:
        return Technology.ACOUSTIC

    def _level_db(self, r: FloatArray) -> FloatArray:
        return self.params.p_t - acoustic_path_loss(self.params, r)

    def _invert_level_db(self, level_db: FloatArray) -> FloatArray:
        return acoustic_invert_range(self.params, self.params.p_t - level_db)
