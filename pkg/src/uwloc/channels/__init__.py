from .acoustic import (
    AcousticLink,
    acoustic_invert_range,
    acoustic_path_loss,
    thorp_absorption,
)
from .factory import get_link_model
from .link import LinkModel, Technology
from .mi import MiLink, mi_invert_range, mi_received_power, skin_depth, skin_depth_factor
from .optical import (
    OpticalLink,
    optical_ber,
    optical_invert_range,
    optical_loss_factor,
    optical_photon_count,
    optical_range_from_photons,
    optical_received_power,
    optical_required_photons,
)
from .params import (
    WATER_CONDUCTIVITY,
    AcousticParams,
    ChannelParams,
    MiParams,
    OpticalParams,
    ShadowingModel,
)
from .shadowing import shadowed_power_sample

__all__ = [
    "WATER_CONDUCTIVITY",
    "AcousticLink",
    "AcousticParams",
    "ChannelParams",
    "LinkModel",
    "MiLink",
    "MiParams",
    "OpticalLink",
    "OpticalParams",
    "ShadowingModel",
    "Technology",
    "acoustic_invert_range",
    "acoustic_path_loss",
    "get_link_model",
    "mi_invert_range",
    "mi_received_power",
    "optical_ber",
    "optical_invert_range",
    "optical_loss_factor",
    "optical_photon_count",
    "optical_range_from_photons",
    "optical_received_power",
    "optical_required_photons",
    "shadowed_power_sample",
    "skin_depth",
    "skin_depth_factor",
    "thorp_absorption",
]
