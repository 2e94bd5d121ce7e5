from .acoustic import AcousticLink
from .link import LinkModel, Technology
from .mi import MiLink
from .optical import OpticalLink
from .params import ChannelParams


def get_link_model(technology: Technology | str, channels: ChannelParams) -> LinkModel:
    """
    Returns the LinkModel for ``technology`` built from ``channels``.

    Raises:
        ValueError: if the technology name is not one of optical, mi, acoustic.
    """
    name = technology.value if isinstance(technology, Technology) else str(technology)
    name = name.lower()

    if name == Technology.OPTICAL.value:
        return OpticalLink(channels.optical, channels.optical_bracket)

    elif name == Technology.MI.value:
        return MiLink(channels.mi, channels.mi_bracket)

    elif name == Technology.ACOUSTIC.value:
        return AcousticLink(channels.acoustic, channels.acoustic_bracket)

    raise ValueError(f"Unsupported technology: {name}")
