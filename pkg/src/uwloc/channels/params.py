"""Parameter records for the three link technologies."""

import math
from dataclasses import dataclass, field

# Conductivity presets (S/m).
WATER_CONDUCTIVITY: dict[str, float] = {"clean": 0.01, "seawater": 4.0}

PLANCK = 6.62607015e-34


@dataclass(frozen=True)
class MiParams:
    """Magnetic-induction coil link. SI units throughout."""

    omega: float = 2.0 * math.pi * 500.0
    mu: float = 4.0 * math.pi * 1e-7
    z_t: int = 20
    z_r: int = 20
    d_t: float = 0.15
    d_r: float = 0.15
    theta_mn: float = math.pi / 2.0
    d0_t: float = 0.01
    d0_r: float = 0.01
    sigma: float = WATER_CONDUCTIVITY["seawater"]
    p_t: float = 1.0


@dataclass(frozen=True)
class AcousticParams:
    """Acoustic link: carrier frequency in kHz and source level in dB."""

    f: float = 10.0
    p_t: float = 180.0


@dataclass(frozen=True)
class OpticalParams:
    """Line-of-sight optical link with IM-DD photon counting."""

    s_lambda: float = 0.037
    a_lambda: float = 0.114
    eta_m: float = 0.9
    eta_n: float = 0.9
    area_n: float = 0.01
    theta: float = 0.0
    theta0: float = math.pi / 6.0
    p_t: float = 1.0
    t_slot: float = 1e-3
    data_rate: float = 1e6
    planck: float = PLANCK
    c_water: float = 2.25e8
    wavelength: float = 532e-9
    dark_count: float = 10.0
    background: float = 10.0
    ber_target: float = 1e-6

    @property
    def loss_coefficient(self) -> float:
        return self.s_lambda + self.a_lambda


@dataclass(frozen=True)
class ShadowingModel:
    """Log-normal shadowing: φ in dB, averaged over N repeated power samples."""

    std_dev: float = 0.0
    mean_estimator_count: int = 10

    def __post_init__(self) -> None:
        if self.std_dev < 0:
            raise ValueError(f"Shadowing std_dev must be >= 0, got {self.std_dev}")
        if self.mean_estimator_count < 1:
            raise ValueError(
                "Shadowing mean_estimator_count must be >= 1, "
                f"got {self.mean_estimator_count}"
            )


@dataclass(frozen=True)
class ChannelParams:
    """Everything the link factory needs, including the inversion brackets (m)."""

    mi: MiParams = field(default_factory=MiParams)
    acoustic: AcousticParams = field(default_factory=AcousticParams)
    optical: OpticalParams = field(default_factory=OpticalParams)
    shadowing: ShadowingModel = field(default_factory=ShadowingModel)
    mi_bracket: tuple[float, float] = (1e-3, 100.0)
    acoustic_bracket: tuple[float, float] = (0.1, 20_000.0)
    optical_bracket: tuple[float, float] = (1e-3, 200.0)
    noise_power_w: float = 2e-6
