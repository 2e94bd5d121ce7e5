import logging
import math
import os
from collections.abc import Callable, Mapping
from dataclasses import fields, is_dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, TypeVar

from dotenv import dotenv_values, load_dotenv

from .channels import WATER_CONDUCTIVITY
from .errors import ConfigError
from .network import AnchorPlacement, NoiseMode, ScenarioConfig

logger = logging.getLogger(__name__)

load_dotenv()

# Centralized process-level settings
LOG_LEVEL = os.getenv("UWLOC_LOG_LEVEL", "INFO").upper()
DEFAULT_TRIALS = int(os.getenv("UWLOC_TRIALS", "20"))
DEFAULT_WORKERS = int(os.getenv("UWLOC_WORKERS", "1"))
OUT_DIR = os.getenv("UWLOC_OUT_DIR", "results")

ENV_PREFIX = "UWLOC_"

E = TypeVar("E", bound=Enum)


def _float(raw: str) -> float:
    return float(raw)


def _int(raw: str) -> int:
    return int(raw)


def _bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _floats(count: int) -> Callable[[str], tuple[float, ...]]:
    def parse(raw: str) -> tuple[float, ...]:
        parts = [float(p) for p in raw.split(",")]
        if len(parts) != count:
            raise ValueError(f"expected {count} comma-separated numbers")
        return tuple(parts)

    return parse


def _enum(cls: type[E]) -> Callable[[str], E]:
    def parse(raw: str) -> E:
        return cls(raw.strip().lower())

    return parse


def _hz_to_omega(raw: str) -> float:
    return 2.0 * math.pi * float(raw)


def _water(raw: str) -> float:
    name = raw.strip().lower()
    if name not in WATER_CONDUCTIVITY:
        raise ValueError(f"expected one of {sorted(WATER_CONDUCTIVITY)}")
    return WATER_CONDUCTIVITY[name]


# Key -> (dotted field path on ScenarioConfig, parser). Keys apply in this
# order, so MI_SIGMA overrides the MI_WATER preset.
SCHEMA: dict[str, tuple[str, Callable[[str], Any]]] = {
    "REGION": ("region.size", _floats(3)),
    "REGION_ORIGIN": ("region.origin", _floats(3)),
    "N_ANCHORS": ("n_anchors", _int),
    "N_SENSORS": ("n_sensors", _int),
    "N_RELAYS": ("n_relays", _int),
    "ANCHOR_PLACEMENT": ("anchor_placement", _enum(AnchorPlacement)),
    "SEED": ("seed", _int),
    "TX_RANGE": ("transmission_range", _float),
    "FUSE": ("fuse", _bool),
    "NOISE_MODE": ("noise_mode", _enum(NoiseMode)),
    "NOISE_VARIANCE": ("noise_variance", _float),
    "NOISE_EPSILON": ("noise_epsilon", _float),
    "NOISE_DELTA": ("noise_delta", _float),
    "TECH_MULT_OPTICAL": ("tech_multipliers.optical", _float),
    "TECH_MULT_MI": ("tech_multipliers.mi", _float),
    "TECH_MULT_ACOUSTIC": ("tech_multipliers.acoustic", _float),
    "OPTICAL_MAX_M": ("tech_thresholds.optical_max_m", _float),
    "MI_MAX_M": ("tech_thresholds.mi_max_m", _float),
    "MI_FREQUENCY_HZ": ("channels.mi.omega", _hz_to_omega),
    "MI_PERMEABILITY": ("channels.mi.mu", _float),
    "MI_TURNS_T": ("channels.mi.z_t", _int),
    "MI_TURNS_R": ("channels.mi.z_r", _int),
    "MI_RADIUS_T": ("channels.mi.d_t", _float),
    "MI_RADIUS_R": ("channels.mi.d_r", _float),
    "MI_ANGLE": ("channels.mi.theta_mn", _float),
    "MI_WIRE_T": ("channels.mi.d0_t", _float),
    "MI_WIRE_R": ("channels.mi.d0_r", _float),
    "MI_WATER": ("channels.mi.sigma", _water),
    "MI_SIGMA": ("channels.mi.sigma", _float),
    "MI_POWER": ("channels.mi.p_t", _float),
    "ACOUSTIC_FREQ_KHZ": ("channels.acoustic.f", _float),
    "ACOUSTIC_SOURCE_DB": ("channels.acoustic.p_t", _float),
    "OPTICAL_SCATTERING": ("channels.optical.s_lambda", _float),
    "OPTICAL_ABSORPTION": ("channels.optical.a_lambda", _float),
    "OPTICAL_ETA_T": ("channels.optical.eta_m", _float),
    "OPTICAL_ETA_R": ("channels.optical.eta_n", _float),
    "OPTICAL_AREA": ("channels.optical.area_n", _float),
    "OPTICAL_THETA": ("channels.optical.theta", _float),
    "OPTICAL_THETA0": ("channels.optical.theta0", _float),
    "OPTICAL_POWER": ("channels.optical.p_t", _float),
    "OPTICAL_SLOT": ("channels.optical.t_slot", _float),
    "OPTICAL_DATA_RATE": ("channels.optical.data_rate", _float),
    "OPTICAL_WAVELENGTH": ("channels.optical.wavelength", _float),
    "OPTICAL_DARK_COUNT": ("channels.optical.dark_count", _float),
    "OPTICAL_BACKGROUND": ("channels.optical.background", _float),
    "OPTICAL_BER": ("channels.optical.ber_target", _float),
    "SHADOWING_STD_DB": ("channels.shadowing.std_dev", _float),
    "SHADOWING_SAMPLES": ("channels.shadowing.mean_estimator_count", _int),
    "MI_BRACKET": ("channels.mi_bracket", _floats(2)),
    "ACOUSTIC_BRACKET": ("channels.acoustic_bracket", _floats(2)),
    "OPTICAL_BRACKET": ("channels.optical_bracket", _floats(2)),
    "NOISE_POWER_W": ("channels.noise_power_w", _float),
    "ENERGY_E_BIT": ("energy.e_bit", _float),
    "ENERGY_E_FUNDAMENTAL": ("energy.e_fundamental", _float),
    "ENERGY_WAVELENGTH": ("energy.wavelength", _float),
}


def _set_path(obj: Any, path: list[str], value: Any) -> Any:
    head, *rest = path
    if not is_dataclass(obj) or head not in {f.name for f in fields(obj)}:
        raise ConfigError(f"No configuration field {head!r}")
    if rest:
        value = _set_path(getattr(obj, head), rest, value)
    return replace(obj, **{head: value})


def apply_overrides(cfg: ScenarioConfig, values: Mapping[str, str | None]) -> ScenarioConfig:
    """
    Applies schema keys from ``values`` to ``cfg``.

    Raises:
        ConfigError: on an unknown key, a missing value or an unparsable value.
    """
    unknown = sorted(set(values) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
    for key, (path, parse) in SCHEMA.items():
        if key not in values:
            continue
        raw = values[key]
        if raw is None or raw.strip() == "":
            raise ConfigError(f"Configuration key {key} has no value")
        try:
            parsed = parse(raw)
            cfg = _set_path(cfg, path.split("."), parsed)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid value for {key}: {raw!r} ({e})") from e
    return cfg


def env_overrides(environ: Mapping[str, str]) -> dict[str, str]:
    """Schema keys set in the environment with the UWLOC_ prefix."""
    return {
        key: environ[f"{ENV_PREFIX}{key}"]
        for key in SCHEMA
        if f"{ENV_PREFIX}{key}" in environ
    }


def load_scenario_config(
    path: str | Path | None = None,
    environ: Mapping[str, str] | None = None,
) -> ScenarioConfig:
    """
    Builds a ScenarioConfig from the defaults, then the dotenv-format file at
    ``path``, then UWLOC_-prefixed environment variables.

    Raises:
        ConfigError: if the file is missing, a key is unknown or a value is
            invalid, or the resulting scenario fails validation.
    """
    cfg = ScenarioConfig()
    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"Config file not found: {config_path}")
        logger.info(f"Loading scenario config from {config_path}")
        cfg = apply_overrides(cfg, dotenv_values(config_path))

    overrides = env_overrides(os.environ if environ is None else environ)
    if overrides:
        logger.info(f"Applying environment overrides: {sorted(overrides)}")
        cfg = apply_overrides(cfg, overrides)

    cfg.validate()
    return cfg
