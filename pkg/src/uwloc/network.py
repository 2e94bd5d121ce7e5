"""
Scenario generation and synthesis of noisy single-hop range observations.

Node ids are assigned sensors first, then relays, then anchors, so sensor ids
(and the noise substreams keyed on them) stay put when the anchor count is
swept.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd

from .arrays import FloatArray
from .channels import ChannelParams, Technology, get_link_model, shadowed_power_sample
from .errors import ConfigError, GeometryError
from .metrics import EnergyParams

logger = logging.getLogger(__name__)

MIN_MEASURED_RANGE = 1e-3
MIN_VARIANCE = 1e-12

# Inset tetrahedron first, then the remaining box corners.
_SPREAD_CORNERS = np.array(
    [
        [0, 0, 0],
        [1, 1, 0],
        [1, 0, 1],
        [0, 1, 1],
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, 1, 1],
    ],
    dtype=np.float64,
)
_SPREAD_INSET = 0.1


class Role(str, Enum):
    ANCHOR = "anchor"
    SENSOR = "sensor"
    RELAY = "relay"


class NoiseMode(str, Enum):
    FLAT = "flat"
    DISTANCE = "distance"


class AnchorPlacement(str, Enum):
    SPREAD = "spread"
    RANDOM = "random"


@dataclass(frozen=True)
class NodePose:
    id: int
    role: Role
    position: tuple[float, float, float]

    @property
    def is_anchor(self) -> bool:
        return self.role is Role.ANCHOR


@dataclass(frozen=True)
class Region:
    """Axis-aligned box given by its origin corner and edge lengths (m)."""

    size: tuple[float, float, float] = (100.0, 100.0, 100.0)
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    @property
    def volume(self) -> float:
        return float(np.prod(self.size))

    @property
    def centroid(self) -> FloatArray:
        return np.asarray(self.origin) + 0.5 * np.asarray(self.size)

    def contains(self, points: FloatArray) -> bool:
        lo = np.asarray(self.origin)
        hi = lo + np.asarray(self.size)
        return bool(np.all((points >= lo) & (points <= hi)))


@dataclass(frozen=True)
class TechThresholds:
    optical_max_m: float = 10.0
    mi_max_m: float = 30.0


@dataclass(frozen=True)
class TechMultipliers:
    """Per-technology scale applied to the base range-noise variance."""

    optical: float = 0.5
    mi: float = 1.0
    acoustic: float = 2.0

    def for_technology(self, technology: Technology) -> float:
        return float(getattr(self, technology.name.lower()))


@dataclass(frozen=True)
class ScenarioConfig:
    region: Region = field(default_factory=Region)
    n_anchors: int = 4
    n_sensors: int = 96
    n_relays: int = 4
    noise_variance: float = 0.1
    noise_mode: NoiseMode = NoiseMode.FLAT
    noise_epsilon: float = 0.1
    noise_delta: float = 1.0
    tech_multipliers: TechMultipliers = field(default_factory=TechMultipliers)
    transmission_range: float = 200.0
    tech_thresholds: TechThresholds = field(default_factory=TechThresholds)
    anchor_placement: AnchorPlacement = AnchorPlacement.SPREAD
    fuse: bool = False
    seed: int = 2024
    channels: ChannelParams = field(default_factory=ChannelParams)
    energy: EnergyParams = field(default_factory=EnergyParams)

    @property
    def n_nodes(self) -> int:
        return self.n_anchors + self.n_sensors + self.n_relays

    def validate(self) -> None:
        """
        Raises:
            ConfigError: if counts, noise settings or ranges are out of bounds.
        """
        if self.n_anchors < 4:
            raise ConfigError(
                f"At least 4 anchors are needed for a 3D similarity fit, got {self.n_anchors}"
            )
        if self.n_sensors < 0 or self.n_relays < 0:
            raise ConfigError("Sensor and relay counts must be non-negative")
        if self.noise_variance < 0:
            raise ConfigError(f"noise_variance must be >= 0, got {self.noise_variance}")
        if self.noise_mode is NoiseMode.DISTANCE and (
            self.noise_epsilon <= 0 or self.noise_delta < 1
        ):
            raise ConfigError("Distance noise needs epsilon > 0 and delta >= 1")
        if self.transmission_range < 0:
            raise ConfigError(
                f"transmission_range must be >= 0, got {self.transmission_range}"
            )
        thresholds = self.tech_thresholds
        if not 0 < thresholds.optical_max_m <= thresholds.mi_max_m:
            raise ConfigError(
                "Technology thresholds must satisfy 0 < optical_max_m <= mi_max_m"
            )


@dataclass(frozen=True, slots=True)
class RangeObservation:
    """One measured single-hop range, stored once per unordered pair (m < n)."""

    m: int
    n: int
    technology: Technology
    measured_range: float
    variance: float
    weight: float


def positions_of(nodes: Sequence[NodePose]) -> FloatArray:
    """(K, 3) array of true positions ordered by node id."""
    ordered = sorted(nodes, key=lambda node: node.id)
    return np.array([node.position for node in ordered], dtype=np.float64).reshape(-1, 3)


def anchor_ids(nodes: Iterable[NodePose]) -> list[int]:
    return sorted(node.id for node in nodes if node.is_anchor)


def _anchor_positions(
    cfg: ScenarioConfig, rng: np.random.Generator
) -> FloatArray:
    origin = np.asarray(cfg.region.origin)
    size = np.asarray(cfg.region.size)
    m = cfg.n_anchors
    if cfg.anchor_placement is AnchorPlacement.RANDOM:
        return origin + rng.uniform(size=(m, 3)) * size
    corners = _SPREAD_CORNERS[: min(m, len(_SPREAD_CORNERS))]
    fractions = _SPREAD_INSET + (1.0 - 2.0 * _SPREAD_INSET) * corners
    extra = rng.uniform(size=(max(m - len(corners), 0), 3))
    return origin + np.vstack([fractions, extra]) * size


def generate_scenario(cfg: ScenarioConfig) -> list[NodePose]:
    """
    Places sensors and relays uniformly in the region and anchors by the
    configured strategy. Each role draws from its own seeded stream.

    Raises:
        GeometryError: if the region has zero volume.
        ConfigError: if the configuration is invalid.
    """
    cfg.validate()
    if cfg.region.volume <= 0:
        raise GeometryError(f"Region {cfg.region.size} has zero volume")

    sensor_ss, relay_ss, anchor_ss = np.random.SeedSequence(cfg.seed).spawn(3)
    origin = np.asarray(cfg.region.origin)
    size = np.asarray(cfg.region.size)
    sensors = origin + np.random.default_rng(sensor_ss).uniform(size=(cfg.n_sensors, 3)) * size
    relays = origin + np.random.default_rng(relay_ss).uniform(size=(cfg.n_relays, 3)) * size
    anchors = _anchor_positions(cfg, np.random.default_rng(anchor_ss))

    nodes: list[NodePose] = []
    for role, block in ((Role.SENSOR, sensors), (Role.RELAY, relays), (Role.ANCHOR, anchors)):
        for row in block:
            nodes.append(NodePose(len(nodes), role, (float(row[0]), float(row[1]), float(row[2]))))

    logger.debug(
        f"Generated scenario: {cfg.n_sensors} sensors, {cfg.n_relays} relays, "
        f"{cfg.n_anchors} anchors in {cfg.region.size} m (seed {cfg.seed})"
    )
    return nodes


def select_technology(d_true: float, thresholds: TechThresholds) -> Technology:
    """Optical at short range, MI up to its reach, acoustic beyond."""
    if d_true <= thresholds.optical_max_m:
        return Technology.OPTICAL
    if d_true <= thresholds.mi_max_m:
        return Technology.MI
    return Technology.ACOUSTIC


_TECH_ORDER = (Technology.OPTICAL, Technology.MI, Technology.ACOUSTIC)


def _technology_masks(
    d: FloatArray, thresholds: TechThresholds, fuse: bool
) -> dict[Technology, FloatArray]:
    optical = d <= thresholds.optical_max_m
    mi = d <= thresholds.mi_max_m
    if fuse:
        return {
            Technology.OPTICAL: optical,
            Technology.MI: mi,
            Technology.ACOUSTIC: np.ones_like(optical),
        }
    return {
        Technology.OPTICAL: optical,
        Technology.MI: mi & ~optical,
        Technology.ACOUSTIC: ~mi,
    }


def _base_variance(cfg: ScenarioConfig, d: FloatArray) -> FloatArray:
    if cfg.noise_mode is NoiseMode.DISTANCE:
        return cfg.noise_epsilon * np.power(d, cfg.noise_delta - 1.0)
    return np.full_like(d, cfg.noise_variance)


def synthesize_observations(
    nodes: Sequence[NodePose], cfg: ScenarioConfig, rng: np.random.Generator
) -> list[RangeObservation]:
    """
    One noisy range per in-range pair (or one per applicable technology in
    fuse mode).

    Each range goes forward through the link model, picks up shadowing on the
    received level, is inverted back to a distance and then gets additive
    Gaussian range noise. Noise for pair (m, n) comes from row substreams
    keyed on (key, m) and indexed by n, where ``key`` is drawn once from
    ``rng``; a pair's draws therefore do not depend on the node count.

    Distances below a link's bracket, including coincident nodes, are ranged
    at the bracket minimum (1 mm for the default optical and MI links), so a
    noiseless pair at distance 0 measures that minimum.
    """
    positions = positions_of(nodes)
    k = len(positions)
    key = int(rng.integers(0, 2**63 - 1))
    if k < 2:
        return []

    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    in_range = np.triu(dist <= cfg.transmission_range, k=1)
    if not np.any(in_range):
        logger.debug("No node pair lies within transmission range")
        return []

    masks = _technology_masks(dist, cfg.tech_thresholds, cfg.fuse)
    links = {tech: get_link_model(tech, cfg.channels) for tech in _TECH_ORDER}
    shadowing = cfg.channels.shadowing

    levels = np.stack(
        [links[tech].received_db(np.maximum(dist, links[tech].bracket[0])) for tech in _TECH_ORDER],
        axis=-1,
    )
    shadowed = np.empty_like(levels)
    unit_noise = np.empty_like(levels)
    rows = np.flatnonzero(np.any(in_range, axis=1))
    for m in rows:
        noise_rng = np.random.default_rng([key, int(m), 0])
        shadow_rng = np.random.default_rng([key, int(m), 1])
        unit_noise[m] = noise_rng.standard_normal((k, len(_TECH_ORDER)))
        shadowed[m] = shadowed_power_sample(levels[m], shadowing, shadow_rng)

    base_var = _base_variance(cfg, np.where(dist > 0, dist, MIN_MEASURED_RANGE))
    observations: list[RangeObservation] = []
    for t, tech in enumerate(_TECH_ORDER):
        pair_mask = in_range & masks[tech]
        mi_idx, ni_idx = np.nonzero(pair_mask)
        if mi_idx.size == 0:
            continue
        estimate = links[tech].invert_db(shadowed[mi_idx, ni_idx, t], clip=True)
        variance = base_var[mi_idx, ni_idx] * cfg.tech_multipliers.for_technology(tech)
        noisy = estimate + np.sqrt(variance) * unit_noise[mi_idx, ni_idx, t]
        measured = np.maximum(noisy, MIN_MEASURED_RANGE)
        recorded = np.maximum(variance, MIN_VARIANCE)
        observations.extend(
            RangeObservation(int(a), int(b), tech, float(r), float(v), float(1.0 / v))
            for a, b, r, v in zip(mi_idx, ni_idx, measured, recorded, strict=True)
        )

    observations.sort(key=lambda obs: (obs.m, obs.n, _TECH_ORDER.index(obs.technology)))
    logger.debug(
        f"Synthesized {len(observations)} range observations over {k} nodes "
        f"(R={cfg.transmission_range} m, noise={cfg.noise_mode.value})"
    )
    return observations


def nodes_frame(nodes: Sequence[NodePose]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "node_id": [node.id for node in nodes],
            "role": [node.role.value for node in nodes],
            "x": [node.position[0] for node in nodes],
            "y": [node.position[1] for node in nodes],
            "z": [node.position[2] for node in nodes],
        }
    )


def observations_frame(
    observations: Sequence[RangeObservation],
    nodes: Sequence[NodePose] | None = None,
    channels: ChannelParams | None = None,
) -> pd.DataFrame:
    """
    Tabulates observations. With ``nodes`` and ``channels`` it adds the true
    distance and the received SNR against the configured noise power.
    """
    frame = pd.DataFrame(
        {
            "m": [obs.m for obs in observations],
            "n": [obs.n for obs in observations],
            "technology": [obs.technology.value for obs in observations],
            "measured_range_m": [obs.measured_range for obs in observations],
            "variance_m2": [obs.variance for obs in observations],
            "weight": [obs.weight for obs in observations],
        }
    )
    if nodes is None or channels is None or not observations:
        return frame
    positions = positions_of(nodes)
    true_range = np.linalg.norm(
        positions[frame["m"].to_numpy()] - positions[frame["n"].to_numpy()], axis=1
    )
    received = np.empty_like(true_range)
    for tech in _TECH_ORDER:
        mask = (frame["technology"] == tech.value).to_numpy()
        if np.any(mask):
            link = get_link_model(tech, channels)
            received[mask] = np.asarray(link.received_db(true_range[mask]))
    frame["true_range_m"] = true_range
    frame["received_db"] = received
    # Acoustic levels are source-relative dB, so SNR is only defined for MI and optical.
    frame["snr_db"] = np.where(
        frame["technology"] == Technology.ACOUSTIC.value,
        np.nan,
        received - 10.0 * np.log10(channels.noise_power_w),
    )
    return frame
