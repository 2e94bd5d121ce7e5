from dataclasses import replace

import numpy as np
import pytest

from uwloc.channels import Technology
from uwloc.errors import ConfigError, GeometryError
from uwloc.network import (
    AnchorPlacement,
    NodePose,
    NoiseMode,
    Region,
    Role,
    ScenarioConfig,
    TechMultipliers,
    TechThresholds,
    anchor_ids,
    generate_scenario,
    nodes_frame,
    observations_frame,
    positions_of,
    select_technology,
    synthesize_observations,
)


@pytest.fixture
def small_cfg() -> ScenarioConfig:
    return ScenarioConfig(
        region=Region((20.0, 20.0, 20.0)),
        n_anchors=4,
        n_sensors=26,
        n_relays=2,
        noise_variance=0.0,
        seed=7,
    )


def _true_ranges(cfg: ScenarioConfig, observations: list) -> tuple[np.ndarray, np.ndarray]:
    positions = positions_of(generate_scenario(cfg))
    measured = np.array([obs.measured_range for obs in observations])
    truth = np.array(
        [np.linalg.norm(positions[obs.m] - positions[obs.n]) for obs in observations]
    )
    return measured, truth


def test_generate_scenario_layout(small_cfg: ScenarioConfig) -> None:
    """Test node counts, id order by role, and that every node lies in the region."""
    nodes = generate_scenario(small_cfg)

    assert len(nodes) == small_cfg.n_nodes == 32
    assert [node.id for node in nodes] == list(range(32))
    roles = [node.role for node in nodes]
    assert roles == [Role.SENSOR] * 26 + [Role.RELAY] * 2 + [Role.ANCHOR] * 4
    assert anchor_ids(nodes) == [28, 29, 30, 31]
    assert small_cfg.region.contains(positions_of(nodes))


def test_generate_scenario_reproducible(small_cfg: ScenarioConfig) -> None:
    """Test that the same seed gives the same positions and a new seed does not."""
    first = positions_of(generate_scenario(small_cfg))
    again = positions_of(generate_scenario(small_cfg))
    other = positions_of(generate_scenario(replace(small_cfg, seed=8)))

    np.testing.assert_array_equal(first, again)
    assert not np.allclose(first, other)


def test_generate_scenario_sensors_stable_across_anchor_counts(
    small_cfg: ScenarioConfig,
) -> None:
    """Test that adding anchors leaves sensor and relay positions untouched."""
    base = positions_of(generate_scenario(small_cfg))
    more = positions_of(generate_scenario(replace(small_cfg, n_anchors=8)))
    np.testing.assert_array_equal(base[:28], more[:28])


def test_spread_anchors_are_not_coplanar(small_cfg: ScenarioConfig) -> None:
    """Test that the spread placement starts with an inset tetrahedron."""
    nodes = generate_scenario(small_cfg)
    anchors = positions_of(nodes)[anchor_ids(nodes)]
    expected = np.array([[2, 2, 2], [18, 18, 2], [18, 2, 18], [2, 18, 18]], dtype=float)
    np.testing.assert_allclose(anchors, expected)
    centered = anchors - anchors.mean(axis=0)
    assert np.linalg.matrix_rank(centered) == 3


def test_random_anchor_placement(small_cfg: ScenarioConfig) -> None:
    """Test that random anchors are drawn inside the region."""
    cfg = replace(small_cfg, anchor_placement=AnchorPlacement.RANDOM, n_anchors=10)
    nodes = generate_scenario(cfg)
    anchors = positions_of(nodes)[anchor_ids(nodes)]
    assert anchors.shape == (10, 3)
    assert cfg.region.contains(anchors)


def test_region_origin_offsets_positions(small_cfg: ScenarioConfig) -> None:
    """Test that the region origin shifts every node."""
    shifted = replace(small_cfg, region=Region((20.0, 20.0, 20.0), (100.0, -50.0, 0.0)))
    delta = positions_of(generate_scenario(shifted)) - positions_of(generate_scenario(small_cfg))
    np.testing.assert_allclose(delta, np.tile([100.0, -50.0, 0.0], (32, 1)))


@pytest.mark.parametrize(
    "overrides, match",
    [
        ({"n_anchors": 3}, "At least 4 anchors"),
        ({"n_sensors": -1}, "non-negative"),
        ({"noise_variance": -0.1}, "noise_variance"),
        ({"noise_mode": NoiseMode.DISTANCE, "noise_delta": 0.5}, "epsilon > 0 and delta >= 1"),
        ({"transmission_range": -1.0}, "transmission_range"),
        ({"tech_thresholds": TechThresholds(40.0, 30.0)}, "thresholds"),
    ],
)
def test_scenario_config_validation(
    small_cfg: ScenarioConfig, overrides: dict, match: str
) -> None:
    """Test that invalid settings raise ConfigError."""
    with pytest.raises(ConfigError, match=match):
        generate_scenario(replace(small_cfg, **overrides))


def test_zero_volume_region_raises(small_cfg: ScenarioConfig) -> None:
    """Test that a flat region is rejected."""
    with pytest.raises(GeometryError, match="zero volume"):
        generate_scenario(replace(small_cfg, region=Region((10.0, 10.0, 0.0))))


@pytest.mark.parametrize(
    "distance, expected",
    [
        (0.5, Technology.OPTICAL),
        (10.0, Technology.OPTICAL),
        (10.01, Technology.MI),
        (30.0, Technology.MI),
        (30.5, Technology.ACOUSTIC),
        (5000.0, Technology.ACOUSTIC),
    ],
)
def test_select_technology(distance: float, expected: Technology) -> None:
    """Test the optical / MI / acoustic distance thresholds."""
    assert select_technology(distance, TechThresholds()) is expected


def test_noiseless_observations_match_truth(small_cfg: ScenarioConfig) -> None:
    """Test that zero noise and zero shadowing reproduce the true ranges."""
    nodes = generate_scenario(small_cfg)
    observations = synthesize_observations(nodes, small_cfg, np.random.default_rng(0))

    assert len(observations) == 32 * 31 // 2
    assert all(obs.m < obs.n for obs in observations)
    measured, truth = _true_ranges(small_cfg, observations)
    np.testing.assert_allclose(measured, truth, rtol=1e-6)
    for obs, d in zip(observations, truth, strict=True):
        assert obs.technology is select_technology(d, small_cfg.tech_thresholds)


def test_observations_respect_transmission_range(small_cfg: ScenarioConfig) -> None:
    """Test that only pairs within R are observed and R = 0 yields nothing."""
    cfg = replace(small_cfg, transmission_range=8.0)
    observations = synthesize_observations(generate_scenario(cfg), cfg, np.random.default_rng(0))
    _, truth = _true_ranges(cfg, observations)
    assert observations
    assert truth.max() <= 8.0

    none = replace(small_cfg, transmission_range=0.0)
    assert synthesize_observations(generate_scenario(none), none, np.random.default_rng(0)) == []


def test_single_node_has_no_observations(small_cfg: ScenarioConfig) -> None:
    """Test that fewer than two nodes produce no observations."""
    nodes = generate_scenario(small_cfg)[:1]
    assert synthesize_observations(nodes, small_cfg, np.random.default_rng(0)) == []


def test_coincident_nodes_range_at_bracket_minimum(small_cfg: ScenarioConfig) -> None:
    """Test that a noiseless pair at distance 0 measures the optical bracket minimum."""
    nodes = [
        NodePose(0, Role.SENSOR, (5.0, 5.0, 5.0)),
        NodePose(1, Role.SENSOR, (5.0, 5.0, 5.0)),
        NodePose(2, Role.SENSOR, (5.0, 5.0, 7.0)),
    ]

    observations = synthesize_observations(nodes, small_cfg, np.random.default_rng(0))

    by_pair = {(obs.m, obs.n): obs for obs in observations}
    coincident = by_pair[(0, 1)]
    assert coincident.technology is Technology.OPTICAL
    assert coincident.measured_range == pytest.approx(
        small_cfg.channels.optical_bracket[0], rel=1e-6
    )
    assert by_pair[(0, 2)].measured_range == pytest.approx(2.0, rel=1e-6)


def test_flat_noise_is_standard_normal_per_sigma() -> None:
    """Test that flat-mode errors scaled by sigma look standard normal."""
    cfg = ScenarioConfig(
        region=Region((25.0, 25.0, 25.0)),
        n_sensors=116,
        noise_variance=0.04,
        tech_multipliers=TechMultipliers(1.0, 1.0, 1.0),
        seed=11,
    )
    observations = synthesize_observations(generate_scenario(cfg), cfg, np.random.default_rng(3))
    measured, truth = _true_ranges(cfg, observations)
    z = (measured - truth) / 0.2

    assert z.size > 7000
    assert abs(z.mean()) < 0.05
    assert z.std() == pytest.approx(1.0, rel=0.05)
    assert all(obs.variance == pytest.approx(0.04) for obs in observations)
    assert all(obs.weight == pytest.approx(25.0) for obs in observations)


def test_technology_multipliers_scale_variance(small_cfg: ScenarioConfig) -> None:
    """Test that each observation's variance is the base times its technology multiplier."""
    cfg = replace(small_cfg, noise_variance=0.1)
    observations = synthesize_observations(generate_scenario(cfg), cfg, np.random.default_rng(0))
    expected = {Technology.OPTICAL: 0.05, Technology.MI: 0.1, Technology.ACOUSTIC: 0.2}
    for obs in observations:
        assert obs.variance == pytest.approx(expected[obs.technology])


def test_distance_noise_variance_law(small_cfg: ScenarioConfig) -> None:
    """Test that distance mode records epsilon * d^(delta - 1) times the multiplier."""
    cfg = replace(
        small_cfg,
        noise_mode=NoiseMode.DISTANCE,
        noise_epsilon=0.01,
        noise_delta=2.0,
        tech_multipliers=TechMultipliers(1.0, 1.0, 1.0),
    )
    observations = synthesize_observations(generate_scenario(cfg), cfg, np.random.default_rng(0))
    _, truth = _true_ranges(cfg, observations)
    variances = np.array([obs.variance for obs in observations])
    np.testing.assert_allclose(variances, 0.01 * truth, rtol=1e-12)


def test_fuse_records_every_applicable_technology(small_cfg: ScenarioConfig) -> None:
    """Test that fuse mode adds MI and acoustic ranges for short pairs."""
    cfg = replace(small_cfg, fuse=True)
    nodes = generate_scenario(cfg)
    observations = synthesize_observations(nodes, cfg, np.random.default_rng(0))
    _, truth = _true_ranges(cfg, observations)

    by_pair: dict[tuple[int, int], list[Technology]] = {}
    for obs in observations:
        by_pair.setdefault((obs.m, obs.n), []).append(obs.technology)
    assert len(by_pair) == 32 * 31 // 2
    for obs, d in zip(observations, truth, strict=True):
        techs = by_pair[(obs.m, obs.n)]
        if d <= 10.0:
            assert techs == [Technology.OPTICAL, Technology.MI, Technology.ACOUSTIC]
        elif d <= 30.0:
            assert techs == [Technology.MI, Technology.ACOUSTIC]
        else:
            assert techs == [Technology.ACOUSTIC]


def test_pair_noise_independent_of_anchor_count() -> None:
    """Test that a sensor pair's noisy range does not change when anchors are added."""
    cfg = ScenarioConfig(region=Region((20.0, 20.0, 20.0)), n_sensors=20, n_relays=0, seed=5)
    more = replace(cfg, n_anchors=7)

    def sensor_ranges(c: ScenarioConfig) -> dict[tuple[int, int], float]:
        observations = synthesize_observations(generate_scenario(c), c, np.random.default_rng(9))
        return {(o.m, o.n): o.measured_range for o in observations if o.n < 20}

    assert sensor_ranges(more) == pytest.approx(sensor_ranges(cfg), rel=1e-9)


def test_shadowing_perturbs_ranges(small_cfg: ScenarioConfig) -> None:
    """Test that shadowing alone moves the measured ranges off the truth."""
    channels = replace(
        small_cfg.channels,
        shadowing=replace(small_cfg.channels.shadowing, std_dev=3.0),
    )
    cfg = replace(small_cfg, channels=channels)
    observations = synthesize_observations(generate_scenario(cfg), cfg, np.random.default_rng(0))
    measured, truth = _true_ranges(cfg, observations)
    assert not np.allclose(measured, truth, rtol=1e-6)
    assert np.all(measured > 0)


def test_frames(small_cfg: ScenarioConfig) -> None:
    """Test the node and observation tables, including SNR only for non-acoustic links."""
    nodes = generate_scenario(small_cfg)
    observations = synthesize_observations(nodes, small_cfg, np.random.default_rng(0))

    nodes_df = nodes_frame(nodes)
    assert list(nodes_df.columns) == ["node_id", "role", "x", "y", "z"]
    assert (nodes_df["role"] == "anchor").sum() == 4

    plain = observations_frame(observations)
    assert list(plain.columns) == [
        "m",
        "n",
        "technology",
        "measured_range_m",
        "variance_m2",
        "weight",
    ]
    full = observations_frame(observations, nodes, small_cfg.channels)
    np.testing.assert_allclose(full["true_range_m"], full["measured_range_m"], rtol=1e-6)
    acoustic = full["technology"] == "acoustic"
    assert full.loc[acoustic, "snr_db"].isna().all()
    assert full.loc[~acoustic, "snr_db"].notna().all()
