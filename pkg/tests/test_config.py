import math
from dataclasses import fields, is_dataclass
from pathlib import Path
from typing import Any

import pytest

from uwloc.config import SCHEMA, apply_overrides, env_overrides, load_scenario_config
from uwloc.errors import ConfigError
from uwloc.network import AnchorPlacement, NoiseMode, Region, ScenarioConfig

DEFAULT_ENV = Path(__file__).resolve().parents[1] / "configs" / "default.env"


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    path = tmp_path / "scenario.env"
    path.write_text(
        "\n".join(
            [
                "# small test scenario",
                "REGION=10,20,30",
                "N_ANCHORS=6",
                "N_SENSORS=40",
                "NOISE_MODE=distance",
                "NOISE_EPSILON=0.02",
                "NOISE_DELTA=2",
                "FUSE=yes",
                "ANCHOR_PLACEMENT=random",
                "MI_FREQUENCY_HZ=1000",
            ]
        )
    )
    return path


def _leaves(obj: Any, prefix: str = "") -> dict[str, Any]:
    if not is_dataclass(obj):
        return {prefix: obj}
    out: dict[str, Any] = {}
    for f in fields(obj):
        out.update(_leaves(getattr(obj, f.name), f"{prefix}{f.name}."))
    return out


def test_default_env_documents_the_defaults() -> None:
    """Test that the shipped default.env reproduces the built-in defaults."""
    loaded = _leaves(load_scenario_config(DEFAULT_ENV, environ={}))
    defaults = _leaves(ScenarioConfig())
    assert loaded.keys() == defaults.keys()
    for key, value in defaults.items():
        expected = pytest.approx(value, rel=1e-15) if isinstance(value, float) else value
        assert loaded[key] == expected, key


def test_default_env_lists_every_key() -> None:
    """Test that every schema key appears in default.env."""
    text = DEFAULT_ENV.read_text()
    keys = {line.split("=", 1)[0] for line in text.splitlines() if line and not line.startswith("#")}
    assert keys == set(SCHEMA)


def test_load_without_file_gives_defaults() -> None:
    """Test that no file and no environment yields the defaults."""
    assert load_scenario_config(environ={}) == ScenarioConfig()


def test_load_file_overrides(config_file: Path) -> None:
    """Test that file values reach the nested configuration fields."""
    cfg = load_scenario_config(config_file, environ={})

    assert cfg.region == Region((10.0, 20.0, 30.0))
    assert cfg.n_anchors == 6
    assert cfg.n_sensors == 40
    assert cfg.noise_mode is NoiseMode.DISTANCE
    assert cfg.noise_epsilon == 0.02
    assert cfg.noise_delta == 2.0
    assert cfg.fuse is True
    assert cfg.anchor_placement is AnchorPlacement.RANDOM
    assert cfg.channels.mi.omega == pytest.approx(2.0 * math.pi * 1000.0)
    assert cfg.n_relays == ScenarioConfig().n_relays


def test_environment_overrides_file(config_file: Path) -> None:
    """Test that UWLOC_ variables win over the file."""
    cfg = load_scenario_config(
        config_file, environ={"UWLOC_N_ANCHORS": "8", "UWLOC_OPTICAL_BER": "1e-4", "HOME": "/x"}
    )
    assert cfg.n_anchors == 8
    assert cfg.channels.optical.ber_target == 1e-4
    assert cfg.n_sensors == 40


def test_process_environment_is_read(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that os.environ is consulted when no mapping is passed."""
    monkeypatch.setenv("UWLOC_TX_RANGE", "42.5")
    assert load_scenario_config().transmission_range == 42.5


def test_env_overrides_strips_prefix() -> None:
    """Test that only prefixed schema keys are picked up."""
    environ = {"UWLOC_SEED": "5", "SEED": "6", "UWLOC_LOG_LEVEL": "DEBUG"}
    assert env_overrides(environ) == {"SEED": "5"}


def test_water_preset_and_explicit_sigma() -> None:
    """Test the MI water presets and that an explicit conductivity wins."""
    clean = apply_overrides(ScenarioConfig(), {"MI_WATER": "Clean"})
    assert clean.channels.mi.sigma == 0.01

    both = apply_overrides(ScenarioConfig(), {"MI_SIGMA": "2.5", "MI_WATER": "clean"})
    assert both.channels.mi.sigma == 2.5


@pytest.mark.parametrize(
    "values, match",
    [
        ({"N_ANCHOR": "4"}, "Unknown configuration keys: N_ANCHOR"),
        ({"N_ANCHORS": "four"}, "Invalid value for N_ANCHORS"),
        ({"REGION": "1,2"}, "Invalid value for REGION"),
        ({"FUSE": "maybe"}, "Invalid value for FUSE"),
        ({"NOISE_MODE": "loud"}, "Invalid value for NOISE_MODE"),
        ({"MI_WATER": "lake"}, "Invalid value for MI_WATER"),
        ({"SHADOWING_STD_DB": "-1"}, "Invalid value for SHADOWING_STD_DB"),
        ({"ENERGY_WAVELENGTH": "0"}, "Invalid value for ENERGY_WAVELENGTH"),
        ({"SEED": ""}, "SEED has no value"),
        ({"SEED": None}, "SEED has no value"),
    ],
)
def test_apply_overrides_errors(values: dict[str, str | None], match: str) -> None:
    """Test that bad keys and values raise ConfigError naming the key."""
    with pytest.raises(ConfigError, match=match):
        apply_overrides(ScenarioConfig(), values)


def test_missing_file_raises(tmp_path: Path) -> None:
    """Test that a missing config file is reported."""
    with pytest.raises(ConfigError, match="not found"):
        load_scenario_config(tmp_path / "missing.env", environ={})


def test_loaded_config_is_validated(tmp_path: Path) -> None:
    """Test that a parseable but invalid scenario is rejected."""
    path = tmp_path / "bad.env"
    path.write_text("N_ANCHORS=3\n")
    with pytest.raises(ConfigError, match="At least 4 anchors"):
        load_scenario_config(path, environ={})
