"""
Seeded Monte-Carlo sweeps and their CSV / plot-data writers.

Trial failures never abort a sweep: they come back as rows with
``status="error"`` and a ``reason``.
"""

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from .arrays import FloatArray
from .completion import build_graph, complete_matrix
from .crlb import h_crlb, observation_fim
from .errors import ConfigError, DisconnectedGraphError, OutputError, SingularFisherError, UwlocError
from .localization import kruskal_stress, localize, wcl_baseline
from .metrics import energy_error_product, rmse, total_energy
from .network import (
    NodePose,
    NoiseMode,
    RangeObservation,
    ScenarioConfig,
    generate_scenario,
    positions_of,
    synthesize_observations,
)

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "axis_value",
    "trial_seed",
    "method",
    "rmse_m",
    "h_crlb_m",
    "stress",
    "energy_J",
    "energy_error_product",
    "status",
    "reason",
]

FLOAT_FORMAT = "%.9g"


class SweepAxis(str, Enum):
    NOISE_VARIANCE = "noise_variance"
    N_NODES = "n_nodes"
    N_ANCHORS = "n_anchors"
    TX_RANGE = "tx_range"


class Method(str, Enum):
    PROPOSED = "proposed"
    WCL = "wcl"


@dataclass(frozen=True)
class SweepSpec:
    """
    One swept axis over ordered values, ``trials`` Monte-Carlo repetitions
    per value.

    With ``common_random_numbers`` every point reuses the same per-trial
    seeds. ``hold_total_nodes`` keeps K fixed on the anchor axis by trading
    sensors for anchors.
    """

    axis: SweepAxis
    values: tuple[float, ...]
    trials: int = 20
    base: ScenarioConfig = field(default_factory=ScenarioConfig)
    methods: tuple[Method, ...] = (Method.PROPOSED, Method.WCL)
    common_random_numbers: bool = True
    workers: int = 1
    hold_total_nodes: bool = True
    compute_crlb: bool = True

    def validate(self) -> None:
        if not self.values:
            raise ConfigError("Sweep needs at least one axis value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError(f"Sweep values must be strictly increasing: {self.values}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.methods:
            raise ConfigError("Sweep needs at least one method")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        for value in self.values:
            self.config_at(value).validate()

    def config_at(self, value: float) -> ScenarioConfig:
        base = self.base
        if self.axis is SweepAxis.NOISE_VARIANCE:
            if base.noise_mode is NoiseMode.DISTANCE:
                return replace(base, noise_epsilon=float(value))
            return replace(base, noise_variance=float(value))
        if self.axis is SweepAxis.TX_RANGE:
            return replace(base, transmission_range=float(value))
        if self.axis is SweepAxis.N_NODES:
            n_sensors = int(value) - base.n_anchors - base.n_relays
            if n_sensors < 0:
                raise ConfigError(
                    f"{int(value)} nodes cannot hold {base.n_anchors} anchors and {base.n_relays} relays"
                )
            return replace(base, n_sensors=n_sensors)
        n_anchors = int(value)
        if not self.hold_total_nodes:
            return replace(base, n_anchors=n_anchors)
        n_sensors = base.n_nodes - n_anchors - base.n_relays
        if n_sensors < 0:
            raise ConfigError(f"{n_anchors} anchors exceed the {base.n_nodes}-node network")
        return replace(base, n_anchors=n_anchors, n_sensors=n_sensors)


def trial_seed(spec: SweepSpec, point: int, trial: int) -> int:
    entropy = [spec.base.seed, trial] if spec.common_random_numbers else [spec.base.seed, point, trial]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0]) % 2**63


@dataclass
class TrialOutcome:
    rows: list[dict[str, Any]]
    scatter: pd.DataFrame | None = None


def _error_rows(
    methods: Sequence[Method], value: float, seed: int, reason: str
) -> list[dict[str, Any]]:
    return [
        {
            "axis_value": value,
            "trial_seed": seed,
            "method": method.value,
            "rmse_m": np.nan,
            "h_crlb_m": np.nan,
            "stress": np.nan,
            "energy_J": np.nan,
            "energy_error_product": np.nan,
            "status": "error",
            "reason": reason,
        }
        for method in methods
    ]


def _trial_bound(
    cfg: ScenarioConfig, nodes: Sequence[NodePose], observations: Sequence[RangeObservation]
) -> float:
    if cfg.noise_mode is NoiseMode.FLAT and cfg.noise_variance == 0:
        return 0.0
    delta = cfg.noise_delta if cfg.noise_mode is NoiseMode.DISTANCE else None
    unknown = [node.id for node in nodes if not node.is_anchor]
    try:
        fim = observation_fim(nodes, observations, delta=delta)
        return h_crlb(fim, unknown).h_crlb
    except SingularFisherError as e:
        logger.warning(f"H-CRLB undefined for this trial: {e}")
        return float("nan")
    except UwlocError as e:
        logger.error(f"H-CRLB failed for this trial: {e}", exc_info=True)
        return float("nan")


def run_trial(spec: SweepSpec, point: int, value: float, trial: int) -> TrialOutcome:
    """
    Scenario, observations, completion and every requested method for one
    (point, trial). Scatter frames are kept for the first trial only.
    """
    seed = trial_seed(spec, point, trial)
    cfg = replace(spec.config_at(value), seed=seed)
    try:
        nodes = generate_scenario(cfg)
        observations = synthesize_observations(nodes, cfg, np.random.default_rng([seed, 1]))
        k = len(nodes)
        completed = complete_matrix(build_graph(observations, k))
    except DisconnectedGraphError as e:
        logger.warning(f"Trial {trial} at {spec.axis.value}={value} failed: {e}")
        return TrialOutcome(_error_rows(spec.methods, value, seed, str(e)))
    except UwlocError as e:
        logger.error(f"Trial {trial} at {spec.axis.value}={value} failed: {e}", exc_info=True)
        return TrialOutcome(_error_rows(spec.methods, value, seed, str(e)))

    bound = _trial_bound(cfg, nodes, observations) if spec.compute_crlb else float("nan")
    truth = positions_of(nodes)
    ranges = np.full(k, cfg.transmission_range)
    energy = total_energy(cfg.energy, ranges)

    rows: list[dict[str, Any]] = []
    scatter: list[pd.DataFrame] = []
    for method in spec.methods:
        try:
            if method is Method.PROPOSED:
                result = localize(completed, nodes)
                estimate, stress = result.absolute, result.stress
            else:
                anchors = [node for node in nodes if node.is_anchor]
                estimate = wcl_baseline(
                    observations, anchors, k=k, completed=completed, region=cfg.region
                )
                stress = kruskal_stress(completed, estimate)
        except UwlocError as e:
            logger.error(f"{method.value} failed on trial {trial} at {spec.axis.value}={value}: {e}", exc_info=True)
            rows.extend(_error_rows([method], value, seed, str(e)))
            continue

        rows.append(
            {
                "axis_value": value,
                "trial_seed": seed,
                "method": method.value,
                "rmse_m": rmse(truth, estimate),
                "h_crlb_m": bound,
                "stress": stress,
                "energy_J": energy,
                "energy_error_product": energy_error_product(cfg.energy, ranges, truth, estimate),
                "status": "ok",
                "reason": "",
            }
        )
        if trial == 0:
            scatter.append(_scatter_frame(nodes, truth, estimate, method))

    return TrialOutcome(rows, pd.concat(scatter, ignore_index=True) if scatter else None)


def _scatter_frame(
    nodes: Sequence[NodePose], truth: FloatArray, estimate: FloatArray, method: Method
) -> pd.DataFrame:
    ordered = sorted(nodes, key=lambda node: node.id)
    return pd.DataFrame(
        {
            "method": method.value,
            "node_id": [node.id for node in ordered],
            "role": [node.role.value for node in ordered],
            "x": truth[:, 0],
            "y": truth[:, 1],
            "z": truth[:, 2],
            "x_est": estimate[:, 0],
            "y_est": estimate[:, 1],
            "z_est": estimate[:, 2],
        }
    )


def _run_task(task: tuple[SweepSpec, int, float, int]) -> TrialOutcome:
    return run_trial(*task)


@dataclass
class SweepResult:
    axis: SweepAxis
    trials: int
    frame: pd.DataFrame
    scatter: dict[float, pd.DataFrame] = field(default_factory=dict)

    @classmethod
    def empty(cls, axis: SweepAxis, trials: int = 1) -> "SweepResult":
        return cls(axis, trials, pd.DataFrame({column: [] for column in RESULT_COLUMNS}))

    def aggregate(self) -> pd.DataFrame:
        """
        Per (axis value, method): mean, population std, median and count of
        successful RMSEs, plus mean H-CRLB, mean energy and the mean and
        median energy-error product. Points where fewer than half the trials
        succeeded have NaN medians and ``feasible`` False.
        """
        keys = ["axis_value", "method"]
        ok = self.frame[self.frame["status"] == "ok"]
        grouped = ok.groupby(keys)
        table = grouped.agg(
            rmse_mean=("rmse_m", "mean"),
            rmse_std=("rmse_m", lambda s: s.std(ddof=0)),
            rmse_median=("rmse_m", "median"),
            count=("rmse_m", "size"),
            h_crlb_mean=("h_crlb_m", "mean"),
            stress_mean=("stress", "mean"),
            energy_mean=("energy_J", "mean"),
            eep_mean=("energy_error_product", "mean"),
            eep_median=("energy_error_product", "median"),
        )
        everything = self.frame[keys].drop_duplicates()
        index = pd.MultiIndex.from_frame(everything)
        table = table.reindex(index).sort_index()
        table["count"] = table["count"].fillna(0).astype(int)
        table["feasible"] = table["count"] * 2 >= self.trials
        table.loc[~table["feasible"], ["rmse_median", "eep_median"]] = np.nan
        return table.reset_index()

    def median_by_method(self, column: str = "rmse_median") -> pd.DataFrame:
        """Axis values down, methods across."""
        return self.aggregate().pivot(index="axis_value", columns="method", values=column)


def run_sweep(spec: SweepSpec) -> SweepResult:
    """
    Every (point, trial) of ``spec``, on a process pool when
    ``spec.workers > 1``. Rows come back in (point, trial, method) order
    whatever order the workers finish in.
    """
    spec.validate()
    tasks = [
        (spec, point, float(value), trial)
        for point, value in enumerate(spec.values)
        for trial in range(spec.trials)
    ]
    logger.info(
        f"Running {spec.axis.value} sweep: {len(spec.values)} points x {spec.trials} trials, "
        f"methods {[m.value for m in spec.methods]}, {spec.workers} worker(s)"
    )
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_run_task, tasks))
    else:
        outcomes = [_run_task(task) for task in tasks]

    rows: list[dict[str, Any]] = []
    scatter: dict[float, pd.DataFrame] = {}
    for (_, _, value, _), outcome in zip(tasks, outcomes, strict=True):
        rows.extend(outcome.rows)
        if outcome.scatter is not None:
            scatter[value] = outcome.scatter

    frame = pd.DataFrame(rows, columns=RESULT_COLUMNS)
    result = SweepResult(spec.axis, spec.trials, frame, scatter)
    failed = int((frame["status"] != "ok").sum())
    if failed:
        logger.warning(f"{failed} of {len(frame)} result rows failed")
    logger.info(f"Finished {spec.axis.value} sweep with {len(frame)} rows")
    return result


def _write(frame: pd.DataFrame, path: Path, **kwargs: Any) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan", **kwargs)
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e


def emit_csv(result: SweepResult, path: str | Path) -> Path:
    """Raw rows, one per (point, trial, method), in RESULT_COLUMNS order."""
    target = Path(path)
    _write(result.frame[RESULT_COLUMNS], target)
    logger.info(f"Wrote {len(result.frame)} result rows to {target}")
    return target


def _value_label(value: float) -> str:
    return f"{value:g}".replace("-", "m")


def emit_plot_data(result: SweepResult, directory: str | Path) -> list[Path]:
    """
    Space-separated plot data: ``aggregate_<axis>.dat`` with per-point
    statistics, and ``scatter_<axis>_<value>_<method>.dat`` with true and
    estimated positions from the first trial of each point.
    """
    out = Path(directory)
    written = [out / f"aggregate_{result.axis.value}.dat"]
    _write(result.aggregate(), written[0], sep=" ")
    for value, frame in sorted(result.scatter.items()):
        for method, rows in frame.groupby("method", sort=True):
            path = out / f"scatter_{result.axis.value}_{_value_label(value)}_{method}.dat"
            _write(rows.drop(columns="method"), path, sep=" ")
            written.append(path)
    logger.info(f"Wrote {len(written)} plot-data files to {out}")
    return written
