"""
Canned sweeps for each reproduced figure, with machine-checkable trend
assertions evaluated on per-point medians (5% slack).
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import UnknownRecipeError
from .experiments import (
    Method,
    SweepAxis,
    SweepResult,
    SweepSpec,
    emit_csv,
    emit_plot_data,
    run_sweep,
)
from .network import Region, ScenarioConfig

logger = logging.getLogger(__name__)

SLACK = 0.05

Check = Callable[[dict[str, SweepResult]], tuple[bool, str]]


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    description: str
    sweeps: dict[str, SweepSpec]
    check: Check


@dataclass
class RecipeOutcome:
    figure_id: str
    passed: bool
    message: str
    artifacts: list[Path] = field(default_factory=list)
    aggregates: pd.DataFrame | None = None


def _medians(result: SweepResult, method: Method = Method.PROPOSED, column: str = "rmse_median") -> pd.Series:
    table = result.median_by_method(column)
    if method.value not in table.columns:
        return pd.Series(dtype=float)
    return table[method.value]


def _fmt(series: pd.Series) -> str:
    return ", ".join(f"{index:g}: {value:.4g}" for index, value in series.items())


def _check_sub_meter(results: dict[str, SweepResult]) -> tuple[bool, str]:
    medians = _medians(results["main"])
    if medians.empty or medians.isna().any():
        return False, "no feasible sweep point"
    worst = float(medians.max())
    return worst < 1.0, f"median RMSE {worst:.4g} m (expected < 1 m)"


def _check_noise(results: dict[str, SweepResult]) -> tuple[bool, str]:
    result = results["main"]
    proposed = _medians(result, Method.PROPOSED)
    wcl = _medians(result, Method.WCL)
    failures = []
    if proposed.isna().any() or not bool(np.all(np.diff(proposed.to_numpy()) > 0)):
        failures.append(f"median RMSE not strictly increasing ({_fmt(proposed)})")
    if 0.01 in proposed.index and not proposed.loc[0.01] < 1.0:
        failures.append(f"median RMSE at variance 0.01 is {proposed.loc[0.01]:.4g} m (expected < 1 m)")
    if not wcl.empty and bool(np.any(proposed.to_numpy() > wcl.to_numpy())):
        failures.append(f"proposed above WCL (proposed {_fmt(proposed)}; wcl {_fmt(wcl)})")
    aggregates = result.aggregate()
    rows = aggregates[aggregates["method"] == Method.PROPOSED.value]
    below = rows[rows["rmse_mean"] < (1.0 - SLACK) * rows["h_crlb_mean"]]
    if not below.empty:
        failures.append(
            "mean RMSE below the H-CRLB at "
            + ", ".join(f"{v:g}" for v in below["axis_value"])
        )
    if failures:
        return False, "; ".join(failures)
    return True, f"median RMSE increases with noise ({_fmt(proposed)}) and stays above the H-CRLB"


def _check_nodes(results: dict[str, SweepResult]) -> tuple[bool, str]:
    medians = _medians(results["main"]).dropna()
    values = medians.to_numpy()
    ok = bool(np.all(values[1:] <= values[:-1] * (1.0 + SLACK)))
    return ok, f"median RMSE by node count: {_fmt(medians)} (expected non-increasing)"


def _check_anchors(results: dict[str, SweepResult]) -> tuple[bool, str]:
    medians = _medians(results["main"])
    m15, m20 = float(medians.loc[15.0]), float(medians.loc[20.0])
    gain = m15 - m20
    return gain < SLACK * m15, f"RMSE gain from 15 to 20 anchors: {gain:.4g} m of {m15:.4g} m (expected < 5%)"


def _check_range_knee(results: dict[str, SweepResult]) -> tuple[bool, str]:
    medians = _medians(results["main"]).dropna()
    if medians.empty:
        return False, "no feasible sweep point"
    plateau = float(medians[medians.index >= 10.0].median())
    close = np.abs(medians.to_numpy() - plateau) <= SLACK * plateau
    # Smallest range from which every later point sits on the plateau.
    knee = float(medians.index[-1])
    for i in range(len(close) - 1, -1, -1):
        if not close[i]:
            break
        knee = float(medians.index[i])
    first = float(medians.iloc[0])
    ok = knee <= 9.0 and first > (1.0 + SLACK) * plateau
    return ok, (
        f"knee at {knee:g} m (expected <= 9 m), plateau {plateau:.4g} m, "
        f"RMSE at {medians.index[0]:g} m is {first:.4g} m"
    )


def _argmin(result: SweepResult) -> float:
    curve = _medians(result, column="eep_median").dropna()
    if curve.empty:
        return float("nan")
    return float(curve.idxmin())


def _check_energy_argmin(results: dict[str, SweepResult]) -> tuple[bool, str]:
    dense, sparse = _argmin(results["nodes_200"]), _argmin(results["nodes_50"])
    return dense < sparse, (
        f"energy-error product minimum at {dense:g} m for 200 nodes and {sparse:g} m "
        "for 50 nodes (expected dense < sparse)"
    )


def _nodes(total: int, base: ScenarioConfig) -> ScenarioConfig:
    return replace(base, n_sensors=total - base.n_anchors - base.n_relays)


def _ranges(start: float, stop: float, step: float) -> tuple[float, ...]:
    return tuple(float(v) for v in np.round(np.arange(start, stop + step / 2, step), 6))


def _build_recipes() -> dict[str, FigureRecipe]:
    base = ScenarioConfig()
    small_cube = replace(base, region=Region((5.0, 5.0, 5.0)), noise_variance=0.01)
    mid_cube = replace(base, region=Region((10.0, 10.0, 10.0)), noise_variance=0.01)
    proposed = (Method.PROPOSED,)
    recipes = [
        FigureRecipe(
            "fig3",
            "Sparse 50-node network: true vs estimated positions",
            {"main": SweepSpec(SweepAxis.N_NODES, (50.0,), trials=5, base=base, methods=proposed)},
            _check_sub_meter,
        ),
        FigureRecipe(
            "fig4",
            "Dense 150-node network: true vs estimated positions",
            {"main": SweepSpec(SweepAxis.N_NODES, (150.0,), trials=5, base=base, methods=proposed)},
            _check_sub_meter,
        ),
        FigureRecipe(
            "fig5",
            "RMSE against range-noise variance, proposed vs WCL, with the H-CRLB",
            {"main": SweepSpec(SweepAxis.NOISE_VARIANCE, (0.0, 0.01, 0.25, 0.5, 0.75, 1.0), base=base)},
            _check_noise,
        ),
        FigureRecipe(
            "fig6",
            "RMSE against network size",
            {"main": SweepSpec(SweepAxis.N_NODES, (50.0, 75.0, 100.0, 125.0, 150.0), base=base, methods=proposed)},
            _check_nodes,
        ),
        FigureRecipe(
            "fig7",
            "RMSE against anchor count at a fixed network size",
            {
                "main": SweepSpec(
                    SweepAxis.N_ANCHORS,
                    (4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0),
                    base=base,
                    methods=proposed,
                )
            },
            _check_anchors,
        ),
        FigureRecipe(
            "fig8",
            "RMSE against transmission range, 100 nodes in a 5 m cube",
            {
                "main": SweepSpec(
                    SweepAxis.TX_RANGE,
                    _ranges(2.0, 14.0, 1.0),
                    base=_nodes(100, small_cube),
                    methods=proposed,
                    compute_crlb=False,
                )
            },
            _check_range_knee,
        ),
        FigureRecipe(
            "fig9",
            "Energy-error product against transmission range, 50 vs 200 nodes in a 10 m cube",
            {
                f"nodes_{n}": SweepSpec(
                    SweepAxis.TX_RANGE,
                    _ranges(2.0, 14.0, 0.5),
                    trials=10,
                    base=_nodes(n, mid_cube),
                    methods=proposed,
                    compute_crlb=False,
                )
                for n in (50, 200)
            },
            _check_energy_argmin,
        ),
    ]
    return {recipe.figure_id: recipe for recipe in recipes}


RECIPES = _build_recipes()


def get_recipe(figure_id: str) -> FigureRecipe:
    try:
        return RECIPES[figure_id.lower()]
    except KeyError:
        raise UnknownRecipeError(
            f"Unknown recipe {figure_id!r}; available: {', '.join(RECIPES)}"
        ) from None


def run_recipe(
    figure_id: str,
    out_dir: str | Path,
    *,
    trials: int | None = None,
    workers: int = 1,
    seed: int | None = None,
) -> RecipeOutcome:
    """
    Runs every sweep of a recipe, writes its CSV and plot data under
    ``out_dir/<figure_id>/`` and evaluates the trend assertion.

    Raises:
        UnknownRecipeError: if no recipe is registered under ``figure_id``.
    """
    recipe = get_recipe(figure_id)
    target = Path(out_dir) / recipe.figure_id
    logger.info(f"Running recipe {recipe.figure_id}: {recipe.description}")

    results: dict[str, SweepResult] = {}
    artifacts: list[Path] = []
    frames = []
    for name, spec in recipe.sweeps.items():
        if trials is not None:
            spec = replace(spec, trials=trials)
        if seed is not None:
            spec = replace(spec, base=replace(spec.base, seed=seed))
        spec = replace(spec, workers=workers)
        result = run_sweep(spec)
        results[name] = result
        artifacts.append(emit_csv(result, target / f"{name}.csv"))
        artifacts.extend(emit_plot_data(result, target / name))
        frames.append(result.aggregate().assign(sweep=name))

    passed, message = recipe.check(results)
    log = logger.info if passed else logger.warning
    log(f"Recipe {recipe.figure_id} {'passed' if passed else 'FAILED'}: {message}")
    return RecipeOutcome(
        recipe.figure_id,
        passed,
        message,
        artifacts,
        pd.concat(frames, ignore_index=True),
    )
