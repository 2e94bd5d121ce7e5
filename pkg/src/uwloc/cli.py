import argparse
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from . import config
from .channels import Technology, get_link_model
from .completion import build_graph, complete_matrix, dump_matrix_csv
from .crlb import h_crlb, observation_fim
from .errors import OutputError, UwlocError
from .experiments import Method, SweepAxis, SweepSpec, emit_csv, emit_plot_data, run_sweep
from .localization import localize
from .network import (
    NodePose,
    NoiseMode,
    RangeObservation,
    ScenarioConfig,
    generate_scenario,
    nodes_frame,
    observations_frame,
    synthesize_observations,
)
from .recipes import RECIPES, run_recipe

logger = logging.getLogger(__name__)


def _methods(raw: str) -> tuple[Method, ...]:
    try:
        methods = tuple(Method(part.strip().lower()) for part in raw.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(
            f"methods must be a comma-separated subset of {[m.value for m in Method]}"
        ) from e
    if not methods:
        raise argparse.ArgumentTypeError("at least one method is required")
    return methods


def _values(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"values must be comma-separated numbers: {raw!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uwloc",
        description="Hybrid underwater ranging, MDS localization and H-CRLB experiments.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Scenario config file (dotenv format)")
    common.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
    common.add_argument("--out", type=Path, default=Path(config.OUT_DIR), help="Output directory")

    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", parents=[common], help="Monte-Carlo sweep over one axis")
    sweep.add_argument("--axis", choices=[axis.value for axis in SweepAxis], required=True)
    sweep.add_argument("--values", type=_values, required=True, help="Comma-separated axis values")
    sweep.add_argument("--trials", type=int, default=config.DEFAULT_TRIALS)
    sweep.add_argument("--methods", type=_methods, default=(Method.PROPOSED, Method.WCL))
    sweep.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    sweep.add_argument("--no-crlb", action="store_true", help="Skip the H-CRLB column")

    dump = sub.add_parser("scenario-dump", parents=[common], help="Write one scenario and its observations")
    dump.add_argument("--dump-matrix", action="store_true", help="Also write the completed distance matrix and localization")
    dump.add_argument("--min-snr-db", type=float, default=0.0, help="SNR used for the reported link reach")

    crlb = sub.add_parser("crlb", parents=[common], help="H-CRLB of one generated scenario")
    crlb.add_argument("--no-write", action="store_true", help="Print only, skip the per-node CSV")

    recipe = sub.add_parser("recipe", help="Run a figure recipe and check its trend")
    recipe.add_argument("figure_id", choices=sorted(RECIPES))
    recipe.add_argument("--out", type=Path, default=Path(config.OUT_DIR))
    recipe.add_argument("--trials", type=int, default=None)
    recipe.add_argument("--workers", type=int, default=config.DEFAULT_WORKERS)
    recipe.add_argument("--seed", type=int, default=None)
    return parser


def _scenario_config(args: argparse.Namespace) -> ScenarioConfig:
    cfg = config.load_scenario_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _scenario(cfg: ScenarioConfig) -> tuple[list[NodePose], list[RangeObservation]]:
    nodes = generate_scenario(cfg)
    observations = synthesize_observations(nodes, cfg, np.random.default_rng([cfg.seed, 1]))
    logger.info(f"Generated {len(nodes)} nodes with {len(observations)} range observations")
    return nodes, observations


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = SweepSpec(
        axis=SweepAxis(args.axis),
        values=args.values,
        trials=args.trials,
        base=_scenario_config(args),
        methods=args.methods,
        workers=args.workers,
        compute_crlb=not args.no_crlb,
    )
    result = run_sweep(spec)
    emit_csv(result, args.out / f"sweep_{spec.axis.value}.csv")
    emit_plot_data(result, args.out)
    summary = result.aggregate()[["axis_value", "method", "rmse_mean", "rmse_median", "h_crlb_mean", "count"]]
    print(summary.to_string(index=False))
    return 0


def _write_frame(frame: pd.DataFrame, path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.9g", na_rep="nan")
    except OSError as e:
        raise OutputError(f"Could not write {path}: {e}") from e


def _cmd_scenario_dump(args: argparse.Namespace) -> int:
    cfg = _scenario_config(args)
    nodes, observations = _scenario(cfg)
    out: Path = args.out
    _write_frame(nodes_frame(nodes), out / "nodes.csv")
    _write_frame(observations_frame(observations, nodes, cfg.channels), out / "observations.csv")

    noise_db = 10.0 * math.log10(cfg.channels.noise_power_w)
    for tech in (Technology.OPTICAL, Technology.MI):
        reach = get_link_model(tech, cfg.channels).max_range(noise_db + args.min_snr_db)
        print(f"{tech.value} reach at {args.min_snr_db:g} dB SNR: {reach:.4g} m")
    print(f"{len(nodes)} nodes, {len(observations)} observations written to {out}")

    if args.dump_matrix:
        completed = complete_matrix(build_graph(observations, len(nodes)))
        dump_matrix_csv(completed, out / "distance_matrix.csv")
        result = localize(completed, nodes)
        _write_frame(result.to_frame(nodes), out / "localization.csv")
        print(f"RMSE {result.rmse:.4g} m, stress {result.stress:.4g}")
    return 0


def _cmd_crlb(args: argparse.Namespace) -> int:
    cfg = _scenario_config(args)
    nodes, observations = _scenario(cfg)
    delta = cfg.noise_delta if cfg.noise_mode is NoiseMode.DISTANCE else None
    fim = observation_fim(nodes, observations, delta=delta)
    report = h_crlb(fim, [node.id for node in nodes if not node.is_anchor])
    print(f"H-CRLB {report.h_crlb:.6g} m (trace {report.trace:.6g} m^2)")
    if not args.no_write:
        frame = nodes_frame(nodes).assign(bound_m=report.per_node_bound)
        _write_frame(frame, args.out / "crlb_nodes.csv")
    return 0


def _cmd_recipe(args: argparse.Namespace) -> int:
    outcome = run_recipe(
        args.figure_id, args.out, trials=args.trials, workers=args.workers, seed=args.seed
    )
    status = "PASS" if outcome.passed else "FAIL"
    print(f"{outcome.figure_id}: {status} - {outcome.message}")
    return 0 if outcome.passed else 1


COMMANDS = {
    "sweep": _cmd_sweep,
    "scenario-dump": _cmd_scenario_dump,
    "crlb": _cmd_crlb,
    "recipe": _cmd_recipe,
}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=config.LOG_LEVEL, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UwlocError as e:
        print(f"uwloc: error: {e}", file=sys.stderr)
        return 2
