from .completion import (
    CompletedDistanceMatrix,
    Provenance,
    RangeGraph,
    build_graph,
    complete_matrix,
    dump_matrix_csv,
)
from .crlb import (
    CrlbReport,
    FisherInfo,
    NoiseLawParams,
    beta_factor,
    build_fim,
    h_crlb,
    joint_log_likelihood,
    observation_fim,
    range_log_likelihood,
)
from .errors import UwlocError
from .experiments import (
    Method,
    SweepAxis,
    SweepResult,
    SweepSpec,
    emit_csv,
    emit_plot_data,
    run_sweep,
)
from .localization import (
    LocalizationResult,
    RelativeMap,
    SimilarityTransform,
    apply_transform,
    classical_mds,
    double_center,
    kruskal_stress,
    localize,
    procrustes_fit,
    wcl_baseline,
)
from .metrics import EnergyParams, energy_error_product, node_tx_energy, rmse, total_energy
from .network import (
    NodePose,
    RangeObservation,
    Region,
    Role,
    ScenarioConfig,
    generate_scenario,
    select_technology,
    synthesize_observations,
)
from .recipes import RecipeOutcome, run_recipe
from .special import erfc_inv, lambert_w0

__all__ = [
    "CompletedDistanceMatrix",
    "CrlbReport",
    "EnergyParams",
    "FisherInfo",
    "LocalizationResult",
    "Method",
    "NodePose",
    "NoiseLawParams",
    "Provenance",
    "RangeGraph",
    "RangeObservation",
    "RecipeOutcome",
    "Region",
    "RelativeMap",
    "Role",
    "ScenarioConfig",
    "SimilarityTransform",
    "SweepAxis",
    "SweepResult",
    "SweepSpec",
    "UwlocError",
    "apply_transform",
    "beta_factor",
    "build_fim",
    "build_graph",
    "classical_mds",
    "complete_matrix",
    "double_center",
    "dump_matrix_csv",
    "emit_csv",
    "emit_plot_data",
    "energy_error_product",
    "erfc_inv",
    "generate_scenario",
    "h_crlb",
    "joint_log_likelihood",
    "kruskal_stress",
    "lambert_w0",
    "localize",
    "node_tx_energy",
    "observation_fim",
    "procrustes_fit",
    "range_log_likelihood",
    "rmse",
    "run_recipe",
    "run_sweep",
    "select_technology",
    "synthesize_observations",
    "total_energy",
    "wcl_baseline",
]
