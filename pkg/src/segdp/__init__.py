"""Constrained segmentation and model-based clustering of a multivariate series.

The package alternates cluster characterization (fit per-cluster model
weights from the current assignment) with an exact dynamic-programming
assignment step honoring hard constraints: at most C clusters, at most N
transitions and a minimal block length. It ships a squared-distance
adapter, a Waxman-Smits resistivity adapter for well logs, consensus over
random restarts by adjusted Rand index, a grid search with cost-density
region selection, and a synthetic well-log simulator.
"""

from . import errors
from .alternation import RunResult, random_assignment, run_once
from .consensus import (
    LOWEST_COST,
    MOST_COMMON,
    GridPoint,
    SelectionPolicy,
    SelectionReport,
    ari,
    confusion_matrix,
    consensus,
    fit_restarts,
    grid_search,
    lowest_cost_point,
    select_region,
    suggested_grid,
)
from .core import (
    WS_COLUMN_ROLES,
    Assignment,
    ClusterWeights,
    Constraints,
    CostTable,
    SeriesMatrix,
    build_cost_table,
    objective,
)
from .dp_path import DpTensor, backtrack, best_terminal, fill
from .models import (
    KMeansAdapter,
    NelderMeadConfig,
    NelderMeadResult,
    WsAdapter,
    WsEnvironment,
    WsFitConfig,
    WsParams,
    b_coefficient,
    kmeans_affiliate,
    kmeans_characterize,
    nelder_mead,
    qv,
    ws_affiliate,
    ws_characterize,
    ws_forward,
)
from .simulator import (
    NOISELESS,
    PRESET_NAMES,
    DatasetSpec,
    FormationSpec,
    NoiseSpec,
    generate_block,
    generate_dataset,
    preset,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ClusterWeights",
    "Constraints",
    "CostTable",
    "DatasetSpec",
    "DpTensor",
    "FormationSpec",
    "GridPoint",
    "KMeansAdapter",
    "LOWEST_COST",
    "MOST_COMMON",
    "NOISELESS",
    "NelderMeadConfig",
    "NelderMeadResult",
    "NoiseSpec",
    "PRESET_NAMES",
    "RunResult",
    "SelectionPolicy",
    "SelectionReport",
    "SeriesMatrix",
    "WS_COLUMN_ROLES",
    "WsAdapter",
    "WsEnvironment",
    "WsFitConfig",
    "WsParams",
    "ari",
    "b_coefficient",
    "backtrack",
    "best_terminal",
    "build_cost_table",
    "confusion_matrix",
    "consensus",
    "errors",
    "fill",
    "fit_restarts",
    "generate_block",
    "generate_dataset",
    "grid_search",
    "kmeans_affiliate",
    "kmeans_characterize",
    "lowest_cost_point",
    "nelder_mead",
    "objective",
    "preset",
    "qv",
    "random_assignment",
    "run_once",
    "select_region",
    "suggested_grid",
    "ws_affiliate",
    "ws_characterize",
    "ws_forward",
]
