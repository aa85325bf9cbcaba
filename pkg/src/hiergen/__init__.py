"""hiergen: seedable object-cluster-hierarchy generation and analysis.

The generator realizes a tree-structured stick-breaking mixture: points are
routed down a lazily grown tree of diagonal Gaussians whose child
distributions tighten relative to their parents, so lower nodes are more
specific. The package adds closed-form structural estimators with Monte-Carlo
oracles, likelihood-based reassignment and affine rescaling passes, a metric
and histogram suite, deterministic CSV serialization, and a CLI.
"""

from .analytics import (
    RegimeDescriptor,
    child_selection_variance,
    expected_child_selection,
    expected_retention,
    expected_sigma_ratio,
    predict_regime,
    retention_variance,
)
from .errors import (
    ConsistencyError,
    DepthLimitError,
    DimensionMismatchError,
    HiergenError,
    ParameterError,
    ParseError,
)
from .experiments import run_batch, run_replicate
from .generator import generate, prune
from .kernel import KernelParams, derive_child, draw_point, log_likelihood
from .metrics import (
    BatchScalars,
    HierarchyStats,
    LevelHistogram,
    SetSummary,
    aggregate,
    aggregate_histograms,
    compute_histograms,
    compute_stats,
    object_depth_mean,
)
from .model import (
    DataPoint,
    Dataset,
    GeneratorParams,
    Hierarchy,
    NodeDistribution,
    NodePath,
    NodeState,
    validate,
)
from .postprocess import fit_box_transform, reassign, rescale
from .presets import PRESET_CONTROLS, PRESET_NAMES, preset
from .sampling import RandomSource
from .tssb import RoutingOutcome, alpha_at, node_mass_prefix, node_stop_masses, route

__version__ = "0.1.0"

__all__ = [
    "BatchScalars",
    "ConsistencyError",
    "DataPoint",
    "Dataset",
    "DepthLimitError",
    "DimensionMismatchError",
    "GeneratorParams",
    "Hierarchy",
    "HierarchyStats",
    "HiergenError",
    "KernelParams",
    "LevelHistogram",
    "NodeDistribution",
    "NodePath",
    "NodeState",
    "ParameterError",
    "ParseError",
    "PRESET_CONTROLS",
    "PRESET_NAMES",
    "RandomSource",
    "RegimeDescriptor",
    "RoutingOutcome",
    "SetSummary",
    "aggregate",
    "aggregate_histograms",
    "alpha_at",
    "child_selection_variance",
    "compute_histograms",
    "compute_stats",
    "derive_child",
    "draw_point",
    "expected_child_selection",
    "expected_retention",
    "expected_sigma_ratio",
    "fit_box_transform",
    "generate",
    "log_likelihood",
    "node_mass_prefix",
    "node_stop_masses",
    "object_depth_mean",
    "predict_regime",
    "preset",
    "prune",
    "reassign",
    "rescale",
    "retention_variance",
    "route",
    "run_batch",
    "run_replicate",
    "validate",
]
