"""Structure metrics and per-level histograms for generated hierarchies.

Levels are node depths, root = 0. On a pruned hierarchy a leaf is simply a
node with no stored children (its empty children were pruned away). The five
histogram families: data instances per level, width (nodes) per level, leaves
per level, mean children per node per level, and the branching-factor
histogram (children count -> number of nodes).

Batch aggregation follows the reporting convention of the scalar tables:
node/leaf/depth get the cross-replicate mean and standard deviation, while
breadth and path length -- being per-hierarchy averages already -- get the
mean of means and the mean of the per-hierarchy standard deviations. All
standard deviations are population (ddof=0) so a single replicate reports
zero cross-run deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, ParameterError
from .model import Dataset, Hierarchy

FAMILY_NAMES = (
    "instances_per_level",
    "width_per_level",
    "leaves_per_level",
    "children_per_level",
    "branching_factor",
)

SCALAR_NAMES = ("nodes", "leaves", "depth", "breadth", "path_length", "object_depth")


@dataclass(frozen=True)
class HierarchyStats:
    node_count: int
    leaf_count: int
    depth: int
    breadth_mean: float
    breadth_std: float
    path_mean: float
    path_std: float


@dataclass(frozen=True)
class LevelHistogram:
    """Per-level vectors (index = level) plus the branching-factor histogram."""

    instances: np.ndarray
    width: np.ndarray
    leaves: np.ndarray
    mean_children: np.ndarray
    branching: dict[int, int]


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def compute_stats(hierarchy: Hierarchy) -> HierarchyStats:
    """N, L, D, and the per-level breadth / root-to-leaf path summaries."""
    if not hierarchy.nodes:
        raise ConsistencyError("cannot compute stats of an empty hierarchy")
    children = hierarchy.child_map()
    depths = [len(path) for path in hierarchy.nodes]
    max_depth = max(depths)
    width = np.bincount(depths, minlength=max_depth + 1)
    leaf_depths = [len(path) for path, kids in children.items() if not kids]
    breadth_mean, breadth_std = _mean_std(width)
    path_mean, path_std = _mean_std(leaf_depths)
    return HierarchyStats(
        node_count=len(hierarchy.nodes),
        leaf_count=len(leaf_depths),
        depth=max_depth,
        breadth_mean=breadth_mean,
        breadth_std=breadth_std,
        path_mean=path_mean,
        path_std=path_std,
    )


def compute_histograms(hierarchy: Hierarchy, points: Dataset) -> LevelHistogram:
    """All five histogram families for one hierarchy and its points."""
    children = hierarchy.child_map()
    max_depth = max(len(path) for path in hierarchy.nodes)
    levels = max_depth + 1

    width = np.zeros(levels)
    leaves = np.zeros(levels)
    child_totals = np.zeros(levels)
    branching: dict[int, int] = {}
    for path, kids in children.items():
        level = len(path)
        width[level] += 1
        child_totals[level] += len(kids)
        if not kids:
            leaves[level] += 1
        branching[len(kids)] = branching.get(len(kids), 0) + 1

    instances = np.zeros(levels)
    for owner in points.owners:
        if owner not in hierarchy.nodes:
            raise ConsistencyError(f"point owned by missing node {owner}")
        instances[len(owner)] += 1

    with np.errstate(invalid="ignore"):
        mean_children = np.where(width > 0, child_totals / np.maximum(width, 1), 0.0)
    return LevelHistogram(instances, width, leaves, mean_children, branching)


def object_depth_mean(points: Dataset) -> float:
    """Mean owner depth over all points (0.0 for an empty dataset)."""
    if not len(points):
        return 0.0
    return float(np.mean([len(owner) for owner in points.owners]))


@dataclass(frozen=True)
class BatchScalars:
    replicates: int
    nodes_mean: float
    nodes_std: float
    leaves_mean: float
    leaves_std: float
    depth_mean: float
    depth_std: float
    breadth_mean: float
    breadth_std: float
    path_mean: float
    path_std: float


def aggregate(stats: list[HierarchyStats]) -> BatchScalars:
    """Cross-replicate scalar summary (see module doc for the B/P convention)."""
    if not stats:
        raise ParameterError("cannot aggregate an empty batch", ("stats",))
    nodes_mean, nodes_std = _mean_std([s.node_count for s in stats])
    leaves_mean, leaves_std = _mean_std([s.leaf_count for s in stats])
    depth_mean, depth_std = _mean_std([s.depth for s in stats])
    return BatchScalars(
        replicates=len(stats),
        nodes_mean=nodes_mean,
        nodes_std=nodes_std,
        leaves_mean=leaves_mean,
        leaves_std=leaves_std,
        depth_mean=depth_mean,
        depth_std=depth_std,
        breadth_mean=float(np.mean([s.breadth_mean for s in stats])),
        breadth_std=float(np.mean([s.breadth_std for s in stats])),
        path_mean=float(np.mean([s.path_mean for s in stats])),
        path_std=float(np.mean([s.path_std for s in stats])),
    )


@dataclass(frozen=True)
class HistogramSummary:
    """family name -> [(level_or_factor, mean, std)], levels/factors ascending."""

    families: dict[str, list[tuple[int, float, float]]]


def _stack_padded(vectors: list[np.ndarray]) -> np.ndarray:
    width = max(len(v) for v in vectors)
    out = np.zeros((len(vectors), width))
    for i, v in enumerate(vectors):
        out[i, : len(v)] = v
    return out


def aggregate_histograms(histograms: list[LevelHistogram]) -> HistogramSummary:
    """Mean/std of each family across replicates.

    Hierarchies shallower than the batch maximum contribute zeros at the
    levels (or factors) they lack.
    """
    if not histograms:
        raise ParameterError("cannot aggregate an empty batch", ("histograms",))
    families: dict[str, list[tuple[int, float, float]]] = {}
    per_level = {
        "instances_per_level": [h.instances for h in histograms],
        "width_per_level": [h.width for h in histograms],
        "leaves_per_level": [h.leaves for h in histograms],
        "children_per_level": [h.mean_children for h in histograms],
    }
    for name, vectors in per_level.items():
        stacked = _stack_padded(vectors)
        families[name] = [
            (level, float(col.mean()), float(col.std()))
            for level, col in enumerate(stacked.T)
        ]
    factors = sorted({f for h in histograms for f in h.branching})
    rows = []
    for factor in factors:
        counts = np.array([h.branching.get(factor, 0) for h in histograms], dtype=float)
        rows.append((factor, float(counts.mean()), float(counts.std())))
    families["branching_factor"] = rows
    return HistogramSummary(families)


@dataclass(frozen=True)
class SetSummary:
    """Everything reported for one parameter set / variant label."""

    label: str
    scalars: BatchScalars
    histograms: HistogramSummary
    object_depth_mean: float
    object_depth_std: float

    def scalar_rows(self) -> list[tuple[str, float, float]]:
        s = self.scalars
        return [
            ("nodes", s.nodes_mean, s.nodes_std),
            ("leaves", s.leaves_mean, s.leaves_std),
            ("depth", s.depth_mean, s.depth_std),
            ("breadth", s.breadth_mean, s.breadth_std),
            ("path_length", s.path_mean, s.path_std),
            ("object_depth", self.object_depth_mean, self.object_depth_std),
        ]
