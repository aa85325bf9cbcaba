"""Post-generation passes: likelihood-based reassignment and affine rescaling.

Reassignment moves every point to a node maximizing its log-likelihood over
all nodes of the given hierarchy, leaving the node set, edges and
distributions untouched. Ties keep the current owner when it is among the
maximizers; otherwise the winner is the maximizer with the smallest depth,
then the lexicographically smallest path (the candidate ordering below makes
that the first argmax hit). Node parameters never change here, so one pass is
a fixpoint.
"""

from __future__ import annotations

import numpy as np

from .errors import ConsistencyError, ParameterError
from .kernel import log_likelihood_matrix
from .model import Dataset, Hierarchy, NodeDistribution

# cap on floats per likelihood block (points axis is chunked to fit)
_BLOCK_BUDGET = 8_000_000


def reassign(hierarchy: Hierarchy, points: Dataset) -> tuple[Hierarchy, Dataset]:
    """Move each point to a maximum-likelihood node; structure is preserved.

    Candidates are all nodes of the hierarchy as given -- pass the unpruned
    tree to let never-populated nodes capture points, or a pruned one to
    restrict the candidate set.
    """
    paths = sorted(hierarchy.nodes, key=lambda p: (len(p), p))
    col = {p: j for j, p in enumerate(paths)}
    missing = {o for o in points.owners if o not in col}
    if missing:
        raise ConsistencyError(f"points owned by nodes absent from the hierarchy: {sorted(missing)[:3]}")
    new_owners = list(points.owners)
    if len(points) and len(paths) > 1:
        means = np.stack([hierarchy.nodes[p].distribution.means for p in paths])
        sigmas = np.stack([hierarchy.nodes[p].distribution.sigmas for p in paths])
        owner_col = np.array([col[o] for o in points.owners])
        block = max(1, _BLOCK_BUDGET // (len(paths) * max(1, points.features.shape[1])))
        for lo in range(0, len(points), block):
            hi = min(lo + block, len(points))
            ll = log_likelihood_matrix(points.features[lo:hi], means, sigmas)
            best = ll.max(axis=1)
            winner = ll.argmax(axis=1)
            rows = np.arange(hi - lo)
            keep = ll[rows, owner_col[lo:hi]] >= best
            winner[keep] = owner_col[lo:hi][keep]
            for r, j in enumerate(winner):
                new_owners[lo + r] = paths[j]

    new_nodes = {path: node.copy() for path, node in hierarchy.nodes.items()}
    for node in new_nodes.values():
        node.point_ids = []
    for pid, owner in zip(points.ids, new_owners):
        new_nodes[owner].point_ids.append(int(pid))
    return (
        Hierarchy(new_nodes, hierarchy.params),
        Dataset(points.ids.copy(), points.features.copy(), new_owners),
    )


def _per_dimension(value, d: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape == (1,):
        arr = np.full(d, arr[0])
    if arr.shape != (d,):
        raise ParameterError(f"{name} must be a scalar or length-{d}", (name,))
    return arr


def rescale(
    hierarchy: Hierarchy, points: Dataset, scale, offset
) -> tuple[Hierarchy, Dataset]:
    """Affine-transform features and node parameters, per dimension.

    Features and means map to value*scale + offset, sigmas to sigma*scale.
    Ownership is untouched: the likelihood argmax is invariant under a
    positive per-dimension affine map.
    """
    d = hierarchy.params.d
    scale = _per_dimension(scale, d, "scale")
    offset = _per_dimension(offset, d, "offset")
    if np.any(scale <= 0.0):
        raise ParameterError("scale must be strictly positive", ("scale",))

    new_nodes = {}
    for path, node in hierarchy.nodes.items():
        moved = node.copy()
        moved.distribution = NodeDistribution(
            node.distribution.means * scale + offset,
            node.distribution.sigmas * scale,
        )
        new_nodes[path] = moved
    new_points = Dataset(
        points.ids.copy(), points.features * scale + offset, list(points.owners)
    )
    return Hierarchy(new_nodes, hierarchy.params), new_points


def fit_box_transform(
    points: Dataset, low, high
) -> tuple[np.ndarray, np.ndarray]:
    """Scale/offset mapping the data bounding box onto [low, high] per dimension.

    Degenerate dimensions (all points equal) and empty datasets translate only.
    """
    d = points.features.shape[1]
    low = _per_dimension(low, d, "low")
    high = _per_dimension(high, d, "high")
    if np.any(high <= low):
        raise ParameterError("box must have high > low in every dimension", ("box",))
    scale = np.ones(d)
    offset = np.zeros(d)
    if len(points):
        lo = points.features.min(axis=0)
        hi = points.features.max(axis=0)
        spread = hi - lo
        nontrivial = spread > 0
        scale[nontrivial] = (high - low)[nontrivial] / spread[nontrivial]
        offset = low - lo * scale
    return scale, offset
