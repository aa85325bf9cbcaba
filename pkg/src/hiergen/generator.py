"""Top-level generation: route points until n exist, then prune structural stubs."""

from __future__ import annotations

import numpy as np

from .kernel import draw_point, root_distribution
from .model import Dataset, GeneratorParams, Hierarchy, ROOT_PATH, validate
from .sampling import RandomSource
from .tssb import route


def generate(
    params: GeneratorParams, rng: RandomSource | None = None
) -> tuple[Hierarchy, Dataset]:
    """Generate a hierarchy and exactly ``params.n`` points.

    Each point is drawn from its destination node's distribution at the moment
    of arrival; the root distribution is Gauss(0, sigma_max) per dimension.
    The result is fully determined by the seed (or by the caller's ``rng``,
    which batch replication uses to run one forked stream per replicate).
    """
    validate(params)
    if rng is None:
        rng = RandomSource(params.seed)
    hierarchy = Hierarchy.with_root(params, root_distribution(params.d, params.sigma_max))
    features = np.empty((params.n, params.d))
    owners = []
    for i in range(params.n):
        outcome = route(hierarchy, rng, rng.uniform_open())
        node = hierarchy.nodes[outcome.destination]
        features[i] = draw_point(node.distribution, rng)
        node.point_ids.append(i)
        owners.append(outcome.destination)
    points = Dataset(np.arange(params.n, dtype=np.int64), features, owners)
    return hierarchy, points


def prune(hierarchy: Hierarchy) -> Hierarchy:
    """Drop every node whose subtree holds no points; the root always stays.

    Empty nodes on the way from the root to a populated node have populated
    subtrees and are therefore retained. Idempotent; node states are shared
    with the input, not copied.
    """
    subtree = {path: len(node.point_ids) for path, node in hierarchy.nodes.items()}
    for path in sorted(subtree, key=len, reverse=True):
        if path and path[:-1] in subtree:
            subtree[path[:-1]] += subtree[path]
    kept = {
        path: node
        for path, node in hierarchy.nodes.items()
        if path == ROOT_PATH or subtree[path] > 0
    }
    return Hierarchy(kept, hierarchy.params)
