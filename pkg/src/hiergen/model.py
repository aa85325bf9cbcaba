"""Domain types shared by all modules: parameters, node identity, node state,
hierarchy, data points.

A node's identity is its path: the tuple of child indices walked from the root
(so ``()`` is the root, ``(0, 1)`` is the second child of the root's first
child). Paths make ancestor queries trivial and serialization canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ConsistencyError, ParameterError

NodePath = tuple[int, ...]

ROOT_PATH: NodePath = ()

DEFAULT_SIGMA_MIN = 0.05
DEFAULT_SIGMA_MAX = 10.0
DEFAULT_MAX_DEPTH = 512


def parent_path(path: NodePath) -> NodePath:
    if not path:
        raise ValueError("the root has no parent")
    return path[:-1]


def path_depth(path: NodePath) -> int:
    return len(path)


@dataclass(frozen=True)
class GeneratorParams:
    """All model hyperparameters.

    ``alpha0`` and ``lam`` set the depth-dependent stop parameter
    alpha0 * lam**depth, ``gamma`` the child-stick parameter, ``p``/``q`` the
    child-sigma scaling Beta, and ``sigma_min``/``sigma_max`` the sigma clamp
    floor and the root sigma. ``max_depth`` is a hard guard against unbounded
    descent (the underlying tree is potentially infinite).
    """

    n: int
    d: int
    alpha0: float
    lam: float
    gamma: float
    p: float = 1.0
    q: float = 5.0
    sigma_min: float = DEFAULT_SIGMA_MIN
    sigma_max: float = DEFAULT_SIGMA_MAX
    seed: int = 0
    max_depth: int = DEFAULT_MAX_DEPTH


def validate(params: GeneratorParams) -> None:
    """Raise ParameterError naming every violated field; return None when ok."""
    problems: list[tuple[str, str]] = []
    if params.n < 0:
        problems.append(("n", "n must be >= 0"))
    if params.d < 1:
        problems.append(("d", "d must be >= 1"))
    for name in ("alpha0", "lam", "gamma", "p", "q"):
        if getattr(params, name) <= 0:
            problems.append((name, f"{name} must be > 0"))
    if params.sigma_min < 0:
        problems.append(("sigma_min", "sigma_min must be >= 0"))
    if params.sigma_max <= 0:
        problems.append(("sigma_max", "sigma_max must be > 0"))
    if not params.sigma_min < params.sigma_max:
        problems.append(("sigma_min", "sigma_min must be < sigma_max"))
    if not 0 <= params.seed < 2**64:
        problems.append(("seed", "seed must fit in 64 unsigned bits"))
    if params.max_depth < 1:
        problems.append(("max_depth", "max_depth must be >= 1"))
    if problems:
        fields = tuple(name for name, _ in problems)
        raise ParameterError("; ".join(msg for _, msg in problems), fields)


@dataclass(frozen=True)
class NodeDistribution:
    """Per-dimension Gaussian parameters of one node (diagonal model)."""

    means: np.ndarray
    sigmas: np.ndarray

    @property
    def d(self) -> int:
        return len(self.means)


class NodeState:
    """One realized tree node.

    ``nu`` is the stop stick (None until a routing first enters the node),
    ``psi_sticks[i]`` the descent stick of child i; both lie strictly in (0,1)
    once drawn. ``point_ids`` records owned points in arrival order.
    """

    __slots__ = ("path", "nu", "psi_sticks", "distribution", "point_ids")

    def __init__(
        self,
        path: NodePath,
        distribution: NodeDistribution,
        nu: float | None = None,
        psi_sticks: list[float] | None = None,
        point_ids: list[int] | None = None,
    ):
        self.path = path
        self.nu = nu
        self.psi_sticks = psi_sticks if psi_sticks is not None else []
        self.distribution = distribution
        self.point_ids = point_ids if point_ids is not None else []

    @property
    def depth(self) -> int:
        return len(self.path)

    def copy(self) -> "NodeState":
        return NodeState(
            self.path,
            self.distribution,
            nu=self.nu,
            psi_sticks=list(self.psi_sticks),
            point_ids=list(self.point_ids),
        )


class Hierarchy:
    """The realized finite tree: a map from path to NodeState plus the params.

    Mutation happens only inside the generator (lazy stick/node draws); after
    generation the tree is treated as an immutable snapshot.
    """

    def __init__(self, nodes: dict[NodePath, NodeState], params: GeneratorParams):
        self.nodes = nodes
        self.params = params

    @classmethod
    def with_root(cls, params: GeneratorParams, distribution: NodeDistribution) -> "Hierarchy":
        root = NodeState(ROOT_PATH, distribution)
        return cls({ROOT_PATH: root}, params)

    @property
    def root(self) -> NodeState:
        return self.nodes[ROOT_PATH]

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, path: NodePath) -> bool:
        return path in self.nodes

    def node(self, path: NodePath) -> NodeState:
        return self.nodes[path]

    def paths_preorder(self) -> list[NodePath]:
        """All stored paths in depth-first (lexicographic) order."""
        return sorted(self.nodes)

    def child_map(self) -> dict[NodePath, list[NodePath]]:
        """Parent path -> stored child paths (index order), one full pass."""
        children: dict[NodePath, list[NodePath]] = {p: [] for p in self.nodes}
        for path in self.nodes:
            if path:
                parent = path[:-1]
                if parent in children:
                    children[parent].append(path)
        for sibs in children.values():
            sibs.sort()
        return children

    def check_closure(self) -> None:
        """Every stored non-root path must have its parent stored."""
        if self.nodes and ROOT_PATH not in self.nodes:
            raise ConsistencyError("hierarchy has nodes but no root")
        for path in self.nodes:
            if path and path[:-1] not in self.nodes:
                raise ConsistencyError(f"node {path} has no stored parent")

    def check_sigma_monotone(self) -> None:
        """Child sigmas must not exceed the parent's, per dimension."""
        for path, node in self.nodes.items():
            if not path:
                continue
            parent = self.nodes.get(path[:-1])
            if parent is None:
                continue
            if np.any(node.distribution.sigmas > parent.distribution.sigmas):
                raise ConsistencyError(f"node {path} has a sigma above its parent's")


@dataclass(frozen=True)
class DataPoint:
    """A d-dimensional point with unique id and owning node path."""

    id: int
    features: np.ndarray
    owner: NodePath


@dataclass
class Dataset:
    """Column-wise container for the generated points.

    ``features`` is (n, d); ``owners[i]`` is the owning node path of point
    ``ids[i]``. Kept columnar so reassignment and serialization stay
    vectorized; iterate to get DataPoint views.
    """

    ids: np.ndarray
    features: np.ndarray
    owners: list[NodePath]

    @classmethod
    def empty(cls, d: int) -> "Dataset":
        return cls(np.empty(0, dtype=np.int64), np.empty((0, d)), [])

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[DataPoint]:
        for i in range(len(self.ids)):
            yield DataPoint(int(self.ids[i]), self.features[i], self.owners[i])

    def copy(self) -> "Dataset":
        return Dataset(self.ids.copy(), self.features.copy(), list(self.owners))


def check_partition(hierarchy: Hierarchy, points: Dataset) -> None:
    """Each point id must be owned by exactly one stored node, consistently."""
    seen: dict[int, NodePath] = {}
    for path, node in hierarchy.nodes.items():
        for pid in node.point_ids:
            if pid in seen:
                raise ConsistencyError(f"point {pid} owned by {seen[pid]} and {path}")
            seen[pid] = path
    if len(seen) != len(points):
        raise ConsistencyError(
            f"hierarchy owns {len(seen)} points, dataset has {len(points)}"
        )
    for pid, owner in zip(points.ids, points.owners):
        if owner not in hierarchy.nodes:
            raise ConsistencyError(f"point {pid} owned by missing node {owner}")
        if seen.get(int(pid)) != owner:
            raise ConsistencyError(f"point {pid} ownership disagrees with node lists")
