"""Stick-breaking routing over the lazily instantiated tree.

Each node owns a stop stick ``nu`` and an ordered list of child sticks
``psi_sticks``; all are drawn on first use and memoized in the hierarchy, so
every routed point sees the same realized sticks. Routing walks a uniform
insertion point down the tree:

* at a node, stop if the working value is <= nu, else renormalize it to the
  descending share, (u - nu) / (1 - nu);
* then scan child indices 0, 1, 2, ...: descend into child i if u <= psi_i
  (renormalizing u := u / psi_i), else renormalize to the remaining siblings,
  (u - psi_i) / (1 - psi_i), and move to index i+1.

A scanned child gets its distribution drawn immediately, even when the point
then passes it by -- such nodes may end up empty, which the model allows.
Working values are nudged back inside (0, 1) after each renormalization; the
division results can round onto an endpoint, which would otherwise wedge the
scan.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConsistencyError, DepthLimitError, ParameterError
from .kernel import KernelParams, derive_child
from .model import ROOT_PATH, Hierarchy, GeneratorParams, NodePath, NodeState
from .sampling import RandomSource, clamp_open


@dataclass(frozen=True)
class RoutingOutcome:
    destination: NodePath
    sticks_drawn: int


def alpha_at(params: GeneratorParams, depth: int) -> float:
    """Depth-dependent stop parameter alpha0 * lam**depth."""
    if depth < 0:
        raise ParameterError("depth must be >= 0", ("depth",))
    return params.alpha0 * params.lam**depth


def route(hierarchy: Hierarchy, rng: RandomSource, insertion: float) -> RoutingOutcome:
    """Route one insertion point to its destination node, drawing sticks on demand.

    Mutates the hierarchy (memoized sticks and newly scanned child nodes
    persist). Raises DepthLimitError when the descent would pass max_depth.
    """
    if not 0.0 < insertion < 1.0:
        raise ParameterError("insertion point must lie strictly in (0, 1)", ("insertion",))
    nodes = hierarchy.nodes
    if ROOT_PATH not in nodes:
        raise ConsistencyError("hierarchy has no root")
    params = hierarchy.params
    kern = KernelParams(params.p, params.q, params.sigma_min)
    alpha0, lam, gamma = params.alpha0, params.lam, params.gamma
    max_depth = params.max_depth
    beta_one = rng.beta_one

    u = insertion
    cur = nodes[ROOT_PATH]
    depth = 0
    drawn = 0
    while True:
        if cur.nu is None:
            cur.nu = beta_one(alpha0 * lam**depth)
            drawn += 1
        if u <= cur.nu:
            return RoutingOutcome(cur.path, drawn)
        u = clamp_open((u - cur.nu) / (1.0 - cur.nu))
        if depth >= max_depth:
            raise DepthLimitError(
                f"routing needs depth {depth + 1}, max_depth is {max_depth}"
            )
        path = cur.path
        dist = cur.distribution
        psis = cur.psi_sticks
        i = 0
        while True:
            if i == len(psis):
                psis.append(beta_one(gamma))
                drawn += 1
            psi = psis[i]
            child_path = path + (i,)
            child = nodes.get(child_path)
            if child is None:
                child = NodeState(child_path, derive_child(dist, kern, rng))
                nodes[child_path] = child
            if u <= psi:
                u = clamp_open(u / psi)
                cur = child
                depth += 1
                break
            u = clamp_open((u - psi) / (1.0 - psi))
            i += 1


def node_stop_masses(hierarchy: Hierarchy) -> dict[NodePath, float]:
    """Stop probability of each instantiated node, from the drawn sticks.

    A node's mass is the product of its nu with every (1 - nu), psi and
    (1 - psi) factor along the route to it. Nodes whose nu is still undrawn
    contribute nothing (their subtree mass is unaccounted).
    """
    masses: dict[NodePath, float] = {}
    if ROOT_PATH not in hierarchy.nodes:
        return masses
    stack: list[tuple[NodePath, float]] = [(ROOT_PATH, 1.0)]
    while stack:
        path, reach = stack.pop()
        node = hierarchy.nodes[path]
        if node.nu is None:
            continue
        masses[path] = reach * node.nu
        residual = reach * (1.0 - node.nu)
        carried = 1.0
        for i, psi in enumerate(node.psi_sticks):
            child_path = path + (i,)
            if child_path in hierarchy.nodes:
                stack.append((child_path, residual * carried * psi))
            carried *= 1.0 - psi
    return masses


def node_mass_prefix(hierarchy: Hierarchy) -> float:
    """Total routing probability mass accounted for by instantiated nodes (<= 1)."""
    return sum(node_stop_masses(hierarchy).values())
