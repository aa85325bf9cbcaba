"""Parent-to-child distribution transition and Gaussian likelihood evaluation.

A child mean is drawn from the parent's own Gaussian (per dimension); a child
sigma is the parent sigma scaled by an independent Beta(p, q) factor and then
clamped below at sigma_min. Scaling happens before the clamp so the expected
child/parent sigma ratio stays exactly p/(p+q) whenever the clamp is inactive.
Because the scale factor lies in (0,1), a child sigma never exceeds its
parent's: lower nodes are always at least as specific.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatchError, ParameterError
from .model import DataPoint, NodeDistribution
from .sampling import RandomSource

_LOG_TWO_PI = math.log(2.0 * math.pi)


class KernelParams:
    __slots__ = ("p", "q", "sigma_min")

    def __init__(self, p: float, q: float, sigma_min: float):
        if p <= 0 or q <= 0:
            raise ParameterError("kernel shapes p, q must be > 0", ("p", "q"))
        if sigma_min < 0:
            raise ParameterError("sigma_min must be >= 0", ("sigma_min",))
        self.p = p
        self.q = q
        self.sigma_min = sigma_min


def root_distribution(d: int, sigma_max: float) -> NodeDistribution:
    """The fixed starting distribution: zero mean, sigma_max spread, per dimension."""
    return NodeDistribution(np.zeros(d), np.full(d, float(sigma_max)))


def derive_child(
    parent: NodeDistribution, kernel: KernelParams, rng: RandomSource
) -> NodeDistribution:
    """Draw one child distribution from its parent.

    Draw order is fixed (all means, then all sigma scale factors, dimension by
    dimension) so a seed pins the whole sequence.
    """
    d = parent.d
    means = np.empty(d)
    for i in range(d):
        means[i] = rng.gaussian(parent.means[i], parent.sigmas[i])
    sigmas = np.empty(d)
    for i in range(d):
        scaled = parent.sigmas[i] * rng.beta(kernel.p, kernel.q)
        sigmas[i] = scaled if scaled > kernel.sigma_min else kernel.sigma_min
    return NodeDistribution(means, sigmas)


def draw_point(dist: NodeDistribution, rng: RandomSource) -> np.ndarray:
    """One feature vector: independent Gaussian draws, dimension by dimension."""
    x = np.empty(dist.d)
    for i in range(dist.d):
        x[i] = rng.gaussian(dist.means[i], dist.sigmas[i])
    return x


def log_likelihood(point: DataPoint | np.ndarray, dist: NodeDistribution) -> float:
    """Log density of a point under a node's diagonal Gaussian."""
    features = point.features if isinstance(point, DataPoint) else np.asarray(point)
    if features.shape != dist.means.shape:
        raise DimensionMismatchError(
            f"point has {features.shape} features, node expects {dist.means.shape}"
        )
    total = 0.0
    for i in range(len(features)):
        z = (features[i] - dist.means[i]) / dist.sigmas[i]
        total += _LOG_TWO_PI + 2.0 * math.log(dist.sigmas[i]) + z * z
    return -0.5 * total


def log_likelihood_matrix(
    features: np.ndarray, means: np.ndarray, sigmas: np.ndarray
) -> np.ndarray:
    """Log densities of every point under every node, (n_points, n_nodes).

    Algebraically expands the quadratic form of ``log_likelihood`` into three
    matrix products, which is what makes whole-dataset reassignment cheap.
    Memory is the caller's problem (chunk the points axis).
    """
    if features.shape[1] != means.shape[1]:
        raise DimensionMismatchError(
            f"points are {features.shape[1]}-dimensional, nodes {means.shape[1]}"
        )
    inv_var = 1.0 / (sigmas * sigmas)
    const = -0.5 * (
        _LOG_TWO_PI * means.shape[1]
        + 2.0 * np.log(sigmas).sum(axis=1)
        + (means * means * inv_var).sum(axis=1)
    )
    return (
        (features * features) @ (-0.5 * inv_var.T)
        + features @ (means * inv_var).T
        + const[None, :]
    )
