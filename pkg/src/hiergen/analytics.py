"""Closed-form structural estimators and the Monte-Carlo oracles that check them.

Retention: the probability that a point stops at depth n is

    prod_{i=0}^{n-1} alpha0*lam^i  /  prod_{j=0}^{n} (1 + alpha0*lam^j)

(level 0 reduces to 1/(1+alpha0)). Its variance is taken over the stick draws
of a single descent chain, i.e. the variance of nu_n * prod_{i<n} (1 - nu_i)
with independent nu_i ~ Beta(1, alpha0*lam^i); ``simulate_chain_retention`` is
the matching oracle.

Child selection: the probability that a descending point enters the n-th
child (1-based) is the geometric stick product

    gamma^(n-1) / (1 + gamma)^n.

An alternative form with (1 + alpha0*lam^j)^n in the denominator circulates;
it disagrees with the index-1 value, the companion variance and plain
stick-breaking algebra whenever alpha0*lam^j != gamma, and
``simulate_child_selection_counts`` exists precisely to adjudicate that
empirically (see the width tests).

Sigma ratio: child/parent sigma is Beta(p, q), so the ratio has mean p/(p+q)
and variance pq / ((p+q)^2 (p+q+1)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DepthLimitError, ParameterError
from .kernel import KernelParams, derive_child
from .model import NodeDistribution
from .sampling import RandomSource, clamp_open_array

_SCAN_CAP = 100_000


def _check_positive(**values: float) -> None:
    bad = tuple(name for name, v in values.items() if v <= 0)
    if bad:
        raise ParameterError(f"{', '.join(bad)} must be > 0", bad)


# -- closed forms -------------------------------------------------------------


def expected_retention(alpha0: float, lam: float, level: int) -> float:
    """Probability of a point stopping at the given depth.

    Level 0 is exactly 1/(1+alpha0). Accumulated in log space so deep levels
    degrade gracefully; values below the double range underflow to 0.0.
    """
    _check_positive(alpha0=alpha0, lam=lam)
    if level < 0:
        raise ParameterError("level must be >= 0", ("level",))
    if level == 0:
        return 1.0 / (1.0 + alpha0)
    log_num = sum(math.log(alpha0) + i * math.log(lam) for i in range(level))
    log_den = sum(math.log1p(alpha0 * lam**j) for j in range(level + 1))
    return math.exp(log_num - log_den)


def retention_variance(alpha0: float, lam: float, level: int) -> float:
    """Variance of the per-chain retention probability at the given depth."""
    _check_positive(alpha0=alpha0, lam=lam)
    if level < 0:
        raise ParameterError("level must be >= 0", ("level",))
    log_num = math.log(2.0) + sum(
        math.log(alpha0) + i * math.log(lam) for i in range(level)
    )
    log_den = math.log1p(alpha0 * lam**level) + sum(
        math.log(2.0 + alpha0 * lam**j) for j in range(level + 1)
    )
    return math.exp(log_num - log_den) - expected_retention(alpha0, lam, level) ** 2


def expected_child_selection(gamma: float, index: int) -> float:
    """Probability that a descending point enters the index-th child (1-based)."""
    _check_positive(gamma=gamma)
    if index < 1:
        raise ParameterError("index must be >= 1", ("index",))
    return gamma ** (index - 1) / (1.0 + gamma) ** index


def child_selection_variance(gamma: float, index: int) -> float:
    """Variance of the per-node selection probability of the index-th child."""
    _check_positive(gamma=gamma)
    if index < 1:
        raise ParameterError("index must be >= 1", ("index",))
    second = 2.0 * gamma ** (index - 1) / ((1.0 + gamma) * (2.0 + gamma) ** index)
    return second - expected_child_selection(gamma, index) ** 2


def expected_sigma_ratio(p: float, q: float) -> tuple[float, float]:
    """(mean, variance) of the child/parent sigma ratio, unit parent sigma."""
    _check_positive(p=p, q=q)
    mean = p / (p + q)
    variance = p * q / ((p + q) ** 2 * (p + q + 1.0))
    return mean, variance


# -- qualitative regime -------------------------------------------------------

DEPTH_CHAOTIC = "chaotic"
DEPTH_SHALLOW_TOP = "shallow-top-heavy"
DEPTH_DEEPER_TOP = "deeper-top-heavy"
DEPTH_DEEP_MID = "deep-mid-mass"
DEPTH_DEEP_SPREAD = "deep-top-spread"
WIDTH_NARROW = "narrow"
WIDTH_WIDE = "wide"
WIDTH_CHAOTIC = "chaotic"

_DEPTH_TEXT = {
    DEPTH_CHAOTIC: "tree shape is chaotic and hard to predict",
    DEPTH_SHALLOW_TOP: "shallow structure with data mostly at the top",
    DEPTH_DEEPER_TOP: "depth grows but data stays mostly at the top",
    DEPTH_DEEP_MID: "deep structure with data gathering in the middle or lower region",
    DEPTH_DEEP_SPREAD: "deep structure, data at the top but spread out",
}
_WIDTH_TEXT = {
    WIDTH_NARROW: "narrower tree, fewer children per node",
    WIDTH_WIDE: "wider tree, more children per node",
    WIDTH_CHAOTIC: "children counts are chaotic and difficult to judge",
}


@dataclass(frozen=True)
class RegimeDescriptor:
    depth: str
    width: str
    description: str


def predict_regime(alpha0: float, lam: float, gamma: float) -> RegimeDescriptor:
    """Qualitative structure prediction from the control parameters."""
    _check_positive(alpha0=alpha0, lam=lam, gamma=gamma)
    if alpha0 == 1.0 and lam == 1.0:
        depth = DEPTH_CHAOTIC
    elif alpha0 <= 1.0:
        depth = DEPTH_SHALLOW_TOP if lam <= 1.0 else DEPTH_DEEPER_TOP
    else:
        depth = DEPTH_DEEP_MID if lam < 1.0 else DEPTH_DEEP_SPREAD
    if gamma == 1.0:
        width = WIDTH_CHAOTIC
    elif gamma < 1.0:
        width = WIDTH_NARROW
    else:
        width = WIDTH_WIDE
    return RegimeDescriptor(
        depth, width, f"{_DEPTH_TEXT[depth]}; {_WIDTH_TEXT[width]}"
    )


# -- Monte-Carlo oracles ------------------------------------------------------


def _scan_children(u: np.ndarray, gamma: float, rng: RandomSource):
    """Split descending points over fresh child sticks; returns
    (renormalized u per descended point, 1-based chosen index counts)."""
    chosen: list[np.ndarray] = []
    counts: list[int] = []
    remaining = u
    while remaining.size:
        if len(counts) >= _SCAN_CAP:
            raise DepthLimitError("child scan failed to terminate")
        psi = rng.beta_one_batch(gamma, remaining.size)
        desc = remaining <= psi
        counts.append(int(desc.sum()))
        chosen.append(clamp_open_array(remaining[desc] / psi[desc]))
        remaining = clamp_open_array(
            (remaining[~desc] - psi[~desc]) / (1.0 - psi[~desc])
        )
    merged = np.concatenate(chosen) if chosen else u[:0]
    return merged, np.array(counts, dtype=np.int64)


def simulate_depth_counts(
    alpha0: float,
    lam: float,
    gamma: float,
    n: int,
    rng: RandomSource,
    max_level: int = 4096,
) -> np.ndarray:
    """Route n points, each through its own fresh stick chain; stop-depth counts.

    This walks the exact routing arithmetic (stop test, residual
    renormalization, child scan) but draws fresh sticks per point, so the
    counts estimate the closed-form level expectations directly.
    """
    _check_positive(alpha0=alpha0, lam=lam, gamma=gamma)
    u = rng.uniform_open_batch(n)
    counts: list[int] = []
    level = 0
    while u.size:
        if level >= max_level:
            raise DepthLimitError(f"simulation exceeded max_level={max_level}")
        nu = rng.beta_one_batch(alpha0 * lam**level, u.size)
        stop = u <= nu
        counts.append(int(stop.sum()))
        u = clamp_open_array((u[~stop] - nu[~stop]) / (1.0 - nu[~stop]))
        u, _ = _scan_children(u, gamma, rng)
        level += 1
    return np.array(counts, dtype=np.int64)


def simulate_child_selection_counts(
    gamma: float, n: int, rng: RandomSource
) -> np.ndarray:
    """Child-index frequencies over n independent selections; entry i is the
    number of points entering child index i+1 (1-based indexing)."""
    _check_positive(gamma=gamma)
    u = rng.uniform_open_batch(n)
    _, counts = _scan_children(u, gamma, rng)
    return counts


def simulate_chain_retention(
    alpha0: float, lam: float, level: int, replicates: int, rng: RandomSource
) -> np.ndarray:
    """Per-replicate chain retention probabilities nu_n * prod_{i<n}(1 - nu_i).

    Each replicate draws one fresh descent chain; the sample mean and variance
    estimate expected_retention and retention_variance.
    """
    _check_positive(alpha0=alpha0, lam=lam)
    q = np.ones(replicates)
    for i in range(level):
        q *= 1.0 - rng.beta_one_batch(alpha0 * lam**i, replicates)
    return q * rng.beta_one_batch(alpha0 * lam**level, replicates)


def simulate_sigma_ratios(p: float, q: float, n: int, rng: RandomSource) -> np.ndarray:
    """Child/parent sigma ratios from n kernel transitions of a unit parent.

    Goes through the real kernel (sigma_min = 0 so the clamp stays inactive)
    rather than sampling the Beta directly, keeping the oracle independent of
    the closed form it checks.
    """
    kern = KernelParams(p, q, 0.0)
    parent = NodeDistribution(np.zeros(1), np.ones(1))
    ratios = np.empty(n)
    for i in range(n):
        ratios[i] = derive_child(parent, kern, rng).sigmas[0]
    return ratios
