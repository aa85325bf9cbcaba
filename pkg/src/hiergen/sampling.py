"""Deterministic random source and the exact distribution samplers the model needs.

The bit stream comes from Philox4x64-10 (a counter-based generator, as shipped
by numpy), keyed with the pair ``(seed, stream)``. The same key yields the same
draw sequence on every platform, which makes byte-identical output a testable
contract; frozen test vectors live in tests/test_sampling.py.

Stream forking: ``fork(i)`` derives the child key ``(seed, mix(stream, i))``
where ``mix`` is the SplitMix64 finalizer. Forked streams are used one per
batch replicate (or per Monte-Carlo worker) and are never shared.

Samplers are built on top of the uniform stream:

* ``uniform_open``   -- 53-bit uniforms; endpoint hits are redrawn because the
                        routing arithmetic divides by (1 - stick).
* ``beta_one``       -- Beta(1, b) by inverse CDF, x = 1 - (1-u)^(1/b),
                        evaluated as -expm1(log1p(-u)/b) for stability.
* ``beta``           -- Beta(p, q) as G_p / (G_p + G_q) with Marsaglia-Tsang
                        gamma variates (shape < 1 handled by the U^(1/a) boost).
* ``gaussian``       -- numpy's ziggurat standard normal, scaled and shifted;
                        sigma = 0 returns the mean exactly.

Scalar methods are the canonical single-draw algorithms used by the generator;
the ``*_batch`` variants apply the same algorithms vectorized (their stream
consumption differs from an equivalent sequence of scalar calls, which only
matters to code that interleaves both on one source -- don't).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError

_MASK64 = (1 << 64) - 1
# nearest representable doubles inside (0, 1); beta outputs that round onto an
# endpoint are clamped here so downstream divisions stay finite
_INTERIOR_LO = float(np.nextafter(0.0, 1.0))
_INTERIOR_HI = float(np.nextafter(1.0, 0.0))


def _splitmix64(x: int) -> int:
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _derive_stream(stream: int, index: int) -> int:
    return _splitmix64(stream ^ ((index + 1) * 0x9E3779B97F4A7C15))


def clamp_open(x: float) -> float:
    """Nudge a float onto the nearest representable value inside (0, 1)."""
    if x <= 0.0:
        return _INTERIOR_LO
    if x >= 1.0:
        return _INTERIOR_HI
    return x


def clamp_open_array(x: np.ndarray) -> np.ndarray:
    """Vector version of clamp_open, in place."""
    return np.clip(x, _INTERIOR_LO, _INTERIOR_HI, out=x)


class RandomSource:
    """Single-owner deterministic random source.

    Not safe to share between concurrent tasks; parallel work gets one forked
    child stream per task instead.
    """

    __slots__ = ("seed", "stream", "_gen")

    def __init__(self, seed: int, stream: int = 0):
        if not 0 <= seed < 2**64:
            raise ParameterError("seed must fit in 64 unsigned bits", ("seed",))
        self.seed = int(seed)
        self.stream = int(stream) & _MASK64
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def fork(self, index: int) -> "RandomSource":
        """Derive an independent child stream (documented rule, see module doc)."""
        if index < 0:
            raise ParameterError("fork index must be non-negative", ("index",))
        return RandomSource(self.seed, _derive_stream(self.stream, index))

    # -- uniform ------------------------------------------------------------

    def uniform_open(self) -> float:
        while True:
            u = self._gen.random()
            if 0.0 < u < 1.0:
                return u

    def uniform_open_batch(self, size: int) -> np.ndarray:
        u = self._gen.random(size)
        bad = u <= 0.0  # random() is [0, 1), so only the 0 endpoint can occur
        while bad.any():
            u[bad] = self._gen.random(int(bad.sum()))
            bad = u <= 0.0
        return u

    # -- gaussian -----------------------------------------------------------

    def gaussian(self, mean: float, sigma: float) -> float:
        if sigma < 0.0:
            raise ParameterError("sigma must be non-negative", ("sigma",))
        if sigma == 0.0:
            return float(mean)
        return float(mean + sigma * self._gen.standard_normal())

    def gaussian_batch(self, mean: float, sigma: float, size: int) -> np.ndarray:
        if sigma < 0.0:
            raise ParameterError("sigma must be non-negative", ("sigma",))
        if sigma == 0.0:
            return np.full(size, float(mean))
        return mean + sigma * self._gen.standard_normal(size)

    # -- Beta(1, b) ----------------------------------------------------------

    def beta_one(self, b: float) -> float:
        if b <= 0.0:
            raise ParameterError("Beta(1, b) needs b > 0", ("b",))
        u = self.uniform_open()
        return clamp_open(-math.expm1(math.log1p(-u) / b))

    def beta_one_batch(self, b: float, size: int) -> np.ndarray:
        if b <= 0.0:
            raise ParameterError("Beta(1, b) needs b > 0", ("b",))
        u = self.uniform_open_batch(size)
        x = -np.expm1(np.log1p(-u) / b)
        np.clip(x, _INTERIOR_LO, _INTERIOR_HI, out=x)
        return x

    # -- Beta(p, q) ----------------------------------------------------------

    def beta(self, p: float, q: float) -> float:
        if p <= 0.0 or q <= 0.0:
            raise ParameterError("Beta(p, q) needs positive shapes", ("p", "q"))
        gp = self._standard_gamma(p)
        gq = self._standard_gamma(q)
        return clamp_open(gp / (gp + gq))

    def beta_batch(self, p: float, q: float, size: int) -> np.ndarray:
        if p <= 0.0 or q <= 0.0:
            raise ParameterError("Beta(p, q) needs positive shapes", ("p", "q"))
        gp = self._standard_gamma_batch(p, size)
        gq = self._standard_gamma_batch(q, size)
        x = gp / (gp + gq)
        np.clip(x, _INTERIOR_LO, _INTERIOR_HI, out=x)
        return x

    # -- Marsaglia-Tsang gamma ------------------------------------------------

    def _standard_gamma(self, shape: float) -> float:
        if shape < 1.0:
            return self._standard_gamma(shape + 1.0) * self.uniform_open() ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self._gen.standard_normal()
            v = (1.0 + c * x) ** 3
            if v <= 0.0:
                continue
            u = self._gen.random()
            if u < 1.0 - 0.0331 * x**4:
                return d * v
            if u <= 0.0 or math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v

    def _standard_gamma_batch(self, shape: float, size: int) -> np.ndarray:
        if shape < 1.0:
            g = self._standard_gamma_batch(shape + 1.0, size)
            return g * self.uniform_open_batch(size) ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        out = np.empty(size)
        pending = np.arange(size)
        while pending.size:
            x = self._gen.standard_normal(pending.size)
            v = (1.0 + c * x) ** 3
            u = self._gen.random(pending.size)
            with np.errstate(divide="ignore", invalid="ignore"):
                accept = v > 0.0
                squeeze = u < 1.0 - 0.0331 * x**4
                full = np.log(u) < 0.5 * x * x + d * (1.0 - v + np.log(v))
            accept &= squeeze | full
            out[pending[accept]] = d * v[accept]
            pending = pending[~accept]
        return out
