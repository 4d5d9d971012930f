"""Time-series container, sliding-window statistics and the overlap predicate.

Everything in here is shared by the distance, neighbor-search and discovery
modules. All types are immutable after construction and can be shared freely
across threads. Offsets are 0-based throughout the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

#: Windows whose standard deviation falls below this are treated as flat
#: (constant); distance kernels handle them by convention instead of dividing
#: by a near-zero sigma.
FLAT_EPS = 1e-8


@dataclass(frozen=True)
class TimeSeries:
    """A ``d x n`` multivariate time series, dimension-major.

    ``values[j]`` is the j-th dimension (channel). A 1d array is accepted and
    treated as a single-dimension series. Values must be finite, with
    ``d >= 1`` and ``n >= 2``. The backing array is copied and frozen.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True, order="C")
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ParameterError(f"expected a 1d or 2d array, got ndim={arr.ndim}")
        d, n = arr.shape
        if d < 1 or n < 2:
            raise ParameterError(f"series must satisfy d >= 1 and n >= 2, got {d} x {n}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("series contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def num_windows(self, l: int) -> int:
        """Number of valid subsequence offsets for window length ``l``."""
        return self.n - l + 1

    @classmethod
    def coerce(cls, data) -> "TimeSeries":
        """Wrap ``data`` in a TimeSeries unless it already is one."""
        if isinstance(data, cls):
            return data
        return cls(np.asarray(data))


@dataclass(frozen=True)
class SlidingStats:
    """Mean and population standard deviation of every length-``l`` window.

    ``means[k][i]`` / ``stds[k][i]`` describe the window of dimension ``k``
    starting at offset ``i``. ``flat`` marks windows with near-zero deviation.
    """

    means: np.ndarray
    stds: np.ndarray
    l: int

    @property
    def flat(self) -> np.ndarray:
        return self.stds < FLAT_EPS


def sliding_mean_std(ts, l: int) -> SlidingStats:
    """Compute per-window mean and population std in one pass per dimension.

    Uses cumulative sums, O(d * n) overall. The standard deviation divides by
    ``l`` (population convention, matching z-normalization practice).

    Parameters
    ----------
    ts : TimeSeries or array-like
        The series, dimension-major.
    l : int
        Window length, ``2 <= l <= n``.

    Returns
    -------
    SlidingStats
    """
    ts = TimeSeries.coerce(ts)
    if not 2 <= l <= ts.n:
        raise ParameterError(f"window length must satisfy 2 <= l <= n={ts.n}, got {l}")
    v = ts.values
    zero = np.zeros((ts.d, 1))
    c1 = np.hstack([zero, np.cumsum(v, axis=1)])
    c2 = np.hstack([zero, np.cumsum(v * v, axis=1)])
    means = (c1[:, l:] - c1[:, :-l]) / l
    # clamp against rounding; variances are mathematically >= 0
    var = np.maximum((c2[:, l:] - c2[:, :-l]) / l - means * means, 0.0)
    return SlidingStats(means=means, stds=np.sqrt(var), l=l)


@dataclass(frozen=True)
class OverlapRule:
    """Trivial-match rule: offsets closer than ``l * alpha`` overlap.

    ``alpha = 1.0`` (the default) excludes any pair of subsequences sharing
    more than one value; ``alpha = 0.0`` excludes only identical offsets.
    """

    l: int
    alpha: float = 1.0

    def __post_init__(self):
        if self.l < 1:
            raise ParameterError(f"window length must be >= 1, got {self.l}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha}")


def is_overlapping(i: int, j: int, rule: OverlapRule) -> bool:
    """True iff offsets ``i`` and ``j`` are a trivial match under ``rule``.

    Both bounds are inclusive: ``ceil(i - l*alpha) <= j <= ceil(i + l*alpha)``.
    Symmetric in its arguments whenever ``l * alpha`` is integral (always the
    case for the default ``alpha = 1.0``).
    """
    span = rule.l * rule.alpha
    return math.ceil(i - span) <= j <= math.ceil(i + span)
