"""Subsequence distance measures and the dense pairwise distance matrix.

Four measures are supported: squared z-normalized Euclidean distance (zed),
squared Euclidean distance (ed), cosine distance (cd) and the complexity
invariant distance (cid). The pairwise matrix is computed row by row from a
rolling dot product, so its cost is O(d * m^2) independent of the window
length. The same row kernel backs both the dense matrix here and the
memory-reduced store in :mod:`leitmotif.sparse`, which makes the two paths
numerically identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import FLAT_EPS, TimeSeries, sliding_mean_std
from .errors import CapacityError, ParameterError

logger = logging.getLogger(__name__)

#: Default cap on the dense matrix allocation (bytes); larger jobs must use
#: the sparse store.
DEFAULT_MEMORY_BUDGET = 2 << 30


class Measure(str, Enum):
    """Distance measure tag."""

    ZED = "zed"
    ED = "ed"
    CD = "cd"
    CID = "cid"

    @classmethod
    def coerce(cls, value) -> "Measure":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(
                f"unknown measure {value!r}; expected one of "
                f"{[m.value for m in cls]}"
            ) from None

    @property
    def squared(self) -> bool:
        """Whether values scale like a squared metric (affects bound factors)."""
        return self is not Measure.CD  # cd = 1 - cos is half a squared chord

    @property
    def extent_bound_factor(self):
        """Upper-bound factor of a candidate extent over its anchor distance.

        ``None`` for cid, whose complexity correction breaks any fixed factor.
        """
        if self is Measure.CID:
            return None
        return 4.0


# ---------------------------------------------------------------------------
# scalar reference measures
# ---------------------------------------------------------------------------

def _check_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
        raise ParameterError("expected two 1d vectors of equal length")
    if a.size < 2:
        raise ParameterError("vectors must have length >= 2")
    return a, b


def zed_squared(a, b, stats_a=None, stats_b=None) -> float:
    """Squared z-normalized Euclidean distance between two windows.

    Computed from the dot product as ``2l * (1 - pearson term)`` and clamped
    below at zero against rounding. Flat windows (std below ``FLAT_EPS``)
    follow the library conventions: both flat -> 0, exactly one flat -> ``2l``
    (maximal, uncorrelated).

    Parameters
    ----------
    a, b : array-like
        The two windows, equal length ``l >= 2``.
    stats_a, stats_b : (mean, std) tuples, optional
        Precomputed window statistics (population std). Derived from the
        vectors when omitted.
    """
    a, b = _check_pair(a, b)
    l = a.size
    mu_a, sig_a = stats_a if stats_a is not None else (a.mean(), a.std())
    mu_b, sig_b = stats_b if stats_b is not None else (b.mean(), b.std())
    flat_a = sig_a < FLAT_EPS
    flat_b = sig_b < FLAT_EPS
    if flat_a and flat_b:
        logger.debug("zed_squared: both windows flat, returning 0 by convention")
        return 0.0
    if flat_a or flat_b:
        logger.debug("zed_squared: one window flat, returning 2l by convention")
        return 2.0 * l
    r = (float(a @ b) - l * mu_a * mu_b) / (l * sig_a * sig_b)
    return max(0.0, 2.0 * l * (1.0 - r))


def ed_squared(a, b) -> float:
    """Plain squared Euclidean distance between two windows."""
    a, b = _check_pair(a, b)
    diff = a - b
    return float(diff @ diff)


def cosine_distance(a, b) -> float:
    """Cosine distance ``1 - cos(a, b)``, clamped to [0, 2].

    A zero-norm vector yields distance 1 by convention.
    """
    a, b = _check_pair(a, b)
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a < FLAT_EPS or norm_b < FLAT_EPS:
        return 1.0
    return float(np.clip(1.0 - (a @ b) / (norm_a * norm_b), 0.0, 2.0))


def complexity(x) -> float:
    """Complexity estimate: root sum of squared one-step differences."""
    x = np.asarray(x, dtype=np.float64)
    d = np.diff(x)
    return float(np.sqrt(d @ d))


def cid(a, b) -> float:
    """Complexity invariant distance: squared ED times the complexity ratio.

    The correction factor is ``max(ce_a, ce_b) / min(ce_a, ce_b)`` with both
    complexity estimates floored at ``FLAT_EPS``.
    """
    a, b = _check_pair(a, b)
    ce_a = max(complexity(a), FLAT_EPS)
    ce_b = max(complexity(b), FLAT_EPS)
    cf = max(ce_a, ce_b) / min(ce_a, ce_b)
    return ed_squared(a, b) * cf


# ---------------------------------------------------------------------------
# rolling pairwise computation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _DimProfile:
    """Per-window quantities of one dimension needed by the row kernel."""

    mu: np.ndarray        # window means
    sigma: np.ndarray     # window population stds
    sigma_safe: np.ndarray  # sigma floored at FLAT_EPS, safe to divide by
    flat: np.ndarray      # bool mask of flat windows
    ssq: np.ndarray       # sum of squared window values
    ce: np.ndarray        # complexity estimates, floored at FLAT_EPS


def _profile(x: np.ndarray, l: int) -> _DimProfile:
    stats = sliding_mean_std(x.reshape(1, -1), l)
    mu = stats.means[0]
    sigma = stats.stds[0]
    zero = np.zeros(1)
    c2 = np.concatenate([zero, np.cumsum(x * x)])
    ssq = c2[l:] - c2[:-l]
    d = np.diff(x)
    cd2 = np.concatenate([zero, np.cumsum(d * d)])
    ce = np.sqrt(np.maximum(cd2[l - 1:] - cd2[: -(l - 1)], 0.0))
    return _DimProfile(
        mu=mu,
        sigma=sigma,
        sigma_safe=np.maximum(sigma, FLAT_EPS),
        flat=sigma < FLAT_EPS,
        ssq=ssq,
        ce=np.maximum(ce, FLAT_EPS),
    )


def _row_from_dot(dot, i, prof, l, measure):
    """Distances of window ``i`` to every window, given the dot-product row."""
    if measure is Measure.ZED:
        if prof.flat[i]:
            dist = np.where(prof.flat, 0.0, 2.0 * l)
        else:
            r = (dot - l * prof.mu[i] * prof.mu) / (l * prof.sigma_safe[i] * prof.sigma_safe)
            dist = np.maximum(2.0 * l * (1.0 - r), 0.0)
            dist = np.where(prof.flat, 2.0 * l, dist)
    elif measure is Measure.ED:
        dist = np.maximum(prof.ssq[i] + prof.ssq - 2.0 * dot, 0.0)
    elif measure is Measure.CD:
        norm = np.sqrt(prof.ssq)
        zero_norm = norm < FLAT_EPS
        denom = np.maximum(norm[i] * norm, FLAT_EPS * FLAT_EPS)
        dist = np.clip(1.0 - dot / denom, 0.0, 2.0)
        if zero_norm[i]:
            dist = np.ones_like(dist)
        else:
            dist = np.where(zero_norm, 1.0, dist)
    elif measure is Measure.CID:
        ed = np.maximum(prof.ssq[i] + prof.ssq - 2.0 * dot, 0.0)
        cf = np.maximum(prof.ce[i], prof.ce) / np.minimum(prof.ce[i], prof.ce)
        dist = ed * cf
    else:  # pragma: no cover - enum is exhaustive
        raise ParameterError(f"unsupported measure {measure}")
    dist[i] = 0.0  # self-distance is zero by definition
    return dist


def iter_distance_rows(x, l, measure, prof=None):
    """Yield the distance row of every offset of a single dimension.

    Row ``i + 1`` is derived from row ``i`` by one subtraction and one
    addition per entry; only row 0 costs a full O(m * l) correlation. Peak
    memory is three O(m) buffers, which is what makes the two-pass sparse
    store possible.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    m = x.size - l + 1
    if prof is None:
        prof = _profile(x, l)
    measure = Measure.coerce(measure)
    dot_first = np.correlate(x, x[:l], mode="valid")
    yield _row_from_dot(dot_first, 0, prof, l, measure)
    prev = dot_first
    tail = x[l : l + m - 1]  # x[j + l - 1] for j = 1 .. m-1
    head = x[: m - 1]        # x[j - 1]     for j = 1 .. m-1
    for i in range(1, m):
        cur = np.empty(m)
        cur[1:] = prev[:-1] - x[i - 1] * head + x[i + l - 1] * tail
        cur[0] = dot_first[i]
        yield _row_from_dot(cur, i, prof, l, measure)
        prev = cur


@dataclass(frozen=True)
class DenseDistanceMatrix:
    """Per-dimension pairwise subsequence distances, shape ``d x m x m``."""

    data: np.ndarray
    measure: Measure
    l: int

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]

    def row(self, dim: int, i: int) -> np.ndarray:
        return self.data[dim, i]

    def dist(self, dim: int, i: int, j: int) -> float:
        """Distance for the canonically ordered pair (min, max).

        The rolling computation can leave last-bit asymmetries between
        ``[i, j]`` and ``[j, i]``; canonical ordering keeps every consumer on
        one value per pair, which the sparse store mirrors exactly.
        """
        if i > j:
            i, j = j, i
        return float(self.data[dim, i, j])


def estimate_dense_bytes(d: int, m: int) -> int:
    """Memory needed by the dense matrix for ``d`` dimensions, ``m`` offsets."""
    return d * m * m * 8


def pairwise_matrix(ts, l, measure="zed", memory_budget=DEFAULT_MEMORY_BUDGET):
    """Compute the full per-dimension pairwise distance matrix.

    Parameters
    ----------
    ts : TimeSeries or array-like
        The series, dimension-major.
    l : int
        Window length, ``2 <= l <= n``.
    measure : str or Measure
        One of zed, ed, cd, cid.
    memory_budget : int or None
        Allocation cap in bytes. ``None`` disables the check.

    Returns
    -------
    DenseDistanceMatrix

    Raises
    ------
    CapacityError
        If ``d * m^2`` doubles exceed the budget; use
        :func:`leitmotif.sparse.build_sparse` for such instances.
    """
    ts = TimeSeries.coerce(ts)
    if not 2 <= l <= ts.n:
        raise ParameterError(f"window length must satisfy 2 <= l <= n={ts.n}, got {l}")
    measure = Measure.coerce(measure)
    m = ts.num_windows(l)
    required = estimate_dense_bytes(ts.d, m)
    if memory_budget is not None and required > memory_budget:
        raise CapacityError(
            f"dense distance matrix needs {required} bytes "
            f"(budget {memory_budget}); use the sparse store instead",
            required_bytes=required,
        )
    data = np.empty((ts.d, m, m), dtype=np.float64)
    for dim in range(ts.d):
        for i, row in enumerate(iter_distance_rows(ts.values[dim], l, measure)):
            data[dim, i] = row
    return DenseDistanceMatrix(data=data, measure=measure, l=l)
