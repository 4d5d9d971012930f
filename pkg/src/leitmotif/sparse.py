"""Memory-reduced two-pass distance computation for long series.

The dense matrix needs ``d * m^2`` doubles, which is the scalability wall of
the discovery algorithm. The search itself only ever reads distances between
members of some query's neighbor set, so two row-streaming passes suffice:

* pass 1 streams every row once, extracts each query's per-dimension
  neighbor table, and memorizes which pairs the search could touch
  (all pairs inside any query's neighbor row, kept for all dimensions so
  any downstream dimension selection finds its values);
* pass 2 streams the rows again and keeps exactly the memorized entries.

Rows are produced by the same kernel as the dense matrix, so results over
the store are identical to results over the dense matrix, bit for bit. The
cost is computing every row twice; resident distance storage drops from
``O(d * m^2)`` to ``O(d * m * k^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import OverlapRule, TimeSeries
from .distances import Measure, _profile, estimate_dense_bytes, iter_distance_rows
from .errors import CapacityError, MissingDistanceError, ParameterError
from .neighbors import non_trivial_arg_knn
from .search import SearchResult, _search_tables

# packed 64-bit key: dim | i | j with i < j; supports m < 2^21 offsets
_SHIFT_I = 21
_SHIFT_DIM = 42
_MAX_M = 1 << _SHIFT_I


def _pack(dim: int, i: int, j: int) -> int:
    return (dim << _SHIFT_DIM) | (i << _SHIFT_I) | j


@dataclass
class SparseCounters:
    """Instrumentation of one store build."""

    entry_count: int = 0
    memo_pairs: int = 0
    peak_distance_bytes: int = 0
    dense_equivalent_bytes: int = 0
    checksum_rows: int = 0


@dataclass
class SparseDistanceStore:
    """Pairwise distances restricted to the pairs any candidate set can touch.

    ``entries`` maps a packed ``(dim, i, j)`` key with ``i < j`` to the
    distance; the diagonal is implicit. Neighbor tables of every query are
    kept alongside so searches never need full rows again.
    """

    entries: dict
    knn_neighbors: np.ndarray   # (m, d, k) int64
    knn_distances: np.ndarray   # (m, d, k) float64
    l: int
    k: int
    measure: Measure
    alpha: float
    memory_bound: int | None = None
    counters: SparseCounters = field(default_factory=SparseCounters)

    @property
    def m(self) -> int:
        return self.knn_neighbors.shape[0]

    @property
    def d(self) -> int:
        return self.knn_neighbors.shape[1]

    def lookup(self, dim: int, i: int, j: int) -> float:
        """Stored distance of the canonical pair; hard error when missing.

        A miss means pass 1 failed to memorize a needed pair, which is a
        bookkeeping bug; recomputing silently would mask it.
        """
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        try:
            return self.entries[_pack(dim, i, j)]
        except KeyError:
            raise MissingDistanceError(
                f"pair (dim={dim}, i={i}, j={j}) was never memorized"
            ) from None


def build_sparse(ts, l, k, f=None, measure="zed", alpha=1.0,
                 memory_bound=None, checksum_stride=0) -> SparseDistanceStore:
    """Build the two-pass sparse distance store.

    Parameters
    ----------
    ts : TimeSeries or array-like
    l, k : int
        Window length and motif set size; neighbor tables are built at ``k``.
    f : int, optional
        Recorded for bookkeeping only; the memorized pair set covers every
        dimension, so any ``f <= d`` can be searched afterwards.
    measure : str or Measure
    alpha : float
        Trivial-match exclusion width.
    memory_bound : int or None
        Cap in bytes on the resident distance storage (store entries plus
        neighbor tables plus row buffers). Exceeding it raises
        :class:`CapacityError` with the measured requirement.
    checksum_stride : int
        Verify every ``stride``-th row of pass 2 against a pass-1 checksum
        (0 disables). Both passes run the same kernel, so the sums must agree
        exactly.

    Returns
    -------
    SparseDistanceStore
    """
    ts = TimeSeries.coerce(ts)
    measure = Measure.coerce(measure)
    if not 2 <= l <= ts.n:
        raise ParameterError(f"window length must satisfy 2 <= l <= n={ts.n}, got {l}")
    if k < 2:
        raise ParameterError(f"set size k must be >= 2, got {k}")
    if f is not None and not 1 <= f <= ts.d:
        raise ParameterError(f"f must satisfy 1 <= f <= d={ts.d}, got {f}")
    m = ts.num_windows(l)
    if m >= _MAX_M:
        raise CapacityError(f"sparse store supports at most {_MAX_M - 1} offsets, got {m}")
    rule = OverlapRule(l=l, alpha=alpha)
    d = ts.d

    profiles = [_profile(ts.values[dim], l) for dim in range(d)]
    neighbors = np.full((m, d, k), -1, dtype=np.int64)
    knn_dists = np.full((m, d, k), np.inf)
    checksums = {}

    # pass 1: stream rows, extract neighbor tables, remember row checksums
    for dim in range(d):
        rows = iter_distance_rows(ts.values[dim], l, measure, prof=profiles[dim])
        for i, row in enumerate(rows):
            neighbors[i, dim], knn_dists[i, dim] = non_trivial_arg_knn(row, k, i, rule)
            if checksum_stride and i % checksum_stride == 0:
                checksums[(dim, i)] = float(row.sum())

    # memorize the pairs any candidate set can touch: all pairs within each
    # query's neighbor row, in every dimension
    seen = set()
    pair_rows = [[] for _ in range(m)]
    for i in range(m):
        for dim in range(d):
            row = neighbors[i, dim]
            valid = row[row >= 0]
            for a, b in combinations(sorted(int(v) for v in valid), 2):
                if (a, b) not in seen:
                    seen.add((a, b))
                    pair_rows[a].append(b)
    memo_pairs = len(seen)
    del seen

    table_bytes = knn_dists.nbytes
    row_bytes = 3 * m * 8  # current row, previous dots, seed dots
    entry_bytes = memo_pairs * d * 16  # packed key + value per dimension
    required = entry_bytes + table_bytes + row_bytes
    if memory_bound is not None and required > memory_bound:
        raise CapacityError(
            f"sparse store needs {required} bytes (bound {memory_bound})",
            required_bytes=required,
        )

    # pass 2: stream rows again, keep exactly the memorized pairs
    entries = {}
    for dim in range(d):
        rows = iter_distance_rows(ts.values[dim], l, measure, prof=profiles[dim])
        for i, row in enumerate(rows):
            key = (dim, i)
            if key in checksums:
                # same kernel, same inputs: the recomputed row must bit-agree
                assert float(row.sum()) == checksums[key]
            base = dim << _SHIFT_DIM | i << _SHIFT_I
            for j in pair_rows[i]:
                entries[base | j] = float(row[j])

    counters = SparseCounters(
        entry_count=len(entries),
        memo_pairs=memo_pairs,
        peak_distance_bytes=len(entries) * 8 + table_bytes + row_bytes,
        dense_equivalent_bytes=estimate_dense_bytes(d, m),
        checksum_rows=len(checksums),
    )
    return SparseDistanceStore(
        entries=entries,
        knn_neighbors=neighbors,
        knn_distances=knn_dists,
        l=l,
        k=k,
        measure=measure,
        alpha=alpha,
        memory_bound=memory_bound,
        counters=counters,
    )


def search_store(store: SparseDistanceStore, f, k=None, prune=True) -> SearchResult:
    """Run the discovery loop over a sparse store.

    ``k`` defaults to the store's table size; any smaller ``k`` reuses the
    leading table columns.
    """
    k = store.k if k is None else k
    if not 1 <= f <= store.d:
        raise ParameterError(f"f must satisfy 1 <= f <= d={store.d}, got {f}")
    return _search_tables(
        store.knn_neighbors,
        store.knn_distances,
        k,
        f,
        store.lookup,
        store.measure,
        store.l,
        prune=prune,
        backend="sparse",
    )
