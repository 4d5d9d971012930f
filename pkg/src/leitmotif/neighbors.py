"""Per-dimension extraction of the nearest non-trivial neighbors of a query.

The selection is greedy: candidates are scanned in ascending (distance,
offset) order and kept only when they overlap neither the query nor any
previously kept neighbor. Mutual non-overlap is required so that candidate
sets can serve as motif sets directly. Ties in distance break toward the
smaller offset, making every result deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OverlapRule, is_overlapping
from .errors import ParameterError


@dataclass(frozen=True)
class KnnTable:
    """Neighbor offsets and distances of one query, one row per dimension.

    Entry 0 of each row is the query itself at distance 0. Rows that could
    not be filled carry ``-1`` offsets and ``inf`` distances past the last
    found neighbor and count as infeasible.
    """

    query: int
    neighbors: np.ndarray  # (d, k) int64
    distances: np.ndarray  # (d, k) float64

    @property
    def d(self) -> int:
        return self.neighbors.shape[0]

    @property
    def k(self) -> int:
        return self.neighbors.shape[1]

    def feasible(self, dim: int) -> bool:
        return bool(self.neighbors[dim, -1] >= 0)


def non_trivial_arg_knn(row, k, query, rule: OverlapRule):
    """Query plus its ``k - 1`` nearest mutually non-overlapping neighbors.

    Parameters
    ----------
    row : array-like
        Distances of every offset to the query (one matrix row).
    k : int
        Total set size including the query, ``k >= 2``.
    query : int
        Offset of the query subsequence.
    rule : OverlapRule
        Trivial-match exclusion rule.

    Returns
    -------
    offsets : (k,) int64 array
        The query at entry 0, then neighbors in ascending distance order.
        ``-1`` marks unfilled slots when fewer than ``k - 1`` mutually
        non-overlapping neighbors exist (the result is then infeasible,
        never silently truncated).
    dists : (k,) float64 array
        Matching distances; ``inf`` for unfilled slots.

    Notes
    -----
    Runs a linear-time k-smallest partition first and only falls back to a
    full ordering when the partition cannot settle the greedy selection
    (exclusion zones ate too many close candidates, or a distance tie
    straddles the partition boundary).
    """
    row = np.asarray(row, dtype=np.float64)
    m = row.size
    if k < 2:
        raise ParameterError(f"set size k must be >= 2, got {k}")
    if not 0 <= query < m:
        raise ParameterError(f"query offset {query} outside [0, {m - 1}]")

    offsets = np.full(k, -1, dtype=np.int64)
    dists = np.full(k, np.inf)
    offsets[0] = query
    dists[0] = 0.0

    p = min(m, max(4 * k, 16))
    while True:
        if p >= m:
            cand = np.lexsort((np.arange(m), row))
            boundary = np.inf
        else:
            part = np.argpartition(row, p - 1)[:p]
            cand = part[np.lexsort((part, row[part]))]
            boundary = row[cand[-1]]
        offsets[1:] = -1
        dists[1:] = np.inf
        chosen = [query]
        filled = 1
        for j in cand:
            if j == query:
                continue
            # canonical order: the raw predicate is asymmetric for
            # fractional exclusion spans
            jj = int(j)
            if any(is_overlapping(min(c, jj), max(c, jj), rule) for c in chosen):
                continue
            offsets[filled] = jj
            dists[filled] = row[jj]
            chosen.append(jj)
            filled += 1
            if filled == k:
                break
        if filled == k and dists[k - 1] < boundary:
            # no unscanned offset can precede any pick in (distance, offset)
            # order, so this equals the greedy result over the full ordering
            break
        if p >= m:
            break  # fewer than k - 1 mutually non-overlapping neighbors exist
        p = min(m, p * 4)

    if __debug__:
        picked = sorted(int(v) for v in offsets[offsets >= 0])
        for a in range(len(picked) - 1):
            assert not is_overlapping(picked[a], picked[a + 1], rule)
    return offsets, dists


def knn_table(dmat, query, k, rule: OverlapRule) -> KnnTable:
    """Assemble the per-dimension neighbor table of one query offset."""
    neighbors = np.full((dmat.d, k), -1, dtype=np.int64)
    distances = np.full((dmat.d, k), np.inf)
    for dim in range(dmat.d):
        neighbors[dim], distances[dim] = non_trivial_arg_knn(
            dmat.row(dim, query), k, query, rule
        )
    return KnnTable(query=query, neighbors=neighbors, distances=distances)


def knn_tables(dmat, k, rule: OverlapRule):
    """Neighbor tables of every query as bulk ``(m, d, k)`` arrays."""
    m = dmat.m
    neighbors = np.full((m, dmat.d, k), -1, dtype=np.int64)
    distances = np.full((m, dmat.d, k), np.inf)
    for dim in range(dmat.d):
        for i in range(m):
            neighbors[i, dim], distances[i, dim] = non_trivial_arg_knn(
                dmat.data[dim, i], k, i, rule
            )
    return neighbors, distances
