"""Joint discovery of the top leitmotif: dimension selection plus set search.

For every query offset the search builds per-dimension neighbor tables,
selects the ``f`` dimensions whose (k-1)-th neighbor distances are smallest,
takes the best dimension's neighbor set as the candidate, and keeps the
candidate set with the smallest pairwise extent over the selected dimensions.

Candidates are pruned admissibly: the largest query-to-member distance over
the selected dimensions is itself a member-pair distance and therefore a
lower bound on the candidate's extent, so skipping candidates whose bound
already reaches the best extent can never change the result.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import OverlapRule, TimeSeries
from .distances import (
    DEFAULT_MEMORY_BUDGET,
    DenseDistanceMatrix,
    Measure,
    estimate_dense_bytes,
    pairwise_matrix,
)
from .errors import ParameterError
from .neighbors import KnnTable, knn_tables

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Leitmotif:
    """A discovered motif set: ``k`` offsets manifesting in ``f`` dimensions.

    ``offsets`` and ``dims`` are sorted ascending; ``extent`` is the maximal
    pairwise distance over ``dims``, recomputable from any distance backend.
    """

    offsets: np.ndarray
    dims: np.ndarray
    extent: float
    length: int
    measure: Measure

    @property
    def k(self) -> int:
        return len(self.offsets)

    @property
    def f(self) -> int:
        return len(self.dims)


@dataclass
class SearchCounters:
    """Diagnostics of one search run."""

    evaluated: int = 0
    pruned: int = 0
    infeasible: int = 0


@dataclass
class SearchResult:
    """Outcome of a leitmotif search; ``leitmotif`` is None when nothing
    feasible exists (never a fabricated set)."""

    leitmotif: Leitmotif | None
    counters: SearchCounters = field(default_factory=SearchCounters)
    backend: str = "dense"

    @property
    def found(self) -> bool:
        return self.leitmotif is not None

    @property
    def extent(self) -> float:
        return self.leitmotif.extent if self.leitmotif else float("inf")


@dataclass(frozen=True)
class LeitmotifCandidate:
    """One query's candidate: selected dimensions plus the anchor set.

    ``selected_dims`` are in ascending order of their (k-1)-th neighbor
    distance. ``knn_dist`` is the largest query-to-member distance over the
    selected dimensions; being a member-pair distance it lower-bounds the
    candidate's extent, which is what makes pruning with it admissible.
    """

    query: int
    knn: KnnTable
    selected_dims: np.ndarray
    candidate_set: np.ndarray
    knn_dist: float


def select_f_dimensions(knn: KnnTable, f: int):
    """Pick the ``f`` dimensions with the smallest (k-1)-th neighbor distance.

    Returns ``(dims, candidate_set)`` where ``dims`` is ordered by ascending
    neighbor distance (ties toward the lower dimension index) and the
    candidate set is the neighbor row of the single best dimension. Returns
    ``(None, None)`` when fewer than ``f`` dimensions are feasible.
    """
    if not 1 <= f <= knn.d:
        raise ParameterError(f"f must satisfy 1 <= f <= d={knn.d}, got {f}")
    kth = knn.distances[:, -1]
    order = np.argsort(kth, kind="stable")
    dims = order[:f]
    if not np.isfinite(kth[dims[-1]]):
        return None, None
    return dims, knn.neighbors[dims[0]].copy()


def _as_pair_dist(dist):
    """Normalize a distance backend to a ``(dim, a, b) -> float`` callable."""
    if isinstance(dist, DenseDistanceMatrix):
        return dist.dist
    lookup = getattr(dist, "lookup", None)
    if lookup is not None:
        return lookup
    if callable(dist):
        return dist
    raise ParameterError(f"unsupported distance backend {type(dist)!r}")


def _pair_sum(pair_dist, dims, a, b):
    # fixed accumulation order so dense and sparse backends agree bit for bit
    total = 0.0
    for dim in dims:
        total += pair_dist(int(dim), int(a), int(b))
    return total


def pairwise_extent(dist, dims, offsets, best_so_far=np.inf) -> float:
    """Largest pairwise sub-dimensional distance within ``offsets``.

    Aborts as soon as any pair exceeds ``best_so_far`` and then returns the
    running maximum (some value ``>= best_so_far``) without touching the
    remaining pairs.

    ``dist`` may be a :class:`DenseDistanceMatrix`, a sparse store, or any
    ``(dim, i, j) -> float`` callable.
    """
    pair_dist = _as_pair_dist(dist)
    extent = 0.0
    n = len(offsets)
    for ii in range(n - 1):
        for jj in range(ii + 1, n):
            d = _pair_sum(pair_dist, dims, offsets[ii], offsets[jj])
            if d > extent:
                extent = d
                if extent > best_so_far:
                    return extent
    return extent


def rank_candidate(knn: KnnTable, f: int, pair_dist) -> LeitmotifCandidate | None:
    """Build the scored candidate of one query; None when infeasible."""
    dims, cand = select_f_dimensions(knn, f)
    if dims is None:
        return None
    pair_dist = _as_pair_dist(pair_dist)
    bound = 0.0
    for c in cand[1:]:
        s = _pair_sum(pair_dist, dims, knn.query, c)
        if s > bound:
            bound = s
    return LeitmotifCandidate(
        query=knn.query,
        knn=knn,
        selected_dims=dims,
        candidate_set=cand,
        knn_dist=bound,
    )


def _search_tables(neighbors, distances, k, f, pair_dist, measure, l,
                   prune=True, backend="dense"):
    """Shared candidate loop over precomputed neighbor tables.

    ``neighbors``/``distances`` have shape ``(m, d, k_tab)`` with
    ``k_tab >= k``; only the leading ``k`` columns are used, which lets one
    table at ``k_max`` serve a whole extent-function sweep.
    """
    m, d, k_tab = neighbors.shape
    if k > k_tab:
        raise ParameterError(f"tables were built for k <= {k_tab}, got {k}")
    counters = SearchCounters()
    best_extent = np.inf
    best = None
    factor = measure.extent_bound_factor
    for q in range(m):
        kth = distances[q, :, k - 1]
        order = np.argsort(kth, kind="stable")
        dims = order[:f]
        if not np.isfinite(kth[dims[-1]]):
            counters.infeasible += 1
            continue
        cand = neighbors[q, dims[0], :k]
        bound = 0.0
        for c in cand[1:]:
            s = _pair_sum(pair_dist, dims, q, c)
            if s > bound:
                bound = s
        if prune and bound >= best_extent:
            counters.pruned += 1
            continue
        limit = best_extent if prune else np.inf
        extent = pairwise_extent(pair_dist, dims, cand, limit)
        counters.evaluated += 1
        # the bound is a member-pair distance, hence admissible
        assert bound <= extent
        if factor is not None:
            # every pair is within factor * bound for (scaled) squared metrics
            assert extent <= factor * bound + 1e-6 * max(1.0, bound)
        if extent < best_extent:
            best_extent = extent
            best = (dims.copy(), cand.copy())
    if best is None:
        return SearchResult(leitmotif=None, counters=counters, backend=backend)
    dims, cand = best
    motif = Leitmotif(
        offsets=np.sort(np.asarray(cand, dtype=np.int64)),
        dims=np.sort(np.asarray(dims, dtype=np.int64)),
        extent=float(best_extent),
        length=l,
        measure=measure,
    )
    return SearchResult(leitmotif=motif, counters=counters, backend=backend)


def search_matrix(dmat: DenseDistanceMatrix, k, f, alpha=1.0, prune=True) -> SearchResult:
    """Run the discovery loop over a prebuilt dense distance matrix."""
    if k < 2:
        raise ParameterError(f"set size k must be >= 2, got {k}")
    if not 1 <= f <= dmat.d:
        raise ParameterError(f"f must satisfy 1 <= f <= d={dmat.d}, got {f}")
    rule = OverlapRule(l=dmat.l, alpha=alpha)
    neighbors, distances = knn_tables(dmat, k, rule)
    return _search_tables(
        neighbors, distances, k, f, dmat.dist, dmat.measure, dmat.l, prune=prune
    )


def find_leitmotif(ts, l, k, f, *, measure="zed", alpha=1.0, prune=True,
                   backend="auto", memory_budget=DEFAULT_MEMORY_BUDGET) -> SearchResult:
    """Discover the top leitmotif of a multivariate series.

    Parameters
    ----------
    ts : TimeSeries or array-like
        The series, dimension-major.
    l : int
        Subsequence length.
    k : int
        Motif set size (query plus k-1 neighbors), ``k >= 2``.
    f : int
        Number of dimensions the motif manifests in, ``1 <= f <= d``.
    measure : str or Measure
        Distance measure, default squared z-normalized ED.
    alpha : float
        Trivial-match exclusion width as a fraction of ``l``.
    prune : bool
        Admissible candidate pruning; disabling it never changes the result,
        only the running time.
    backend : "auto" | "dense" | "sparse"
        "auto" takes the dense matrix when it fits ``memory_budget`` and
        falls back to the memory-reduced sparse store otherwise.
    memory_budget : int or None
        Byte budget for the dense matrix.

    Returns
    -------
    SearchResult
        ``result.leitmotif`` is None when no feasible candidate exists.
    """
    ts = TimeSeries.coerce(ts)
    if k < 2:
        raise ParameterError(f"set size k must be >= 2, got {k}")
    if not 1 <= f <= ts.d:
        raise ParameterError(f"f must satisfy 1 <= f <= d={ts.d}, got {f}")
    measure = Measure.coerce(measure)
    if backend == "auto":
        m = ts.num_windows(l)
        dense_ok = (
            memory_budget is None
            or estimate_dense_bytes(ts.d, m) <= memory_budget
        )
        backend = "dense" if dense_ok else "sparse"
        if backend == "sparse":
            logger.info(
                "dense matrix would exceed the memory budget, using the sparse store"
            )
    if backend == "dense":
        dmat = pairwise_matrix(ts, l, measure, memory_budget=memory_budget)
        return search_matrix(dmat, k, f, alpha=alpha, prune=prune)
    if backend == "sparse":
        from .sparse import build_sparse, search_store

        store = build_sparse(
            ts, l, k, f=f, measure=measure, alpha=alpha, memory_bound=memory_budget
        )
        return search_store(store, f, prune=prune)
    raise ParameterError(f"unknown backend {backend!r}")
