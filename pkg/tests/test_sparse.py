import numpy as np
import pytest

from leitmotif import (
    CapacityError,
    MissingDistanceError,
    build_sparse,
    estimate_dense_bytes,
    find_leitmotif,
    generate_synthetic,
    pairwise_matrix,
    search_store,
)


@pytest.mark.parametrize("measure", ["zed", "ed", "cd", "cid"])
def test_dense_and_sparse_results_are_identical(measure):
    rng = np.random.default_rng(101)
    for trial in range(5):
        values = rng.normal(size=(3, 90))
        dense = find_leitmotif(values, 7, 3, 2, measure=measure, backend="dense")
        sparse = find_leitmotif(values, 7, 3, 2, measure=measure, backend="sparse")
        assert dense.found == sparse.found
        if dense.found:
            np.testing.assert_array_equal(
                dense.leitmotif.offsets, sparse.leitmotif.offsets
            )
            np.testing.assert_array_equal(dense.leitmotif.dims, sparse.leitmotif.dims)
            assert dense.extent == sparse.extent  # bit-identical, same kernel


def test_store_matches_dense_entries():
    rng = np.random.default_rng(55)
    values = rng.normal(size=(2, 80))
    dmat = pairwise_matrix(values, 6)
    store = build_sparse(values, 6, 3)
    for key in list(store.entries)[::7]:
        dim = key >> 42
        i = (key >> 21) & ((1 << 21) - 1)
        j = key & ((1 << 21) - 1)
        assert store.lookup(dim, i, j) == dmat.dist(dim, i, j)
        assert store.lookup(dim, j, i) == dmat.dist(dim, i, j)  # canonical order


def test_store_diagonal_needs_no_storage():
    values = np.random.default_rng(1).normal(size=(1, 40))
    store = build_sparse(values, 5, 2)
    assert store.lookup(0, 7, 7) == 0.0


def test_missing_pair_is_a_hard_error():
    values = np.random.default_rng(2).normal(size=(1, 60))
    store = build_sparse(values, 5, 2)
    rule_span = 5
    # find some pair that no neighbor row can contain: adjacent offsets overlap
    with pytest.raises(MissingDistanceError):
        store.lookup(0, 3, 3 + rule_span - 1)


def test_entry_count_within_quadratic_neighbor_budget():
    values = np.random.default_rng(3).normal(size=(3, 150))
    k = 4
    store = build_sparse(values, 8, k)
    m = store.m
    assert store.counters.entry_count <= 3 * m * k * k
    assert store.counters.memo_pairs <= m * 3 * (k * (k - 1) // 2)


def test_minimal_k_stores_query_pairs_only():
    values = np.random.default_rng(4).normal(size=(1, 50))
    store = build_sparse(values, 5, 2)
    # every memorized pair involves some query and its single neighbor
    for key in store.entries:
        i = (key >> 21) & ((1 << 21) - 1)
        j = key & ((1 << 21) - 1)
        assert j in store.knn_neighbors[i, 0] or i in store.knn_neighbors[j, 0]


def test_memory_bound_enforced():
    values = np.random.default_rng(5).normal(size=(2, 200))
    with pytest.raises(CapacityError) as err:
        build_sparse(values, 6, 4, memory_bound=1024)
    assert err.value.required_bytes is not None
    assert err.value.required_bytes > 1024


def test_checksummed_passes_agree():
    values = np.random.default_rng(6).normal(size=(2, 120))
    store = build_sparse(values, 6, 3, checksum_stride=5)
    assert store.counters.checksum_rows > 0


def test_peak_storage_far_below_dense():
    values = np.random.default_rng(7).normal(size=(2, 1500))
    store = build_sparse(values, 16, 4)
    dense_bytes = estimate_dense_bytes(2, store.m)
    assert store.counters.dense_equivalent_bytes == dense_bytes
    assert store.counters.peak_distance_bytes * 20 < dense_bytes


def test_search_store_with_smaller_k():
    ts, gt = generate_synthetic(seed=12, n=300, d=2, k_true=3, l_true=12, f_true=1)
    store = build_sparse(ts, 12, 4)
    res3 = search_store(store, 1, k=3)
    direct = find_leitmotif(ts, 12, 3, 1, backend="dense")
    np.testing.assert_array_equal(res3.leitmotif.offsets, direct.leitmotif.offsets)
    assert res3.extent == direct.extent
