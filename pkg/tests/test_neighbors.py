import math

import numpy as np
import pytest

from leitmotif import (
    OverlapRule,
    ParameterError,
    knn_table,
    non_trivial_arg_knn,
    pairwise_matrix,
)


def naive_greedy(row, k, query, l, alpha):
    """Reference greedy over the fully sorted row."""
    span = math.ceil(l * alpha)
    order = sorted(range(len(row)), key=lambda j: (row[j], j))
    sel = [query]
    for j in order:
        if j == query:
            continue
        if any(abs(j - c) <= span for c in sel):
            continue
        sel.append(j)
        if len(sel) == k:
            break
    return sel


def test_hand_example():
    row = np.array([0.0, 9.0, 1.0, 8.0, 2.0])
    offsets, dists = non_trivial_arg_knn(row, 3, 0, OverlapRule(l=1, alpha=1.0))
    np.testing.assert_array_equal(offsets, [0, 2, 4])
    np.testing.assert_allclose(dists, [0.0, 1.0, 2.0])


def test_exact_duplicate_is_first_neighbor():
    rng = np.random.default_rng(5)
    x = rng.normal(size=40)
    x[25:30] = x[2:7]
    dmat = pairwise_matrix(x, 5)
    offsets, dists = non_trivial_arg_knn(
        dmat.data[0, 2], 3, 2, OverlapRule(l=5)
    )
    assert offsets[1] == 25
    assert dists[1] == pytest.approx(0.0, abs=1e-9)


def test_infeasible_when_everything_overlaps():
    # n barely above l: all other offsets overlap the query
    row = np.array([0.0, 0.5, 0.7])
    offsets, dists = non_trivial_arg_knn(row, 3, 0, OverlapRule(l=5))
    assert offsets[0] == 0
    assert (offsets[1:] == -1).all()
    assert np.isinf(dists[1:]).all()


def test_alpha_zero_is_plain_selection():
    rng = np.random.default_rng(11)
    row = rng.uniform(size=50)
    row[20] = 0.0
    offsets, dists = non_trivial_arg_knn(row, 5, 20, OverlapRule(l=10, alpha=0.0))
    expected = np.argsort(row, kind="stable")
    expected = [j for j in expected if j != 20][:4]
    np.testing.assert_array_equal(offsets, [20] + expected)


def test_matches_naive_greedy_on_random_rows():
    rng = np.random.default_rng(23)
    for trial in range(50):
        m = int(rng.integers(10, 120))
        l = int(rng.integers(2, 12))
        k = int(rng.integers(2, 6))
        row = rng.uniform(size=m)
        query = int(rng.integers(0, m))
        row[query] = 0.0
        rule = OverlapRule(l=l, alpha=1.0)
        offsets, dists = non_trivial_arg_knn(row, k, query, rule)
        expected = naive_greedy(row, k, query, l, 1.0)
        got = [int(o) for o in offsets if o >= 0]
        assert got == expected
        # distances ascending, and a subsequence of the sorted row
        finite = dists[np.isfinite(dists)]
        assert (np.diff(finite) >= 0).all()


def test_deterministic_tie_break_by_offset():
    row = np.array([0.0, 3.0, 1.0, 5.0, 1.0, 2.0, 1.0])
    offsets, _ = non_trivial_arg_knn(row, 4, 0, OverlapRule(l=1, alpha=0.0))
    # three ties at distance 1: smaller offsets first
    np.testing.assert_array_equal(offsets, [0, 2, 4, 6])


def test_escalation_past_packed_exclusion_zones():
    # 30 near-zero distances packed around the query force the partition to
    # escalate before reaching the true, far-away neighbors
    m = 400
    row = np.full(m, 100.0)
    row[0] = 0.0
    row[1:31] = np.linspace(0.001, 0.002, 30)
    row[200] = 50.0
    row[300] = 60.0
    rule = OverlapRule(l=40, alpha=1.0)
    offsets, dists = non_trivial_arg_knn(row, 3, 0, rule)
    expected = naive_greedy(row, 3, 0, 40, 1.0)
    assert [int(o) for o in offsets] == expected


def test_mutual_non_overlap_assertion_holds(rng):
    x = rng.normal(size=(3, 200))
    dmat = pairwise_matrix(x, 7)
    rule = OverlapRule(l=7)
    table = knn_table(dmat, 50, 4, rule)
    assert table.d == 3 and table.k == 4
    for dim in range(3):
        if not table.feasible(dim):
            continue
        offs = sorted(int(o) for o in table.neighbors[dim])
        assert all(b - a > 7 for a, b in zip(offs, offs[1:]))


def test_k_validation():
    with pytest.raises(ParameterError):
        non_trivial_arg_knn(np.zeros(10), 1, 0, OverlapRule(l=2))
    with pytest.raises(ParameterError):
        non_trivial_arg_knn(np.zeros(10), 3, 99, OverlapRule(l=2))
