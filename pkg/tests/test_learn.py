import numpy as np
import pytest

from leitmotif import (
    ExtentFunction,
    ParameterError,
    area_under_ef,
    elbow_scores,
    extent_function,
    find_elbows,
    generate_synthetic,
    learn_length,
    learn_parameters,
)
from leitmotif.learn import rank_lengths
from conftest import naive_zed_matrix


def _ef(extents, l=20):
    extents = np.asarray(extents, dtype=np.float64)
    return ExtentFunction(
        l=l,
        ks=np.arange(2, 2 + len(extents)),
        extents=extents,
        raw_extents=extents.copy(),
        motifs=(None,) * len(extents),
    )


def fixture_series(seed=11, k_true=4, noise=0.05):
    ts, gt = generate_synthetic(
        seed=seed, n=600, d=3, k_true=k_true, l_true=20, f_true=2, noise=noise
    )
    return ts, gt


def test_extent_function_flat_then_jump():
    ts, _ = fixture_series()
    ef = extent_function(ts, 20, 6, 2)
    assert ef.extent(5) / ef.extent(4) > 2.0
    assert ef.extent(4) < 1.0  # four near-identical implants stay tight


def test_extent_function_is_monotone():
    ts, _ = fixture_series(seed=3)
    ef = extent_function(ts, 18, 8, 2)
    finite = ef.extents[np.isfinite(ef.extents)]
    assert (np.diff(finite) >= 0).all()


def test_extent_function_single_entry():
    ts, _ = fixture_series()
    ef = extent_function(ts, 20, 2, 2)
    assert len(ef.ks) == 1 and ef.ks[0] == 2


def test_extent_function_matches_standalone_search():
    from leitmotif import find_leitmotif

    ts, _ = fixture_series(seed=19, noise=0.1)
    ef = extent_function(ts, 20, 6, 2)
    for k in (2, 4, 6):
        standalone = find_leitmotif(ts, 20, k, 2)
        assert ef.raw_extents[k - 2] == standalone.extent
        np.testing.assert_array_equal(
            ef.motif(k).offsets, standalone.leitmotif.offsets
        )


def test_extent_function_infeasible_sizes_are_gaps():
    # m = 9 offsets with l = 4 allow at most two mutually non-overlapping ones
    rng = np.random.default_rng(2)
    ef = extent_function(rng.normal(size=(1, 12)), 4, 4, 1)
    assert np.isfinite(ef.extents[0])
    assert np.isinf(ef.extents[1:]).all()
    assert area_under_ef(ef) == 1.0
    with pytest.raises(ParameterError):
        find_elbows(ef)  # a single finite value cannot carry an elbow


def test_elbow_hand_example():
    ef = _ef([0.0, 0.0, 0.05, 1.0])
    ks, scores = elbow_scores(ef)
    assert scores[2] == pytest.approx(0.95 / 0.05)  # k = 4
    assert scores[1] == 0.0  # k = 3 sits on the minimum plateau
    np.testing.assert_array_equal(find_elbows(ef), [4])


def test_elbow_two_plateaus():
    ef = _ef([0.0, 0.2, 0.2, 0.5, 0.5, 1.0])
    elbows = find_elbows(ef)
    np.testing.assert_array_equal(elbows, [6, 4])  # larger rise first


def test_elbow_linear_fallback():
    ef = _ef([0.0, 1 / 3, 2 / 3, 1.0])
    ks, scores = elbow_scores(ef)
    assert (scores <= 2.0).all()
    elbows = find_elbows(ef)
    assert len(elbows) == 1
    assert elbows[0] == ks[int(np.argmax(scores))]


def test_elbow_flat_returns_k_max():
    ef = _ef([3.0, 3.0, 3.0, 3.0, 3.0])
    np.testing.assert_array_equal(find_elbows(ef), [6])


def test_elbow_affine_invariance():
    base = np.array([0.1, 0.12, 0.15, 2.0, 2.3, 2.5])
    for scale, shift in [(1.0, 0.0), (7.5, 0.0), (3.0, 11.0)]:
        np.testing.assert_array_equal(
            find_elbows(_ef(base)), find_elbows(_ef(scale * base + shift))
        )


def test_elbow_ignores_lifted_inversions():
    raw = np.array([0.1, 0.2, 5.0, 4.0, 4.5, 6.0])
    lifted = np.maximum.accumulate(raw)
    ef = ExtentFunction(
        l=20, ks=np.arange(2, 8), extents=lifted, raw_extents=raw,
        motifs=(None,) * 6,
    )
    ks, scores = elbow_scores(ef)
    assert scores[3] == 0.0  # k = 5 sits on a heuristic inversion
    assert find_elbows(ef)[0] == 3  # the 0.2 -> 5.0 jump


def test_elbow_detected_on_four_copy_fixture():
    ts, _ = fixture_series()
    ef = extent_function(ts, 20, 10, 2)
    assert find_elbows(ef)[0] == 4


def test_pair_extent_equals_direct_pair_scan():
    rng = np.random.default_rng(15)
    x = rng.normal(size=80)
    ef = extent_function(x.reshape(1, -1), 8, 3, 1)
    D = naive_zed_matrix(x, 8)
    m = D.shape[0]
    best = min(
        D[i, j]
        for i in range(m)
        for j in range(m)
        if j - i > 8
    )
    assert ef.extent(2) == pytest.approx(best, rel=1e-9)


def test_au_ef_scale_invariance_under_zed():
    ts, _ = fixture_series(seed=23, noise=0.1)
    ef1 = extent_function(ts, 20, 8, 2)
    ef3 = extent_function(3.0 * ts.values, 20, 8, 2)
    assert area_under_ef(ef1) == pytest.approx(area_under_ef(ef3), abs=1e-6)


def test_learn_length_finds_planted_length():
    ts, _ = fixture_series(seed=11)
    profile = learn_length(ts, 10, 40, step=3, k_max=10, f=2)
    assert profile.flag == "interior"
    assert abs(profile.best - 20) <= 4  # within 20% of the true length


def test_rank_lengths_fallbacks():
    single = rank_lengths([12], [0.4])
    assert single.flag == "single" and single.best == 12
    monotone = rank_lengths([10, 12, 14, 16], [0.2, 0.3, 0.4, 0.5])
    assert monotone.flag == "boundary" and monotone.best == 10
    assert len(monotone.minima) == 0
    dip = rank_lengths([10, 12, 14, 16], [0.4, 0.2, 0.5, 0.3])
    assert dip.flag == "interior" and dip.best == 12
    np.testing.assert_array_equal(dip.minima, [12])


def test_learn_length_validation():
    ts, _ = fixture_series()
    with pytest.raises(ParameterError):
        learn_length(ts, 10, 400, k_max=5, f=2)  # beyond n / 2
    with pytest.raises(ParameterError):
        learn_length(ts, 30, 10, k_max=5, f=2)


def test_learn_parameters_full():
    ts, _ = fixture_series(seed=11)
    params = learn_parameters(ts, f=2, l_range=(10, 40, 3), k_max=10)
    assert abs(params.l - 20) <= 4
    assert params.k == 4
    assert params.l_confident and params.k_confident


def test_learn_parameters_pinned_length():
    ts, _ = fixture_series(seed=11)
    params = learn_parameters(ts, f=2, l=20, k_max=10)
    assert params.l == 20
    assert params.k == 4
    assert params.profile is None
    assert params.l_confident


def test_learn_parameters_noise_only_is_low_confidence():
    for seed in (77, 78, 79):
        noise = np.random.default_rng(seed).normal(size=(3, 500))
        params = learn_parameters(noise, f=2, l_range=(10, 30, 4), k_max=8)
        assert not params.k_confident
        assert not params.l_confident


def test_learn_parameters_requires_one_length_mode():
    ts, _ = fixture_series()
    with pytest.raises(ParameterError):
        learn_parameters(ts, f=2)
    with pytest.raises(ParameterError):
        learn_parameters(ts, f=2, l=20, l_range=(10, 30))
