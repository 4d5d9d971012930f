"""Synthetic ground truth, the exhaustive oracle, and evaluation metrics.

The generator plants jittered copies of a smooth random template into a
random dimension subset of a noise series, fully seed-deterministic. The
brute-force solver enumerates every dimension subset and every
non-overlapping offset set and is meant for tests only; its distances are
computed naively (explicit window normalization), independent of the rolling
kernel. Evaluation scores found occurrences against ground truth intervals
by interval overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import FLAT_EPS, OverlapRule, TimeSeries
from .errors import CapacityError, ParameterError
from .distances import Measure
from .search import Leitmotif, find_leitmotif


@dataclass(frozen=True)
class GroundTruth:
    """Implanted occurrences: (start, length) pairs plus the planted subset."""

    occurrences: tuple
    dims: tuple
    k_true: int
    l_true: int
    f_true: int


@dataclass
class EvalReport:
    """Precision/recall of found occurrences against ground truth."""

    precision: float
    recall: float
    matched: list
    overlap_threshold: float = 0.5


def _smooth_template(rng, l):
    """Sum of three random-phase sinusoids, normalized to zero mean, unit std."""
    t = np.arange(l)
    y = np.zeros(l)
    for _ in range(3):
        cycles = rng.uniform(1.0, 4.0)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(0.5, 1.0)
        y += amp * np.sin(2.0 * np.pi * cycles * t / l + phase)
    y -= y.mean()
    std = y.std()
    if std < FLAT_EPS:  # all three phases cancelled; retry deterministic
        return _smooth_template(rng, l)
    return y / std


def generate_synthetic(seed, n, d, k_true, l_true, f_true, noise=0.0):
    """Generate a noise series with ``k_true`` planted template copies.

    Each copy is scaled by a per-copy amplitude in [0.8, 1.2] and perturbed
    by additive Gaussian noise with standard deviation ``noise`` (the
    template has unit std, so ``noise`` is a fraction of the signal;
    0 plants exact affine copies). Copies live in ``f_true`` random
    dimensions at non-overlapping offsets; everything else is unit Gaussian
    noise. Fully deterministic in ``seed``.

    Returns
    -------
    (TimeSeries, GroundTruth)
    """
    if k_true < 2 or l_true < 2 or d < 1:
        raise ParameterError("need k_true >= 2, l_true >= 2, d >= 1")
    if not 1 <= f_true <= d:
        raise ParameterError(f"f_true must satisfy 1 <= f_true <= d={d}")
    if k_true * 2 * l_true > n:
        raise ParameterError(
            f"cannot pack {k_true} copies of length {l_true} into n={n}"
        )
    if noise < 0:
        raise ParameterError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    values = rng.normal(0.0, 1.0, size=(d, n))
    template = _smooth_template(rng, l_true)
    dims = np.sort(rng.choice(d, size=f_true, replace=False))
    # non-overlapping placement: sorted draws plus a strict (l + 1) spacing
    spacing = l_true + 1
    free = n - l_true + 1 - (k_true - 1) * spacing
    starts = np.sort(rng.integers(0, free, size=k_true))
    starts = starts + np.arange(k_true) * spacing
    for idx, off in enumerate(starts):
        amp = rng.uniform(0.8, 1.2)
        for dim in dims:
            copy = amp * template
            if noise > 0:
                copy = copy + rng.normal(0.0, noise, size=l_true)
            values[dim, off : off + l_true] = copy
    gt = GroundTruth(
        occurrences=tuple((int(off), int(l_true)) for off in starts),
        dims=tuple(int(x) for x in dims),
        k_true=k_true,
        l_true=l_true,
        f_true=f_true,
    )
    return TimeSeries(values), gt


# ---------------------------------------------------------------------------
# naive distances + exhaustive search (test oracle)
# ---------------------------------------------------------------------------

def _naive_matrix(x, l, measure):
    """Per-pair distances by explicit window normalization; O(m^2 l)."""
    m = x.size - l + 1
    win = np.lib.stride_tricks.sliding_window_view(x, l)
    mu = win.mean(axis=1)
    sig = win.std(axis=1)
    flat = sig < FLAT_EPS
    out = np.empty((m, m))
    if measure is Measure.ZED:
        z = (win - mu[:, None]) / np.where(flat, 1.0, sig)[:, None]
        for i in range(m):
            out[i] = ((z - z[i]) ** 2).sum(axis=1)
        both = flat[:, None] & flat[None, :]
        one = flat[:, None] ^ flat[None, :]
        out[one] = 2.0 * l
        out[both] = 0.0
    elif measure is Measure.ED:
        for i in range(m):
            out[i] = ((win - win[i]) ** 2).sum(axis=1)
    elif measure is Measure.CD:
        norm = np.sqrt((win * win).sum(axis=1))
        zero = norm < FLAT_EPS
        safe = np.where(zero, 1.0, norm)
        for i in range(m):
            out[i] = np.clip(1.0 - (win @ win[i]) / (safe * safe[i]), 0.0, 2.0)
        either = zero[:, None] | zero[None, :]
        out[either] = 1.0
    elif measure is Measure.CID:
        ce = np.maximum(
            np.sqrt((np.diff(win, axis=1) ** 2).sum(axis=1)), FLAT_EPS
        )
        cf = np.maximum(ce[:, None], ce[None, :]) / np.minimum(
            ce[:, None], ce[None, :]
        )
        for i in range(m):
            out[i] = ((win - win[i]) ** 2).sum(axis=1)
        out *= cf
    else:  # pragma: no cover
        raise ParameterError(f"unsupported measure {measure}")
    np.fill_diagonal(out, 0.0)
    return out


def _non_overlapping_sets(m, k, rule):
    """All k-subsets of offsets that are pairwise non-trivial matches."""
    span = math.ceil(rule.l * rule.alpha)
    offsets = list(range(m))
    out = []

    def extend(prefix, start):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for off in range(start, m):
            if prefix and off - prefix[-1] <= span:
                continue
            prefix.append(off)
            extend(prefix, off + 1)
            prefix.pop()

    extend([], 0)
    return out


def brute_force_leitmotif(ts, l, k, f, measure="zed", alpha=1.0,
                          max_evals=10_000_000):
    """Exhaustive minimum-extent search over all dimension and offset subsets.

    The global optimum for the discovery problem; refuses instances beyond
    ``max_evals`` candidate evaluations because it exists for testing only.
    Ties resolve toward the smallest dimension subset, then the
    lexicographically smallest offsets.

    Returns the optimal :class:`Leitmotif`, or None when no feasible offset
    set exists.
    """
    ts = TimeSeries.coerce(ts)
    measure = Measure.coerce(measure)
    if not 2 <= l <= ts.n:
        raise ParameterError(f"window length must satisfy 2 <= l <= n={ts.n}")
    if k < 2 or not 1 <= f <= ts.d:
        raise ParameterError("need k >= 2 and 1 <= f <= d")
    m = ts.num_windows(l)
    evals = math.comb(m, k) * math.comb(ts.d, f)
    if evals > max_evals:
        raise CapacityError(
            f"{evals} candidate evaluations exceed the oracle cap {max_evals}"
        )
    rule = OverlapRule(l=l, alpha=alpha)
    naive = np.stack([_naive_matrix(ts.values[dim], l, measure) for dim in range(ts.d)])
    candidate_sets = _non_overlapping_sets(m, k, rule)
    if not candidate_sets:
        return None
    pair_idx = list(combinations(range(k), 2))
    best_extent = np.inf
    best = None
    for dims in combinations(range(ts.d), f):
        summed = naive[list(dims)].sum(axis=0)
        for offs in candidate_sets:
            extent = 0.0
            for a, b in pair_idx:
                dist = summed[offs[a], offs[b]]
                if dist > extent:
                    extent = dist
                    if extent >= best_extent:
                        break
            if extent < best_extent:
                best_extent = extent
                best = (offs, dims)
    offs, dims = best
    return Leitmotif(
        offsets=np.asarray(offs, dtype=np.int64),
        dims=np.asarray(dims, dtype=np.int64),
        extent=float(best_extent),
        length=l,
        measure=measure,
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _found_intervals(found, length=None):
    if found is None:
        return []
    if isinstance(found, Leitmotif):
        return [(int(o), found.length) for o in found.offsets]
    if length is None:
        raise ParameterError("offset lists need an explicit length")
    return [(int(o), int(length)) for o in found]


def evaluate(found, gt: GroundTruth, threshold=0.5, length=None) -> EvalReport:
    """Score found occurrences against ground truth intervals.

    A found interval matches a ground-truth interval when their overlap is at
    least ``threshold`` of the ground-truth length. Matching is greedy
    one-to-one by descending overlap. Precision is the matched fraction of
    found intervals, recall the matched fraction of ground-truth intervals.

    ``found`` may be a :class:`Leitmotif`, an offset list (with ``length``),
    or None.
    """
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(f"threshold must lie in (0, 1], got {threshold}")
    found_iv = _found_intervals(found, length)
    gt_iv = list(gt.occurrences)
    pairs = []
    for fi, (fo, fl) in enumerate(found_iv):
        for gi, (go, gl) in enumerate(gt_iv):
            inter = min(fo + fl, go + gl) - max(fo, go)
            if inter <= 0:
                continue
            ratio = inter / gl
            if ratio >= threshold:
                pairs.append((ratio, fo, go, fi, gi))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))
    used_f, used_g = set(), set()
    matched = []
    for ratio, fo, go, fi, gi in pairs:
        if fi in used_f or gi in used_g:
            continue
        used_f.add(fi)
        used_g.add(gi)
        matched.append((fo, go))
    precision = len(matched) / len(found_iv) if found_iv else 0.0
    recall = len(matched) / len(gt_iv) if gt_iv else 0.0
    return EvalReport(
        precision=precision, recall=recall, matched=matched,
        overlap_threshold=threshold,
    )


# ---------------------------------------------------------------------------
# noise robustness experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseConfig:
    """Setup of a noise-robustness run.

    ``levels`` are fractions of the series standard deviation added as
    Gaussian noise to the otherwise exactly planted series.
    """

    levels: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
    seeds: int = 20
    n: int = 1200
    d: int = 3
    k_true: int = 4
    l_true: int = 20
    f_true: int = 2
    measure: str = "zed"
    alpha: float = 1.0
    threshold: float = 0.5
    base_seed: int = 0


@dataclass
class NoiseLevelStats:
    """Mean and std of precision/recall at one noise level."""

    level: float
    precision_mean: float
    precision_std: float
    recall_mean: float
    recall_std: float
    runs: int = 0


def noise_experiment(config: NoiseConfig):
    """Re-run generation, discovery and evaluation across noise levels.

    For each level, ``config.seeds`` series are planted exactly, perturbed by
    Gaussian noise scaled to the level times the series std, and searched
    with the true parameters. Results are merged in seed order, so the whole
    table is deterministic.
    """
    if len(config.levels) == 0:
        raise ParameterError("noise level list must not be empty")
    if config.seeds < 1:
        raise ParameterError("need at least one seed")
    stats = []
    for level in config.levels:
        if level < 0:
            raise ParameterError(f"noise level must be >= 0, got {level}")
        precisions, recalls = [], []
        for s in range(config.seeds):
            ts, gt = generate_synthetic(
                config.base_seed + s, config.n, config.d,
                config.k_true, config.l_true, config.f_true, noise=0.0,
            )
            values = ts.values
            if level > 0:
                rng = np.random.default_rng(
                    [config.base_seed + s, int(round(level * 1000))]
                )
                values = values + rng.normal(
                    0.0, level * values.std(), size=values.shape
                )
                ts = TimeSeries(values)
            result = find_leitmotif(
                ts, gt.l_true, gt.k_true, gt.f_true,
                measure=config.measure, alpha=config.alpha,
            )
            report = evaluate(result.leitmotif, gt, threshold=config.threshold)
            precisions.append(report.precision)
            recalls.append(report.recall)
        stats.append(NoiseLevelStats(
            level=float(level),
            precision_mean=float(np.mean(precisions)),
            precision_std=float(np.std(precisions)),
            recall_mean=float(np.mean(recalls)),
            recall_std=float(np.std(recalls)),
            runs=config.seeds,
        ))
    return stats
