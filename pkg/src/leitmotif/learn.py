"""Learning the motif set size ``k`` and length ``l`` from the data.

The extent function maps each set size to the smallest achievable extent at a
fixed length. Elbows of that curve mark concept changes, so the last size
before a sharp rise is a meaningful ``k``. Sweeping the length and
integrating the normalized extent function (AU-EF) turns flat, low curves
into small areas; interior local minima of the area mark meaningful lengths.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import OverlapRule, TimeSeries
from .distances import DEFAULT_MEMORY_BUDGET, Measure, pairwise_matrix
from .errors import ParameterError
from .neighbors import knn_tables
from .search import Leitmotif, _search_tables

logger = logging.getLogger(__name__)

#: Elbow score threshold: the rise after k must exceed the rise before k by
#: this ratio for k to count as an elbow.
ELBOW_THRESHOLD = 2.0
#: Denominator floor for the elbow score, as a fraction of the normalized
#: span. Extents are maxima over pairs, so exactly flat stretches are
#: generic; without a relative floor every plateau boundary would score an
#: unbounded ratio no matter how tiny its rise.
ELBOW_RISE_FLOOR = 0.01
#: A learned set size counts as confident only when the extent at its elbow
#: still sits near the curve's floor relative to the value at k_max. A real
#: motif is orders of magnitude tighter than where the curve saturates;
#: accidental similarity in noise produces elbows partway up the curve
#: (calibrated: noise never drops below ~0.33, planted stays below ~0.02).
ELBOW_CONFIDENCE_HEIGHT = 0.1


@dataclass(frozen=True)
class ExtentFunction:
    """Minimal extent per set size ``k`` in ``[2, k_max]`` at fixed length.

    ``extents`` is non-decreasing in ``k``; raw inversions produced by the
    search heuristic (they can only come from a dimension-selection switch)
    are lifted to a running maximum and kept in ``raw_extents`` for elbow
    gating. Sizes that were infeasible carry ``inf`` and always form a tail.
    """

    l: int
    ks: np.ndarray
    extents: np.ndarray
    raw_extents: np.ndarray
    motifs: tuple

    def extent(self, k: int) -> float:
        return float(self.extents[k - 2])

    def motif(self, k: int) -> Leitmotif | None:
        return self.motifs[k - 2]

    @property
    def k_max(self) -> int:
        return int(self.ks[-1])


@dataclass(frozen=True)
class LengthProfile:
    """Noise-calibrated AU-EF per candidate length, with ranked minima.

    ``au_ef`` holds the area under the normalized extent function minus the
    same area for a seeded pure-noise surrogate of identical shape; the
    subtraction cancels the length trend that noise geometry alone imposes
    on the raw area, so values can be negative and dips mark genuinely
    structured lengths. ``minima`` holds lengths strictly below both
    neighbors, ranked by ascending area; endpoints are never selected.
    ``best`` is the top minimum when one exists, otherwise the
    smallest-area length with ``flag`` set to "boundary" (or "single" for a
    one-length sweep).
    """

    lengths: np.ndarray
    au_ef: np.ndarray
    minima: np.ndarray
    best: int
    flag: str


@dataclass(frozen=True)
class LearnedParameters:
    """Outcome of parameter learning, with per-parameter confidence flags."""

    l: int
    k: int
    l_confident: bool
    k_confident: bool
    ef: ExtentFunction
    profile: LengthProfile | None = None


def extent_function(ts, l, k_max, f, measure="zed", alpha=1.0,
                    memory_budget=DEFAULT_MEMORY_BUDGET) -> ExtentFunction:
    """Compute the extent function for ``k in [2, k_max]`` at fixed ``l``.

    One distance matrix and one neighbor table (at ``k_max``) are shared by
    all set sizes. Infeasible sizes propagate as ``inf`` gaps.
    """
    ts = TimeSeries.coerce(ts)
    if k_max < 2:
        raise ParameterError(f"k_max must be >= 2, got {k_max}")
    measure = Measure.coerce(measure)
    dmat = pairwise_matrix(ts, l, measure, memory_budget=memory_budget)
    rule = OverlapRule(l=l, alpha=alpha)
    neighbors, distances = knn_tables(dmat, k_max, rule)
    ks = np.arange(2, k_max + 1)
    extents = np.full(len(ks), np.inf)
    motifs = []
    for idx, k in enumerate(ks):
        result = _search_tables(
            neighbors, distances, int(k), f, dmat.dist, measure, l
        )
        motifs.append(result.leitmotif)
        extents[idx] = result.extent
    # lift heuristic inversions to keep the extent function non-decreasing
    raw = extents.copy()
    finite = np.isfinite(extents)
    if finite.any():
        lifted = np.maximum.accumulate(np.where(finite, extents, -np.inf))
        lifted = np.where(finite, lifted, np.inf)
        if np.any(lifted[finite] > extents[finite]):
            logger.info("extent function at l=%d had raw inversions; lifted", l)
        extents = lifted
    return ExtentFunction(
        l=l, ks=ks, extents=extents, raw_extents=raw, motifs=tuple(motifs)
    )


def _finite_prefix(ef: ExtentFunction):
    finite = np.isfinite(ef.extents)
    if not finite.any():
        return ef.ks[:0], ef.extents[:0]
    stop = int(np.argmin(finite)) if not finite.all() else len(finite)
    return ef.ks[:stop], ef.extents[:stop]


def elbow_scores(ef: ExtentFunction):
    """Per-size elbow scores on the normalized extent function.

    The score of an interior ``k`` is the rise after ``k`` divided by the
    rise before it. Two gates keep the ratio meaningful: sizes on the
    normalized minimum plateau score 0 (a first step out of an all-equal
    stretch starts a motif concept, it does not end one), and sizes whose
    raw extent dropped below its predecessor score 0 (the drop is heuristic
    noise from a dimension switch; lifting it would fabricate a zero
    denominator and an unbounded score).
    """
    ks, extents = _finite_prefix(ef)
    if len(ks) < 3:
        raise ParameterError("elbow detection needs at least 3 extent values")
    raw = ef.raw_extents[: len(ks)]
    span = float(extents.max() - extents.min())
    scores = np.zeros(len(ks))
    if span <= 0.0:
        return ks, scores
    norm = (extents - extents.min()) / span
    for idx in range(1, len(ks) - 1):
        if norm[idx] <= 0.0:
            continue
        if raw[idx] < raw[idx - 1]:
            continue
        rise_after = norm[idx + 1] - norm[idx]
        if rise_after <= 0.0:
            continue
        rise_before = max(norm[idx] - norm[idx - 1], ELBOW_RISE_FLOOR)
        scores[idx] = rise_after / rise_before
    return ks, scores


def top_elbow_strength(ef: ExtentFunction):
    """(score, height ratio) of the strongest elbow.

    The height ratio is the extent at the elbow relative to the extent at
    the largest feasible size; flat curves report (0, 1).
    """
    ks, scores = elbow_scores(ef)
    if not scores.any():
        return 0.0, 1.0
    _, extents = _finite_prefix(ef)
    top = int(np.argmax(scores))
    height = extents[top] / extents[-1] if extents[-1] > 0 else 0.0
    return float(scores[top]), float(height)


def find_elbows(ef: ExtentFunction, threshold=ELBOW_THRESHOLD) -> np.ndarray:
    """Set sizes at elbow points, strongest first.

    Returns every ``k`` whose score exceeds ``threshold``, in descending
    score order. A flat extent function yields ``[k_max]`` (the largest
    maximal motif); otherwise at least the globally best-scoring ``k`` is
    returned.
    """
    ks, scores = elbow_scores(ef)
    if not scores.any():
        _, extents = _finite_prefix(ef)
        if float(np.ptp(extents)) <= 0.0:
            return np.array([ks[-1]], dtype=np.int64)
        # no rise/rise structure anywhere: fall back to the largest jump
        jumps = np.diff(extents)
        return np.array([ks[int(np.argmax(jumps))]], dtype=np.int64)
    above = np.flatnonzero(scores > threshold)
    if len(above) == 0:
        above = np.array([int(np.argmax(scores))])
    order = above[np.lexsort((ks[above], -scores[above]))]
    return ks[order].astype(np.int64)


def area_under_ef(ef: ExtentFunction) -> float:
    """Area under the normalized extent function.

    Extents are divided by the value at ``k_max`` and the k-axis by
    ``k_max``, so areas are comparable across lengths. Degenerate curves
    (infeasible sizes or an all-zero function) score 1.0, the worst value.
    """
    ks, extents = _finite_prefix(ef)
    if len(ks) < 2 or len(ks) < len(ef.ks) or extents[-1] <= 0.0:
        return 1.0
    y = extents / extents[-1]
    x = ks / ef.k_max
    return float(np.trapezoid(y, x))


_SURROGATE_SEED = 0x1EAF
_surrogate_au_cache: dict = {}


def _surrogate_au(d, n, l, k_max, f, measure, alpha, memory_budget):
    """Raw AU-EF of a seeded white-noise series of the given shape.

    Deterministic in (d, n, l, ...) and cached: length sweeps over fixtures
    of one shape pay for each baseline once.
    """
    key = (d, n, l, k_max, f, str(measure), alpha)
    if key not in _surrogate_au_cache:
        noise = np.random.default_rng([_SURROGATE_SEED, d, n, l]).normal(size=(d, n))
        ef = extent_function(
            noise, l, k_max, f, measure, alpha, memory_budget=memory_budget
        )
        _surrogate_au_cache[key] = area_under_ef(ef)
    return _surrogate_au_cache[key]


def learn_length(ts, l_min, l_max, step=1, k_max=10, f=1, measure="zed",
                 alpha=1.0, memory_budget=DEFAULT_MEMORY_BUDGET) -> LengthProfile:
    """Sweep lengths and rank them by the noise-calibrated extent-curve area.

    For every candidate length the area under the normalized extent
    function is computed for the series and for a pure-noise surrogate of
    the same shape; their difference is the ranked quantity (see
    :class:`LengthProfile`).

    Parameters
    ----------
    ts : TimeSeries or array-like
    l_min, l_max, step : int
        Candidate lengths ``l_min, l_min + step, ..., <= l_max`` with
        ``2 <= l_min <= l_max <= n / 2``.
    k_max, f, measure, alpha, memory_budget :
        Forwarded to :func:`extent_function`.
    """
    ts = TimeSeries.coerce(ts)
    if step < 1:
        raise ParameterError(f"step must be >= 1, got {step}")
    if not 2 <= l_min <= l_max:
        raise ParameterError(f"need 2 <= l_min <= l_max, got {l_min}..{l_max}")
    if l_max > ts.n // 2:
        raise ParameterError(
            f"l_max must be at most n/2 = {ts.n // 2}, got {l_max}"
        )
    lengths = np.arange(l_min, l_max + 1, step)
    au = np.empty(len(lengths))
    for idx, l in enumerate(lengths):
        ef = extent_function(
            ts, int(l), k_max, f, measure, alpha, memory_budget=memory_budget
        )
        au[idx] = area_under_ef(ef) - _surrogate_au(
            ts.d, ts.n, int(l), k_max, f, measure, alpha, memory_budget
        )
    return rank_lengths(lengths, au)


def rank_lengths(lengths, au) -> LengthProfile:
    """Rank a computed AU-EF curve: strict interior minima, then fallbacks."""
    lengths = np.asarray(lengths, dtype=np.int64)
    au = np.asarray(au, dtype=np.float64)
    interior = [
        idx
        for idx in range(1, len(lengths) - 1)
        if au[idx] < au[idx - 1] and au[idx] < au[idx + 1]
    ]
    interior.sort(key=lambda idx: (au[idx], lengths[idx]))
    minima = lengths[interior].astype(np.int64)
    if len(minima) > 0:
        best, flag = int(minima[0]), "interior"
    elif len(lengths) == 1:
        best, flag = int(lengths[0]), "single"
        logger.warning("length sweep has a single candidate %d", best)
    else:
        best, flag = int(lengths[int(np.argmin(au))]), "boundary"
        logger.info("no interior AU-EF minimum; boundary length %d", best)
    return LengthProfile(lengths=lengths, au_ef=au, minima=minima, best=best, flag=flag)


def learn_parameters(ts, *, f, l=None, l_range=None, k_max=10, measure="zed",
                     alpha=1.0, memory_budget=DEFAULT_MEMORY_BUDGET) -> LearnedParameters:
    """Learn the motif length and set size.

    Exactly one of ``l`` (pinned) and ``l_range`` (a ``(l_min, l_max)`` or
    ``(l_min, l_max, step)`` tuple to sweep) must be given. The set size is
    the top elbow of the extent function at the chosen length. Confidence is
    low when the elbow fell back below threshold, or (for a swept length)
    when no interior area minimum exists.
    """
    if (l is None) == (l_range is None):
        raise ParameterError("supply exactly one of l and l_range")
    if k_max < 3:
        raise ParameterError(f"k_max must be >= 3 to detect elbows, got {k_max}")
    profile = None
    if l is None:
        l_min, l_max, *rest = l_range
        step = rest[0] if rest else 1
        profile = learn_length(
            ts, l_min, l_max, step=step, k_max=k_max, f=f, measure=measure,
            alpha=alpha, memory_budget=memory_budget,
        )
        l = profile.best
    ef = extent_function(
        ts, int(l), k_max, f, measure, alpha, memory_budget=memory_budget
    )
    elbows = find_elbows(ef)
    k = int(elbows[0])
    score, height = top_elbow_strength(ef)
    k_confident = score > ELBOW_THRESHOLD and height <= ELBOW_CONFIDENCE_HEIGHT
    if profile is None:
        l_confident = True  # user-pinned
    else:
        l_confident = profile.flag == "interior" and k_confident
    return LearnedParameters(
        l=int(l), k=k, l_confident=l_confident, k_confident=k_confident,
        ef=ef, profile=profile,
    )
