"""Shared naive oracles, independent of the library's rolling-dot kernels."""

import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

FLAT = 1e-8


def znorm_windows(x, l):
    """Explicitly z-normalized windows of a 1d series (flat windows -> 0)."""
    win = np.lib.stride_tricks.sliding_window_view(np.asarray(x, float), l)
    mu = win.mean(axis=1, keepdims=True)
    sig = win.std(axis=1, keepdims=True)
    flat = sig[:, 0] < FLAT
    z = (win - mu) / np.where(sig < FLAT, 1.0, sig)
    z[flat] = 0.0
    return z, flat


def naive_zed_matrix(x, l):
    """z-normalize-then-squared-ED oracle, including the flat conventions."""
    z, flat = znorm_windows(x, l)
    out = cdist(z, z, "sqeuclidean")
    one = flat[:, None] ^ flat[None, :]
    both = flat[:, None] & flat[None, :]
    out[one] = 2.0 * l
    out[both] = 0.0
    np.fill_diagonal(out, 0.0)
    return out


def naive_measure_matrix(x, l, measure):
    """Naive per-pair oracle for any of the four measures."""
    x = np.asarray(x, float)
    win = np.lib.stride_tricks.sliding_window_view(x, l)
    if measure == "zed":
        return naive_zed_matrix(x, l)
    if measure == "ed":
        out = cdist(win, win, "sqeuclidean")
    elif measure == "cd":
        norm = np.linalg.norm(win, axis=1)
        zero = norm < FLAT
        out = cdist(win, win, "cosine")  # 1 - cos
        out = np.clip(np.nan_to_num(out, nan=1.0), 0.0, 2.0)
        out[zero, :] = 1.0
        out[:, zero] = 1.0
    elif measure == "cid":
        ce = np.maximum(np.sqrt((np.diff(win, axis=1) ** 2).sum(axis=1)), FLAT)
        cf = np.maximum(ce[:, None], ce[None, :]) / np.minimum(ce[:, None], ce[None, :])
        out = cdist(win, win, "sqeuclidean") * cf
    else:
        raise ValueError(measure)
    np.fill_diagonal(out, 0.0)
    return out


def naive_univariate_motiflet(x, l, k, alpha=1.0):
    """Direct set search on one dimension: full sort, greedy filter, min extent.

    Independent of the library: distances via scipy, selection via plain
    python. Returns (offsets tuple sorted, extent) or (None, inf).
    """
    D = naive_zed_matrix(np.asarray(x, float), l)
    m = D.shape[0]
    span = math.ceil(l * alpha)
    best = (None, np.inf)
    for q in range(m):
        order = sorted(range(m), key=lambda j: (D[q][j], j))
        sel = [q]
        for j in order:
            if j == q:
                continue
            if any(abs(j - c) <= span for c in sel):
                continue
            sel.append(j)
            if len(sel) == k:
                break
        if len(sel) < k:
            continue
        extent = max(
            D[a][b] for i, a in enumerate(sel) for b in sel[i + 1:]
        )
        if extent < best[1]:
            best = (tuple(sorted(sel)), extent)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(0)
