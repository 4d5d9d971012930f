"""Sub-dimensional motif-set discovery in multivariate time series.

The top leitmotif of a ``d x n`` series is the set of ``k`` non-overlapping
subsequences of length ``l`` whose maximal pairwise distance over an
automatically selected subset of ``f`` dimensions is minimal. Dimension
selection and set search run jointly; ``k`` and ``l`` can be learned from
the data. Long series are handled by a memory-reduced two-pass distance
store that returns results identical to the dense path.
"""

__version__ = "0.1.0"

from .core import (
    FLAT_EPS,
    OverlapRule,
    SlidingStats,
    TimeSeries,
    is_overlapping,
    sliding_mean_std,
)
from .distances import (
    DEFAULT_MEMORY_BUDGET,
    DenseDistanceMatrix,
    Measure,
    cid,
    complexity,
    cosine_distance,
    ed_squared,
    estimate_dense_bytes,
    pairwise_matrix,
    zed_squared,
)
from .errors import (
    CapacityError,
    InputFormatError,
    LeitmotifError,
    MissingDistanceError,
    ParameterError,
)
from .neighbors import KnnTable, knn_table, non_trivial_arg_knn
from .search import (
    Leitmotif,
    LeitmotifCandidate,
    SearchCounters,
    SearchResult,
    find_leitmotif,
    pairwise_extent,
    rank_candidate,
    search_matrix,
    select_f_dimensions,
)
from .learn import (
    ExtentFunction,
    LearnedParameters,
    LengthProfile,
    area_under_ef,
    elbow_scores,
    extent_function,
    find_elbows,
    learn_length,
    learn_parameters,
)
from .sparse import SparseDistanceStore, build_sparse, search_store
from .bench import (
    EvalReport,
    GroundTruth,
    NoiseConfig,
    NoiseLevelStats,
    brute_force_leitmotif,
    evaluate,
    generate_synthetic,
    noise_experiment,
)
from .io import read_record, read_series, write_record, write_series

__all__ = [
    "CapacityError",
    "DEFAULT_MEMORY_BUDGET",
    "DenseDistanceMatrix",
    "EvalReport",
    "ExtentFunction",
    "FLAT_EPS",
    "GroundTruth",
    "InputFormatError",
    "KnnTable",
    "LearnedParameters",
    "Leitmotif",
    "LeitmotifCandidate",
    "LeitmotifError",
    "LengthProfile",
    "Measure",
    "MissingDistanceError",
    "NoiseConfig",
    "NoiseLevelStats",
    "OverlapRule",
    "ParameterError",
    "SearchCounters",
    "SearchResult",
    "SlidingStats",
    "SparseDistanceStore",
    "TimeSeries",
    "area_under_ef",
    "brute_force_leitmotif",
    "build_sparse",
    "cid",
    "complexity",
    "cosine_distance",
    "ed_squared",
    "elbow_scores",
    "estimate_dense_bytes",
    "evaluate",
    "extent_function",
    "find_elbows",
    "find_leitmotif",
    "generate_synthetic",
    "is_overlapping",
    "knn_table",
    "learn_length",
    "learn_parameters",
    "noise_experiment",
    "non_trivial_arg_knn",
    "pairwise_extent",
    "pairwise_matrix",
    "rank_candidate",
    "read_record",
    "read_series",
    "search_matrix",
    "search_store",
    "select_f_dimensions",
    "sliding_mean_std",
    "write_record",
    "write_series",
    "zed_squared",
]
