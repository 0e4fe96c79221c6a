"""Fast binary embedding via downsampling plus a small circulant projection.

The pipeline maps a length-n real vector to an m-bit code as
``sign(D Phi R x)``: a seeded permutation-and-sign scramble R, a fold Phi
summing residue classes mod m, and an m x m circulant projection D applied
by FFT — O(n + m log m) time and O(n) bits of stored state.  Baselines,
isometry-distortion experiments, angle-preservation checks, retrieval
quality, and timing/storage benchmarks live alongside; everything is
reproducible from explicit 64-bit seeds.
"""

from .baselines import BpProjector, CbeProjector, LshProjector, make_projector
from .bench import BenchConfig, BenchResult, storage_bytes, storage_megabytes, time_embed
from .bincode import BinaryCode, hamming_distance, hamming_matrix
from .bounds import (
    BoundSpec,
    CollisionTally,
    collision_exact_bound,
    collision_stirling_bound,
    concentration_lower_bound,
    distortion_level_curve,
    enumerate_collision_oracle,
    zero_distortion_bound,
)
from .errors import ConfigError, FormatError, ShapeError, SizeError
from .projection import (
    CirculantProjector,
    Downsampler,
    Embedder,
    Randomizer,
    materialize_projection,
)
from .rip import (
    RipEstimate,
    SparseSignalSpec,
    distortion,
    estimate_rip,
    rip_histogram,
    sample_sparse,
)
from .similarity import (
    AnglePair,
    ClusterSpec,
    HammingStats,
    RetrievalResult,
    charikar_experiment,
    hamming_normalized,
    make_angle_pair,
    map_at_k,
    synthetic_retrieval,
)

__version__ = "0.1.0"

__all__ = [
    "AnglePair", "BenchConfig", "BenchResult", "BinaryCode", "BoundSpec",
    "BpProjector", "CbeProjector", "CirculantProjector", "ClusterSpec",
    "CollisionTally", "ConfigError", "Downsampler", "Embedder", "FormatError",
    "HammingStats", "LshProjector", "Randomizer", "RetrievalResult",
    "RipEstimate", "ShapeError", "SizeError", "SparseSignalSpec",
    "charikar_experiment", "collision_exact_bound", "collision_stirling_bound",
    "concentration_lower_bound", "distortion", "distortion_level_curve",
    "enumerate_collision_oracle", "estimate_rip", "hamming_distance",
    "hamming_matrix", "hamming_normalized", "make_angle_pair", "make_projector",
    "map_at_k", "materialize_projection", "rip_histogram", "sample_sparse",
    "storage_bytes", "storage_megabytes", "synthetic_retrieval", "time_embed",
    "zero_distortion_bound",
]
