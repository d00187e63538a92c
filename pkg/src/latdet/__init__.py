"""Lattice-detection laboratory for square MIMO systems.

Finite and relaxed sphere searches, complex LLL reduction, nearest-plane
detection, remapping strategies for out-of-box estimates, analytic
node-count bounds, and a Monte Carlo sweep harness.
"""

from ._kernels import NUMBA_ENABLED
from .bounds import (
    BoundReport,
    babai_radius,
    build_report,
    k_const,
    low_snr_node_count,
    r_min_lower_bound,
    relaxed_complexity_upper_bound,
    visitation_check,
)
from .channel import ChannelInstance, draw, trial_rng
from .constellation import (
    Constellation,
    SymbolVector,
    bit_distance,
    bits_roundtrip,
    bits_to_symbols,
    build,
    contains,
    map_to_lattice,
    symbols_to_bits,
    unmap_from_lattice,
)
from .detectors import (
    DetectionResult,
    SearchProblem,
    babai_sic,
    brute_force_ml,
    brute_force_relaxed,
    problem_from_factors,
    relaxed_box,
    sesd_finite,
    sesd_relaxed,
)
from .errors import (
    ConfigError,
    DomainError,
    IoError,
    LatdetError,
    LengthMismatch,
    RankDeficient,
    TooLarge,
    UnsupportedOrder,
)
from .harness import SweepConfig, SweepMetrics, emit, run_sweep
from .lll import ReducedBasis, from_reduced_coords, reduce, to_reduced_coords
from .numerics import QrFactorization, gram_det, qrd, sigma_max, sqrd
from .remap import (
    ChainResult,
    ChainSpec,
    Prepared,
    cvr,
    parse_chain,
    quantize,
    run_chain,
    two_stage,
)

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED",
    "BoundReport",
    "babai_radius",
    "build_report",
    "k_const",
    "low_snr_node_count",
    "r_min_lower_bound",
    "relaxed_complexity_upper_bound",
    "visitation_check",
    "ChannelInstance",
    "draw",
    "trial_rng",
    "Constellation",
    "SymbolVector",
    "bit_distance",
    "bits_roundtrip",
    "bits_to_symbols",
    "build",
    "contains",
    "map_to_lattice",
    "symbols_to_bits",
    "unmap_from_lattice",
    "DetectionResult",
    "SearchProblem",
    "babai_sic",
    "brute_force_ml",
    "brute_force_relaxed",
    "problem_from_factors",
    "relaxed_box",
    "sesd_finite",
    "sesd_relaxed",
    "ConfigError",
    "DomainError",
    "IoError",
    "LatdetError",
    "LengthMismatch",
    "RankDeficient",
    "TooLarge",
    "UnsupportedOrder",
    "SweepConfig",
    "SweepMetrics",
    "emit",
    "run_sweep",
    "ReducedBasis",
    "from_reduced_coords",
    "reduce",
    "to_reduced_coords",
    "QrFactorization",
    "gram_det",
    "qrd",
    "sigma_max",
    "sqrd",
    "ChainResult",
    "ChainSpec",
    "Prepared",
    "cvr",
    "parse_chain",
    "quantize",
    "run_chain",
    "two_stage",
]
