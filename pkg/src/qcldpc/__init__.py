"""Quantum quasi-cyclic LDPC codes: construction from circulant exponent
matrices, joint belief-propagation syndrome decoding on the depolarizing
channel, and parallel Monte Carlo FER/BER evaluation."""

__version__ = "0.1.0"

from .channel import (
    JointPrior,
    PauliError,
    Syndrome,
    depolarizing_prior,
    extract_syndrome,
    sample_error,
    trial_rng,
)
from .codes import (
    CodeReport,
    CodeValidationError,
    ExponentMatrix,
    ExponentPairParseError,
    QuantumQcCode,
    ScanResult,
    build_code,
    builtin_pair_j3_l8,
    code_report,
    design_rate,
    dump_pair,
    expand_exponent_matrix,
    load_pair,
    measured_rate,
    scan_p,
)
from .decoder import DecodeOutcome, DecoderConfig, JointBpDecoder, decode
from .gf2 import (
    RowSpace,
    SparseBinaryMatrix,
    cpm_expand,
    gf2_rank,
    girth,
    in_row_space,
    mat_mul_mod2,
    mat_vec_mod2,
)
from .sim import (
    PointResult,
    StopRule,
    TrialRecord,
    classify,
    floor_statistics,
    hashing_bound_threshold,
    read_failure_log,
    run_point,
    run_sweep,
    wilson_interval,
    write_failure_log,
)

__all__ = [
    "__version__",
    "JointPrior",
    "PauliError",
    "Syndrome",
    "depolarizing_prior",
    "extract_syndrome",
    "sample_error",
    "trial_rng",
    "CodeReport",
    "CodeValidationError",
    "ExponentMatrix",
    "ExponentPairParseError",
    "QuantumQcCode",
    "ScanResult",
    "build_code",
    "builtin_pair_j3_l8",
    "code_report",
    "design_rate",
    "dump_pair",
    "expand_exponent_matrix",
    "load_pair",
    "measured_rate",
    "scan_p",
    "DecodeOutcome",
    "DecoderConfig",
    "JointBpDecoder",
    "decode",
    "RowSpace",
    "SparseBinaryMatrix",
    "cpm_expand",
    "gf2_rank",
    "girth",
    "in_row_space",
    "mat_mul_mod2",
    "mat_vec_mod2",
    "PointResult",
    "StopRule",
    "TrialRecord",
    "classify",
    "floor_statistics",
    "hashing_bound_threshold",
    "read_failure_log",
    "run_point",
    "run_sweep",
    "wilson_interval",
    "write_failure_log",
]
