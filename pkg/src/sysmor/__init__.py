"""Model order reduction for continuous-time LTI state-space models.

Adaptive rational interpolation on the imaginary axis (full and low-rank
variants), balanced truncation, and the norm machinery both rely on.
"""

from .exceptions import (
    DegenerateFactors,
    DimensionMismatch,
    DuplicateSupportPoint,
    IllPosedLyapunov,
    ImaginaryAxisPoles,
    InsufficientSpectrum,
    NonRealSampleAtZero,
    NonzeroFeedthrough,
    ParseError,
    RankOutOfRange,
    ResidualImaginaryPoles,
    Saturated,
    SingularAtFrequency,
    SingularW0,
    SysmorError,
    UnstableInput,
)
from .statespace import (
    FrequencySample,
    StateSpace,
    dual,
    eval_freq,
    freq_sample,
    is_stable,
    minreal,
    poles,
    series,
    static_gain,
    subtract,
    vertcat,
)
from .numkernels import (
    GramianResult,
    solve_lyapunov,
    svd_truncate,
    sym_eig_ascending,
)
from .norms import LinfResult, h2_error_metric, linf_norm, sigma_max
from .report import IterationRecord, ReductionReport
from .sysaaa import (
    BlockRealization,
    Interpolant,
    StoppingOptions,
    SupportPoint,
    WeightMatrix,
    assemble_error_system,
    build_block,
    compute_X,
    realize_interpolant,
    reduce,
    sample_support_point,
    solve_weights,
)
from .lowrank import (
    GrowRank,
    LowRankPoint,
    NewPoint,
    build_lowrank_block,
    reduce_lowrank,
    select_or_grow,
    truncate_sample,
)
from .balred import balanced_truncate
from .modelio import (
    format_model,
    parse_model,
    parse_raw_matrices,
    read_model,
    write_model,
)

__version__ = "0.1.0"

__all__ = [
    "StateSpace",
    "FrequencySample",
    "static_gain",
    "eval_freq",
    "freq_sample",
    "subtract",
    "series",
    "vertcat",
    "dual",
    "minreal",
    "poles",
    "is_stable",
    "GramianResult",
    "solve_lyapunov",
    "sym_eig_ascending",
    "svd_truncate",
    "LinfResult",
    "linf_norm",
    "sigma_max",
    "h2_error_metric",
    "IterationRecord",
    "ReductionReport",
    "SupportPoint",
    "BlockRealization",
    "WeightMatrix",
    "Interpolant",
    "StoppingOptions",
    "sample_support_point",
    "build_block",
    "assemble_error_system",
    "compute_X",
    "solve_weights",
    "realize_interpolant",
    "reduce",
    "LowRankPoint",
    "NewPoint",
    "GrowRank",
    "truncate_sample",
    "build_lowrank_block",
    "select_or_grow",
    "reduce_lowrank",
    "balanced_truncate",
    "parse_model",
    "format_model",
    "read_model",
    "write_model",
    "parse_raw_matrices",
    "SysmorError",
    "DimensionMismatch",
    "SingularAtFrequency",
    "IllPosedLyapunov",
    "RankOutOfRange",
    "ImaginaryAxisPoles",
    "NonzeroFeedthrough",
    "NonRealSampleAtZero",
    "ResidualImaginaryPoles",
    "InsufficientSpectrum",
    "SingularW0",
    "DuplicateSupportPoint",
    "Saturated",
    "DegenerateFactors",
    "UnstableInput",
    "ParseError",
]
