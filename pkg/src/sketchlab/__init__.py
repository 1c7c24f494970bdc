"""Matrix sketching with precise predictions of the expected residual projection."""

from .errors import (
    DegenerateUpdate,
    DimensionMismatch,
    InvalidProfile,
    KExceedsRank,
    NumericalFailure,
    ParseError,
    SingularSurrogate,
    SingularSystem,
    SketchLabError,
    ZeroMatrix,
)
from .linalg import (
    PsdInterval,
    SvdFactorization,
    pinv_rank_one_update,
    pseudoinverse,
    psd_interval,
    residual_projection,
    stable_rank,
    svd,
    trace_norm,
)
from .spectrum import DecayProfile, Spectrum, profile_spectrum, spectrum_of, synthesize_matrix
from .surrogate import (
    GammaSolution,
    SurrogateProjection,
    kappa_surrogate,
    predict_frobenius_error,
    predict_nystrom_error,
    predicted_trajectory,
    solve_gamma,
    surrogate_projection,
)
from .sketch import MonteCarloReport, SketchFamily, SketchSpec, draw_sketch, low_rank_error, monte_carlo
from .solvers import LinearSystem, kaczmarz_run, kaczmarz_step, min_norm_vs_ridge, worst_case_rate
from .kernel import KernelConfig, nystrom_approx, nystrom_trace_error, rbf_kernel

__version__ = "0.1.0"

__all__ = [
    "DecayProfile",
    "DegenerateUpdate",
    "DimensionMismatch",
    "GammaSolution",
    "InvalidProfile",
    "KExceedsRank",
    "KernelConfig",
    "LinearSystem",
    "MonteCarloReport",
    "NumericalFailure",
    "ParseError",
    "PsdInterval",
    "SingularSurrogate",
    "SingularSystem",
    "SketchFamily",
    "SketchLabError",
    "SketchSpec",
    "Spectrum",
    "SurrogateProjection",
    "SvdFactorization",
    "ZeroMatrix",
    "draw_sketch",
    "kaczmarz_run",
    "kaczmarz_step",
    "kappa_surrogate",
    "low_rank_error",
    "min_norm_vs_ridge",
    "monte_carlo",
    "nystrom_approx",
    "nystrom_trace_error",
    "pinv_rank_one_update",
    "predict_frobenius_error",
    "predict_nystrom_error",
    "predicted_trajectory",
    "profile_spectrum",
    "psd_interval",
    "pseudoinverse",
    "rbf_kernel",
    "residual_projection",
    "solve_gamma",
    "spectrum_of",
    "stable_rank",
    "surrogate_projection",
    "svd",
    "synthesize_matrix",
    "trace_norm",
    "worst_case_rate",
]
