from ._core import (
    DegenerateEstimate,
    GvMParams,
    GvmError,
    InvalidArgument,
    IterationCap,
    NonConvergence,
    OverflowRisk,
    PriorMismatch,
    UnknownCase,
    bayes_factor,
    bessel_i,
    fit_mle,
    gvm_density,
    gvm_norm_const,
    interpret_bf,
    log_bessel_i0,
    log_gvm_norm_const,
    prior_atom_masses,
    run_case,
    sample_gvm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
