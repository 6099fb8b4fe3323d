"""Compressed-sensing wavelet approximation.

Gauss, optimal two-level and Fourier multilevel encoders with l1 decoders,
periodized Daubechies wavelets and the Fourier-wavelet cross-Gramian.
"""

from ._core import (
    CSV_HEADER,
    BudgetError,
    CapError,
    ConvergenceError,
    Error,
    PreconditionError,
    ShapeError,
    UnsupportedError,
    balancing_constant,
    basis_pursuit,
    coarsest_scale,
    coefficients,
    cross_gramian,
    daubechies_filter,
    dwt,
    fk,
    fk_breakpoints,
    fourier_m_local,
    idwt,
    local_coherences,
    oracle_min_l1,
    recipe,
    rip_constant,
    run,
    sampling_pattern,
    sigma_sM,
    sqrt_lasso,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
