"""Upper-triangular factorization of positive operators."""

from ._core import (
    ConvergenceError,
    InputError,
    MultiIndex,
    Pattern,
    PositivityError,
    Window,
    bauer_factor,
    cholesky_ll,
    douglas_constants,
    fejer_riesz,
    gen_upper,
    hotel_factor,
    leq,
    pattern_nest_tensor,
    pattern_upper,
    poset_feasibility,
    psd_check,
    range_equal,
    reverse_cholesky,
    run_cli,
    toeplitz_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
