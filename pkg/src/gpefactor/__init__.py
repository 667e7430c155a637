"""Realizations, pseudo-spectral factorization and interpolation of
generalized positive even rational functions, over C and over the
quaternions."""

from .errors import (
    GPEError,
    InfeasibleError,
    InputError,
    NotDirectSumError,
    NotEvenError,
    NotGPEError,
    NumericalError,
    PoleError,
    SingularFeedthroughError,
    UnsupportedStructureError,
)
from .quat import QuatMatrix, Quaternion, chi, chi_inverse
from .realization import (
    Realization,
    evaluate,
    evaluate_slice,
    from_fraction,
    from_polynomial,
    gpe_from_factor,
    minimality_report,
    minimize,
    product,
    sharp,
)
from .analysis import is_even, negative_squares, solve_structure_H
from .factorization import factor_regularized, factor_scalar_polynomial, pseudo_spectral_factor
from .slicefun import quat_gpe_factor
from .interp import even_polynomial_interpolate, gpe_interpolate, quat_gpe_interpolate

__version__ = "0.1.0"

__all__ = [
    "GPEError",
    "InfeasibleError",
    "InputError",
    "NotDirectSumError",
    "NotEvenError",
    "NotGPEError",
    "NumericalError",
    "PoleError",
    "SingularFeedthroughError",
    "UnsupportedStructureError",
    "QuatMatrix",
    "Quaternion",
    "chi",
    "chi_inverse",
    "Realization",
    "evaluate",
    "evaluate_slice",
    "from_fraction",
    "from_polynomial",
    "gpe_from_factor",
    "minimality_report",
    "minimize",
    "product",
    "sharp",
    "is_even",
    "negative_squares",
    "solve_structure_H",
    "factor_regularized",
    "factor_scalar_polynomial",
    "pseudo_spectral_factor",
    "quat_gpe_factor",
    "even_polynomial_interpolate",
    "gpe_interpolate",
    "quat_gpe_interpolate",
]
