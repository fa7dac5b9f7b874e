"""Weight distributions, MacWilliams transforms and code bounds for bosonic codes."""

from ._core import (
    AccuracyError,
    CvmwError,
    NumericalError,
    ValidationError,
    ValidityError,
    __version__,
    approx_qedc_epsilon,
    approx_weights,
    bessel_j,
    bessel_zero,
    code_size,
    d_plus,
    fit_epsilon_slope,
    gkp_distance,
    lattice_generator,
    laguerre,
    length_spectrum,
    lemma2_supremum_check,
    lev_f,
    lev_fhat,
    levenshtein_bound,
    macwilliams_transform,
    model_weights,
    poisson_macwilliams_residual,
    qedc_epsilon,
    quad_bound_constant,
    zonal,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
