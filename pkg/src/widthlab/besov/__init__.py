"""Grid-function calculus and the bump construction for Besov balls."""

from .bumps import (
    BumpSpec,
    ResolutionError,
    besov_ball_certificate,
    besov_experiment,
    bump_embedding,
    bump_function,
    bump_profile,
    fit_loglog_slope,
    scaling_identity_check,
    subcubes_for,
)
from .grid import GridFormatError, GridFunction, grid_lq_norm, read_grid_function, write_grid_function
from .smoothness import (
    BesovParams,
    DifferenceResult,
    UnresolvedSmallScale,
    besov_norm,
    besov_seminorm,
    finite_difference,
    modulus_of_smoothness,
    modulus_profile,
    sobolev_norm,
)

__all__ = [
    "BesovParams", "BumpSpec", "DifferenceResult", "GridFormatError", "GridFunction",
    "ResolutionError", "UnresolvedSmallScale", "besov_ball_certificate", "besov_experiment",
    "besov_norm", "besov_seminorm", "bump_embedding", "bump_function", "bump_profile",
    "finite_difference", "fit_loglog_slope", "grid_lq_norm", "modulus_of_smoothness",
    "modulus_profile", "read_grid_function", "scaling_identity_check", "sobolev_norm",
    "subcubes_for", "write_grid_function",
]
