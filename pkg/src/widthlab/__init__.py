"""Manifold widths of l_q balls, sphere-embedding certificates and Besov-ball bounds."""

from .core import INF, Exponent, as_exponent, lp_norm, nondecreasing_magnitude_rearrangement, sample_sphere, threshold
from .widths import (
    BernsteinCase,
    BernsteinRegime,
    Regime,
    bernstein_exponent,
    classify_regime,
    embedding_is_compact,
    exact_manifold_width,
)

__version__ = "0.1.0"
