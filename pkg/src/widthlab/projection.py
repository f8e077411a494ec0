"""Coordinate-projection encoder/decoder: the upper-bound half of the l_q^M width."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ExponentLike, as_exponent, lp_norm
from .widths import exact_manifold_width

__all__ = [
    "ProjectionScheme",
    "encode",
    "decode",
    "reconstruction_error",
    "extremal_input",
    "UpperBoundResult",
    "empirical_upper_bound",
]

# slack allowed on top of the closed-form width before a sample counts as exceeding it
EXCEED_TOL = 1e-12


@dataclass(frozen=True)
class ProjectionScheme:
    """Keep the first ``n`` of ``M`` coordinates; decode by zero padding."""

    M: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n < self.M:
            raise ValueError(f"need 1 <= n < M, got n={self.n}, M={self.M}")


def _vec(x, length, what):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != length:
        raise ValueError(f"{what} has length {x.shape[-1]}, expected {length}")
    return x


def encode(x, scheme: ProjectionScheme) -> np.ndarray:
    x = _vec(x, scheme.M, "input")
    return x[..., : scheme.n].copy()


def decode(y, scheme: ProjectionScheme) -> np.ndarray:
    y = _vec(y, scheme.n, "code")
    out = np.zeros(y.shape[:-1] + (scheme.M,))
    out[..., : scheme.n] = y
    return out


def reconstruction_error(x, scheme: ProjectionScheme, p: ExponentLike):
    """l_p norm of ``x - decode(encode(x))``, i.e. of the tail ``x[n:]``.

    Accepts a single vector or a stack of vectors (last axis).
    """
    x = _vec(x, scheme.M, "input")
    tail = x[..., scheme.n:]
    if x.ndim == 1:
        return lp_norm(tail, p)
    return lp_norm(tail, p, axis=-1)


def extremal_input(M: int, n: int, q: ExponentLike) -> np.ndarray:
    """Unit l_q vector with a constant-magnitude tail, where Hölder is tight."""
    q = as_exponent(q)
    if not 1 <= n < M:
        raise ValueError(f"need 1 <= n < M, got n={n}, M={M}")
    x = np.zeros(M)
    x[n:] = float(M - n) ** (-q.reciprocal)
    return x


@dataclass(frozen=True)
class UpperBoundResult:
    max_error: float
    bound: float
    extremal_error: float
    random_max_error: float
    exceedances: int
    samples: int
    seed: int

    @property
    def attained(self) -> bool:
        return abs(self.max_error - self.bound) <= EXCEED_TOL * max(1.0, self.bound)


def empirical_upper_bound(M: int, n: int, p: ExponentLike, q: ExponentLike,
                          samples: int = 10_000, seed: int = 0,
                          chunk: int = 50_000) -> UpperBoundResult:
    """Worst observed projection error over sampled points of the l_q^M sphere.

    Random Gaussian directions are rescaled to unit q-norm (the error is
    homogeneous, so the boundary is where the maximum lives) and the
    extremal input is always added to the pool.
    """
    p, q = as_exponent(p), as_exponent(q)
    bound = exact_manifold_width(M, n, p, q)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    scheme = ProjectionScheme(M, n)
    rng = np.random.Generator(np.random.Philox(seed))

    random_max = 0.0
    exceed = 0
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        x = rng.standard_normal((b, M))
        x /= lp_norm(x, q, axis=1)[:, None]
        err = reconstruction_error(x, scheme, p)
        random_max = max(random_max, float(err.max()))
        exceed += int(np.count_nonzero(err > bound + EXCEED_TOL))
        done += b

    ext = reconstruction_error(extremal_input(M, n, q), scheme, p)
    if ext > bound + EXCEED_TOL:
        exceed += 1
    return UpperBoundResult(
        max_error=max(random_max, ext),
        bound=bound,
        extremal_error=ext,
        random_max_error=random_max,
        exceedances=exceed,
        samples=samples,
        seed=seed,
    )
