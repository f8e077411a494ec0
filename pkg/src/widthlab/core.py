"""Shared primitives: exponents, (quasi-)norms, sphere sampling, rearrangements.

Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Exponent",
    "INF",
    "as_exponent",
    "lp_norm",
    "nondecreasing_magnitude_rearrangement",
    "threshold",
    "sample_sphere",
    "derive_seeds",
]


@functools.total_ordering
@dataclass(frozen=True)
class Exponent:
    """A norm index in (0, inf].

    Infinity is carried by ``is_inf`` rather than by a float, so the
    reciprocal of an infinite exponent is exactly zero.
    """

    value: float = math.inf
    is_inf: bool = False

    def __post_init__(self):
        v = self.value
        if isinstance(v, (int, float, np.floating, np.integer)) and math.isinf(v) and v > 0:
            object.__setattr__(self, "is_inf", True)
        if self.is_inf:
            object.__setattr__(self, "value", math.inf)
            return
        v = float(v)
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"exponent must lie in (0, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text: str) -> "Exponent":
        t = str(text).strip().lower()
        if t in ("inf", "infinity", "∞", "+inf"):
            return cls(is_inf=True)
        return cls(float(t))

    @property
    def reciprocal(self) -> float:
        return 0.0 if self.is_inf else 1.0 / self.value

    def __lt__(self, other):
        other = as_exponent(other)
        if self.is_inf:
            return False
        if other.is_inf:
            return True
        return self.value < other.value

    def __eq__(self, other):
        try:
            other = as_exponent(other)
        except (TypeError, ValueError):
            return NotImplemented
        if self.is_inf or other.is_inf:
            return self.is_inf and other.is_inf
        return self.value == other.value

    def __hash__(self):
        return hash(("Exponent", self.value))

    def __float__(self):
        return self.value

    def __str__(self):
        if self.is_inf:
            return "inf"
        return repr(self.value)


INF = Exponent(is_inf=True)

ExponentLike = Union[Exponent, float, int, str]


def as_exponent(p: ExponentLike) -> Exponent:
    if isinstance(p, Exponent):
        return p
    if isinstance(p, str):
        return Exponent.parse(p)
    if isinstance(p, (int, float, np.integer, np.floating)):
        return Exponent(float(p))
    raise TypeError(f"cannot interpret {p!r} as an exponent")


def lp_norm(x, p: ExponentLike, axis=None):
    """The l_p (quasi-)norm ``(sum |x_i|^p)^(1/p)``; ``max |x_i|`` for p = inf.

    With ``axis=None`` the input is flattened and a float is returned,
    otherwise the reduction runs along ``axis`` and an array is returned.
    Entries are rescaled by their largest magnitude before powering, which
    keeps large p and tiny entries from under/overflowing.
    """
    p = as_exponent(p)
    a = np.abs(np.asarray(x, dtype=float))
    if a.size == 0:
        raise ValueError("lp_norm of an empty vector")
    if axis is None:
        a = a.ravel()
        axis = 0
    top = np.max(a, axis=axis, keepdims=True)
    if p.is_inf:
        out = np.squeeze(top, axis=axis)
    else:
        safe = np.where(top > 0, top, 1.0)
        s = np.sum((a / safe) ** p.value, axis=axis, keepdims=True)
        out = np.squeeze(safe * s ** (1.0 / p.value) * (top > 0), axis=axis)
    if out.ndim == 0:
        return float(out)
    return out


def nondecreasing_magnitude_rearrangement(x) -> np.ndarray:
    """Magnitudes of ``x`` sorted ascending; entry k is the (k+1)-th smallest."""
    a = np.abs(np.asarray(x, dtype=float))
    if a.size == 0:
        raise ValueError("rearrangement of an empty vector")
    return np.sort(a, axis=-1)


def threshold(x, eps: float):
    """Clamp ``x / eps`` to [-1, 1].

    Odd, 1/eps-Lipschitz, and equal to sign(x) once ``|x| >= eps``.
    Works elementwise on arrays.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    out = np.clip(np.asarray(x, dtype=float) / eps, -1.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def sample_sphere(n: int, count: int, seed: int) -> np.ndarray:
    """Antipodally closed points on the unit sphere S^n in R^(n+1).

    Returns an array of shape ``(count, n + 1)`` whose second half is the
    exact negation of the first: row ``i + count // 2`` is ``-row i``.
    Points come from normalized standard-normal draws of a Philox stream
    keyed by ``seed``, so the first half of a larger request contains the
    first half of any smaller one with the same seed.
    """
    if n < 0:
        raise ValueError("sphere dimension must be >= 0")
    if count <= 0 or count % 2:
        raise ValueError(f"count must be a positive even integer, got {count}")
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal((count // 2, n + 1))
    norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    u = g / norms[:, None]
    return np.concatenate([u, -u])


def derive_seeds(seed: int, k: int) -> list[int]:
    """``k`` statistically independent child seeds of ``seed``."""
    children = np.random.SeedSequence(seed).spawn(k)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]
