"""Closed-form widths, the Bernstein exponent table and the regime classifier."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import ExponentLike, as_exponent

__all__ = [
    "SmoothnessParams",
    "BernsteinCase",
    "BernsteinRegime",
    "Regime",
    "embedding_is_compact",
    "exact_manifold_width",
    "bernstein_cases",
    "bernstein_exponent",
    "classify_regime",
]


@dataclass(frozen=True)
class SmoothnessParams:
    s: float
    d: int
    q: ExponentLike
    r: ExponentLike
    p: ExponentLike

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("smoothness s must be positive")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("dimension d must be a positive integer")
        for name in ("q", "r", "p"):
            object.__setattr__(self, name, as_exponent(getattr(self, name)))


class BernsteinCase(str, enum.Enum):
    P_GE_Q_OR_BOTH_LE_2 = "P_GE_Q_OR_BOTH_LE_2"
    P_LE_2_LE_Q = "P_LE_2_LE_Q"
    TWO_LE_P_LE_Q = "TWO_LE_P_LE_Q"


@dataclass(frozen=True)
class BernsteinRegime:
    label: BernsteinCase
    exponent: float


class Regime(str, enum.Enum):
    BERNSTEIN_SHARP = "BERNSTEIN_SHARP"
    BERNSTEIN_GAP = "BERNSTEIN_GAP"


def _check_sd(s, d):
    if not s > 0:
        raise ValueError("smoothness s must be positive")
    if d < 1:
        raise ValueError("dimension d must be >= 1")


def embedding_is_compact(s: float, d: int, p: ExponentLike, q: ExponentLike) -> bool:
    """True iff ``1/q - 1/p < s/d``; the class lives in L_q, error in L_p."""
    _check_sd(s, d)
    p, q = as_exponent(p), as_exponent(q)
    return q.reciprocal - p.reciprocal < s / d


def exact_manifold_width(M: int, n: int, p: ExponentLike, q: ExponentLike) -> float:
    """Manifold n-width of the unit l_q^M ball in l_p, valid for p <= q."""
    p, q = as_exponent(p), as_exponent(q)
    if not 1 <= n < M:
        raise ValueError(f"need 1 <= n < M, got n={n}, M={M}")
    if p > q:
        raise ValueError(f"need p <= q, got p={p}, q={q}")
    return float((M - n) ** (p.reciprocal - q.reciprocal))


def bernstein_cases(s: float, d: int, p: ExponentLike, q: ExponentLike) -> list[BernsteinRegime]:
    """Every row of the Bernstein table that applies to (p, q), in table order.

    Rows overlap on their boundaries; callers wanting a single answer should
    use :func:`bernstein_exponent`.
    """
    p, q = as_exponent(p), as_exponent(q)
    if p < 1 or q < 1:
        raise ValueError("the Bernstein table is only stated for p, q >= 1")
    if not embedding_is_compact(s, d, p, q):
        raise ValueError(f"embedding is not compact for s={s}, d={d}, p={p}, q={q}")
    base = -s / d
    out = []
    if p >= q or q <= 2:
        out.append(BernsteinRegime(BernsteinCase.P_GE_Q_OR_BOTH_LE_2, base))
    if p <= 2 <= q:
        out.append(BernsteinRegime(BernsteinCase.P_LE_2_LE_Q, base + q.reciprocal - 0.5))
    if 2 <= p <= q:
        out.append(BernsteinRegime(BernsteinCase.TWO_LE_P_LE_Q, base + q.reciprocal - p.reciprocal))
    return out


def bernstein_exponent(s: float, d: int, p: ExponentLike, q: ExponentLike) -> BernsteinRegime:
    """Decay exponent of the Bernstein widths of Sobolev/Besov balls in L_p.

    On boundaries shared by two rows the first row wins; the rows agree
    numerically there.

    >>> bernstein_exponent(1, 1, 1, "inf").exponent
    -1.5
    """
    return bernstein_cases(s, d, p, q)[0]


def classify_regime(p: ExponentLike, q: ExponentLike) -> Regime:
    """GAP when Bernstein widths decay strictly faster than n^(-s/d)."""
    p, q = as_exponent(p), as_exponent(q)
    if p < 1 or q < 1:
        raise ValueError("regime classification is only stated for p, q >= 1")
    if p < q and q > 2:
        return Regime.BERNSTEIN_GAP
    return Regime.BERNSTEIN_SHARP
