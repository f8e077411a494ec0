"""Functions sampled on the uniform tensor grid over [0, 1]^d."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core import ExponentLike, as_exponent

__all__ = [
    "GridFunction",
    "GridFormatError",
    "trapezoid_weights",
    "grid_lq_norm",
    "read_grid_function",
    "write_grid_function",
]

MIN_RES = 4


class GridFormatError(ValueError):
    """A grid-function file does not follow the d=/res=/values layout."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values at the ``res ** d`` nodes of the grid with spacing ``1 / (res - 1)``.

    ``values`` has shape ``(res,) * d``; flattening it in C order gives the
    row-major layout used by the text format.
    """

    d: int
    res: int
    values: np.ndarray

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.res < MIN_RES:
            raise ValueError(f"resolution must be >= {MIN_RES}, got {self.res}")
        v = np.asarray(self.values, dtype=float)
        if v.size != self.res ** self.d:
            raise ValueError(f"expected {self.res ** self.d} values, got {v.size}")
        v = v.reshape((self.res,) * self.d)
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def spacing(self) -> float:
        return 1.0 / (self.res - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.res)

    @classmethod
    def from_callable(cls, fn, d: int, res: int) -> "GridFunction":
        """Sample ``fn(x_1, ..., x_d)`` (broadcasting over node arrays)."""
        axes = np.meshgrid(*([np.linspace(0.0, 1.0, res)] * d), indexing="ij")
        return cls(d, res, np.broadcast_to(fn(*axes), (res,) * d))

    def __mul__(self, alpha):
        return GridFunction(self.d, self.res, alpha * self.values)

    __rmul__ = __mul__

    def __add__(self, other):
        return GridFunction(self.d, self.res, self.values + other.values)

    def lq_norm(self, q: ExponentLike) -> float:
        return grid_lq_norm(self.values, q, self.spacing)


def trapezoid_weights(length: int) -> np.ndarray:
    """Composite trapezoid node weights (in units of the spacing) for one axis."""
    if length < 2:
        return np.zeros(max(length, 0))
    w = np.ones(length)
    w[0] = w[-1] = 0.5
    return w


def grid_lq_norm(values, q: ExponentLike, spacing: float) -> float:
    """L_q norm of nodal values by the product trapezoid rule.

    Any axis with fewer than two nodes has zero measure, so the norm is 0.
    """
    q = as_exponent(q)
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0 or min(v.shape) < 2:
        return 0.0
    if q.is_inf:
        return float(v.max())
    total = v ** q.value
    for length in v.shape:
        # contracting axis 0 each time walks through the axes in order
        total = np.tensordot(trapezoid_weights(length), total, axes=([0], [0]))
    total = float(total) * spacing ** v.ndim
    return total ** (1.0 / q.value)


def write_grid_function(f: GridFunction, path) -> None:
    lines = [f"d={f.d}", f"res={f.res}"]
    lines.extend(repr(float(x)) for x in f.values.ravel(order="C"))
    Path(path).write_text("\n".join(lines) + "\n")


def _header(line: str, key: str) -> int:
    name, sep, value = line.strip().partition("=")
    if name.strip() != key or not sep:
        raise GridFormatError(f"expected '{key}=<int>', got {line.strip()!r}")
    try:
        return int(value)
    except ValueError:
        raise GridFormatError(f"'{key}' must be an integer, got {value!r}") from None


def read_grid_function(path) -> GridFunction:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if len(lines) < 2:
        raise GridFormatError("file too short for the d=/res= header")
    d = _header(lines[0], "d")
    res = _header(lines[1], "res")
    body = lines[2:]
    if d < 1 or res < MIN_RES:
        raise GridFormatError(f"invalid header d={d}, res={res}")
    if len(body) != res ** d:
        raise GridFormatError(f"expected {res ** d} values, found {len(body)}")
    try:
        values = np.array([float(x) for x in body])
    except ValueError as exc:
        raise GridFormatError(f"unparseable value: {exc}") from None
    if not np.all(np.isfinite(values)):
        raise GridFormatError("values must be finite")
    return GridFunction(d, res, values)
