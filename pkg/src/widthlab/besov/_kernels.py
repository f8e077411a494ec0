"""Compiled batch kernel for shift norms of many 1-D piecewise-bump functions."""

from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is too old for numba; workqueue is always available
numba.config.THREADING_LAYER = "workqueue"


def configure_threads() -> int:
    """Apply ``WIDTHLAB_THREADS`` (0 or unset means numba's default)."""
    try:
        want = int(os.environ.get("WIDTHLAB_THREADS", "0"))
    except ValueError:
        want = 0
    if want > 0:
        numba.set_num_threads(min(want, numba.config.NUMBA_NUM_THREADS))
    return numba.get_num_threads()


@njit(parallel=True, cache=True)
def _batch_shift_norms(coeffs, cell, profile, shifts, weights, qmode, qval, dx):
    # g_s[x] = coeffs[s, cell[x]] * profile[x]
    n_fun = coeffs.shape[0]
    n_pts = cell.shape[0]
    k = weights.shape[0] - 1
    out = np.zeros((n_fun, shifts.shape[0]))
    for s in prange(n_fun):
        g = np.empty(n_pts)
        for x in range(n_pts):
            g[x] = coeffs[s, cell[x]] * profile[x]
        for jj in range(shifts.shape[0]):
            j = shifts[jj]
            length = n_pts - k * j
            if length < 2:
                continue
            acc = 0.0
            for x in range(length):
                v = 0.0
                for r in range(k + 1):
                    v += weights[r] * g[x + r * j]
                v = abs(v)
                if qmode == 0:
                    if v > acc:
                        acc = v
                else:
                    w = 0.5 if (x == 0 or x == length - 1) else 1.0
                    if qmode == 1:
                        acc += w * v
                    elif qmode == 2:
                        acc += w * v * v
                    else:
                        acc += w * v ** qval
            if qmode == 0:
                out[s, jj] = acc
            else:
                out[s, jj] = (acc * dx) ** (1.0 / qval)
    return out


def batch_shift_norms(coeffs, cell, profile, shifts, weights, q) -> np.ndarray:
    """Shift norms of ``g_s = coeffs[s, cell] * profile`` for every row s.

    ``shifts`` are positive integer lattice shifts; ``q`` is an Exponent.
    """
    if q.is_inf:
        qmode, qval = 0, 1.0
    elif q.value == 1.0:
        qmode, qval = 1, 1.0
    elif q.value == 2.0:
        qmode, qval = 2, 2.0
    else:
        qmode, qval = 3, q.value
    configure_threads()
    return _batch_shift_norms(
        np.ascontiguousarray(coeffs, dtype=np.float64),
        np.ascontiguousarray(cell, dtype=np.int64),
        np.ascontiguousarray(profile, dtype=np.float64),
        np.ascontiguousarray(shifts, dtype=np.int64).reshape(-1),
        np.ascontiguousarray(weights, dtype=np.float64),
        qmode, float(qval), 1.0 / (cell.shape[0] - 1),
    )
