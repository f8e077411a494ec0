"""Disjoint bump embeddings of l_q^M into function space and the Besov-ball lower bound.

Coefficient vectors a in R^M (M = m^d) become ``sum_i a_i psi(m (x - x_i))``,
one scaled copy of a fixed smooth bump psi per sub-cube. Feeding it the odd
sphere maps from :mod:`widthlab.certificate` and normalizing into the unit
Besov ball exhibits the ``n^(-s/d)`` decay of the lower bound.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from ..certificate import build_certificate, certificate_map
from ..core import ExponentLike, as_exponent, derive_seeds, lp_norm, sample_sphere
from ..reports import ExperimentReport
from ..widths import embedding_is_compact
from ._kernels import batch_shift_norms
from .grid import GridFunction, grid_lq_norm, trapezoid_weights
from .smoothness import (
    DEFAULT_NODES,
    BesovParams,
    UnresolvedSmallScale,
    besov_nodes,
    besov_norm,
    candidate_shifts,
    difference_weights,
    modulus_profile,
    profile_from_shift_norms,
    seminorm_from_profile,
)

__all__ = [
    "ResolutionError",
    "BumpSpec",
    "bump_profile",
    "bump_function",
    "bump_embedding",
    "subcubes_for",
    "scaling_identity_check",
    "besov_ball_certificate",
    "besov_experiment",
    "fit_loglog_slope",
]

MIN_POINTS_PER_CELL = 16


class ResolutionError(ValueError):
    """The grid is too coarse for the requested sub-cube decomposition."""


def bump_profile(y) -> np.ndarray:
    """``exp(-1 / (y (1 - y)))`` on (0, 1), zero elsewhere."""
    y = np.asarray(y, dtype=float)
    inside = (y > 0) & (y < 1)
    safe = np.where(inside, y, 0.5)
    return np.where(inside, np.exp(-1.0 / (safe * (1.0 - safe))), 0.0)


def _cube_bump(*xs):
    out = bump_profile(xs[0])
    for x in xs[1:]:
        out = out * bump_profile(x)
    return out


def bump_function(d: int, res: int) -> GridFunction:
    """The tensor bump ``prod_i exp(-1 / (x_i (1 - x_i)))`` on the grid."""
    if res < 16:
        raise ResolutionError(f"bump needs res >= 16, got {res}")
    return GridFunction.from_callable(_cube_bump, d, res)


@dataclass(frozen=True)
class BumpSpec:
    m: int
    d: int = 1
    profile: str = "exp-bump"

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ValueError("need m >= 1 and d >= 1")
        if self.profile != "exp-bump":
            raise ValueError(f"unknown bump profile {self.profile!r}")

    @property
    def M(self) -> int:
        return self.m ** self.d


def subcubes_for(n: int, d: int) -> int:
    """Smallest m with ``m^d >= 2 n``."""
    m = max(1, int(math.floor((2 * n) ** (1.0 / d))))
    while m ** d < 2 * n:
        m += 1
    while m > 1 and (m - 1) ** d >= 2 * n:
        m -= 1
    return m


def _axis_layout(m: int, res: int):
    """Sub-cube index and local bump factor at each node of one axis."""
    x = np.linspace(0.0, 1.0, res)
    cell = np.minimum(np.floor(m * x).astype(np.int64), m - 1)
    return cell, bump_profile(m * x - cell)


def _check_resolution(m: int, res: int):
    if (res - 1) / m < MIN_POINTS_PER_CELL:
        raise ResolutionError(
            f"res={res} gives {(res - 1) / m:.1f} grid points per sub-cube; "
            f"need at least {MIN_POINTS_PER_CELL}")


def bump_embedding(a, spec: BumpSpec, res: int) -> GridFunction:
    """``Psi(a) = sum_i a_i psi(m (x - x_i))`` with sub-cubes in row-major order."""
    a = np.asarray(a, dtype=float).ravel()
    if a.size != spec.M:
        raise ValueError(f"need {spec.M} coefficients, got {a.size}")
    _check_resolution(spec.m, res)
    cell, prof = _axis_layout(spec.m, res)
    flat = np.zeros((res,) * spec.d, dtype=np.int64)
    factor = np.ones((res,) * spec.d)
    for axis in range(spec.d):
        shape = [1] * spec.d
        shape[axis] = res
        flat = flat * spec.m + cell.reshape(shape)
        factor = factor * prof.reshape(shape)
    return GridFunction(spec.d, res, a[flat] * factor)


def scaling_identity_check(psi=None, m: int = 2, k: int = 2, q: ExponentLike = 2,
                           t_grid=None, res: int = 2 ** 12, d: int = 1,
                           cell: int = 0) -> float:
    """Largest relative gap between ``omega_k(psi_i, t/m)`` and ``m^(-d/q) omega_k(psi, t)``.

    ``psi`` is a vectorized function on [0, 1]^d vanishing outside (the
    standard bump by default) and ``psi_i = psi(m (x - x_i))`` lives in the
    sub-cube with row-major index ``cell``. The identity is a change of
    variables on all of R^d; on the cube it holds up to edge effects that
    are negligible while ``k t`` stays well inside the support, which is
    what the default ``t_grid`` covers. Scales are rounded to multiples of
    ``m`` grid spacings so both sides are evaluated at the same shifts.
    """
    q = as_exponent(q)
    psi = _cube_bump if psi is None else psi
    dx = 1.0 / (res - 1)
    if t_grid is None:
        t_grid = np.geomspace(4 * m * dx, 0.25 / k, 12)
    # both sides must see the same physical shifts: t on multiples of m * dx
    t_grid = m * dx * np.unique(np.rint(np.asarray(t_grid, dtype=float) / (m * dx)))
    if np.any(t_grid / m < dx):
        raise ResolutionError("t / m must be at least one grid spacing")
    corner = np.array(np.unravel_index(cell, (m,) * d), dtype=float) / m

    def small(*xs):
        return psi(*(m * (x - c) for x, c in zip(xs, corner)))

    big_f = GridFunction.from_callable(psi, d, res)
    small_f = GridFunction.from_callable(small, d, res)
    big = modulus_profile(big_f, t_grid, k, q)
    little = modulus_profile(small_f, t_grid / m, k, q)
    target = m ** (-d * q.reciprocal) * big
    if m == 1:
        return float(np.max(np.abs(little - target)))
    return float(np.max(np.abs(little - target) / target))


def fit_loglog_slope(ns, values) -> float:
    """Least-squares slope of log(values) against log(ns)."""
    slope, _ = np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(values, float)), 1)
    return float(slope)


def _rows_lq_norm(G: np.ndarray, q, dx: float) -> np.ndarray:
    if q.is_inf:
        return np.abs(G).max(axis=1)
    w = trapezoid_weights(G.shape[1])
    return ((np.abs(G) ** q.value) @ w * dx) ** (1.0 / q.value)


def _norms_1d(coeffs, m, res, params, nodes, shifts, chunk=256):
    """(L_p-free) pieces of the Besov norm for each coefficient row, 1-D fast path."""
    cell, prof = _axis_layout(m, res)
    dx = 1.0 / (res - 1)
    ts = besov_nodes(1, res, params.k, nodes)
    cand = candidate_shifts(1, res, params.k, float(ts[-1]),
                            ts=ts if shifts == "nodes" else None)
    weights = difference_weights(params.k)
    lq, semi = [], []
    for start in range(0, len(coeffs), chunk):
        block = coeffs[start:start + chunk]
        G = block[:, cell] * prof
        lq.append(_rows_lq_norm(G, params.q, dx))
        norms = batch_shift_norms(block, cell, prof, cand, weights, params.q)
        omega = profile_from_shift_norms(cand, norms, ts, dx)
        semi.append(seminorm_from_profile(ts, omega, params.s, params.r))
    return np.concatenate(lq), np.concatenate(semi)


def besov_ball_certificate(d: int, s: float, p: ExponentLike, q: ExponentLike, n: int,
                           resolution: int, samples: int = 2000, seed: int = 0, *,
                           calib_samples: int = 10_000, minor_budget: int = 200,
                           nodes: int = DEFAULT_NODES, shifts: str = "nodes") -> ExperimentReport:
    """Sphere map into the (empirical) unit Besov ball and its smallest L_p norm.

    The certificate map for (M = m^d, n, q) is composed with the bump
    embedding; every image is divided by the largest Besov norm
    ``B^s_1(L_q)`` in the sample, so all of them lie in the unit ball, and
    the smallest resulting L_p norm is reported as ``min_lp``.
    """
    t0 = time.perf_counter()
    p, q = as_exponent(p), as_exponent(q)
    if not embedding_is_compact(s, d, p, q):
        raise ValueError(f"embedding is not compact for s={s}, d={d}, p={p}, q={q}")
    if p > q:
        raise ValueError(f"need p <= q, got p={p}, q={q}")
    if samples < 2 or samples % 2:
        raise ValueError("samples must be a positive even integer")
    params = BesovParams(s=s, r=1, q=q)
    m = subcubes_for(n, d)
    M = m ** d
    spec = BumpSpec(m, d)
    _check_resolution(m, resolution)
    cert_seed, sample_seed = derive_seeds(seed, 2)
    cert = build_certificate(M, n, q, seed=cert_seed, calib_samples=calib_samples,
                             minor_budget=minor_budget, exact_budget=0)
    # Psi and every norm involved are odd/absolutely homogeneous, so the
    # antipodal half of the sample has identical norms and is not re-evaluated.
    z = sample_sphere(n, samples, sample_seed)[: samples // 2]
    coeffs = certificate_map(cert, z)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnresolvedSmallScale)
        if d == 1:
            dx = 1.0 / (resolution - 1)
            lq, semi = _norms_1d(coeffs, m, resolution, params, nodes, shifts)
            cell, prof = _axis_layout(m, resolution)
            lp = np.concatenate([_rows_lq_norm(coeffs[i:i + 256][:, cell] * prof, p, dx)
                                 for i in range(0, len(coeffs), 256)])
        else:
            lq, semi, lp = [], [], []
            for a in coeffs:
                g = bump_embedding(a, spec, resolution)
                lq.append(g.lq_norm(q))
                semi.append(besov_norm(g, params, nodes=nodes, shifts=shifts) - lq[-1])
                lp.append(g.lq_norm(p))
            lq, semi, lp = map(np.asarray, (lq, semi, lp))
    besov = lq + semi
    B = float(besov.max())
    min_lp = float(lp.min()) / B
    return ExperimentReport(
        command="besov-certificate",
        params={"d": d, "s": s, "p": str(p), "q": str(q), "r": 1, "k": params.k, "n": n,
                "res": resolution, "samples": samples, "m": m, "M": M,
                "calib_samples": calib_samples, "minor_budget": minor_budget,
                "nodes": nodes, "shifts": shifts},
        seeds={"seed": seed, "certificate": cert_seed, "samples": sample_seed, **cert.seeds},
        theory={"exponent": -s / d, "certificate_floor_lp": (M - n) ** (p.reciprocal - q.reciprocal)},
        measured={"min_lp": min_lp, "max_besov_norm": B, "min_lp_unnormalized": float(lp.min()),
                  "min_coeff_lp": float(lp_norm(coeffs, p, axis=1).min()),
                  "eps": cert.eps,
                  "unresolved_small_scale": any(issubclass(w.category, UnresolvedSmallScale)
                                                for w in caught)},
        verdicts={"positive": "PASS" if min_lp > 0 else "FAIL"},
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )


def besov_experiment(d: int, s: float, p: ExponentLike, q: ExponentLike, n_list, res: int,
                     samples: int = 2000, seed: int = 0, *, slope_tol: float | None = None,
                     **kw) -> ExperimentReport:
    """Run :func:`besov_ball_certificate` for every n and fit the log-log slope.

    The slope verdict passes when it lies within ``slope_tol`` (default
    ``0.1 * s / d``) of ``-s / d``.
    """
    t0 = time.perf_counter()
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2:
        raise ValueError("need at least two values of n to fit a slope")
    rows, per_n = [], []
    for n in n_list:
        rep = besov_ball_certificate(d, s, p, q, n, res, samples, seed, **kw)
        per_n.append(rep)
        rows.append({"n": n, "min_lp": rep.measured["min_lp"],
                     "theory_floor_exponent": -s / d, "samples": samples, "seed": seed})
    minima = [r["min_lp"] for r in rows]
    slope = fit_loglog_slope(n_list, minima)
    target = -s / d
    tol = 0.1 * s / d if slope_tol is None else slope_tol
    ok_positive = all(v > 0 for v in minima)
    return ExperimentReport(
        command="besov-experiment",
        params={"d": d, "s": s, "p": str(as_exponent(p)), "q": str(as_exponent(q)),
                "n_list": n_list, "res": res, "samples": samples, "slope_tol": tol,
                **{k: v for k, v in per_n[0].params.items()
                   if k in ("k", "r", "nodes", "shifts", "calib_samples", "minor_budget")}},
        seeds={"seed": seed},
        theory={"slope": target},
        measured={"slope": slope, "minima": minima,
                  "max_besov_norms": [r.measured["max_besov_norm"] for r in per_n],
                  "m": [r.params["m"] for r in per_n]},
        verdicts={"slope": "PASS" if abs(slope - target) <= tol else "FAIL",
                  "positive": "PASS" if ok_positive else "FAIL"},
        runtime_ms=(time.perf_counter() - t0) * 1e3,
        rows=rows,
    )
