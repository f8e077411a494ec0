"""Odd sphere maps into the l_q^M ball whose l_p norm never drops below the width.

The construction: a general-position (n+1)-dimensional subspace of R^M,
parameterized by an orthonormal basis so that S^n maps onto its unit
sphere; every image point then has at least M - n coordinates of
magnitude >= eps. Clamping coordinates at eps and renormalizing in l_q
gives an odd continuous map into the l_q ball with at least M - n
saturated (+/-1 before normalization) coordinates.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Exponent,
    ExponentLike,
    as_exponent,
    derive_seeds,
    lp_norm,
    nondecreasing_magnitude_rearrangement,
    sample_sphere,
    threshold,
)
from .projection import ProjectionScheme, extremal_input, reconstruction_error
from .reports import ExperimentReport
from .widths import exact_manifold_width

__all__ = [
    "DegenerateBasis",
    "ZeroImage",
    "GeneralPositionBasis",
    "Certificate",
    "general_position_basis",
    "check_minors",
    "project_to_sphere_image",
    "calibrate_epsilon",
    "epsilon_infimum",
    "build_certificate",
    "thresholded_image",
    "certificate_map",
    "lipschitz_probe",
    "verify_certificate",
    "chain_inequality_report",
]

SINGULAR_TOL = 1e-12
LOWER_BOUND_TOL = 1e-9
MEMBERSHIP_TOL = 1e-10
ODDNESS_TOL = 1e-12
MAX_RETRIES = 8
# work cap (minors x sign vertices) for the exact infimum of the (n+1)-th magnitude
EXACT_EPS_BUDGET = 4_000_000


class DegenerateBasis(RuntimeError):
    """No seed produced a subspace whose checked minors are all nonsingular."""


class ZeroImage(RuntimeError):
    """The clamped image vanished, so it cannot be normalized."""


@dataclass(frozen=True)
class GeneralPositionBasis:
    columns: np.ndarray
    seed: int | None
    verification: str
    witness: float | None
    minors_checked: int

    @property
    def M(self) -> int:
        return self.columns.shape[0]

    @property
    def n(self) -> int:
        return self.columns.shape[1] - 1

    @classmethod
    def from_columns(cls, columns, verify_budget: int = 10**6, seed: int = 0):
        """Orthonormalize ``columns`` (keeping their span) and check the minors."""
        a = np.asarray(columns, dtype=float)
        q, _ = np.linalg.qr(a)
        verification, witness, checked = check_minors(q, verify_budget, seed)
        return cls(q, None, verification, witness, checked)


def _row_subsets(M: int, N: int, budget: int, rng) -> tuple[np.ndarray, bool]:
    total = math.comb(M, N)
    if total <= budget:
        return np.array(list(itertools.combinations(range(M), N)), dtype=np.intp), True
    keys = rng.random((budget, M))
    return np.sort(np.argsort(keys, axis=1)[:, :N], axis=1), False


def check_minors(columns: np.ndarray, budget: int = 10**6, seed: int = 0,
                 chunk: int = 20_000) -> tuple[str, float | None, int]:
    """Inspect the N x N row minors of an M x N matrix.

    All minors are examined (via determinants) when there are at most
    ``budget`` of them; otherwise ``budget`` random ones are examined via
    their smallest singular value.  Returns ``(verification, witness,
    count)`` where the witness is the smallest |det| or sigma_min seen.
    """
    M, N = columns.shape
    if budget <= 0:
        return "unverified", None, 0
    rng = np.random.Generator(np.random.Philox(seed))
    subsets, exhaustive = _row_subsets(M, N, budget, rng)
    worst = math.inf
    for start in range(0, len(subsets), chunk):
        block = columns[subsets[start:start + chunk]]
        if exhaustive:
            vals = np.abs(np.linalg.det(block))
        else:
            vals = np.linalg.svd(block, compute_uv=False)[:, -1]
        worst = min(worst, float(vals.min()))
    return ("exhaustive" if exhaustive else "sampled"), worst, len(subsets)


def general_position_basis(M: int, n: int, seed: int = 0,
                           verify_budget: int = 10**6) -> GeneralPositionBasis:
    """Orthonormal basis of the span of a seeded Gaussian M x (n+1) matrix.

    If a checked minor is singular (below 1e-12) the next seed is tried,
    up to eight more times, before giving up with :class:`DegenerateBasis`.
    """
    if not 1 <= n < M:
        raise ValueError(f"need 1 <= n < M, got n={n}, M={M}")
    worst_seen = []
    for attempt in range(MAX_RETRIES + 1):
        s = seed + attempt
        rng = np.random.Generator(np.random.Philox(s))
        q, _ = np.linalg.qr(rng.standard_normal((M, n + 1)))
        verification, witness, checked = check_minors(q, verify_budget, s)
        if witness is None or witness > SINGULAR_TOL:
            return GeneralPositionBasis(q, s, verification, witness, checked)
        worst_seen.append(witness)
    raise DegenerateBasis(
        f"seeds {seed}..{seed + MAX_RETRIES} all produced a singular minor "
        f"(smallest witnesses {worst_seen})"
    )


def project_to_sphere_image(basis: GeneralPositionBasis, z) -> np.ndarray:
    """``P(z) = sum_i z_i a_i``; ``z`` may be one point or a stack of points."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != basis.n + 1:
        raise ValueError(f"sphere point has dimension {z.shape[-1]}, basis expects {basis.n + 1}")
    return z @ basis.columns.T


def _order_statistic(P: np.ndarray, n: int) -> np.ndarray:
    # (n+1)-th smallest magnitude of each row
    return np.partition(np.abs(P), n, axis=-1)[..., n]


def calibrate_epsilon(basis: GeneralPositionBasis, calibration_samples: int = 10_000,
                      seed: int = 0, eps_safety: float = 0.9) -> float:
    """``eps_safety`` times the sampled minimum of the (n+1)-th smallest magnitude."""
    if calibration_samples < 1000:
        raise ValueError("calibration needs at least 1000 samples")
    if not 0 < eps_safety <= 1:
        raise ValueError("eps_safety must lie in (0, 1]")
    count = calibration_samples + calibration_samples % 2
    z = sample_sphere(basis.n, count, seed)
    low = float(_order_statistic(project_to_sphere_image(basis, z), basis.n).min())
    if low < SINGULAR_TOL:
        raise DegenerateBasis(f"sampled (n+1)-th magnitude {low:.3e} is numerically zero")
    return eps_safety * low


def epsilon_infimum(basis: GeneralPositionBasis, budget: int = EXACT_EPS_BUDGET,
                    chunk: int = 4096) -> float | None:
    """Exact infimum over the sphere of the (n+1)-th smallest magnitude of P(z).

    For a row subset T of size N = n+1 the smallest possible
    ``max_{i in T} |P(z)_i|`` over unit z equals ``1 / max ||A_T^{-1} y||_2``
    with y ranging over the sign vectors {-1, 1}^N (a convex function on the
    cube peaks at a vertex).  Minimizing over T gives the infimum.  Returns
    ``None`` when ``C(M, N) * 2^(N-1)`` exceeds ``budget``.
    """
    M, N = basis.columns.shape
    n_vertices = 2 ** (N - 1)
    if math.comb(M, N) * n_vertices > budget:
        return None
    # sign vectors up to a global sign
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=N - 1)), dtype=float)
    signs = np.hstack([np.ones((n_vertices, 1)), signs]).reshape(n_vertices, N)
    best = math.inf
    subsets = itertools.combinations(range(M), N)
    while True:
        batch = list(itertools.islice(subsets, chunk))
        if not batch:
            break
        inv = np.linalg.inv(basis.columns[np.array(batch)])
        lengths = np.linalg.norm(inv @ signs.T, axis=1)
        best = min(best, float(1.0 / lengths.max(axis=1).max()))
    return best


@dataclass(frozen=True)
class Certificate:
    basis: GeneralPositionBasis
    eps: float
    q: Exponent
    eps_safety: float
    sampled_min: float
    exact_infimum: float | None = None
    seeds: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        object.__setattr__(self, "q", as_exponent(self.q))

    @property
    def M(self) -> int:
        return self.basis.M

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def eps_below_infimum(self) -> bool | None:
        """Whether eps is provably below the true infimum (None if unknown)."""
        if self.exact_infimum is None:
            return None
        return self.eps < self.exact_infimum


def build_certificate(M: int, n: int, q: ExponentLike, seed: int = 0,
                      calib_samples: int = 10_000, eps_safety: float = 0.9,
                      minor_budget: int = 10**6,
                      exact_budget: int = EXACT_EPS_BUDGET) -> Certificate:
    """Basis, calibrated threshold and metadata for the odd map S^n -> K_q^M.

    eps is ``eps_safety`` times the sampled calibration minimum, lowered to
    ``eps_safety`` times the exact infimum whenever that is cheap enough to
    enumerate (``exact_budget``); lowering eps only preserves the bound.
    """
    basis_seed, calib_seed = derive_seeds(seed, 2)
    basis = general_position_basis(M, n, basis_seed, minor_budget)
    eps = calibrate_epsilon(basis, calib_samples, calib_seed, eps_safety)
    sampled_min = eps / eps_safety
    exact = epsilon_infimum(basis, exact_budget) if exact_budget > 0 else None
    if exact is not None:
        eps = min(eps, eps_safety * exact)
    return Certificate(basis, eps, as_exponent(q), eps_safety, sampled_min, exact,
                       {"basis": basis.seed, "calibration": calib_seed})


def thresholded_image(cert: Certificate, z) -> np.ndarray:
    """The clamped image ``t_eps(P(z))``, coordinatewise."""
    return threshold(project_to_sphere_image(cert.basis, z), cert.eps)


def certificate_map(cert: Certificate, z) -> np.ndarray:
    """``c(z) = t_eps(P(z)) / ||t_eps(P(z))||_q``.

    Raises :class:`ZeroImage` rather than perturbing a vanishing image.
    """
    pt = np.atleast_2d(thresholded_image(cert, z))
    norms = lp_norm(pt, cert.q, axis=-1)
    if np.any(norms == 0):
        raise ZeroImage(f"{int(np.sum(norms == 0))} sphere point(s) mapped to zero")
    out = pt / norms[:, None]
    return out[0] if np.ndim(z) == 1 else out


def lipschitz_probe(cert: Certificate, pairs: int = 1000, step: float = 1e-7,
                    seed: int = 0) -> float:
    """Largest ``||c(z) - c(z')||_inf / ||z - z'||_2`` over nearby sampled pairs."""
    z = sample_sphere(cert.n, 2 * pairs, seed)[:pairs]
    rng = np.random.Generator(np.random.Philox(seed + 1))
    w = z + step * rng.standard_normal(z.shape) / math.sqrt(z.shape[1])
    w /= np.linalg.norm(w, axis=1)[:, None]
    dz = np.linalg.norm(z - w, axis=1)
    dc = np.abs(certificate_map(cert, z) - certificate_map(cert, w)).max(axis=1)
    keep = dz > 0
    return float((dc[keep] / dz[keep]).max()) if keep.any() else 0.0


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def verify_certificate(cert: Certificate, p: ExponentLike, fresh_samples: int = 10_000,
                       seed: int = 1, lipschitz_pairs: int = 500) -> ExperimentReport:
    """Check the certificate on fresh antipodal samples.

    Checks: min ||c(z)||_p against the width floor, unit q-norm, oddness,
    at least M - n saturated coordinates on every sample, the chain of
    inequalities behind the floor on every sample, and an empirical
    Lipschitz sanity bound of 10 / eps.
    """
    t0 = time.perf_counter()
    p = as_exponent(p)
    q = cert.q
    if p > q:
        raise ValueError(f"need p <= q, got p={p}, q={q}")
    M, n = cert.M, cert.n
    floor = exact_manifold_width(M, n, p, q)
    count = fresh_samples + fresh_samples % 2
    z = sample_sphere(n, count, seed)
    half = count // 2

    pt = thresholded_image(cert, z)
    c = certificate_map(cert, z)
    lp = lp_norm(c, p, axis=1)
    q_resid = float(np.max(np.abs(lp_norm(c, q, axis=1) - 1.0)))
    odd_resid = float(np.max(np.abs(c[:half] + c[half:])))
    saturated = np.count_nonzero(np.abs(pt) == 1.0, axis=1)

    # the per-sample chain: ||Pt||_p/||Pt||_q >= [(M-n) + sum_{n smallest} |x|^p]^(1/p-1/q)
    gap = p.reciprocal - q.reciprocal
    mags = nondecreasing_magnitude_rearrangement(pt)[:, :n]
    if p.is_inf:
        # p = q = inf: both sides are 1
        chain_rhs = np.ones(count)
    else:
        chain_rhs = ((M - n) + np.sum(mags ** p.value, axis=1)) ** gap
    chain_lhs = lp_norm(pt, p, axis=1) / lp_norm(pt, q, axis=1)
    chain_violations = int(np.count_nonzero(chain_lhs < chain_rhs * (1 - 1e-12)))

    lip = lipschitz_probe(cert, lipschitz_pairs, seed=seed + 7) if lipschitz_pairs else 0.0
    lip_bound = 10.0 / cert.eps

    min_lp = float(lp.min())
    verdicts = {
        "lower_bound": _verdict(min_lp >= floor - LOWER_BOUND_TOL),
        "membership": _verdict(q_resid <= MEMBERSHIP_TOL),
        "oddness": _verdict(odd_resid <= ODDNESS_TOL),
        "saturation": _verdict(int(saturated.min()) >= M - n),
        "chain": _verdict(chain_violations == 0),
        "continuity": _verdict(lip <= lip_bound),
    }
    return ExperimentReport(
        command="certify",
        params={"M": M, "n": n, "p": str(p), "q": str(q), "samples": count,
                "eps_safety": cert.eps_safety,
                "minor_verification": cert.basis.verification,
                "minors_checked": cert.basis.minors_checked},
        seeds={**cert.seeds, "fresh": seed},
        theory={"floor": floor, "exponent": gap},
        measured={
            "min_lp_norm": min_lp,
            "max_q_norm_residual": q_resid,
            "max_oddness_residual": odd_resid,
            "min_saturated": int(saturated.min()),
            "required_saturated": M - n,
            "chain_violations": chain_violations,
            "eps": cert.eps,
            "sampled_min_order_stat": cert.sampled_min,
            "exact_infimum": cert.exact_infimum,
            "eps_below_infimum": cert.eps_below_infimum,
            "min_minor_witness": cert.basis.witness,
            "lipschitz_ratio_max": lip,
            "lipschitz_bound": lip_bound,
        },
        verdicts=verdicts,
        runtime_ms=(time.perf_counter() - t0) * 1e3,
    )


def chain_inequality_report(M: int, n: int, p: ExponentLike, q: ExponentLike) -> dict:
    """The three faces of the width: certificate floor, closed form, projection ceiling.

    The certificate floor is the l_p/l_q ratio of a vector with exactly
    M - n saturated coordinates and n zeros (the least favourable image),
    the projection ceiling is the error of the extremal input.
    """
    p, q = as_exponent(p), as_exponent(q)
    exact = exact_manifold_width(M, n, p, q)
    saturated = np.zeros(M)
    saturated[: M - n] = 1.0
    cert_floor = lp_norm(saturated, p) / lp_norm(saturated, q)
    ceiling = reconstruction_error(extremal_input(M, n, q), ProjectionScheme(M, n), p)
    spread = max(cert_floor, exact, ceiling) - min(cert_floor, exact, ceiling)
    return {
        "M": M, "n": n, "p": str(p), "q": str(q),
        "certificate_bound": cert_floor,
        "exact_width": exact,
        "projection_bound": ceiling,
        "max_relative_spread": spread / exact,
        "consistent": spread <= 1e-12 * exact,
    }
