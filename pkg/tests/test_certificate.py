import itertools
import math

import numpy as np
import pytest

from widthlab.certificate import (
    Certificate,
    GeneralPositionBasis,
    ZeroImage,
    build_certificate,
    calibrate_epsilon,
    certificate_map,
    chain_inequality_report,
    check_minors,
    epsilon_infimum,
    general_position_basis,
    project_to_sphere_image,
    thresholded_image,
    verify_certificate,
)
from widthlab.core import as_exponent, lp_norm, sample_sphere
from widthlab.widths import exact_manifold_width


def identity_basis():
    return GeneralPositionBasis(np.eye(2), None, "exhaustive", 1.0, 1)


@pytest.mark.parametrize("M, n, count", [(2, 1, 1), (6, 2, 20), (10, 4, 252)])
def test_minor_counts(M, n, count):
    basis = general_position_basis(M, n, seed=0)
    assert basis.verification == "exhaustive"
    assert basis.minors_checked == count == math.comb(M, n + 1)
    assert basis.witness > 1e-12


def test_basis_orthonormal_and_seeded():
    b = general_position_basis(9, 3, seed=5)
    assert np.allclose(b.columns.T @ b.columns, np.eye(4), atol=1e-10)
    assert np.array_equal(b.columns, general_position_basis(9, 3, seed=5).columns)


def test_minor_oracle_by_direct_enumeration():
    b = general_position_basis(7, 2, seed=3)
    direct = min(abs(np.linalg.det(b.columns[list(T)]))
                 for T in itertools.combinations(range(7), 3))
    assert b.witness == pytest.approx(direct, rel=1e-12)


def test_sampled_minor_check_over_budget():
    b = general_position_basis(12, 5, seed=0)
    verification, witness, checked = check_minors(b.columns, budget=100)
    assert verification == "sampled" and checked == 100 and witness > 0


def test_degenerate_columns_show_up_in_witness():
    cols = np.zeros((4, 2))
    cols[0, 0] = cols[1, 1] = 1.0  # rows 2 and 3 vanish
    b = GeneralPositionBasis.from_columns(cols)
    assert b.witness < 1e-12


def test_projection_examples():
    b = general_position_basis(8, 3, seed=1)
    assert np.allclose(project_to_sphere_image(b, [1, 0, 0, 0]), b.columns[:, 0], atol=1e-15)
    z = sample_sphere(3, 1000, seed=2)
    P = project_to_sphere_image(b, z)
    assert np.array_equal(P[:500], -P[500:])
    assert np.max(np.abs(np.linalg.norm(P, axis=1) - 1)) <= 1e-10


def test_calibration_identity_circle():
    # true inf of max(|z1|, |z2|) on the circle is 2^(-1/2); sampling can only
    # overshoot it, while the exact route lands on it
    inf = 2 ** -0.5
    eps = calibrate_epsilon(identity_basis(), 10_000, seed=0, eps_safety=0.9)
    assert 0.9 * inf * (1 - 1e-12) <= eps <= 0.9 * inf * 1.001
    assert epsilon_infimum(identity_basis()) == pytest.approx(inf, rel=1e-12)


def test_circle_hand_computation():
    cert = Certificate(identity_basis(), 2 ** -0.5, as_exponent("inf"), 1.0, 2 ** -0.5)
    z = np.array([1.0, 0.0])
    assert np.array_equal(thresholded_image(cert, z), [1.0, 0.0])
    c = certificate_map(cert, z)
    assert np.array_equal(c, [1.0, 0.0])
    assert lp_norm(c, 1) == 1.0 == exact_manifold_width(2, 1, 1, "inf")


@pytest.mark.parametrize("M, n", [(3, 1), (5, 2), (6, 3), (8, 2)])
def test_epsilon_infimum_against_dense_sampling(M, n):
    # the sampled minimum over 2e5 points approaches the exact value from above
    b = general_position_basis(M, n, seed=M + n)
    exact = epsilon_infimum(b)
    z = sample_sphere(n, 200_000, seed=1)
    sampled = np.partition(np.abs(project_to_sphere_image(b, z)), n, axis=1)[:, n].min()
    assert exact <= sampled * (1 + 1e-12)
    if n == 1:
        assert sampled <= exact * 1.001


def test_epsilon_infimum_over_budget():
    assert epsilon_infimum(general_position_basis(12, 6, seed=0), budget=10) is None


def test_zero_image_is_reported():
    cols = np.zeros((3, 2))
    cols[0, 0] = cols[1, 1] = 1.0
    b = GeneralPositionBasis(cols, None, "unverified", None, 0)
    cert = Certificate(b, 0.5, as_exponent(2), 0.9, 0.5)
    with pytest.raises(ZeroImage):
        certificate_map(cert, np.zeros(2))


@pytest.mark.parametrize("M, n, p, q", [
    (2, 1, 1, "inf"),
    (10, 4, 1, 2),
    (6, 2, 2, 2),
    (5, 1, "inf", "inf"),
])
def test_verify_examples(M, n, p, q):
    cert = build_certificate(M, n, q, seed=3)
    rep = verify_certificate(cert, p, 10_000, seed=4)
    assert rep.passed, rep.verdicts
    floor = exact_manifold_width(M, n, p, q)
    assert rep.measured["min_lp_norm"] >= floor - 1e-9
    if as_exponent(p) == as_exponent(q):
        assert rep.measured["min_lp_norm"] >= 1 - 1e-12


EXPS = [0.5, 1, 2, 3, "inf"]
GRID = [(M, n, p, q) for M in (3, 7, 12) for n in (1, 3, 6) if n < M
        for p, q in itertools.product(EXPS, EXPS) if as_exponent(p) <= as_exponent(q)]


@pytest.mark.parametrize("M, n, p, q", GRID)
def test_certificate_invariants(M, n, p, q):
    cert = build_certificate(M, n, q, seed=M * 31 + n, exact_budget=200_000)
    rep = verify_certificate(cert, p, 10_000, seed=11, lipschitz_pairs=100)
    assert rep.passed, (rep.verdicts, rep.measured)


def test_smaller_safety_keeps_the_bound():
    floors = []
    for safety in (0.9, 0.5, 0.1):
        cert = build_certificate(8, 3, 2, seed=2, eps_safety=safety)
        rep = verify_certificate(cert, 1, 10_000, seed=5)
        assert rep.passed
        floors.append(rep.measured["min_lp_norm"])
    floor = exact_manifold_width(8, 3, 1, 2)
    assert all(f >= floor - 1e-9 for f in floors)


def test_exact_infimum_lowers_eps():
    cert = build_certificate(10, 4, 2, seed=1)
    assert cert.exact_infimum is not None
    assert cert.eps <= cert.eps_safety * min(cert.exact_infimum, cert.sampled_min) * (1 + 1e-15)
    assert cert.eps_below_infimum


@pytest.mark.parametrize("M, n, p, q, expected", [
    (10, 4, 1, 2, 6 ** 0.5),
    (3, 2, 2, 2, 1.0),
    (8, 3, 0.5, 1, 5.0),
])
def test_chain_report_examples(M, n, p, q, expected):
    r = chain_inequality_report(M, n, p, q)
    for key in ("certificate_bound", "exact_width", "projection_bound"):
        assert r[key] == pytest.approx(expected, rel=1e-12)
    assert r["consistent"]


def test_verify_rejects_p_above_q():
    with pytest.raises(ValueError):
        verify_certificate(build_certificate(4, 1, 1), 2)
