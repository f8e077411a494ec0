import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from widthlab.core import (
    INF,
    Exponent,
    as_exponent,
    derive_seeds,
    lp_norm,
    nondecreasing_magnitude_rearrangement,
    sample_sphere,
    threshold,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, st.integers(1, 12), elements=finite)
exponents = st.sampled_from([0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 7.0, "inf"])


def test_exponent_infinity_is_exact():
    assert INF.reciprocal == 0.0
    assert Exponent.parse("inf") == INF
    assert Exponent(math.inf).is_inf
    assert str(INF) == "inf"


@pytest.mark.parametrize("bad", [0, -1, float("nan"), -math.inf])
def test_exponent_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        Exponent(bad)


def test_exponent_ordering():
    ps = [as_exponent(v) for v in (0.5, 1, 2, 3, "inf")]
    assert ps == sorted(ps)
    assert as_exponent(3) < INF and not INF < INF
    assert as_exponent(2) <= 2 <= as_exponent(2)


@given(exponents, exponents)
def test_reciprocal_is_monotone_decreasing(p, q):
    p, q = as_exponent(p), as_exponent(q)
    if p <= q:
        assert p.reciprocal >= q.reciprocal


@pytest.mark.parametrize("x, p, expected", [
    ([3, 4], 2, 5.0),
    ([1, -1, 2], 1, 4.0),
    ([1, 1, 1, 1], "inf", 1.0),
])
def test_lp_norm_examples(x, p, expected):
    assert lp_norm(x, p) == pytest.approx(expected, rel=1e-15)


def test_lp_norm_zero_and_quasi_norm():
    assert lp_norm(np.zeros(5), 0.5) == 0.0
    # (1 + 1)^2 for p = 1/2
    assert lp_norm([1.0, 1.0], 0.5) == pytest.approx(4.0)


def test_lp_norm_axis_matches_rows():
    x = np.random.default_rng(0).standard_normal((7, 5))
    rows = lp_norm(x, 3, axis=1)
    assert np.allclose(rows, [lp_norm(r, 3) for r in x], rtol=1e-14)


@given(vectors, finite, exponents)
def test_homogeneity(x, alpha, p):
    lhs = lp_norm(alpha * x, p)
    rhs = abs(alpha) * lp_norm(x, p)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@given(vectors, exponents, exponents)
def test_monotone_in_p(x, p, q):
    p, q = as_exponent(p), as_exponent(q)
    if p <= q:
        assert lp_norm(x, p) >= lp_norm(x, q) * (1 - 1e-12)


@pytest.mark.parametrize("p, q", [(0.5, 1), (0.5, "inf"), (1, 2), (1, "inf"), (2, 3), (3, "inf"), (2, 2)])
def test_holder_tail_bound(p, q):
    rng = np.random.default_rng(11)
    p, q = as_exponent(p), as_exponent(q)
    for length in (1, 3, 8):
        x = rng.standard_normal((10_000, length)) * rng.exponential(size=(10_000, 1))
        factor = length ** (p.reciprocal - q.reciprocal)
        assert np.all(lp_norm(x, p, axis=1) <= factor * lp_norm(x, q, axis=1) * (1 + 1e-12))


@pytest.mark.parametrize("x, expected", [
    ([3, -1, 2], [1, 2, 3]),
    ([0, 0, 5], [0, 0, 5]),
    ([-0.5, 0.25, -0.25], [0.25, 0.25, 0.5]),
])
def test_rearrangement(x, expected):
    assert np.array_equal(nondecreasing_magnitude_rearrangement(x), expected)


@given(vectors, st.randoms())
def test_rearrangement_permutation_invariant(x, rnd):
    perm = list(range(len(x)))
    rnd.shuffle(perm)
    assert np.array_equal(nondecreasing_magnitude_rearrangement(x),
                          nondecreasing_magnitude_rearrangement(x[perm]))


@pytest.mark.parametrize("x, expected", [(0.5, 0.5), (2, 1.0), (-3, -1.0), (1, 1.0), (-1, -1.0)])
def test_threshold_examples(x, expected):
    assert threshold(x, 1.0) == expected


@given(finite, finite, st.floats(1e-6, 10))
def test_threshold_odd_and_lipschitz(x, y, eps):
    assert threshold(-x, eps) == -threshold(x, eps)
    assert abs(threshold(x, eps)) <= 1
    assert abs(threshold(x, eps) - threshold(y, eps)) <= abs(x - y) / eps * (1 + 1e-12) + 1e-300


def test_threshold_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        threshold(0.1, 0.0)


def test_sphere_samples_contract():
    z = sample_sphere(1, 4, seed=7)
    assert z.shape == (4, 2)
    assert np.array_equal(z[2:], -z[:2])
    z = sample_sphere(5, 1000, seed=3)
    assert np.max(np.abs(np.linalg.norm(z, axis=1) - 1)) <= 1e-12


def test_sphere_samples_deterministic_and_nested():
    a = sample_sphere(2, 1000, seed=0)
    assert np.array_equal(a, sample_sphere(2, 1000, seed=0))
    b = sample_sphere(2, 2000, seed=0)
    assert np.array_equal(a[:500], b[:500])
    assert not np.array_equal(a, sample_sphere(2, 1000, seed=1))


@pytest.mark.parametrize("count", [0, 3, -2])
def test_sphere_rejects_bad_counts(count):
    with pytest.raises(ValueError):
        sample_sphere(2, count, seed=0)


def test_derived_seeds_are_stable_and_distinct():
    s = derive_seeds(5, 3)
    assert s == derive_seeds(5, 3)
    assert len(set(s)) == 3
