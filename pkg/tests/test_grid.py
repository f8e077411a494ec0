import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from widthlab.besov import GridFormatError, GridFunction, read_grid_function, write_grid_function
from widthlab.besov.grid import grid_lq_norm


def test_constructor_validation():
    with pytest.raises(ValueError):
        GridFunction(1, 3, np.zeros(3))
    with pytest.raises(ValueError):
        GridFunction(1, 5, np.zeros(4))
    with pytest.raises(ValueError):
        GridFunction(1, 4, [0, 1, np.nan, 2])
    f = GridFunction(2, 4, np.arange(16.0))
    assert f.values.shape == (4, 4)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("q", [1, 2, 3.5, "inf"])
def test_constant_norm_is_exact(d, q):
    f = GridFunction.from_callable(lambda *x: 2.5 + 0 * x[0], d, 9)
    assert f.lq_norm(q) == pytest.approx(2.5, rel=1e-14)


def test_linear_and_quadratic_norms():
    f = GridFunction.from_callable(lambda x: x, 1, 2 ** 10 + 1)
    assert f.lq_norm(1) == pytest.approx(0.5, rel=1e-14)  # trapezoid is exact on x
    assert f.lq_norm(2) == pytest.approx(3 ** -0.5, rel=1e-6)
    assert f.lq_norm("inf") == 1.0


def test_empty_axis_has_zero_norm():
    assert grid_lq_norm(np.ones((1, 5)), 2, 0.1) == 0.0
    assert grid_lq_norm(np.ones((0,)), 1, 0.1) == 0.0


def test_arithmetic():
    f = GridFunction.from_callable(lambda x: x, 1, 8)
    g = 2 * f + f * -1.0
    assert np.array_equal(g.values, f.values)


@settings(max_examples=25)
@given(st.integers(1, 2), st.integers(4, 9), st.integers(0, 2 ** 32 - 1))
def test_file_roundtrip(tmp_path_factory, d, res, seed):
    vals = np.random.default_rng(seed).standard_normal(res ** d) * 10.0 ** np.random.default_rng(seed).integers(-8, 8)
    f = GridFunction(d, res, vals)
    path = tmp_path_factory.mktemp("g") / "f.txt"
    write_grid_function(f, path)
    g = read_grid_function(path)
    assert g.d == d and g.res == res and np.array_equal(g.values, f.values)


@pytest.mark.parametrize("text", [
    "",
    "d=1\n",
    "res=4\nd=1\n0\n0\n0\n0\n",
    "d=one\nres=4\n0\n0\n0\n0\n",
    "d=1\nres=4\n0\n0\n0\n",
    "d=1\nres=4\n0\n0\nzero\n0\n",
    "d=1\nres=4\n0\n0\nnan\n0\n",
    "d=0\nres=4\n",
    "d=1\nres=3\n0\n0\n0\n",
])
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(GridFormatError):
        read_grid_function(path)


def test_row_major_layout(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("d=2\nres=4\n" + "\n".join(str(i) for i in range(16)) + "\n")
    f = read_grid_function(path)
    assert f.values[0, 3] == 3.0 and f.values[1, 0] == 4.0
