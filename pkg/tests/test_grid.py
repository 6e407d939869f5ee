import numpy as np
import pytest

from beambvp.grid import GridFunction


def test_constructor_validates_length():
    with pytest.raises(ValueError):
        GridFunction(10, np.zeros(10))


def test_constructor_rejects_nonfinite():
    values = np.zeros(11)
    values[3] = np.nan
    with pytest.raises(ValueError):
        GridFunction(10, values)


def test_constructor_copies_input():
    values = np.ones(11)
    gf = GridFunction(10, values)
    values[0] = 5.0  # caller's array stays writable and detached
    assert gf.values[0] == 1.0
    with pytest.raises(ValueError):
        gf.values[0] = 2.0  # stored values are frozen


def test_grid_geometry():
    gf = GridFunction.zeros(4)
    assert gf.h == 0.25
    assert np.array_equal(gf.ts, [0.0, 0.25, 0.5, 0.75, 1.0])


def test_norms_and_flags():
    gf = GridFunction(4, np.array([0.0, -0.5, 2.0, 1.0, 0.25]))
    assert gf.sup_norm() == 2.0
    assert gf.min() == -0.5
    assert not gf.is_nonneg()
    assert GridFunction(4, np.array([0.0, 0.0, 1e-13, 0.0, 0.0])).is_nonneg()


def test_from_callable_and_constant():
    gf = GridFunction.from_callable(lambda t: t * t, 10)
    assert gf.values[5] == 0.25
    assert GridFunction.constant(3.0, 5).values.tolist() == [3.0] * 6


def test_linear_interpolation():
    gf = GridFunction.from_callable(lambda t: 2.0 * t, 10)
    assert gf.interp(0.55) == pytest.approx(1.1, abs=1e-15)
    mids = gf.interp(np.array([0.05, 0.95]))
    assert mids == pytest.approx([0.1, 1.9], abs=1e-15)


def test_arithmetic_and_grid_mismatch():
    a = GridFunction.constant(2.0, 10)
    b = GridFunction.constant(0.5, 10)
    assert (a - b).values[0] == 1.5
    assert (a + b).values[0] == 2.5
    assert a.scale(2.0).values[0] == 4.0
    with pytest.raises(ValueError):
        a - GridFunction.constant(1.0, 20)
