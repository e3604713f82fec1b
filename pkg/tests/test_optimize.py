import math

import numpy as np
import pytest

from hardy_lab.hardy import GOLDEN, GOLDEN_ANGLE, P_MAX, probability_closed_form
from hardy_lab.optimize import (
    DEFAULT_REFINE_TOL,
    THREADS_ENV,
    NotGolden,
    Optimum,
    default_threads,
    find_diagonal_maxima,
    find_maxima,
    golden_section_max,
    scan,
    verify_golden,
)

T0 = GOLDEN_ANGLE
EXPECTED = sorted([(T0, T0), (T0, 2 * math.pi - T0), (2 * math.pi - T0, T0),
                   (2 * math.pi - T0, 2 * math.pi - T0)])


@pytest.fixture(scope="module")
def grid361():
    return scan(361)


@pytest.fixture(scope="module")
def maxima():
    return find_maxima()


def test_scan_small_grid_boundary_zero():
    g = scan(5)
    assert g.values.shape == (5, 5)
    for k in (0, 2, 4):
        assert np.all(np.abs(g.values[k, :]) <= 1e-15)
        assert np.all(np.abs(g.values[:, k]) <= 1e-15)
    assert g.values[1, 1] == pytest.approx(1 / 12, abs=1e-15)


def test_scan_rejects_tiny_resolution():
    with pytest.raises(ValueError):
        scan(1)


def test_scan_full_grid_bounds(grid361):
    d1, d2 = grid361.degrees()
    assert d1[0] == 0.0 and d1[-1] == 360.0 and d1[90] == 90.0
    assert grid361.values.max() <= 0.0901699 + 1e-9
    assert grid361.values.min() >= 0.0
    assert grid361.values[90, 90] == pytest.approx(1 / 12, abs=1e-15)


def test_scan_symmetries(grid361):
    v = grid361.values
    np.testing.assert_allclose(v, v.T, atol=1e-12, rtol=0)
    np.testing.assert_allclose(v, v[::-1, ::-1], atol=1e-12, rtol=0)
    np.testing.assert_allclose(v, v[::-1, :], atol=1e-12, rtol=0)


def test_scan_threads_bit_identical():
    one = scan(200, threads=1).values
    many = scan(200, threads=7).values
    assert np.array_equal(one, many)


def test_scan_rows_long_format():
    g = scan(3)
    rows = list(g.rows())
    assert len(rows) == 9
    assert rows[4] == (180.0, 180.0, float(g.values[1, 1]))


def test_default_threads_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert default_threads() == 3
    monkeypatch.setenv(THREADS_ENV, "zero")
    with pytest.raises(ValueError):
        default_threads()
    monkeypatch.delenv(THREADS_ENV)
    assert default_threads() >= 1


def test_golden_section_on_parabola():
    x = golden_section_max(lambda t: -(t - 0.3) ** 2, -1.0, 2.0, 1e-10)
    assert x == pytest.approx(0.3, abs=1e-9)


def test_find_maxima_four_golden_points(maxima):
    assert len(maxima) == 4
    for opt, (e1, e2) in zip(sorted(maxima, key=lambda o: (o.theta_1, o.theta_2)), EXPECTED):
        assert opt.p_max == pytest.approx(P_MAX, abs=1e-9)
        assert abs(opt.theta_1 - e1) <= DEFAULT_REFINE_TOL
        assert abs(opt.theta_2 - e2) <= DEFAULT_REFINE_TOL
        assert opt.p_max == pytest.approx(float(probability_closed_form(opt.theta_1, opt.theta_2)),
                                          abs=1e-12)


def test_refinement_never_worse_than_seed(maxima):
    for opt in maxima:
        assert opt.p_max >= opt.seed_value


def test_find_maxima_validates():
    with pytest.raises(ValueError):
        find_maxima(coarse_resolution=15)
    with pytest.raises(ValueError):
        find_maxima(refine_tol=0.0)


def test_find_maxima_coarser_grid_agrees():
    found = find_maxima(coarse_resolution=73)
    assert len(found) == 4
    assert all(abs(o.p_max - P_MAX) < 1e-9 for o in found)


def test_diagonal_maxima():
    found = find_diagonal_maxima()
    assert [round(math.degrees(o.theta_1), 4) for o in found] == [76.3454, 283.6546]
    for o in found:
        assert o.p_max == pytest.approx(P_MAX, abs=1e-12)


def test_verify_golden_passes(maxima):
    for opt in maxima:
        check = verify_golden(opt)
        assert check.strict
        assert check.cos2_half[0] == pytest.approx(0.618034, abs=1e-6)
        assert check.overlaps["primed_minus_vs_plus"][0] == pytest.approx(0.381966, abs=1e-6)
        assert check.overlaps["primed_plus_vs_plus"][1] == pytest.approx(1 / GOLDEN, abs=1e-6)
        assert abs(check.identity_residual) <= 1e-12
        assert check.to_dict()["max_deviation"] == check.max_deviation


def test_verify_golden_rejects_spurious_point():
    bogus = Optimum(math.pi / 2, math.pi / 2, 1 / 12)
    with pytest.raises(NotGolden):
        verify_golden(bogus)


def test_gradient_vanishes_at_golden_point():
    h = 1e-6
    for dx, dy in ((h, 0.0), (0.0, h)):
        g = (probability_closed_form(T0 + dx, T0 + dy)
             - probability_closed_form(T0 - dx, T0 - dy)) / (2 * h)
        assert abs(g) < 1e-8
