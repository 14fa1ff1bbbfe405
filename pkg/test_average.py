"""
Tests for the average deviation, its derivatives and the minimizer
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core import PhaseShifts, EpsilonRange
from error_handler import ValidationError
from average import (coefficients, coefficients_expanded, avg_deviation, avg_deviation_grid,
                     numeric_avg_deviation, partial_theta, partial_phi, avg_deviation_equal,
                     avg_deviation_completed_square, avg_deviation_grover, minimize_avg_deviation,
                     theta_star_in_expected_interval, confirm_global_minimum, appendix_properties,
                     INTERIOR_CASE, BOUNDARY_CASE)


@st.composite
def ranges(draw):
    beta = draw(st.floats(min_value=0.0, max_value=0.99))
    alpha = draw(st.floats(min_value=beta + 0.01, max_value=1.0))
    return EpsilonRange(beta, alpha)


@pytest.mark.parametrize("rng, a, b", [
    ((0.0, 1.0), -4 / 3, 4 / 3),
    ((0.75, 1.0), -5 / 24, 13 / 192),
    ((0.0, 0.5), -2 / 3, 11 / 12),
])
def test_coefficients_known_ranges(rng, a, b):
    coeffs = coefficients(rng)
    assert coeffs.a == pytest.approx(a, abs=1e-15)
    assert coeffs.b == pytest.approx(b, abs=1e-15)
    expanded = coefficients_expanded(rng)
    assert expanded[0] == pytest.approx(a, abs=1e-14)
    assert expanded[1] == pytest.approx(b, abs=1e-14)


def test_ratio_for_large_range():
    assert 1 + coefficients((0.75, 1.0)).ratio == pytest.approx(-27 / 13, abs=1e-14)
    assert coefficients((0.0, 0.5)).ratio == pytest.approx(-8 / 11, abs=1e-14)


def test_avg_deviation_closed_form_points():
    grover = PhaseShifts(math.pi / 3, math.pi / 3)
    assert avg_deviation(grover, (0, 1)) == pytest.approx(0.25, abs=1e-14)
    assert avg_deviation_grover((0, 1)) == 0.25
    assert avg_deviation(PhaseShifts(0, 0), (0.2, 0.8)) == pytest.approx(0.5, abs=1e-15)
    assert avg_deviation(PhaseShifts(1.1, 2.0), (0.6, 0.9)) == \
        pytest.approx(numeric_avg_deviation(PhaseShifts(1.1, 2.0), (0.6, 0.9)), abs=1e-8)


def test_numeric_avg_deviation():
    assert numeric_avg_deviation(PhaseShifts(math.pi / 3, math.pi / 3), (0, 1), 1000) == \
        pytest.approx(0.25, abs=1e-10)
    assert numeric_avg_deviation(PhaseShifts(0, 0), (0.2, 0.8), 100) == pytest.approx(0.5, abs=1e-12)
    shifts = PhaseShifts(2.7, 0.3)
    assert numeric_avg_deviation(shifts, (0.75, 1), 2000) == \
        pytest.approx(avg_deviation(shifts, (0.75, 1)), abs=1e-9)


@pytest.mark.parametrize("subdivisions", [0, 3, 7])
def test_numeric_avg_deviation_rejects_bad_subdivisions(subdivisions):
    with pytest.raises(ValidationError):
        numeric_avg_deviation(PhaseShifts(1.0, 1.0), (0, 1), subdivisions)


@settings(max_examples=100, deadline=None)
@given(theta=st.floats(0.0, math.pi), phi=st.floats(0.0, math.pi), rng=ranges())
def test_closed_form_matches_simpson(theta, phi, rng):
    shifts = PhaseShifts(theta, phi)
    assert abs(avg_deviation(shifts, rng) - numeric_avg_deviation(shifts, rng, 200)) <= 1e-8


def test_partials():
    assert partial_theta(PhaseShifts(1.3, 0.0), (0.1, 0.7)) == 0.0
    assert partial_phi(PhaseShifts(0.0, 1.3), (0.1, 0.7)) == 0.0
    # stationary on the diagonal at theta* = pi/2 for (0, 1)
    assert partial_theta(PhaseShifts(math.pi / 2, math.pi / 2), (0, 1)) == pytest.approx(0.0, abs=1e-12)
    assert partial_phi(PhaseShifts(math.pi / 2, math.pi / 2), (0, 1)) == pytest.approx(0.0, abs=1e-12)


def test_partials_match_finite_differences():
    rng, step = (0.5, 1.0), 1e-6
    theta, phi = 1.2, 0.7
    d_theta = (avg_deviation(PhaseShifts(theta + step, phi), rng)
               - avg_deviation(PhaseShifts(theta - step, phi), rng)) / (2 * step)
    d_phi = (avg_deviation(PhaseShifts(theta, phi + step), rng)
             - avg_deviation(PhaseShifts(theta, phi - step), rng)) / (2 * step)
    assert partial_theta(PhaseShifts(theta, phi), rng) == pytest.approx(d_theta, abs=1e-6)
    assert partial_phi(PhaseShifts(theta, phi), rng) == pytest.approx(d_phi, abs=1e-6)


def test_equal_shift_average():
    for theta in np.linspace(0.0, math.pi, 1000):
        assert abs(avg_deviation_equal(theta, (0, 1)) - (math.cos(theta) ** 2 / 3 + 1 / 6)) <= 1e-14
    assert avg_deviation_equal(math.pi, (0.75, 1)) == pytest.approx(5 / 16, abs=1e-14)
    assert avg_deviation_equal(0.0, (0.3, 0.6)) == pytest.approx(0.45, abs=1e-15)


def test_completed_square_matches_equal_form():
    for rng in ((0, 1), (0.75, 1), (0, 0.5), (0.2, 0.4)):
        for theta in np.linspace(0.0, math.pi, 50):
            assert avg_deviation_completed_square(theta, rng) == \
                pytest.approx(avg_deviation_equal(theta, rng), abs=1e-12)


@pytest.mark.parametrize("rng, theta_star, min_value, case_label", [
    ((0.0, 1.0), math.pi / 2, 1 / 6, INTERIOR_CASE),
    ((0.75, 1.0), math.pi, 5 / 16, BOUNDARY_CASE),
    ((0.0, 0.5), math.acos(3 / 11), 1 / 132, INTERIOR_CASE),
])
def test_minimizer_known_ranges(rng, theta_star, min_value, case_label):
    report = minimize_avg_deviation(rng)
    assert report.theta_star == pytest.approx(theta_star, abs=1e-12)
    assert report.phi_star == report.theta_star
    assert report.min_value == pytest.approx(min_value, abs=1e-12)
    assert report.case_label == case_label
    assert report.is_equal_shift
    assert report.corner_value == pytest.approx(sum(rng) / 2)
    assert report.min_value <= report.grover_value
    assert theta_star_in_expected_interval(rng, report)
    assert set(report.to_dict()) >= {"theta_star", "min_value", "case_label"}


def test_minimizer_agrees_with_grid_search():
    rng = EpsilonRange(0.0, 0.5)
    report = minimize_avg_deviation(rng)
    found = confirm_global_minimum(rng, 301)
    assert found.value >= report.min_value - 1e-12
    assert found.value - report.min_value < 1e-3
    assert abs(found.theta - report.theta_star) < 0.02
    assert abs(found.phi - report.theta_star) < 0.02
    assert found.grid_points == 301 * 301


@settings(max_examples=30, deadline=None)
@given(rng=ranges())
def test_minimizer_is_global(rng):
    report = minimize_avg_deviation(rng)
    found = confirm_global_minimum(rng, 60)
    assert found.value >= report.min_value - 1e-9
    assert theta_star_in_expected_interval(rng, report)


def test_avg_grid_matches_scalar():
    theta = np.array([0.3, 1.4, 2.9])
    phi = np.array([2.0, 0.1, 1.5])
    values = avg_deviation_grid(theta, phi, (0.2, 0.9))
    for t, p, v in zip(theta, phi, values):
        assert v == pytest.approx(avg_deviation(PhaseShifts(t, p), (0.2, 0.9)), abs=1e-15)


def test_appendix_properties_full_range():
    report = appendix_properties((0, 1))
    assert report.all_passed
    assert report.checks["A/B<=-1"].applicable
    assert report.checks["avg<=midpoint"].applicable


def test_appendix_properties_small_range():
    report = appendix_properties((0, 0.5))
    assert report.all_passed
    assert not report.checks["A/B<=-1"].applicable
    assert report.checks["A/B<-1/2"].passed
    assert report.to_dict()["checks"]["B>0"]["passed"]


def test_appendix_factorization_residual():
    check = appendix_properties((0.9, 1.0)).checks["A+B factorization"]
    assert check.passed
    assert check.residual <= 1e-14


if __name__ == "__main__":
    pytest.main([__file__])
