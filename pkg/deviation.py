"""
Closed-form single-step deviation of the fixed-point search step U Rs U+ Rt U

All formulas take the target phase theta, the start phase phi and
epsilon = 1 - |U_ts|^2. The expanded trigonometric form is the canonical
evaluation path; the complex and sum-of-squares forms exist so that the
three can be checked against each other.
"""
import math
import logging

import numpy as np
from scipy.optimize import least_squares

from config import ERROR_MESSAGES
from core import PhaseShifts, Epsilon, as_epsilon, validate_epsilon
from error_handler import DomainError

logger = logging.getLogger(__name__)

# D(theta, theta) vanishes only for epsilon up to this value
ZERO_PHASE_EPSILON_LIMIT = 0.75


def _trig_kernel(theta, phi, eps):
    """Expanded trigonometric deviation; works on floats and numpy arrays alike"""
    # the sine product is formed first so that swapping theta and phi is exact
    sines = np.sin(theta / 2) * np.sin(phi / 2)
    overlap = 1 - eps
    return eps * (1
                  - 8 * overlap * sines * np.cos((theta - phi) / 2)
                  + 16 * overlap ** 2 * sines ** 2)


def _complex_kernel(theta, phi, eps):
    e_theta = np.exp(1j * theta)
    e_phi = np.exp(1j * phi)
    amplitude = e_phi + (1 - e_phi) * (1 - e_theta) * (1 - eps)
    return eps * np.abs(amplitude) ** 2


def _sum_of_squares_kernel(theta, phi, eps):
    half_diff = (theta - phi) / 2
    first = 4 * (1 - eps) * np.sin(theta / 2) * np.sin(phi / 2) - np.cos(half_diff)
    return eps * (first ** 2 + np.sin(half_diff) ** 2)


def _difference_kernel(theta, phi, eps):
    bracket = (2 * eps * np.sin((theta + phi) / 2) * np.sin(theta / 2)
               + np.cos((2 * theta + phi) / 2))
    return 8 * eps * (1 - eps) * np.sin(theta / 2) * np.sin((theta - phi) / 2) * bracket


def deviation_grid(theta, phi, eps):
    """Vectorized deviation for numpy arrays (broadcasting); no validation"""
    return _trig_kernel(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float),
                        np.asarray(eps, dtype=float))


def deviation_trig(shifts: PhaseShifts, eps) -> float:
    """Deviation D(theta, phi) from the expanded trigonometric form"""
    eps = as_epsilon(eps)
    return float(_trig_kernel(shifts.theta, shifts.phi, eps.value))


def deviation_complex(shifts: PhaseShifts, eps) -> float:
    """Deviation from eps * |e^{i phi} + (1 - e^{i phi})(1 - e^{i theta})(1 - eps)|^2"""
    eps = as_epsilon(eps)
    return float(_complex_kernel(shifts.theta, shifts.phi, eps.value))


def deviation_sum_of_squares(shifts: PhaseShifts, eps) -> float:
    """Deviation as eps times a sum of two squares; never negative"""
    eps = as_epsilon(eps)
    return float(_sum_of_squares_kernel(shifts.theta, shifts.phi, eps.value))


def deviation_equal(theta: float, eps) -> float:
    """Deviation for equal shifts: eps * (4 (1 - eps) sin^2(theta/2) - 1)^2"""
    theta = PhaseShifts(theta, theta).theta
    eps = as_epsilon(eps)
    inner = 4 * eps.overlap * math.sin(theta / 2) ** 2 - 1
    return eps.value * inner ** 2


def deviation_difference(shifts: PhaseShifts, eps) -> float:
    """D(theta, phi) - D(theta, theta) in factored form"""
    eps = as_epsilon(eps)
    return float(_difference_kernel(shifts.theta, shifts.phi, eps.value))


def deviation_difference_unreduced(shifts: PhaseShifts, eps) -> float:
    """D(theta, phi) - D(theta, theta) before the bracket is rewritten"""
    eps = as_epsilon(eps).value
    theta, phi = shifts.theta, shifts.phi
    bracket = eps * math.cos(phi / 2) + (1 - eps) * math.cos((2 * theta + phi) / 2)
    return 8 * eps * (1 - eps) * math.sin(theta / 2) * math.sin((theta - phi) / 2) * bracket


def zero_deviation_phase(eps) -> float:
    """
    Equal phase shift that makes the deviation vanish

    Args:
        eps: epsilon, at most 3/4

    Returns:
        float: theta = arccos(1 - 1 / (2 (1 - eps)))

    Raises:
        DomainError: eps > 3/4, where no real solution exists
    """
    eps = validate_epsilon(eps) if not isinstance(eps, Epsilon) else eps
    if eps.value > ZERO_PHASE_EPSILON_LIMIT:
        raise DomainError(ERROR_MESSAGES["no_zero_phase"].format(value=eps.value))

    cosine = 1 - 1 / (2 * eps.overlap)
    return math.acos(min(1.0, max(-1.0, cosine)))


def nearest_zero(eps, start: PhaseShifts) -> PhaseShifts:
    """
    Descend from start towards a zero of the deviation

    Runs bounded least squares on the two terms of the sum-of-squares form,
    so the point returned is a local minimizer that is not always a zero.

    Args:
        eps: epsilon
        start: initial phase shifts

    Returns:
        PhaseShifts: the point reached, inside [0, pi]^2
    """
    eps = as_epsilon(eps).value
    scale = math.sqrt(eps)

    def terms(x):
        half_diff = (x[0] - x[1]) / 2
        first = 4 * (1 - eps) * np.sin(x[0] / 2) * np.sin(x[1] / 2) - np.cos(half_diff)
        return scale * np.array([first, np.sin(half_diff)])

    solution = least_squares(terms, x0=[start.theta, start.phi], bounds=([0.0, 0.0], [math.pi, math.pi]),
                             xtol=1e-15, ftol=1e-15, gtol=1e-15)
    theta, phi = np.clip(solution.x, 0.0, math.pi)
    return PhaseShifts(float(theta), float(phi))


def result1_threshold(theta: float, phi: float) -> float:
    """
    Epsilon threshold -cos((2 theta + phi)/2) / (2 sin((theta + phi)/2) sin(theta/2))

    Raises:
        DomainError: the denominator vanishes (theta = 0, or theta = phi = pi)
    """
    denominator = 2 * math.sin((theta + phi) / 2) * math.sin(theta / 2)
    if denominator <= 0:
        raise DomainError(f"threshold undefined for theta={theta}, phi={phi}")
    return -math.cos((2 * theta + phi) / 2) / denominator


def result1_predicate(shifts: PhaseShifts, eps) -> bool:
    """
    True when the sufficient condition for D(theta, phi) < D(theta, theta) holds

    Either 0 < theta < phi and eps above the threshold, or 0 <= phi < theta
    and eps below it. All inequalities are strict, so ties return False.
    """
    eps = as_epsilon(eps).value
    theta, phi = shifts.theta, shifts.phi
    if not 0 < eps < 1 or shifts.is_equal:
        return False

    try:
        if 0 < theta < phi:
            return eps > result1_threshold(theta, phi)
        if 0 <= phi < theta:
            return eps < result1_threshold(theta, phi)
    except DomainError:
        # sin(theta/2) underflows to zero for subnormal theta
        return False
    return False


def result2_predicate(shifts: PhaseShifts) -> bool:
    """0 < theta < phi and 0 < 2 theta + phi < pi: smaller deviation for every eps in (0, 1)"""
    theta, phi = shifts.theta, shifts.phi
    return 0 < theta < phi and 0 < 2 * theta + phi < math.pi


def example1_threshold(phi: float) -> float:
    """Threshold for D(pi/3, phi) < D(pi/3, pi/3), pi/3 < phi < pi"""
    if not math.pi / 3 < phi < math.pi:
        raise DomainError(f"phi must lie in (pi/3, pi), got {phi}")
    return -math.cos(math.pi / 3 + phi / 2) / math.sin(math.pi / 6 + phi / 2)


def example2_threshold(theta: float) -> float:
    """
    Epsilon above which D(theta, pi/2) < D(theta, theta), from the direct reduction

    Args:
        theta: 0 < theta < pi/2

    Returns:
        float: 1 - (cos(theta/2) - sin(theta/2)) / (2 sin(theta/2) cos(theta));
        non-positive for theta <= pi/4, tends to 1/2 as theta -> pi/2
    """
    if not 0 < theta < math.pi / 2:
        raise DomainError(f"theta must lie in (0, pi/2), got {theta}")
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    return 1 - (c - s) / (2 * s * math.cos(theta))


def example2_result1_threshold(theta: float) -> float:
    """Same bound reached through the general threshold, pi/4 < theta < pi/2"""
    if not math.pi / 4 < theta < math.pi / 2:
        raise DomainError(f"theta must lie in (pi/4, pi/2), got {theta}")
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    return (math.sin(theta) - math.cos(theta)) / (2 * (s + c) * s)


def example2_difference(theta: float, eps) -> float:
    """D(theta, pi/2) - D(theta, theta) in the reduced single-bracket form"""
    eps = as_epsilon(eps).value
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    return 4 * eps * (1 - eps) * s * (s - c + 2 * (1 - eps) * s * math.cos(theta))
