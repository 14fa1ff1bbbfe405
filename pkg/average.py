"""
Average deviation over an epsilon range and its minimization

Coefficients A and B are evaluated through their factored forms
A = 4/3 (alpha - beta) C and B = 4/3 (alpha - beta) D', which keeps the
average accurate when the range is narrow. The expanded definitions are kept
in coefficients_expanded for cross-checking.
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy.integrate import simpson

from config import AVERAGE_CONFIG, NUMERIC_CONFIG
from core import PhaseShifts, EpsilonRange, as_range
from deviation import deviation_grid
from error_handler import ValidationError

logger = logging.getLogger(__name__)

INTERIOR_CASE = "interior-arccos"
BOUNDARY_CASE = "boundary-pi"

# tolerance applied to A/B <= -1 at alpha + beta == 1, where equality holds exactly
RATIO_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AvgCoefficients:
    """Coefficients A (a) and B (b) of the average-deviation closed form"""
    a: float
    b: float
    range: EpsilonRange
    a_scaled: float = field(repr=False, default=0.0)  # A / (alpha - beta)
    b_scaled: float = field(repr=False, default=0.0)  # B / (alpha - beta)

    @property
    def ratio(self) -> float:
        return self.a / self.b


@dataclass(frozen=True)
class MinimizerReport:
    theta_star: float
    phi_star: float
    min_value: float
    case_label: str
    is_equal_shift: bool
    corner_value: float
    pi_value: float
    grover_value: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "theta_star": self.theta_star,
            "phi_star": self.phi_star,
            "min_value": self.min_value,
            "case_label": self.case_label,
            "is_equal_shift": self.is_equal_shift,
            "corner_value": self.corner_value,
            "pi_value": self.pi_value,
            "grover_value": self.grover_value
        }


@dataclass(frozen=True)
class GridMinimum:
    theta: float
    phi: float
    value: float
    grid_points: int


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    applicable: bool
    passed: bool
    residual: float = 0.0


@dataclass
class BoundsReport:
    range: EpsilonRange
    checks: Dict[str, PropertyCheck]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks.values() if check.applicable)

    def to_dict(self):
        return {
            "beta": self.range.beta,
            "alpha": self.range.alpha,
            "checks": {name: {"applicable": c.applicable, "passed": c.passed, "residual": c.residual}
                       for name, c in self.checks.items()}
        }


def _c_factor(beta: float, alpha: float) -> float:
    return 2 * (alpha ** 2 + alpha * beta + beta ** 2) - 3 * (alpha + beta)


def _d_factor(beta: float, alpha: float) -> float:
    return (3 * alpha ** 3 - 8 * alpha ** 2 + 3 * beta * alpha ** 2 + 6 * alpha
            - 8 * beta * alpha + 3 * beta ** 2 * alpha + 6 * beta - 8 * beta ** 2 + 3 * beta ** 3)


def coefficients(rng) -> AvgCoefficients:
    """A and B for the range (beta, alpha)"""
    rng = as_range(rng)
    a_scaled = 4 / 3 * _c_factor(rng.beta, rng.alpha)
    b_scaled = 4 / 3 * _d_factor(rng.beta, rng.alpha)
    return AvgCoefficients(a=a_scaled * rng.width, b=b_scaled * rng.width, range=rng,
                           a_scaled=a_scaled, b_scaled=b_scaled)


def coefficients_expanded(rng):
    """A and B straight from their integral definitions, as a tuple"""
    rng = as_range(rng)
    alpha, beta = rng.alpha, rng.beta
    a = -4 / 3 * (alpha ** 2 * (3 - 2 * alpha) - beta ** 2 * (3 - 2 * beta))
    b = -4 / 3 * ((1 - alpha) ** 3 * (3 * alpha + 1) - (1 - beta) ** 3 * (3 * beta + 1))
    return a, b


def _avg_kernel(theta, phi, coeffs: AvgCoefficients):
    s_theta = np.sin(theta / 2)
    s_phi = np.sin(phi / 2)
    return (coeffs.range.midpoint
            + coeffs.a_scaled * s_theta * s_phi * np.cos((theta - phi) / 2)
            + coeffs.b_scaled * s_theta ** 2 * s_phi ** 2)


def avg_deviation_grid(theta, phi, rng):
    """Vectorized average deviation over numpy arrays; no validation"""
    return _avg_kernel(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float), coefficients(rng))


def avg_deviation(shifts: PhaseShifts, rng) -> float:
    """Mean of D(theta, phi) for epsilon uniform on (beta, alpha), closed form"""
    return float(_avg_kernel(shifts.theta, shifts.phi, coefficients(rng)))


def numeric_avg_deviation(shifts: PhaseShifts, rng, subdivisions: Optional[int] = None) -> float:
    """
    Composite Simpson estimate of the average deviation

    Args:
        shifts: phase shifts
        rng: epsilon range
        subdivisions: even number of panels, at least 2

    Raises:
        ValidationError: odd or too small subdivision count
    """
    rng = as_range(rng)
    if subdivisions is None:
        subdivisions = AVERAGE_CONFIG["simpson_subdivisions"]
    if isinstance(subdivisions, bool) or int(subdivisions) != subdivisions \
            or subdivisions < 2 or subdivisions % 2:
        raise ValidationError(f"subdivisions must be an even integer >= 2, got {subdivisions}",
                              parameter="--subdivisions")

    eps = np.linspace(rng.beta, rng.alpha, int(subdivisions) + 1)
    values = deviation_grid(shifts.theta, shifts.phi, eps)
    return float(simpson(values, x=eps) / rng.width)


def partial_theta(shifts: PhaseShifts, rng) -> float:
    """Partial derivative of the average deviation with respect to theta"""
    coeffs = coefficients(rng)
    theta, phi = shifts.theta, shifts.phi
    return 0.5 * math.sin(phi / 2) * (coeffs.a_scaled * math.cos((2 * theta - phi) / 2)
                                      + coeffs.b_scaled * math.sin(theta) * math.sin(phi / 2))


def partial_phi(shifts: PhaseShifts, rng) -> float:
    """Partial derivative with respect to phi; the theta formula with the roles exchanged"""
    return partial_theta(shifts.swapped(), rng)


def avg_deviation_equal(theta: float, rng) -> float:
    """Average deviation at equal shifts: ((a^2 - b^2)/2 + A sin^2 + B sin^4) / (alpha - beta)"""
    theta = PhaseShifts(theta, theta).theta
    coeffs = coefficients(rng)
    half_sine_sq = math.sin(theta / 2) ** 2
    return (coeffs.range.midpoint + coeffs.a_scaled * half_sine_sq
            + coeffs.b_scaled * half_sine_sq ** 2)


def avg_deviation_completed_square(theta: float, rng) -> float:
    """Equal-shift average deviation written as a completed square in cos(theta)"""
    theta = PhaseShifts(theta, theta).theta
    coeffs = coefficients(rng)
    shift = 1 + coeffs.ratio - math.cos(theta)
    return (coeffs.b_scaled / 4 * shift ** 2 + coeffs.range.midpoint
            - coeffs.a_scaled * coeffs.ratio / 4)


def avg_deviation_grover(rng) -> float:
    """Average deviation at theta = phi = pi/3: (alpha + beta)(alpha^2 + beta^2) / 4"""
    rng = as_range(rng)
    return (rng.alpha + rng.beta) * (rng.alpha ** 2 + rng.beta ** 2) / 4


def _pi_value(rng: EpsilonRange) -> float:
    alpha, beta = rng.alpha, rng.beta
    return rng.midpoint + 4 * (alpha - 1 + beta) * (alpha ** 2 - alpha + beta ** 2 - beta)


def minimize_avg_deviation(rng) -> MinimizerReport:
    """
    Equal phase shift with the smallest average deviation

    A/B >= -2 gives theta* = arccos(1 + A/B); otherwise the average decreases
    all the way to theta* = pi. The boundary A/B = -2 falls in the first
    branch, where arccos(-1) = pi agrees with the second.
    """
    rng = as_range(rng)
    coeffs = coefficients(rng)
    ratio = coeffs.ratio
    pi_value = _pi_value(rng)

    if ratio >= -2:
        theta_star = math.acos(min(1.0, max(-1.0, 1 + ratio)))
        min_value = rng.midpoint - coeffs.a_scaled * ratio / 4
        case_label = INTERIOR_CASE
    else:
        theta_star = math.pi
        min_value = pi_value
        case_label = BOUNDARY_CASE

    _log_location(rng, ratio, theta_star)
    logger.debug(f"minimizer for {rng.as_tuple()}: theta*={theta_star}, min={min_value}, case={case_label}")

    return MinimizerReport(theta_star=theta_star, phi_star=theta_star, min_value=min_value,
                           case_label=case_label, is_equal_shift=True,
                           corner_value=rng.midpoint, pi_value=pi_value,
                           grover_value=avg_deviation_grover(rng))


def _log_location(rng: EpsilonRange, ratio: float, theta_star: float):
    tolerance = NUMERIC_CONFIG["interval_tolerance"]
    if rng.alpha + rng.beta < 1:
        for edge in (math.pi / 3, math.pi / 2):
            if abs(theta_star - edge) < tolerance:
                logger.warning(f"theta*={theta_star} within {tolerance} of interval edge {edge} "
                               f"for range {rng.as_tuple()}")
    elif -2 <= ratio <= -1 and not math.pi / 2 - tolerance <= theta_star <= math.pi + tolerance:
        logger.warning(f"theta*={theta_star} outside [pi/2, pi] for ratio {ratio}")


def theta_star_in_expected_interval(rng, report: Optional[MinimizerReport] = None) -> bool:
    """Whether theta* lies where the case analysis places it"""
    rng = as_range(rng)
    report = report or minimize_avg_deviation(rng)
    tolerance = NUMERIC_CONFIG["interval_tolerance"]
    ratio = coefficients(rng).ratio

    if rng.alpha + rng.beta < 1:
        return math.pi / 3 - tolerance < report.theta_star < math.pi / 2 + tolerance
    if ratio >= -2:
        return math.pi / 2 - tolerance <= report.theta_star <= math.pi + tolerance
    return report.theta_star == math.pi


def confirm_global_minimum(rng, grid: Optional[int] = None) -> GridMinimum:
    """
    Dense grid search of the average deviation over [0, pi]^2

    Ties resolve to the smaller theta, then the smaller phi.
    """
    rng = as_range(rng)
    grid = grid or AVERAGE_CONFIG["confirm_grid"]
    axis = np.linspace(0.0, math.pi, grid)
    theta, phi = np.meshgrid(axis, axis, indexing="ij")
    values = avg_deviation_grid(theta, phi, rng)

    flat = int(np.argmin(values))
    i, j = np.unravel_index(flat, values.shape)
    found = GridMinimum(theta=float(axis[i]), phi=float(axis[j]), value=float(values[i, j]),
                        grid_points=grid * grid)

    closed_form = minimize_avg_deviation(rng).min_value
    if found.value < closed_form - NUMERIC_CONFIG["interval_tolerance"]:
        logger.warning(f"grid point ({found.theta}, {found.phi}) beats the closed-form minimum "
                       f"{closed_form} for range {rng.as_tuple()}")
    return found


def appendix_properties(rng, grid: int = 100) -> BoundsReport:
    """
    Evaluate the sign and bound facts about A, B and the average deviation

    Args:
        rng: epsilon range
        grid: points per axis of the (theta, phi) sample used for the bound

    Returns:
        BoundsReport: one PropertyCheck per fact
    """
    rng = as_range(rng)
    coeffs = coefficients(rng)
    alpha, beta = rng.alpha, rng.beta
    large_range = alpha + beta >= 1

    factored = 4 * (alpha - 1 + beta) * (alpha - beta) * (alpha ** 2 - alpha + beta ** 2 - beta)
    identity_residual = abs(coeffs.a + coeffs.b - factored)

    axis = np.linspace(0.0, math.pi, grid)
    theta, phi = np.meshgrid(axis, axis, indexing="ij")
    bound_excess = float(np.max(avg_deviation_grid(theta, phi, rng)) - rng.midpoint)

    checks = {
        "B>0": PropertyCheck("B>0", True, coeffs.b > 0, coeffs.b),
        "A<0": PropertyCheck("A<0", True, coeffs.a < 0, coeffs.a),
        "A/B<-1/2": PropertyCheck("A/B<-1/2", True, coeffs.ratio < -0.5, coeffs.ratio),
        "A/B<=-1": PropertyCheck("A/B<=-1", large_range,
                                 (not large_range) or coeffs.ratio <= -1 + RATIO_TOLERANCE, coeffs.ratio),
        "avg<=midpoint": PropertyCheck("avg<=midpoint", large_range,
                                       (not large_range) or bound_excess <= 1e-12, bound_excess),
        "A+B factorization": PropertyCheck("A+B factorization", True, identity_residual <= 1e-13,
                                           identity_residual)
    }
    return BoundsReport(range=rng, checks=checks)
