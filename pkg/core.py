"""
Shared domain types and validation for phase shifts and the epsilon parameter
"""
import math
import logging
from dataclasses import dataclass

from config import ERROR_MESSAGES
from error_handler import ValidationError

logger = logging.getLogger(__name__)

PI = math.pi
GROVER_PHASE = math.pi / 3


def _check_finite(value, parameter: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(ERROR_MESSAGES["non_finite"].format(parameter=parameter, value=value),
                              parameter=parameter)
    if not math.isfinite(value):
        raise ValidationError(ERROR_MESSAGES["non_finite"].format(parameter=parameter, value=value),
                              parameter=parameter)
    return value


def _check_interval(value, low: float, high: float, parameter: str) -> float:
    value = _check_finite(value, parameter)
    if not low <= value <= high:
        raise ValidationError(
            ERROR_MESSAGES["out_of_range"].format(parameter=parameter, low=low, high=high, value=value),
            parameter=parameter
        )
    return value


@dataclass(frozen=True)
class PhaseShifts:
    """Selective phase shifts in radians: theta on the target, phi on the start state"""
    theta: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_interval(self.theta, 0.0, PI, "--theta"))
        object.__setattr__(self, "phi", _check_interval(self.phi, 0.0, PI, "--phi"))

    @property
    def is_equal(self) -> bool:
        return self.theta == self.phi

    def swapped(self) -> "PhaseShifts":
        return PhaseShifts(self.phi, self.theta)


@dataclass(frozen=True)
class Epsilon:
    """Failure probability of one application of U, 1 - |U_ts|^2"""
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", _check_interval(self.value, 0.0, 1.0, "--epsilon"))

    @property
    def overlap(self) -> float:
        """|U_ts|^2"""
        return 1.0 - self.value

    @property
    def is_boundary(self) -> bool:
        return self.value in (0.0, 1.0)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class EpsilonRange:
    """Interval (beta, alpha) over which epsilon is averaged"""
    beta: float
    alpha: float

    def __post_init__(self):
        beta = _check_interval(self.beta, 0.0, 1.0, "--beta")
        alpha = _check_interval(self.alpha, 0.0, 1.0, "--alpha")
        if not beta < alpha:
            raise ValidationError(ERROR_MESSAGES["degenerate_range"].format(beta=beta, alpha=alpha),
                                  parameter="--beta")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", alpha)

    @property
    def width(self) -> float:
        return self.alpha - self.beta

    @property
    def midpoint(self) -> float:
        return (self.alpha + self.beta) / 2

    def as_tuple(self):
        return self.beta, self.alpha


def validate_phase_shifts(theta, phi) -> PhaseShifts:
    """Build validated phase shifts, raising ValidationError on bad input"""
    return PhaseShifts(theta, phi)


def validate_epsilon(value) -> Epsilon:
    eps = Epsilon(value)
    if eps.is_boundary:
        logger.debug(f"epsilon={eps.value} is a boundary case")
    return eps


def validate_epsilon_range(beta, alpha) -> EpsilonRange:
    """
    Build a validated epsilon range

    Raises:
        ValidationError: outside [0, 1], non-finite, or beta >= alpha
    """
    return EpsilonRange(beta, alpha)


def as_epsilon(eps) -> Epsilon:
    """Accept either an Epsilon or a bare number"""
    return eps if isinstance(eps, Epsilon) else Epsilon(eps)


def as_range(rng) -> EpsilonRange:
    return rng if isinstance(rng, EpsilonRange) else EpsilonRange(*rng)
