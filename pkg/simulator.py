"""
Dense statevector oracle for the fixed-point search step

Builds the selective phase operators, applies U Rs U+ Rt U to the start state
and measures the deviation directly, independently of the closed forms.
The start state |s> and target |t> are computational basis states.
"""
import math
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import qr

from config import get_simulator_config
from core import PhaseShifts, as_epsilon
from deviation import deviation_grid
from error_handler import SimulationError, ValidationError

logger = logging.getLogger(__name__)

# Type aliases; both are plain complex numpy arrays
StateVector = np.ndarray
UnitaryMatrix = np.ndarray

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class RecursionTrace:
    """
    Deviation per recursion level

    Attributes:
        levels: (m, measured deviation) pairs from matrix composition
        predicted: deviation from iterating the closed-form map
        clamped: True if any value fell below the underflow floor and was set to 0
    """
    levels: Tuple[Tuple[int, float], ...]
    predicted: Tuple[float, ...]
    clamped: bool = False

    @property
    def measured(self) -> Tuple[float, ...]:
        return tuple(value for _, value in self.levels)

    def max_residual(self) -> float:
        return max(abs(m - p) for m, p in zip(self.measured, self.predicted))


def check_unitary(u: UnitaryMatrix, tolerance: Optional[float] = None) -> float:
    """
    Largest entrywise deviation of U+U from the identity

    Raises:
        SimulationError: not square, or outside tolerance when one is given
    """
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise SimulationError(f"unitary must be a square matrix, got shape {u.shape}")
    residual = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if tolerance is not None and residual > tolerance:
        raise SimulationError(f"matrix is not unitary: max |U+U - I| = {residual}")
    return residual


def _check_index(index: int, dim: int, name: str) -> int:
    if not 0 <= index < dim:
        raise SimulationError(f"{name}={index} out of range for dimension {dim}")
    return int(index)


def basis_state(index: int, dim: int) -> StateVector:
    _check_index(index, dim, "index")
    state = np.zeros(dim, dtype=complex)
    state[index] = 1.0
    return state


def selective_phase_operator(target_index: int, phase: float, dim: int) -> UnitaryMatrix:
    """I - (1 - e^{i phase}) |t><t| for a basis state |t>"""
    _check_index(target_index, dim, "target_index")
    diagonal = np.ones(dim, dtype=complex)
    diagonal[target_index] = np.exp(1j * phase)
    return np.diag(diagonal)


def state_phase_operator(state: StateVector, phase: float) -> UnitaryMatrix:
    """I - (1 - e^{i phase}) |psi><psi| for an arbitrary unit vector"""
    state = np.asarray(state, dtype=complex)
    return np.eye(state.shape[0], dtype=complex) - (1 - np.exp(1j * phase)) * np.outer(state, state.conj())


def _check_step_inputs(u: UnitaryMatrix, s_index: int, t_index: int) -> int:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise SimulationError(f"dimension mismatch: unitary has shape {u.shape}")
    dim = u.shape[0]
    _check_index(s_index, dim, "s_index")
    _check_index(t_index, dim, "t_index")
    if s_index == t_index:
        raise SimulationError("start and target indices must differ")
    return dim


def fixed_point_operator(u: UnitaryMatrix, s_index: int, t_index: int,
                         shifts: PhaseShifts) -> UnitaryMatrix:
    """The composed operator U Rs U+ Rt U"""
    dim = _check_step_inputs(u, s_index, t_index)
    r_s = selective_phase_operator(s_index, shifts.phi, dim)
    r_t = selective_phase_operator(t_index, shifts.theta, dim)
    return u @ r_s @ u.conj().T @ r_t @ u


def fixed_point_step(u: UnitaryMatrix, s_index: int, t_index: int,
                     shifts: PhaseShifts) -> StateVector:
    """U Rs U+ Rt U |s>, applied right to left to the vector"""
    dim = _check_step_inputs(u, s_index, t_index)
    state = u @ basis_state(s_index, dim)
    state = selective_phase_operator(t_index, shifts.theta, dim) @ state
    state = u.conj().T @ state
    state = selective_phase_operator(s_index, shifts.phi, dim) @ state
    return u @ state


def measure_deviation(state: StateVector, t_index: int) -> float:
    """
    Squared norm of the component of a unit state orthogonal to |t>

    Raises:
        SimulationError: the state is not normalized
    """
    state = np.asarray(state)
    _check_index(t_index, state.shape[0], "t_index")
    probabilities = np.abs(state) ** 2
    norm = float(np.sum(probabilities))
    if abs(norm - 1) > NORM_TOLERANCE:
        raise SimulationError(f"state is not normalized: norm^2 = {norm}")
    orthogonal = float(np.sum(np.delete(probabilities, t_index)))
    return min(1.0, max(0.0, orthogonal))


def overlap_epsilon(u: UnitaryMatrix, s_index: int, t_index: int) -> float:
    """epsilon = 1 - |<t|U|s>|^2"""
    return 1.0 - abs(complex(np.asarray(u)[t_index, s_index])) ** 2


def _haar_orthonormalize(z: np.ndarray) -> UnitaryMatrix:
    q, r = qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _finish_unitary(u: UnitaryMatrix) -> UnitaryMatrix:
    tolerance = get_simulator_config()["unitarity_tolerance"]
    if check_unitary(u) > tolerance:
        logger.warning("unitarity outside tolerance after QR, re-orthonormalizing once")
        u = _haar_orthonormalize(u)
        check_unitary(u, tolerance)
    return u


def _ginibre(rng: np.random.Generator, dim: int) -> np.ndarray:
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def random_unitary(dim: int, seed=None) -> UnitaryMatrix:
    """
    Haar-random unitary from a seeded complex Gaussian matrix

    Raises:
        ValidationError: dim < 2
    """
    if dim < 2:
        raise ValidationError(f"dimension must be at least 2, got {dim}", parameter="--dim")
    rng = np.random.default_rng(seed)
    return _finish_unitary(_haar_orthonormalize(_ginibre(rng, dim)))


def prescribed_overlap_unitary(dim: int, overlap_magnitude: float, seed=None,
                               s_index: int = 0, t_index: Optional[int] = None) -> UnitaryMatrix:
    """
    Unitary with |<t|U|s>| equal to the given magnitude

    U|s> = a|t> + sqrt(1 - a^2)|w> for a random unit w orthogonal to |t>; the
    remaining columns are a random orthonormal completion.

    Raises:
        ValidationError: dim < 2 or magnitude outside [0, 1]
    """
    if dim < 2:
        raise ValidationError(f"dimension must be at least 2, got {dim}", parameter="--dim")
    if not 0.0 <= overlap_magnitude <= 1.0:
        raise ValidationError(f"overlap magnitude must lie in [0, 1], got {overlap_magnitude}",
                              parameter="--overlap")
    t_index = dim - 1 if t_index is None else t_index
    _check_index(s_index, dim, "s_index")
    _check_index(t_index, dim, "t_index")

    rng = np.random.default_rng(seed)
    w = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    w[t_index] = 0.0
    w /= np.linalg.norm(w)

    image = math.sqrt(1.0 - overlap_magnitude ** 2) * w
    image[t_index] = overlap_magnitude

    z = _ginibre(rng, dim)
    z[:, 0] = image
    u = _haar_orthonormalize(z)
    u[:, 0] = image
    if s_index != 0:
        u[:, [0, s_index]] = u[:, [s_index, 0]]

    return _finish_unitary(u)


def unitary_for_epsilon(dim: int, eps, seed=None, s_index: int = 0,
                        t_index: Optional[int] = None) -> UnitaryMatrix:
    """Unitary whose single-step failure probability is exactly eps"""
    eps = as_epsilon(eps)
    return prescribed_overlap_unitary(dim, math.sqrt(eps.overlap), seed, s_index, t_index)


def _clamp(value: float, floor: float) -> Tuple[float, bool]:
    if value < floor:
        return 0.0, value != 0.0
    return value, False


def iterate_deviation_map(shifts: PhaseShifts, eps, depth: int) -> Tuple[Tuple[float, ...], bool]:
    """
    Iterate eps_{m+1} = D(theta, phi; eps_m) from the closed form

    Returns:
        tuple: (deviations for levels 0..depth, clamped flag)
    """
    if depth < 0:
        raise ValidationError(f"depth must be >= 0, got {depth}", parameter="--depth")
    floor = get_simulator_config()["underflow_floor"]
    values = [as_epsilon(eps).value]
    clamped = False
    for _ in range(depth):
        value, hit = _clamp(float(deviation_grid(shifts.theta, shifts.phi, values[-1])), floor)
        clamped = clamped or hit
        values.append(value)
    return tuple(values), clamped


def recursion_trace(u: UnitaryMatrix, s_index: int, t_index: int, shifts: PhaseShifts,
                    depth: int) -> RecursionTrace:
    """
    Compose U_{m+1} = U_m Rs U_m+ Rt U_m and record the deviation at each level

    Raises:
        ValidationError: negative depth
        SimulationError: dimension or depth above the configured caps
    """
    config = get_simulator_config()
    dim = _check_step_inputs(u, s_index, t_index)
    if depth < 0:
        raise ValidationError(f"depth must be >= 0, got {depth}", parameter="--depth")
    if dim > config["max_dim"]:
        raise SimulationError(f"dimension {dim} exceeds the recursion cap {config['max_dim']}")
    if depth > config["max_depth"]:
        raise SimulationError(f"depth {depth} exceeds the recursion cap {config['max_depth']}")

    floor = config["underflow_floor"]
    current = np.asarray(u, dtype=complex)
    measured, clamped = _clamp(measure_deviation(current[:, s_index], t_index), floor)
    levels = [(0, measured)]

    for level in range(1, depth + 1):
        current = fixed_point_operator(current, s_index, t_index, shifts)
        measured, hit = _clamp(measure_deviation(current[:, s_index], t_index), floor)
        clamped = clamped or hit
        levels.append((level, measured))

    predicted, predicted_clamped = iterate_deviation_map(shifts, levels[0][1], depth)
    if clamped or predicted_clamped:
        logger.warning(f"deviation fell below {floor} and was clamped to 0")

    return RecursionTrace(levels=tuple(levels), predicted=predicted,
                          clamped=clamped or predicted_clamped)
