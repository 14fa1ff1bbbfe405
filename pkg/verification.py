"""
Randomized property battery behind the verify command

Each property compares a closed form against an independent computation
(another closed form, Simpson integration, finite differences or the
statevector simulator) over seeded random inputs and records the worst
residual seen.
"""
import json
import math
import logging
from dataclasses import dataclass, asdict
from datetime import datetime
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

import average
import deviation
import simulator
from config import NUMERIC_CONFIG, AVERAGE_CONFIG, get_verify_config
from core import GROVER_PHASE, PhaseShifts, EpsilonRange
from error_handler import DomainError

logger = logging.getLogger(__name__)


@dataclass
class PropertyResult:
    name: str
    checked: int
    passed: int
    worst_residual: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.checked > 0 and self.passed == self.checked


@dataclass
class BatteryReport:
    seed: int
    samples: int
    results: List[PropertyResult]
    generated_at: str

    @property
    def all_passed(self) -> bool:
        return all(result.ok for result in self.results)

    @property
    def failed(self) -> List[str]:
        return [result.name for result in self.results if not result.ok]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(result) for result in self.results])
        frame["status"] = ["pass" if result.ok else "FAIL" for result in self.results]
        return frame

    def to_dict(self) -> Dict[str, object]:
        return {
            "generated_at": self.generated_at,
            "seed": self.seed,
            "samples": self.samples,
            "all_passed": self.all_passed,
            "properties": [dict(asdict(result), ok=result.ok) for result in self.results]
        }


class PropertyBattery:
    def __init__(self, samples: Optional[int] = None, seed: Optional[int] = None):
        config = get_verify_config()
        self.config = config
        self.samples = config["samples"] if samples is None else samples
        self.seed = config["seed"] if seed is None else seed
        self.rng = np.random.default_rng(self.seed)

    def _result(self, name: str, residuals, tolerance: float, flags=None) -> PropertyResult:
        """Build a result from per-case residuals, or explicit pass flags when given"""
        residuals = np.atleast_1d(np.asarray(residuals, dtype=float))
        if flags is None:
            flags = residuals <= tolerance
        flags = np.atleast_1d(np.asarray(flags, dtype=bool))
        worst = float(np.max(residuals)) if residuals.size else 0.0
        result = PropertyResult(name=name, checked=int(flags.size), passed=int(np.sum(flags)),
                                worst_residual=worst, tolerance=tolerance)
        log = logger.info if result.ok else logger.warning
        log(f"{name}: {result.passed}/{result.checked} passed, worst residual {worst:.3e}")
        return result

    def _shifts(self) -> PhaseShifts:
        theta, phi = self.rng.uniform(0.0, math.pi, 2)
        return PhaseShifts(theta, phi)

    def _range(self) -> EpsilonRange:
        beta, alpha = np.sort(self.rng.uniform(0.0, 1.0, 2))
        if beta == alpha:
            alpha = min(1.0, beta + 1e-3)
            beta = alpha - 1e-3
        return EpsilonRange(beta, alpha)

    def check_form_equivalence(self) -> PropertyResult:
        residuals = []
        for _ in range(self.samples):
            shifts, eps = self._shifts(), self.rng.uniform(0.0, 1.0)
            values = (deviation.deviation_trig(shifts, eps), deviation.deviation_complex(shifts, eps),
                      deviation.deviation_sum_of_squares(shifts, eps))
            residuals.append(max(values) - min(values))
        return self._result("form equivalence", residuals, NUMERIC_CONFIG["form_tolerance"])

    def check_symmetry_and_range(self) -> PropertyResult:
        residuals, flags = [], []
        for _ in range(self.samples):
            shifts, eps = self._shifts(), self.rng.uniform(0.0, 1.0)
            value = deviation.deviation_trig(shifts, eps)
            residual = abs(value - deviation.deviation_trig(shifts.swapped(), eps))
            residuals.append(residual)
            flags.append(residual <= 1e-15 and -1e-15 <= value <= 1 + 1e-12)
        return self._result("symmetry and range", residuals, 1e-15, flags)

    def check_grover_point(self) -> PropertyResult:
        shifts = PhaseShifts(GROVER_PHASE, GROVER_PHASE)
        residuals = [abs(deviation.deviation_trig(shifts, eps) - eps ** 3)
                     for eps in np.linspace(0.0, 1.0, 1000)]
        return self._result("grover point", residuals, NUMERIC_CONFIG["grover_tolerance"])

    def check_difference_identity(self) -> PropertyResult:
        residuals = []
        for _ in range(self.samples):
            shifts, eps = self._shifts(), self.rng.uniform(0.0, 1.0)
            direct = deviation.deviation_trig(shifts, eps) - deviation.deviation_equal(shifts.theta, eps)
            residuals.append(max(abs(deviation.deviation_difference(shifts, eps) - direct),
                                 abs(deviation.deviation_difference_unreduced(shifts, eps) - direct)))
        return self._result("difference identity", residuals, NUMERIC_CONFIG["form_tolerance"])

    def check_result_soundness(self) -> PropertyResult:
        residuals = []
        for _ in range(self.samples * 10):
            shifts, eps = self._shifts(), self.rng.uniform(0.0, 1.0)
            if deviation.result1_predicate(shifts, eps) or \
                    (deviation.result2_predicate(shifts) and 0 < eps < 1):
                residuals.append(max(0.0, deviation.deviation_difference(shifts, eps)))
        return self._result("result soundness", residuals, NUMERIC_CONFIG["result_slack"])

    def check_zero_deviation(self) -> PropertyResult:
        residuals = [deviation.deviation_equal(deviation.zero_deviation_phase(eps), eps)
                     for eps in np.linspace(0.75 / 100, 0.75, 100)]
        flags = [value <= 1e-24 for value in residuals]
        for eps in np.linspace(0.76, 1.0, 10):
            try:
                deviation.zero_deviation_phase(eps)
                flags.append(False)
            except DomainError:
                flags.append(True)
            residuals.append(0.0)
        return self._result("zero deviation", residuals, 1e-24, flags)

    def check_zero_characterization(self) -> PropertyResult:
        """Every point reached with deviation below zero_level sits on the zero phase"""
        level = NUMERIC_CONFIG["zero_level"]
        residuals = []
        for _ in range(max(20, min(self.samples // 10, 1000))):
            eps = self.rng.uniform(0.05, 0.75)
            cosine = 1 - 1 / (2 * (1 - eps))
            near = np.clip(deviation.zero_deviation_phase(eps) + self.rng.uniform(-1e-3, 1e-3, 2), 0.0, math.pi)
            for start in (self._shifts(), PhaseShifts(*near)):
                found = deviation.nearest_zero(eps, start)
                if deviation.deviation_sum_of_squares(found, eps) < level:
                    residuals.append(max(abs(found.theta - found.phi), abs(math.cos(found.theta) - cosine)))
        return self._result("zero characterization", residuals, NUMERIC_CONFIG["zero_location_tolerance"])

    def check_simpson_oracle(self) -> PropertyResult:
        subdivisions = AVERAGE_CONFIG["simpson_subdivisions"]
        residuals = []
        for _ in range(min(self.samples, 1000)):
            shifts, rng = self._shifts(), self._range()
            residuals.append(abs(average.avg_deviation(shifts, rng)
                                 - average.numeric_avg_deviation(shifts, rng, subdivisions)))
        return self._result("simpson oracle", residuals, NUMERIC_CONFIG["simpson_tolerance"])

    def check_derivatives(self) -> PropertyResult:
        step = NUMERIC_CONFIG["derivative_step"]
        residuals = []
        for _ in range(min(self.samples, 1000)):
            theta, phi = self.rng.uniform(10 * step, math.pi - 10 * step, 2)
            rng = self._range()
            shifts = PhaseShifts(theta, phi)
            d_theta = (average.avg_deviation(PhaseShifts(theta + step, phi), rng)
                       - average.avg_deviation(PhaseShifts(theta - step, phi), rng)) / (2 * step)
            d_phi = (average.avg_deviation(PhaseShifts(theta, phi + step), rng)
                     - average.avg_deviation(PhaseShifts(theta, phi - step), rng)) / (2 * step)
            residuals.append(max(abs(average.partial_theta(shifts, rng) - d_theta),
                                 abs(average.partial_phi(shifts, rng) - d_phi)))
        return self._result("derivatives", residuals, NUMERIC_CONFIG["derivative_tolerance"])

    def check_coefficient_bounds(self) -> List[PropertyResult]:
        grid = self.config["bounds_grid"]
        collected: Dict[str, list] = {}
        for _ in range(self.samples):
            report = average.appendix_properties(self._range(), grid)
            for name, check in report.checks.items():
                if check.applicable:
                    collected.setdefault(name, []).append(check)

        results = []
        for name, checks in collected.items():
            if name == "A+B factorization":
                residuals = [c.residual for c in checks]
            elif name == "avg<=midpoint":
                residuals = [max(0.0, c.residual) for c in checks]
            else:
                residuals = [0.0 for _ in checks]
            results.append(self._result(f"bounds {name}", residuals, 1e-13,
                                        [c.passed for c in checks]))
        return results

    def check_equal_phase_forms(self) -> PropertyResult:
        residuals = []
        for _ in range(self.samples):
            theta, rng = self.rng.uniform(0.0, math.pi), self._range()
            residuals.append(abs(average.avg_deviation_equal(theta, rng)
                                 - average.avg_deviation_completed_square(theta, rng)))
        return self._result("equal-phase forms", residuals, NUMERIC_CONFIG["form_tolerance"])

    def check_extreme_points(self) -> PropertyResult:
        residuals = []
        for _ in range(min(self.samples, 1000)):
            rng = self._range()
            for theta, phi in ((0.0, 0.0), (0.0, math.pi), (math.pi, 0.0)):
                residuals.append(abs(average.avg_deviation(PhaseShifts(theta, phi), rng) - rng.midpoint))
        return self._result("extreme points", residuals, 1e-14)

    def check_global_minimum(self) -> PropertyResult:
        tolerance = NUMERIC_CONFIG["interval_tolerance"]
        residuals, flags = [], []
        for _ in range(max(1, min(self.samples // 100, 100))):
            rng = self._range()
            report = average.minimize_avg_deviation(rng)
            found = average.confirm_global_minimum(rng)
            residuals.append(max(0.0, report.min_value - found.value))
            flags.append(found.value >= report.min_value - tolerance
                         and average.theta_star_in_expected_interval(rng, report))
        return self._result("global minimum", residuals, tolerance, flags)

    def check_statevector_oracle(self) -> PropertyResult:
        dims = self.config["oracle_dims"]
        residuals = []
        for case in range(min(self.samples, self.config["oracle_cases"])):
            dim = dims[case % len(dims)]
            u = simulator.random_unitary(dim, int(self.rng.integers(2 ** 31)))
            shifts, s_index, t_index = self._shifts(), 0, dim - 1
            state = simulator.fixed_point_step(u, s_index, t_index, shifts)
            eps = simulator.overlap_epsilon(u, s_index, t_index)
            residuals.append(abs(simulator.measure_deviation(state, t_index)
                                 - deviation.deviation_trig(shifts, min(1.0, max(0.0, eps)))))
        return self._result("statevector oracle", residuals, NUMERIC_CONFIG["oracle_tolerance"])

    def check_recursion(self) -> PropertyResult:
        depth = self.config["recursion_depth"]
        u = simulator.unitary_for_epsilon(16, 0.9, self.seed)
        grover = simulator.recursion_trace(u, 0, 15, PhaseShifts(GROVER_PHASE, GROVER_PHASE), depth)
        expected = [0.9 ** (3 ** m) for m in range(depth + 1)]
        residuals = [abs(m - e) for m, e in zip(grover.measured, expected)]

        for _ in range(max(1, min(self.samples // 100, 20))):
            u = simulator.unitary_for_epsilon(8, self.rng.uniform(0.5, 1.0), int(self.rng.integers(2 ** 31)))
            trace = simulator.recursion_trace(u, 0, 7, self._shifts(), depth)
            residuals.append(trace.max_residual())
        return self._result("recursion", residuals, 1e-9)

    def checks(self) -> List[Callable]:
        return [
            self.check_form_equivalence,
            self.check_symmetry_and_range,
            self.check_grover_point,
            self.check_difference_identity,
            self.check_result_soundness,
            self.check_zero_deviation,
            self.check_zero_characterization,
            self.check_simpson_oracle,
            self.check_derivatives,
            self.check_coefficient_bounds,
            self.check_equal_phase_forms,
            self.check_extreme_points,
            self.check_global_minimum,
            self.check_statevector_oracle,
            self.check_recursion
        ]

    def run(self) -> BatteryReport:
        """Run every property and collect the report"""
        results = []
        for check in self.checks():
            outcome = check()
            results.extend(outcome if isinstance(outcome, list) else [outcome])
        return BatteryReport(seed=self.seed, samples=self.samples, results=results,
                             generated_at=datetime.now().isoformat())


def export_report(report: BatteryReport, filename: str) -> str:
    """Write the battery report as JSON"""
    with open(filename, 'w', encoding='utf-8') as f:
        json.dump(report.to_dict(), f, indent=2)
    return filename
