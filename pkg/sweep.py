"""
Deterministic grid sweeps over the deviation and average-deviation formulas

Sweeps produce plain records, turned into pandas frames for CSV output or
into JSON for the minimizer map. Every record value comes from the same
single-point operation the deviation and average modules expose.
"""
import io
import json
import math
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from config import get_sweep_config
from core import PhaseShifts, EpsilonRange, as_range
from deviation import deviation_trig
from average import avg_deviation_equal, minimize_avg_deviation, MinimizerReport
from error_handler import SweepSpecError, FixedPointSearchError

logger = logging.getLogger(__name__)

DEVIATION_KIND = "deviation"
AVG_KIND = "avg_deviation"

DEVIATION_COLUMNS = ["theta", "phi", "epsilon", "deviation"]
AVG_COLUMNS = ["theta", "beta", "alpha", "avg_deviation"]


@dataclass(frozen=True)
class SweepAxis:
    """Inclusive axis from low to high; a single point must have low == high"""
    low: float
    high: float
    points: int

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.low])
        return np.linspace(self.low, self.high, self.points)

    def validate(self, name: str, low_bound: float, high_bound: float):
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise SweepSpecError(f"{name} axis bounds must be finite")
        if self.points < 1:
            raise SweepSpecError(f"{name} axis needs at least one point, got {self.points}")
        if self.points == 1 and self.low != self.high:
            raise SweepSpecError(f"{name} axis with a single point must have equal bounds")
        if not low_bound <= self.low <= self.high <= high_bound:
            raise SweepSpecError(f"{name} axis [{self.low}, {self.high}] must lie within "
                                 f"[{low_bound}, {high_bound}] with min <= max")


@dataclass(frozen=True)
class SweepSpec:
    theta: SweepAxis
    phi: SweepAxis
    epsilon: SweepAxis
    workers: int = field(default_factory=lambda: get_sweep_config()["workers"])

    def validate(self) -> "SweepSpec":
        self.theta.validate("theta", 0.0, math.pi)
        self.phi.validate("phi", 0.0, math.pi)
        self.epsilon.validate("epsilon", 0.0, 1.0)
        if self.workers < 1:
            raise SweepSpecError(f"workers must be >= 1, got {self.workers}")
        return self


@dataclass(frozen=True)
class SweepRecord:
    theta: float
    phi: float
    value: float
    value_kind: str
    epsilon: Optional[float] = None
    beta: Optional[float] = None
    alpha: Optional[float] = None


@dataclass(frozen=True)
class MinimizerCell:
    beta: float
    alpha: float
    report: Optional[MinimizerReport] = None

    @property
    def skipped(self) -> bool:
        return self.report is None

    def to_dict(self):
        if self.skipped:
            return {"beta": self.beta, "alpha": self.alpha, "skipped": True}
        return {"beta": self.beta, "alpha": self.alpha, **self.report.to_dict()}


def deviation_spec(epsilon: Optional[float] = None, theta_points: int = 101, phi_points: int = 101,
                   theta_range=(0.0, math.pi), phi_range=(0.0, math.pi), workers: Optional[int] = None) -> SweepSpec:
    """Spec over a (theta, phi) grid at one fixed epsilon, defaulting to the full square"""
    config = get_sweep_config()
    epsilon = config["default_epsilon"] if epsilon is None else epsilon
    return SweepSpec(theta=SweepAxis(*theta_range, theta_points), phi=SweepAxis(*phi_range, phi_points),
                     epsilon=SweepAxis(epsilon, epsilon, 1),
                     workers=workers or config["workers"])


def _ordered_map(func, items: Sequence, workers: int) -> list:
    # executor.map yields in submission order whatever the completion order
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def _deviation_record(cell) -> SweepRecord:
    theta, phi, eps = cell
    value = deviation_trig(PhaseShifts(theta, phi), eps)
    return SweepRecord(theta=theta, phi=phi, epsilon=eps, value=value, value_kind=DEVIATION_KIND)


def sweep_deviation(spec: SweepSpec) -> List[SweepRecord]:
    """
    D(theta, phi) over the sweep grid

    Records are row-major in theta, then phi, then epsilon.

    Raises:
        SweepSpecError: invalid spec
    """
    spec.validate()
    cells = [(float(t), float(p), float(e))
             for t, p, e in product(spec.theta.values(), spec.phi.values(), spec.epsilon.values())]
    logger.info(f"deviation sweep over {len(cells)} cells with {spec.workers} workers")
    return _ordered_map(_deviation_record, cells, spec.workers)


def sweep_avg_equal(rng, points: int) -> List[SweepRecord]:
    """
    Equal-shift average deviation for theta uniform on [0, pi], endpoints included

    Raises:
        SweepSpecError: fewer than two points or an invalid range
    """
    if points < 2:
        raise SweepSpecError(f"points must be >= 2, got {points}")
    try:
        rng = as_range(rng)
    except FixedPointSearchError as e:
        raise SweepSpecError(f"invalid range: {e}")

    records = []
    for theta in np.linspace(0.0, math.pi, points):
        theta = float(theta)
        records.append(SweepRecord(theta=theta, phi=theta, value=avg_deviation_equal(theta, rng),
                                   value_kind=AVG_KIND, beta=rng.beta, alpha=rng.alpha))
    return records


def _minimizer_cell(cell) -> MinimizerCell:
    beta, alpha = cell
    if not beta < alpha:
        return MinimizerCell(beta=beta, alpha=alpha)
    return MinimizerCell(beta=beta, alpha=alpha, report=minimize_avg_deviation(EpsilonRange(beta, alpha)))


def sweep_minimizer_map(beta_axis: SweepAxis, alpha_axis: SweepAxis,
                        workers: Optional[int] = None) -> List[MinimizerCell]:
    """
    Minimizer report for every (beta, alpha) cell, row-major in beta then alpha

    Cells with beta >= alpha are kept and marked skipped.

    Raises:
        SweepSpecError: invalid axes, or no cell with beta < alpha
    """
    beta_axis.validate("beta", 0.0, 1.0)
    alpha_axis.validate("alpha", 0.0, 1.0)
    workers = workers or get_sweep_config()["workers"]

    cells = [(float(b), float(a)) for b, a in product(beta_axis.values(), alpha_axis.values())]
    results = _ordered_map(_minimizer_cell, cells, workers)
    skipped = sum(cell.skipped for cell in results)
    if skipped == len(results):
        raise SweepSpecError("no (beta, alpha) cell satisfies beta < alpha")
    if skipped:
        logger.info(f"minimizer map skipped {skipped} of {len(results)} cells with beta >= alpha")
    return results


def records_to_frame(records: Sequence[SweepRecord]) -> pd.DataFrame:
    """Frame with the CSV schema of the records' kind"""
    if not records:
        return pd.DataFrame(columns=DEVIATION_COLUMNS)

    if records[0].value_kind == DEVIATION_KIND:
        rows = [(r.theta, r.phi, r.epsilon, r.value) for r in records]
        return pd.DataFrame(rows, columns=DEVIATION_COLUMNS)

    rows = [(r.theta, r.beta, r.alpha, r.value) for r in records]
    return pd.DataFrame(rows, columns=AVG_COLUMNS)


def frame_to_csv(frame: pd.DataFrame) -> str:
    """CSV text with 17 significant digits, LF line endings and no index"""
    digits = get_sweep_config()["significant_digits"]
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=f"%.{digits}g", lineterminator="\n")
    return buffer.getvalue()


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    return frame_to_csv(records_to_frame(records))


def records_to_json(records: Sequence[SweepRecord]) -> str:
    frame = records_to_frame(records)
    rows = [{column: float(value) for column, value in zip(frame.columns, row)}
            for row in frame.itertuples(index=False)]
    return json.dumps(rows, indent=2) + "\n"


def minimizer_map_to_json(cells: Sequence[MinimizerCell]) -> str:
    return json.dumps([cell.to_dict() for cell in cells], indent=2) + "\n"
