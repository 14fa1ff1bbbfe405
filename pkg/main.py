"""
Command-line entry point for the fixed-point search toolkit

Subcommands: dev, avg, optimal, sweep, simulate, verify.
Exit codes: 0 success, 1 usage or validation error, 2 verification failure.
"""
import sys
import json
import math
import argparse
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import pandas as pd

import average
import deviation
import simulator
import sweep
from config import APP_CONFIG, EXIT_CODES, PATHS_CONFIG, get_sweep_config, get_simulator_config, \
    get_verify_config, get_log_level
from core import validate_phase_shifts, validate_epsilon, validate_epsilon_range
from error_handler import ValidationError, VerificationFailure, FixedPointSearchError, setup_logging, \
    handle_error, exit_code_for
from verification import PropertyBattery, export_report

logger = logging.getLogger(__name__)

FORMATS = ["plain", "json", "csv"]
ANGLE_FLAGS = ["theta", "phi", "theta_min", "theta_max", "phi_min", "phi_max"]
# sweep axis bounds in radians, filled in after any --degrees conversion
AXIS_DEFAULTS = {"theta_min": 0.0, "theta_max": math.pi, "phi_min": 0.0, "phi_max": math.pi}
FORM_FUNCTIONS = {
    "trig": deviation.deviation_trig,
    "complex": deviation.deviation_complex,
    "sum-of-squares": deviation.deviation_sum_of_squares
}


class CliArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting, so usage errors map to exit code 1"""

    def error(self, message):
        raise ValidationError(message)


@dataclass
class CliConfig:
    subcommand: str
    params: Dict[str, Any]
    output_format: str = "plain"
    out: Optional[str] = None

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> "CliConfig":
        params = {key: value for key, value in vars(namespace).items()
                  if key not in ("subcommand", "format", "out", "degrees", "log_level", "log_file")}
        if namespace.degrees:
            for name in ANGLE_FLAGS:
                if params.get(name) is not None:
                    params[name] = math.radians(params[name])
        if namespace.subcommand == "sweep":
            for name, default in AXIS_DEFAULTS.items():
                if params.get(name) is None:
                    params[name] = default
        return cls(subcommand=namespace.subcommand, params=params,
                   output_format=namespace.format, out=namespace.out)


@dataclass
class CommandOutput:
    text: str
    exit_code: int = EXIT_CODES["ok"]


def _number(value: float) -> str:
    return repr(float(value))


def _render(row: Dict[str, Any], output_format: str) -> str:
    """Render one flat result row in the chosen format"""
    if output_format == "json":
        return json.dumps(row, indent=2) + "\n"
    if output_format == "csv":
        return sweep.frame_to_csv(pd.DataFrame([row]))
    lines = []
    for key, value in row.items():
        lines.append(f"{key}={_number(value) if isinstance(value, float) else value}")
    return "\n".join(lines) + "\n"


def run_dev(config: CliConfig) -> CommandOutput:
    """Deviation D(theta, phi) in the selected form, or all three forms"""
    p = config.params
    shifts = validate_phase_shifts(p["theta"], p["phi"])
    eps = validate_epsilon(p["epsilon"])

    if not p["all_forms"]:
        value = FORM_FUNCTIONS[p["form"]](shifts, eps)
        if config.output_format == "plain":
            return CommandOutput(_number(value) + "\n")
        row = {"theta": shifts.theta, "phi": shifts.phi, "epsilon": eps.value, "deviation": value}
        return CommandOutput(_render(row, config.output_format))

    values = {name.replace("-", "_"): func(shifts, eps) for name, func in FORM_FUNCTIONS.items()}
    spread = max(values.values()) - min(values.values())
    row = {"theta": shifts.theta, "phi": shifts.phi, "epsilon": eps.value,
           "deviation": values["trig"],
           **{f"deviation_{name}": value for name, value in values.items() if name != "trig"},
           "max_pairwise_difference": spread}
    if config.output_format == "plain":
        row = {**values, "max_pairwise_difference": spread}
    return CommandOutput(_render(row, config.output_format))


def run_avg(config: CliConfig) -> CommandOutput:
    """Average deviation over (beta, alpha), optionally with the Simpson oracle and partials"""
    p = config.params
    shifts = validate_phase_shifts(p["theta"], p["phi"])
    rng = validate_epsilon_range(p["beta"], p["alpha"])

    row = {"theta": shifts.theta, "phi": shifts.phi, "beta": rng.beta, "alpha": rng.alpha,
           "avg_deviation": average.avg_deviation(shifts, rng)}
    if p["subdivisions"]:
        row["numeric_avg_deviation"] = average.numeric_avg_deviation(shifts, rng, p["subdivisions"])
        row["residual"] = abs(row["avg_deviation"] - row["numeric_avg_deviation"])
    if p["partials"]:
        row["partial_theta"] = average.partial_theta(shifts, rng)
        row["partial_phi"] = average.partial_phi(shifts, rng)
    return CommandOutput(_render(row, config.output_format))


def run_optimal(config: CliConfig) -> CommandOutput:
    """Smallest average deviation point for the range"""
    p = config.params
    rng = validate_epsilon_range(p["beta"], p["alpha"])
    report = average.minimize_avg_deviation(rng)
    row = sweep.MinimizerCell(beta=rng.beta, alpha=rng.alpha, report=report).to_dict()

    if p.get("confirm_grid"):
        found = average.confirm_global_minimum(rng, p["confirm_grid"])
        row.update({"grid_theta": found.theta, "grid_phi": found.phi, "grid_min_value": found.value})
    return CommandOutput(_render(row, config.output_format))


def _axis(low: float, high: float, points: int) -> sweep.SweepAxis:
    return sweep.SweepAxis(low, high, points)


def run_sweep(config: CliConfig) -> CommandOutput:
    """Grid sweeps written as CSV (or JSON) for external plotting"""
    p = config.params
    kind = p["kind"]

    if kind == "deviation":
        eps = validate_epsilon(p["epsilon"]).value
        spec = sweep.SweepSpec(theta=_axis(p["theta_min"], p["theta_max"], p["theta_points"]),
                               phi=_axis(p["phi_min"], p["phi_max"], p["phi_points"]),
                               epsilon=_axis(eps, eps, 1), workers=p["workers"])
        records = sweep.sweep_deviation(spec)
    elif kind == "avg-equal":
        rng = validate_epsilon_range(p["beta"], p["alpha"])
        records = sweep.sweep_avg_equal(rng, p["points"])
    else:
        cells = sweep.sweep_minimizer_map(_axis(p["beta_min"], p["beta_max"], p["beta_points"]),
                                          _axis(p["alpha_min"], p["alpha_max"], p["alpha_points"]),
                                          workers=p["workers"])
        if config.output_format == "csv":
            return CommandOutput(sweep.frame_to_csv(pd.DataFrame([cell.to_dict() for cell in cells])))
        return CommandOutput(sweep.minimizer_map_to_json(cells))

    if config.output_format == "json":
        return CommandOutput(sweep.records_to_json(records))
    return CommandOutput(sweep.records_to_csv(records))


def run_simulate(config: CliConfig) -> CommandOutput:
    """Measure the deviation on a random unitary and compare with the closed form"""
    p = config.params
    shifts = validate_phase_shifts(p["theta"], p["phi"])
    dim = p["dim"]
    t_index = dim - 1 if p["t_index"] is None else p["t_index"]

    if p["epsilon"] is None:
        u = simulator.random_unitary(dim, p["seed"])
    else:
        u = simulator.unitary_for_epsilon(dim, validate_epsilon(p["epsilon"]), p["seed"],
                                          p["s_index"], t_index)

    state = simulator.fixed_point_step(u, p["s_index"], t_index, shifts)
    eps = min(1.0, max(0.0, simulator.overlap_epsilon(u, p["s_index"], t_index)))
    measured = simulator.measure_deviation(state, t_index)
    closed_form = deviation.deviation_trig(shifts, eps)
    row = {"dim": dim, "seed": p["seed"], "theta": shifts.theta, "phi": shifts.phi, "epsilon": eps,
           "measured_deviation": measured, "closed_form_deviation": closed_form,
           "residual": abs(measured - closed_form)}

    if not p["depth"]:
        return CommandOutput(_render(row, config.output_format))

    trace = simulator.recursion_trace(u, p["s_index"], t_index, shifts, p["depth"])
    levels = [{"level": m, "measured": value, "iterated_map": predicted}
              for (m, value), predicted in zip(trace.levels, trace.predicted)]
    if config.output_format == "json":
        row.update({"trace": levels, "trace_max_residual": trace.max_residual(), "clamped": trace.clamped})
        return CommandOutput(json.dumps(row, indent=2) + "\n")
    if config.output_format == "csv":
        return CommandOutput(sweep.frame_to_csv(pd.DataFrame(levels)))
    lines = _render(row, "plain")
    lines += "".join(f"level={entry['level']} measured={_number(entry['measured'])} "
                     f"iterated_map={_number(entry['iterated_map'])}\n" for entry in levels)
    return CommandOutput(lines)


def run_verify(config: CliConfig) -> CommandOutput:
    """Run the property battery; exit code 2 when any property fails"""
    p = config.params
    if p["samples"] < 1:
        raise ValidationError(f"--samples must be >= 1, got {p['samples']}", parameter="--samples")

    report = PropertyBattery(samples=p["samples"], seed=p["seed"]).run()
    if p.get("report"):
        export_report(report, p["report"])

    if config.output_format == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    elif config.output_format == "csv":
        text = sweep.frame_to_csv(report.to_frame())
    else:
        summary = "all properties passed" if report.all_passed else f"FAILED: {', '.join(report.failed)}"
        text = report.to_frame().to_string(index=False) + "\n" + summary + "\n"

    if not report.all_passed:
        # the report still goes out before the failure maps to exit code 2
        emit(text, config.out)
        raise VerificationFailure(report.failed)
    return CommandOutput(text)


COMMANDS = {
    "dev": run_dev,
    "avg": run_avg,
    "optimal": run_optimal,
    "sweep": run_sweep,
    "simulate": run_simulate,
    "verify": run_verify
}


def build_parser() -> CliArgumentParser:
    sweep_config = get_sweep_config()
    simulator_config = get_simulator_config()
    verify_config = get_verify_config()

    common = CliArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="plain")
    common.add_argument("--out", help="write output to FILE instead of stdout")
    common.add_argument("--degrees", action="store_true", help="angles are given in degrees")
    common.add_argument("--log-level", default=get_log_level())
    common.add_argument("--log-file", default=PATHS_CONFIG["log_file"])

    parser = CliArgumentParser(prog=APP_CONFIG["prog"], description=APP_CONFIG["description"])
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_CONFIG['version']}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    dev = subparsers.add_parser("dev", parents=[common], help="single-step deviation")
    dev.add_argument("--theta", type=float, required=True)
    dev.add_argument("--phi", type=float, required=True)
    dev.add_argument("--epsilon", type=float, required=True)
    dev.add_argument("--form", choices=list(FORM_FUNCTIONS), default="trig")
    dev.add_argument("--all-forms", action="store_true")

    avg = subparsers.add_parser("avg", parents=[common], help="average deviation over an epsilon range")
    avg.add_argument("--theta", type=float, required=True)
    avg.add_argument("--phi", type=float, required=True)
    avg.add_argument("--beta", type=float, default=sweep_config["default_beta"])
    avg.add_argument("--alpha", type=float, default=sweep_config["default_alpha"])
    avg.add_argument("--subdivisions", type=int, default=0,
                     help="also integrate numerically with this many Simpson panels")
    avg.add_argument("--partials", action="store_true")

    optimal = subparsers.add_parser("optimal", parents=[common], help="smallest average deviation point")
    optimal.add_argument("--beta", type=float, required=True)
    optimal.add_argument("--alpha", type=float, required=True)
    optimal.add_argument("--confirm-grid", type=int, default=0, metavar="N")

    sweep_parser = subparsers.add_parser("sweep", parents=[common], help="grid sweeps as CSV/JSON")
    sweep_parser.add_argument("--kind", choices=["deviation", "avg-equal", "minimizer-map"], default="deviation")
    sweep_parser.add_argument("--epsilon", type=float, default=sweep_config["default_epsilon"])
    sweep_parser.add_argument("--theta-min", type=float, default=None)
    sweep_parser.add_argument("--theta-max", type=float, default=None)
    sweep_parser.add_argument("--theta-points", type=int, default=sweep_config["default_points"])
    sweep_parser.add_argument("--phi-min", type=float, default=None)
    sweep_parser.add_argument("--phi-max", type=float, default=None)
    sweep_parser.add_argument("--phi-points", type=int, default=sweep_config["default_points"])
    sweep_parser.add_argument("--beta", type=float, default=sweep_config["default_beta"])
    sweep_parser.add_argument("--alpha", type=float, default=sweep_config["default_alpha"])
    sweep_parser.add_argument("--points", type=int, default=sweep_config["default_points"])
    sweep_parser.add_argument("--beta-min", type=float, default=0.0)
    sweep_parser.add_argument("--beta-max", type=float, default=1.0)
    sweep_parser.add_argument("--beta-points", type=int, default=11)
    sweep_parser.add_argument("--alpha-min", type=float, default=0.0)
    sweep_parser.add_argument("--alpha-max", type=float, default=1.0)
    sweep_parser.add_argument("--alpha-points", type=int, default=11)
    sweep_parser.add_argument("--workers", type=int, default=sweep_config["workers"])

    simulate = subparsers.add_parser("simulate", parents=[common], help="statevector oracle")
    simulate.add_argument("--theta", type=float, required=True)
    simulate.add_argument("--phi", type=float, required=True)
    simulate.add_argument("--dim", type=int, default=simulator_config["default_dim"])
    simulate.add_argument("--seed", type=int, default=simulator_config["default_seed"])
    simulate.add_argument("--epsilon", type=float, default=None,
                          help="pin epsilon exactly instead of drawing a Haar-random unitary")
    simulate.add_argument("--s-index", type=int, default=simulator_config["default_s_index"])
    simulate.add_argument("--t-index", type=int, default=simulator_config["default_t_index"])
    simulate.add_argument("--depth", type=int, default=0)

    verify = subparsers.add_parser("verify", parents=[common], help="randomized property battery")
    verify.add_argument("--samples", type=int, default=verify_config["samples"])
    verify.add_argument("--seed", type=int, default=verify_config["seed"])
    verify.add_argument("--report", help="also write the JSON report to this file")

    return parser


def emit(text: str, out: Optional[str] = None):
    """Write output to the file given by --out, or to stdout"""
    if out:
        with open(out, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return the exit code"""
    try:
        namespace = build_parser().parse_args(argv)
        setup_logging(namespace.log_level, namespace.log_file)
        config = CliConfig.from_namespace(namespace)
        result = COMMANDS[config.subcommand](config)
        emit(result.text, config.out)
        return result.exit_code
    except (FixedPointSearchError, OSError) as e:
        sys.stderr.write(handle_error(e) + "\n")
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
