"""
Tests for the command-line entry point
"""
import json
import math

import pytest

import deviation
from main import main, build_parser, CliConfig


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_dev_grover_point(capsys):
    code, out, _ = run(capsys, "dev", "--theta", "1.0471975511965976", "--phi", "1.0471975511965976",
                       "--epsilon", "0.9")
    assert code == 0
    assert float(out) == pytest.approx(0.729, abs=1e-14)


def test_dev_zero_theta(capsys):
    code, out, _ = run(capsys, "dev", "--theta", "0", "--phi", "1.0", "--epsilon", "0.6")
    assert code == 0
    assert out == "0.6\n"


def test_dev_degrees(capsys):
    code, out, _ = run(capsys, "dev", "--theta", "60", "--phi", "60", "--epsilon", "0.9", "--degrees")
    assert code == 0
    assert float(out) == pytest.approx(0.729, abs=1e-14)


def test_dev_out_of_range_names_flag(capsys):
    code, out, err = run(capsys, "dev", "--theta", "4.0", "--phi", "1.0", "--epsilon", "0.5")
    assert code == 1
    assert out == ""
    assert "--theta" in err


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "dev", "--theta", "abc", "--phi", "1", "--epsilon", "0.5")[0] == 1
    assert run(capsys, "dev", "--phi", "1", "--epsilon", "0.5")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys, "dev", "--theta", "nan", "--phi", "1", "--epsilon", "0.5")[0] == 1


def test_dev_all_forms_json(capsys):
    code, out, _ = run(capsys, "dev", "--theta", "0.8", "--phi", "2.1", "--epsilon", "0.95",
                       "--all-forms", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["max_pairwise_difference"] <= 1e-12
    assert data["deviation_complex"] == pytest.approx(data["deviation"], abs=1e-12)


def test_avg_with_simpson_and_partials(capsys):
    code, out, _ = run(capsys, "avg", "--theta", "1.0471975511965976", "--phi", "1.0471975511965976",
                       "--beta", "0", "--alpha", "1", "--subdivisions", "1000", "--partials", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["avg_deviation"] == pytest.approx(0.25, abs=1e-14)
    assert data["residual"] <= 1e-10
    assert "partial_theta" in data and "partial_phi" in data


def test_avg_odd_subdivisions(capsys):
    code, _, err = run(capsys, "avg", "--theta", "1", "--phi", "1", "--subdivisions", "3")
    assert code == 1
    assert "--subdivisions" in err


def test_optimal_json_keys_match_sweep_summary(capsys):
    code, out, _ = run(capsys, "optimal", "--beta", "0", "--alpha", "1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["theta_star"] == pytest.approx(math.pi / 2, abs=1e-12)
    assert data["min_value"] == pytest.approx(1 / 6, abs=1e-12)
    assert data["case_label"] == "interior-arccos"

    _, sweep_out, _ = run(capsys, "sweep", "--kind", "minimizer-map", "--beta-min", "0", "--beta-max", "0",
                          "--beta-points", "1", "--alpha-min", "1", "--alpha-max", "1", "--alpha-points", "1")
    assert set(json.loads(sweep_out)[0]) == set(data)


def test_optimal_plain_and_errors(capsys):
    code, out, _ = run(capsys, "optimal", "--beta", "0.75", "--alpha", "1")
    assert code == 0
    assert "case_label=boundary-pi" in out
    assert f"theta_star={math.pi!r}" in out
    assert run(capsys, "optimal", "--beta", "0.5", "--alpha", "0.5")[0] == 1


def test_optimal_confirm_grid(capsys):
    code, out, _ = run(capsys, "optimal", "--beta", "0", "--alpha", "0.5", "--confirm-grid", "301",
                       "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["grid_min_value"] >= data["min_value"] - 1e-12


def test_sweep_csv_and_out_file(capsys, tmp_path):
    argv = ["sweep", "--theta-points", "3", "--phi-points", "3", "--epsilon", "0.8", "--format", "csv"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "theta,phi,epsilon,deviation"
    assert len(lines) == 3 * 3 + 2

    target = tmp_path / "sweep.csv"
    assert run(capsys, *argv, "--out", str(target))[1] == ""
    assert target.read_bytes() == out.encode("utf-8")


def test_sweep_avg_equal_json(capsys):
    code, out, _ = run(capsys, "sweep", "--kind", "avg-equal", "--beta", "0", "--alpha", "1",
                       "--points", "5", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert rows[2]["avg_deviation"] == pytest.approx(1 / 6, abs=1e-14)


def test_sweep_bad_axis(capsys):
    code, _, err = run(capsys, "sweep", "--theta-max", "4", "--theta-points", "3")
    assert code == 1
    assert "theta" in err


def test_simulate_prescribed_epsilon(capsys):
    code, out, _ = run(capsys, "simulate", "--theta", "1.0471975511965976", "--phi", "1.0471975511965976",
                       "--epsilon", "0.9", "--dim", "16", "--seed", "5", "--depth", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["epsilon"] == pytest.approx(0.9, abs=1e-12)
    assert data["measured_deviation"] == pytest.approx(0.729, abs=1e-10)
    assert data["residual"] <= 1e-10
    assert [entry["level"] for entry in data["trace"]] == [0, 1, 2]
    assert data["trace"][2]["measured"] == pytest.approx(0.387420489, abs=1e-9)


def test_simulate_errors(capsys):
    assert run(capsys, "simulate", "--theta", "1", "--phi", "1", "--dim", "1")[0] == 1
    assert run(capsys, "simulate", "--theta", "1", "--phi", "1", "--dim", "4", "--s-index", "3")[0] == 1
    assert run(capsys, "simulate", "--theta", "1", "--phi", "1", "--dim", "4", "--depth", "40")[0] == 1


def test_verify_passes(capsys, tmp_path):
    report_path = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "--samples", "200", "--seed", "7", "--report", str(report_path))
    assert code == 0
    assert "all properties passed" in out
    assert json.loads(report_path.read_text())["all_passed"] is True


def test_verify_rejects_zero_samples(capsys):
    code, _, err = run(capsys, "verify", "--samples", "0")
    assert code == 1
    assert "--samples" in err


def test_verify_sign_flip_exits_two(capsys, monkeypatch):
    original = deviation._trig_kernel
    monkeypatch.setattr(deviation, "_trig_kernel", lambda theta, phi, eps: -original(theta, phi, eps))
    code, out, err = run(capsys, "verify", "--samples", "100", "--seed", "3", "--format", "json")
    assert code == 2
    assert "verification failed" in err and "form equivalence" in err
    data = json.loads(out)
    failed = [p["name"] for p in data["properties"] if not p["ok"]]
    assert "form equivalence" in failed


def test_cli_config_converts_degrees():
    namespace = build_parser().parse_args(["sweep", "--theta-max", "90", "--degrees"])
    config = CliConfig.from_namespace(namespace)
    assert config.subcommand == "sweep"
    assert config.params["theta_max"] == pytest.approx(math.pi / 2)
    assert config.params["epsilon"] == 0.9
    assert config.params["beta"] == 0.75 and config.params["alpha"] == 1.0


def test_degrees_leave_default_axes_in_radians():
    config = CliConfig.from_namespace(build_parser().parse_args(["sweep", "--degrees", "--theta-max", "90"]))
    assert config.params["theta_max"] == pytest.approx(math.pi / 2)
    assert config.params["theta_min"] == 0.0
    assert config.params["phi_min"] == 0.0
    assert config.params["phi_max"] == math.pi

    plain = CliConfig.from_namespace(build_parser().parse_args(["sweep", "--degrees"]))
    assert (plain.params["theta_max"], plain.params["phi_max"]) == (math.pi, math.pi)


def test_sweep_degrees_spans_full_default_axis(capsys):
    code, out, _ = run(capsys, "sweep", "--degrees", "--theta-max", "90", "--theta-points", "2",
                       "--phi-points", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert max(row["phi"] for row in rows) == math.pi
    assert max(row["theta"] for row in rows) == pytest.approx(math.pi / 2)


if __name__ == "__main__":
    pytest.main([__file__])
