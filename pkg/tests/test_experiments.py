import json
import math
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from processor import __version__
from processor.automaton.core import SpinorState
from processor.errors import ConfigError, ParameterRangeError
from processor.experiments.executor import ExperimentExecutor, clamp_probabilities, unwrapped_centre
from processor.experiments.output import (
    ExperimentResult,
    render_csv,
    render_json,
    summary_path,
    to_native,
    write_result,
)
from processor.experiments.schemas import EXPERIMENT_SCHEMAS, build_config, read_config_file
from processor.experiments.verify import CheckStatus, run_suite


def run(experiment, **overrides):
    return ExperimentExecutor(experiment, build_config(experiment, overrides=overrides)).run()


# configuration

def test_every_subcommand_has_a_schema():
    assert set(EXPERIMENT_SCHEMAS) == {"refraction-curve", "packet", "packet-detail", "planck-halt",
                                       "double-slit", "collide", "dispersion", "verify"}


def test_build_config_layers_overrides_on_file_values():
    config = build_config("packet", {"experiment": "packet", "sites": 32, "k": 4}, {"k": 16, "steps": None})
    assert config.sites == 32
    assert config.k == 16
    assert config.steps == 180


def test_theta_expression_and_defaults():
    assert build_config("packet", overrides={"theta": "pi/8"}).resolved_theta == pytest.approx(math.pi / 8)
    assert build_config("packet").resolved_theta == pytest.approx(math.pi / 8)
    assert build_config("double-slit").resolved_theta == pytest.approx(math.pi / 10)
    assert build_config("packet", overrides={"m_ratio": 0.0}).resolved_theta == pytest.approx(math.pi / 2)
    assert build_config("planck-halt").resolved_theta == 0.0


@pytest.mark.parametrize("experiment, values", [
    ("packet", {"theta": "pi/8", "m_ratio": 0.5}),
    ("packet", {"theta": 2.0}),
    ("packet", {"k": 0}),
    ("packet", {"delta": 0}),
    ("packet", {"colour": "red"}),
    ("double-slit", {"slit_n": 32, "sites": 64}),
    ("planck-halt", {"theta": "pi/8"}),
    ("verify", {"suite": "everything"}),
    ("refraction-curve", {"samples": 1}),
])
def test_invalid_configurations(experiment, values):
    with pytest.raises(ValidationError):
        build_config(experiment, overrides=values)


def test_malformed_theta_expression():
    with pytest.raises((ValidationError, ConfigError)):
        build_config("packet", overrides={"theta": "__import__('os')"})


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        build_config("teleport")


def test_read_config_file(tmp_path):
    path = tmp_path / "packet.json"
    path.write_text(json.dumps({"experiment": "packet", "sites": 16}))
    assert read_config_file(path) == {"experiment": "packet", "sites": 16}
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        read_config_file(listing)
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "missing.json")


# executor

def test_unknown_runner():
    executor = ExperimentExecutor("teleport", build_config("packet"))
    with pytest.raises(ConfigError):
        executor.run()


def test_parameters_exclude_output_plumbing():
    executor = ExperimentExecutor("packet", build_config("packet", overrides={"out": "x.csv", "threads": 2}))
    params = executor.parameters()
    assert "out" not in params and "threads" not in params and "format" not in params
    assert params["theta"] == pytest.approx(math.pi / 8)


def test_refraction_curve():
    result = run("refraction-curve", samples=5)
    assert list(result.table.columns) == ["m_over_mp", "zeta"]
    assert result.table["zeta"].iloc[0] == 1.0
    assert result.table["zeta"].iloc[-1] == 0.0
    assert result.summary["identity_residual"] <= 1e-15


def test_packet_table_and_summary():
    result = run("packet", sites=32, steps=10)
    assert list(result.table.columns) == ["t", "site", "prob_plus", "prob_minus"]
    assert len(result.table) == 11 * 32
    assert result.table["site"].iloc[0] == -16
    first = result.table[result.table["t"] == 0]
    assert (first["prob_plus"] + first["prob_minus"]).sum() == pytest.approx(1.0)
    summary = result.summary
    assert summary["max_norm_drift"] <= 1e-10
    assert len(summary["trajectory"]) == 11
    assert 0.0 <= summary["final_chirality"] <= 1.0
    assert summary["zeta"] == pytest.approx(math.sin(math.pi / 8))
    assert 0.0 < summary["max_step_speed"] <= summary["zeta"] + 1e-9
    assert abs(summary["centre_slope"]) <= summary["zeta"] + 1e-9
    assert [point["drift"] for point in summary["trajectory"]][0] == 0.0


def test_planck_halt_does_not_move(caplog):
    with caplog.at_level("WARNING"):
        result = run("planck-halt", sites=32, steps=12)
    assert result.parameters["theta"] == 0.0
    assert result.summary["max_transport"] <= 1e-12
    assert result.summary["centre_slope"] == pytest.approx(0.0, abs=1e-12)
    assert "moved" not in caplog.text


def test_double_slit_summary():
    result = run("double-slit")
    assert result.summary["mirror_symmetry_residual"] <= 1e-10
    assert result.summary["max_light_cone_leakage"] <= 1e-12
    assert result.summary["interference_peaks"] >= 1


def test_collision_dumps_every_other_step():
    result = run("collide", sites=32, steps=4, x0=6, dump_every=2)
    assert result.summary["dumped_steps"] == 3
    assert sorted(result.table["t"].unique()) == [0, 2, 4]
    assert len(result.table) == 3 * 32 * 32
    assert result.summary["max_antisymmetry_residual"] <= 1e-10
    assert result.summary["max_probability_symmetry_residual"] <= 1e-12
    assert result.summary["initial_diagonal_max"] < 1e-3


def test_dispersion():
    result = run("dispersion", samples=64)
    assert list(result.table.columns) == ["phi", "E", "group_velocity"]
    assert result.summary["velocity_residual"] <= 1e-10


def test_library_error_becomes_logged_none(caplog):
    with patch("processor.experiments.executor.gaussian_packet", side_effect=ParameterRangeError("bad width")):
        with caplog.at_level("ERROR"):
            result = run("packet", sites=16, steps=2)
    assert result is None
    assert "Experiment packet failed: bad width" in caplog.text


def test_verify_result():
    result = run("verify", suite="vacuum")
    assert list(result.table.columns) == ["name", "value", "tolerance", "comparison", "status"]
    assert result.summary["passed"] is True
    assert result.summary["counts"]["PASS"] == len(result.table) == 15


def test_clamp_probabilities_logs(caplog):
    with caplog.at_level("WARNING"):
        clipped = clamp_probabilities(np.array([-1e-14, 0.5, 1 + 1e-14]), "packet")
    np.testing.assert_array_equal(clipped, [0.0, 0.5, 1.0])
    assert "clamping" in caplog.text
    caplog.clear()
    with caplog.at_level("ERROR"):
        clamp_probabilities(np.array([1.1]), "packet")
    assert "beyond tolerance" in caplog.text


def test_unwrapped_centre_crosses_the_seam():
    history = [SpinorState.localized(32, n, "+") for n in (30, 31, 0, 1)]
    centre = unwrapped_centre(history)
    np.testing.assert_allclose(np.diff(centre), [1.0, 1.0, 1.0], atol=1e-12)


# output

@pytest.fixture
def small_result():
    table = pd.DataFrame({"t": [0, 1], "value": [0.5, -0.0]})
    return ExperimentResult("packet", {"theta": 0.25, "sites": 4}, table, {"drift": np.float64(1e-16)})


def test_render_csv(small_result):
    lines = render_csv(small_result).splitlines()
    assert lines[0] == "# experiment: packet"
    assert lines[1] == '# parameters: {"sites": 4, "theta": 0.25}'
    assert lines[2] == f"# version: {__version__}"
    assert lines[3:] == ["t,value", "0,0.5", "1,0.0"]


def test_render_json(small_result):
    document = json.loads(render_json(small_result))
    assert document["summary"] == {"drift": 1e-16}
    assert document["table"][0] == {"t": 0, "value": 0.5}
    assert document["version"] == __version__


def test_to_native_handles_numpy_and_complex():
    assert to_native({"a": np.int64(3), "b": np.array([1.5]), "c": 1 + 2j, "d": np.bool_(True)}) == {
        "a": 3, "b": [1.5], "c": {"re": 1.0, "im": 2.0}, "d": True}


def test_write_result_to_stdout(small_result, capsys):
    assert write_result(small_result, "csv") is None
    assert capsys.readouterr().out.startswith("# experiment: packet")


def test_write_result_to_file_with_summary(small_result, tmp_path):
    path = write_result(small_result, "csv", str(tmp_path / "run" / "packet.csv"))
    assert path.read_text().startswith("# experiment: packet")
    summary = json.loads(summary_path(path).read_text())
    assert summary_path(path).name == "packet.summary.json"
    assert summary["summary"] == {"drift": 1e-16}


def test_relative_output_goes_to_output_dir(small_result, tmp_path):
    with patch("processor.experiments.output.OUTPUT_DIR", str(tmp_path)):
        path = write_result(small_result, "json", "packet.json")
    assert path == tmp_path / "packet.json"
    assert json.loads(path.read_text())["experiment"] == "packet"
    assert not summary_path(path).exists()


@pytest.mark.parametrize("experiment, overrides", [
    ("packet", {"sites": 32, "steps": 10}),
    ("collide", {"sites": 16, "steps": 4, "x0": 4}),
    ("verify", {"suite": "hamiltonian"}),
])
def test_identical_configs_write_identical_bytes(experiment, overrides, tmp_path):
    written = []
    for index, threads in enumerate((1, 1, 4)):
        result = run(experiment, threads=threads, **overrides)
        path = write_result(result, "csv", str(tmp_path / f"run{index}" / "result.csv"))
        written.append((path.read_bytes(), summary_path(path).read_bytes()))
    assert written[0] == written[1] == written[2]
    assert written[0][0].startswith(f"# experiment: {experiment}".encode())


# verification suites

def test_run_suite_unknown():
    with pytest.raises(ConfigError):
        run_suite("everything")


def test_run_suite_is_independent_of_thread_count():
    single = run_suite("hamiltonian", seed=3, threads=1)
    pooled = run_suite("hamiltonian", seed=3, threads=4)
    assert [check.as_row() for check in single] == [check.as_row() for check in pooled]
    assert all(check.status is CheckStatus.PASS for check in single)


def test_exponential_map_suite_reports_expected_failures():
    checks = run_suite("exponential-map", threads=2)
    statuses = {check.status for check in checks}
    assert CheckStatus.EXPECTED_FAIL in statuses
    assert CheckStatus.FAIL not in statuses
