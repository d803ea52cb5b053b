import json
from unittest.mock import MagicMock, patch

import pytest
import pandas as pd

from main import collect_overrides, main, parse_args
from processor.experiments.output import ExperimentResult


def fake_result(experiment="packet", summary=None):
    return ExperimentResult(experiment, {"theta": 0.3}, pd.DataFrame({"t": [0]}), summary or {})


def test_parse_args_packet_flags():
    args = parse_args(["packet", "--theta", "pi/8", "--sites", "32", "--k", "-4", "--sign", "-"])
    assert args.command == "packet"
    assert args.theta == "pi/8"
    assert args.sites == 32
    assert args.k == -4.0
    assert args.sign == "-"


def test_parse_args_rejects_unknown_suite():
    with pytest.raises(SystemExit) as excinfo:
        parse_args(["verify", "everything"])
    assert excinfo.value.code == 2


def test_collect_overrides_drops_control_keys_and_missing_flags():
    args = parse_args(["collide", "--x0", "6", "--dump-every", "2", "--log-mode", "quiet"])
    assert collect_overrides(args) == {"x0": 6.0, "dump_every": 2}


@patch("main.write_result")
@patch("main.ExperimentExecutor")
@pytest.mark.filterwarnings("ignore")
def test_main_success(mock_executor_class, mock_write):
    """Test that main returns exit code 0 on success."""
    mock_executor = MagicMock()
    mock_executor_class.return_value = mock_executor
    result = fake_result()
    mock_executor.run.return_value = result

    exit_code = main(["packet", "--sites", "32", "--out", "packet.csv"])

    assert exit_code == 0
    experiment, config = mock_executor_class.call_args.args
    assert experiment == "packet"
    assert config.sites == 32
    mock_write.assert_called_once_with(result, "csv", "packet.csv")


@patch("main.write_result")
@patch("main.ExperimentExecutor")
def test_main_rejected_parameters(mock_executor_class, mock_write):
    """Test that a None result from the executor maps to exit code 2."""
    mock_executor_class.return_value.run.return_value = None

    assert main(["double-slit"]) == 2
    mock_write.assert_not_called()


@patch("main.ExperimentExecutor")
def test_main_invalid_configuration(mock_executor_class, caplog):
    """Test that validation errors exit with 2 before any computation."""
    with caplog.at_level("ERROR"):
        exit_code = main(["packet", "--theta", "pi/8", "--m-ratio", "0.5"])
    assert exit_code == 2
    assert "mutually exclusive" in caplog.text
    mock_executor_class.assert_not_called()


@patch("main.ExperimentExecutor")
def test_main_missing_config_file(mock_executor_class, tmp_path):
    assert main(["packet", "--config", str(tmp_path / "absent.json")]) == 2
    mock_executor_class.assert_not_called()


@patch("main.write_result")
@patch("main.ExperimentExecutor")
def test_main_config_file_with_override(mock_executor_class, mock_write, tmp_path):
    path = tmp_path / "collide.json"
    path.write_text(json.dumps({"experiment": "collide", "x0": 8, "steps": 30}))
    mock_executor_class.return_value.run.return_value = fake_result("collide")

    assert main(["collide", "--config", str(path), "--steps", "12"]) == 0
    _, config = mock_executor_class.call_args.args
    assert config.x0 == 8
    assert config.steps == 12


@patch("main.write_result")
@patch("main.ExperimentExecutor")
def test_main_failing_suite(mock_executor_class, mock_write, caplog):
    """Test that a suite with failing checks exits with 1 after writing its report."""
    summary = {"suite": "jw1d", "passed": False, "counts": {"PASS": 3, "EXPECTED-FAIL": 0, "FAIL": 2}}
    mock_executor_class.return_value.run.return_value = fake_result("verify", summary)

    with caplog.at_level("ERROR"):
        assert main(["verify", "jw1d"]) == 1
    mock_write.assert_called_once()
    assert "2 failing checks" in caplog.text


@patch("main.write_result")
@patch("main.ExperimentExecutor")
def test_main_passing_suite_defaults_to_json(mock_executor_class, mock_write):
    summary = {"suite": "vacuum", "passed": True, "counts": {"PASS": 15, "EXPECTED-FAIL": 0, "FAIL": 0}}
    result = fake_result("verify", summary)
    mock_executor_class.return_value.run.return_value = result

    assert main(["verify", "vacuum", "--seed", "3"]) == 0
    _, config = mock_executor_class.call_args.args
    assert config.seed == 3
    mock_write.assert_called_once_with(result, "json", None)


@patch("main.ExperimentExecutor")
@pytest.mark.filterwarnings("ignore")
def test_main_unexpected_exception(mock_executor_class):
    """Test that main returns exit code 1 on unexpected exceptions."""
    mock_executor_class.return_value.run.side_effect = RuntimeError("Unexpected error")

    assert main(["dispersion"]) == 1


@patch("main.ExperimentExecutor")
def test_main_keyboard_interrupt(mock_executor_class):
    mock_executor_class.return_value.run.side_effect = KeyboardInterrupt()

    assert main(["refraction-curve"]) == 1


def test_main_end_to_end_writes_csv(capsys):
    assert main(["refraction-curve", "--samples", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# experiment: refraction-curve"
    assert lines[3] == "m_over_mp,zeta"
    assert lines[4] == "0.0,1.0"
    assert lines[-1] == "1.0,0.0"


def test_main_repeated_runs_write_identical_files(tmp_path):
    written = []
    for index, threads in enumerate(("1", "1", "4")):
        out = tmp_path / f"run{index}" / "collision.csv"
        argv = ["collide", "--sites", "16", "--steps", "3", "--x0", "4", "--threads", threads, "--out", str(out)]
        assert main(argv) == 0
        written.append((out.read_bytes(), (out.parent / "collision.summary.json").read_bytes()))
    assert written[0] == written[1] == written[2]
