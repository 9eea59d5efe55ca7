import math

from src.mlflow_telemetry import log_run_metrics, split_summary


def test_split_summary_separates_numbers_from_labels():
    metrics, params = split_summary(
        {"rho0": 2.0, "steps": 12, "valid": True, "rho_s": math.inf, "regime": "subcritical", "skip": None}
    )
    assert metrics == {"rho0": 2.0, "steps": 12.0, "valid": 1.0}
    assert params == {"rho_s": "inf", "regime": "subcritical"}


def test_disabled_logging_is_a_no_op(monkeypatch):
    monkeypatch.setenv("MLFLOW_DISABLE", "1")
    assert log_run_metrics(run_name="demo", summary={"rho0": 1.0}) is False
