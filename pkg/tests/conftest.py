"""Pytest defaults: no MLflow tracking, run artifacts under a throwaway output root."""

import os
import tempfile

import pytest


def pytest_configure(config):
    os.environ["MLFLOW_DISABLE"] = "1"
    os.environ.setdefault("BDK_OUT_DIR", tempfile.mkdtemp(prefix="bdk-test-runs-"))


@pytest.fixture
def out_root(tmp_path, monkeypatch):
    """Per-test output root for CLI and pipeline runs."""
    root = tmp_path / "runs"
    monkeypatch.setenv("BDK_OUT_DIR", str(root))
    return root
