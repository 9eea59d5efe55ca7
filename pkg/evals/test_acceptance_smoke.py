"""Smoke tests for the acceptance harness (offline); full scenarios require RUN_ACCEPTANCE=1."""

from __future__ import annotations

import json

import numpy as np
import pandas as pd
import pytest

from evals.run_acceptance import _extend, check_moments, reference_model, refinement_verdict, run_all
from src.analysis import DiagnosticsSettings, make_observer
from src.kinetics import TruncatedSystem, monomer_state


def test_extend_continues_from_last_snapshot():
    model = reference_model()
    system = TruncatedSystem(model, 40)
    observer = make_observer(DiagnosticsSettings(G_indices=(1, 5), mu=(0.0, 2.0), J=5))
    s0 = monomer_state(1.0, 40)
    traj = _extend(model, system, None, s0, 5.0, observer)
    n_first = len(traj.snapshots)
    traj = _extend(model, system, traj, s0, 10.0, observer)
    times = traj.times
    assert len(traj.snapshots) > n_first
    assert np.all(np.diff(times) > 0)
    assert times[-1] == 10.0
    assert abs(traj.final.density - 1.0) <= 1e-9


def test_moment_check_on_short_run():
    model = reference_model()
    system = TruncatedSystem(model, 40)
    observer = make_observer(DiagnosticsSettings(G_indices=(1,), mu=(0.0, 2.0), J=5))
    traj = _extend(model, system, None, monomer_state(1.0, 40), 20.0, observer)
    result = check_moments({"traj": traj, "T": 20.0})
    assert np.isfinite(result["max_over_min"])
    assert result["max_over_min"] >= 1.0
    assert result["last_decade_growth"] > 0


def _refinement_table(**overrides):
    columns = {
        "L": [250, 500, 1000, 2000],
        "z_L": [0.40, 0.385, 0.376, 0.371],
        "gap": [0.032, 0.017, 0.008, 0.003],
        "shrink": [float("nan"), 0.53, 0.47, 0.38],
        "head_dist": [1e-9, 1e-9, 1e-9, 1e-9],
        "head_cauchy": [float("nan"), 1e-3, 4e-4, 1e-4],
        "tail_half": [5.0, 6.0, 7.0, 7.5],
        "tail_fraction": [0.6, 0.7, 0.8, 0.9],
    }
    columns.update(overrides)
    return pd.DataFrame(columns)


def test_refinement_verdict_requires_settled_heads():
    drifts = [1e-12] * 4
    assert refinement_verdict(_refinement_table(), drifts)["passed"]
    assert not refinement_verdict(_refinement_table(head_dist=[1e-9, 1e-9, 1e-3, 1e-9]), drifts)["passed"]
    assert not refinement_verdict(_refinement_table(head_cauchy=[float("nan"), 1e-4, 4e-4, 1e-4]), drifts)["passed"]
    assert not refinement_verdict(_refinement_table(), drifts, exit_code=3)["passed"]


@pytest.mark.integration
def test_subcritical_scenarios(tmp_path):
    report = run_all(["subcritical", "tail_bound", "moments"])
    (tmp_path / "acceptance_subcritical.json").write_text(json.dumps(report, indent=2, default=float), encoding="utf-8")
    assert report["subcritical"]["passed"], report["subcritical"]
    assert report["tail_bound"]["passed"], report["tail_bound"]
    assert report["moments"]["passed"], report["moments"]


@pytest.mark.integration
def test_refinement_scenario(tmp_path):
    report = run_all(["refinement"], out_dir=tmp_path / "refinement")
    assert report["refinement"]["passed"], report["refinement"]
