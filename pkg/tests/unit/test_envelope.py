import math

import numpy as np
import pytest

from src.analysis import (
    EnvelopeError,
    build_tail_envelope,
    check_tail_bound,
    envelope_from_state,
    premise_holds,
    premise_onset,
    search_tail_constant,
)
from src.coefficients import power_law_model
from src.equilibrium import equilibrium_profile
from src.kinetics import IntegratorConfig, State, Snapshot, Trajectory, integrate, monomer_state


@pytest.fixture
def reference():
    return power_law_model(1.0, 0.5, 1.0, 0.5, 2)


def test_geometric_sequence_has_closed_form_envelope():
    k = np.arange(1, 41)
    env = build_tail_envelope(2.0 ** -k, 2.0)
    np.testing.assert_allclose(env.r, 5.0 * 2.0 ** -k, rtol=1e-12)
    assert all(env.verify().values())
    assert env.M == 40


def test_envelope_of_non_monotone_sequence():
    g = np.array([0.1, 3.0, 0.2, 0.2, 1.0, 1e-6, 1e-9])
    env = build_tail_envelope(g, 1.5)
    checks = env.verify()
    assert checks == {"positive": True, "strictly_decreasing": True, "dominates": True, "ratio_bounded": True}
    np.testing.assert_allclose(env.r[:-1] - env.r[1:], env.s[:-1])


def test_invalid_envelope_input():
    with pytest.raises(EnvelopeError):
        build_tail_envelope([1.0, 0.0], 2.0)
    with pytest.raises(EnvelopeError):
        build_tail_envelope([1.0, 0.5], 1.0)
    with pytest.raises(EnvelopeError):
        build_tail_envelope([], 2.0)
    with pytest.raises(EnvelopeError):
        envelope_from_state(State(np.zeros(5)), 2.0)


def _trajectory(model, states):
    traj = Trajectory(model=model, L=states[0].L)
    traj.snapshots.extend(Snapshot(s) for s in states)
    return traj


def test_bound_check_reports_violations(reference):
    base = State(np.array([1.0, 0.5, 0.2, 0.1, 0.05, 0.0]), 0.0)
    grown = State(base.c * np.array([1.0, 1.0, 1.0, 1.0, 10.0, 1.0]), 1.0)
    traj = _trajectory(reference, [base, grown])
    env = envelope_from_state(base, 2.0)

    ok = check_tail_bound(traj, env, 1.0, 1, t0=0.0)
    assert ok.snapshots_checked == 2
    assert ok.minimal_C > 1.0
    assert not ok.holds
    assert all(v.t == 1.0 for v in ok.violations)

    generous = check_tail_bound(traj, env, ok.minimal_C * (1 + 1e-12), 1)
    assert generous.holds
    assert generous.violations == []

    late = check_tail_bound(traj, env, 1.0, 1, t0=0.5)
    assert late.snapshots_checked == 1

    text = ok.render_text()
    assert "violations:" in text
    records = ok.to_records()
    assert records["holds"] is False
    assert records["violations"] == len(ok.violations)


def test_minimal_constant_over_k0_grid(reference):
    base = State(np.array([1.0, 0.5, 0.2, 0.1, 0.05, 0.01]), 0.0)
    traj = _trajectory(reference, [base])
    env = envelope_from_state(base, 2.0)
    found = search_tail_constant(traj, env, [1, 3, 5])
    assert set(found) == {1, 3, 5}
    assert all(0 < c <= 1.0 for c in found.values())
    with pytest.raises(EnvelopeError):
        check_tail_bound(traj, env, 1.0, 0)


def test_premise_checks(reference):
    profile = equilibrium_profile(reference, 0.2, 10)
    at_eq = State(profile.densities)
    assert premise_holds(reference, at_eq, 0.25)
    assert not premise_holds(reference, at_eq, 0.15)

    cfg = IntegratorConfig.from_defaults(T=50.0, snapshot_times=(0.1, 1.0, 10.0, 50.0))
    traj = integrate(reference, monomer_state(0.5, 20), cfg)
    onset = premise_onset(traj, reference, 0.36)
    assert onset is not None and onset > 0.0
    report = check_tail_bound(traj, envelope_from_state(traj.final, 1.2), math.inf, 1, t0=onset, z=0.36)
    assert report.premise_checked and report.premise_ok
