import numpy as np
import pytest

from src.analysis import (
    DiagnosticsSettings,
    ShapeMismatchError,
    diagnose,
    head_distance,
    make_observer,
    moment,
    strong_distance,
    tail_mass,
    tail_masses,
)
from src.coefficients import power_law_model
from src.equilibrium import equilibrium_profile
from src.kinetics import State


@pytest.fixture
def state():
    return State(np.array([1.0, 0.5, 0.25, 0.0, 0.1]), 3.0)


def test_tail_masses(state):
    G = tail_masses(state)
    np.testing.assert_allclose(G, [3.25, 2.25, 1.25, 0.5, 0.5])
    assert tail_mass(state, 1) == pytest.approx(state.density)
    assert tail_mass(state, 3) == pytest.approx(1.25)
    assert tail_mass(state, 6) == 0.0
    with pytest.raises(IndexError):
        tail_mass(state, 0)
    with pytest.raises(IndexError):
        tail_mass(state, 7)


def test_moments(state):
    assert moment(state, 0.0) == pytest.approx(1.85)
    assert moment(state, 1.0) == pytest.approx(state.density)
    assert moment(state, 2.0) == pytest.approx(1.0 + 2.0 + 2.25 + 2.5)


def test_distances(state):
    ref = np.array([1.0, 0.5, 0.0, 0.0, 0.0])
    assert strong_distance(state, ref) == pytest.approx(3 * 0.25 + 5 * 0.1)
    assert strong_distance(state, State(ref)) == strong_distance(state, ref)
    assert head_distance(state, ref, 2) == 0.0
    assert head_distance(state, ref, 3) == pytest.approx(0.25)
    assert strong_distance(state, state) == 0.0
    with pytest.raises(ShapeMismatchError):
        strong_distance(state, np.zeros(4))


def test_distance_to_profile():
    model = power_law_model(1.0, 0.5, 1.0, 0.5, 2)
    profile = equilibrium_profile(model, 0.2, 5)
    s = State(profile.densities)
    assert strong_distance(s, profile) == 0.0


def test_diagnose_record_and_row(state):
    settings = DiagnosticsSettings(G_indices=(1, 3, 9), mu=(0.0, 2.0), J=2, reference=np.zeros(5))
    rec = diagnose(state, settings)
    assert rec.t == 3.0
    assert rec.rho == pytest.approx(3.25)
    assert rec.G == {1: pytest.approx(3.25), 3: pytest.approx(1.25), 9: 0.0}
    assert rec.strong_dist == pytest.approx(3.25)
    row = rec.to_row()
    assert list(row)[:2] == ["t", "rho"]
    assert row["moment_0"] == pytest.approx(1.85)
    assert row["moment_2"] == pytest.approx(7.75)
    assert row["c1"] == 1.0
    assert row["G_9"] == 0.0


def test_observer_without_reference(state):
    rec = make_observer(DiagnosticsSettings())(state)
    assert rec.strong_dist is None
    assert np.isnan(rec.to_row()["strong_dist"])
    assert rec.c_head.shape == (5,)


def test_flat_equilibrium_tail_and_second_moment():
    # C2 = 0, z = 1/2: sum_{j>=2} j z^j = z/(1-z)^2 - z, sum_j j^2 z^j = z(1+z)/(1-z)^3
    model = power_law_model(1.0, 0.5, 0.0, 0.5, 2)
    s = State(equilibrium_profile(model, 0.5, 200).densities)
    assert tail_mass(s, 1) == pytest.approx(2.0, rel=1e-12)
    assert tail_mass(s, 2) == pytest.approx(1.5, rel=1e-12)
    assert moment(s, 2.0) == pytest.approx(6.0, rel=1e-12)
