import math

import numpy as np
import pytest

from src.analysis import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    classify_regime,
    decreasing_from,
    plateau_reached,
    predict_limit,
    refinement_table,
)
from src.coefficients import power_law_model
from src.equilibrium import critical_density, equilibrium_profile, finite_activity_of_density
from src.kinetics import State


@pytest.fixture(scope="module")
def reference():
    return power_law_model(1.0, 0.5, 1.0, 0.5, 2)


@pytest.fixture(scope="module")
def critical(reference):
    return critical_density(reference)


def test_classify_regime():
    assert classify_regime(1.0, 10.0) == SUBCRITICAL
    assert classify_regime(10.0 + 5e-6, 10.0) == CRITICAL
    assert classify_regime(10.1, 10.0) == SUPERCRITICAL
    assert classify_regime(1e9, math.inf) == SUBCRITICAL
    assert classify_regime(10.5, 10.0, rel_tol=0.1) == CRITICAL


def test_predict_limit(reference, critical):
    sub = predict_limit(reference, 2.0, critical)
    assert sub.regime == SUBCRITICAL
    assert sub.mode == "strong"
    assert sub.limit_density == 2.0
    assert 0 < sub.z_limit < critical.z_s
    assert sub.excess == 0.0

    sup = predict_limit(reference, 20.0, critical)
    assert sup.regime == SUPERCRITICAL
    assert sup.mode == "weak-*"
    assert sup.limit_density == critical.rho_s
    assert sup.z_limit == critical.z_s
    assert sup.excess == pytest.approx(20.0 - critical.rho_s)

    at = predict_limit(reference, critical.rho_s, critical)
    assert at.regime == CRITICAL and at.mode == "strong"


def test_plateau_and_monotone_tail():
    assert plateau_reached(1.0, 1.005)
    assert not plateau_reached(1.0, 1.02)
    assert plateau_reached(0.0, 0.0)
    assert decreasing_from([5.0, 6.0, 4.0, 3.0, 1.0]) == 1
    assert decreasing_from([3.0, 2.0, 1.0]) == 0
    assert decreasing_from([1.0, 2.0]) == 1


def test_refinement_table_on_equilibrium_finals(reference, critical):
    rho0 = 20.0
    finals = {}
    for L in (100, 200, 400):
        z_L = finite_activity_of_density(reference, rho0, L)
        finals[L] = State(equilibrium_profile(reference, z_L, L).densities)
    table = refinement_table(reference, finals, rho0, critical, J=5)
    assert list(table.columns) == ["L", "z_L", "gap", "shrink", "head_dist", "head_cauchy", "tail_half", "tail_fraction"]
    assert list(table["L"]) == [100, 200, 400]
    assert np.all(np.diff(table["z_L"]) < 0)
    assert np.all(table["gap"] > 0)
    assert math.isnan(table["shrink"].iloc[0])
    assert np.all(table["shrink"].iloc[1:] < 1.0)
    assert np.all(table["head_dist"] <= 1e-12)
    assert np.all(table["head_cauchy"].iloc[1:] > 0)
    assert np.all(table["tail_fraction"] > 0)
