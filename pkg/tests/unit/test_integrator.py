import numpy as np
import pytest

from src.coefficients import power_law_model
from src.equilibrium import activity_of_density, equilibrium_profile
from src.kinetics import (
    IntegratorConfig,
    State,
    StiffnessError,
    TruncatedSystem,
    integrate,
    monomer_state,
    snapshot_schedule,
)


@pytest.fixture
def reference():
    return power_law_model(1.0, 0.5, 1.0, 0.5, 2)


def test_snapshot_schedule():
    log_times = snapshot_schedule(100.0, 5)
    assert log_times[0] == pytest.approx(1e-4)
    assert log_times[-1] == 100.0
    assert all(b > a for a, b in zip(log_times, log_times[1:]))
    assert snapshot_schedule(10.0, 4, "linear") == pytest.approx((2.5, 5.0, 7.5, 10.0))
    assert snapshot_schedule(3.0, 1) == (3.0,)
    with pytest.raises(ValueError):
        snapshot_schedule(1.0, 0)
    with pytest.raises(ValueError):
        snapshot_schedule(1.0, 3, "cubic")


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig.from_defaults(T=1.0, snapshot_times=(0.5, 0.2))
    with pytest.raises(ValueError):
        IntegratorConfig.from_defaults(T=1.0, snapshot_times=(2.0,))
    with pytest.raises(ValueError):
        IntegratorConfig.from_defaults(T=1.0, rel_tol=0.0)
    cfg = IntegratorConfig.from_defaults(T=5.0)
    assert cfg.rel_tol == 1e-9
    assert cfg.snapshot_times[-1] == 5.0


def test_snapshots_land_on_requested_times(reference):
    times = (0.1, 0.5, 2.0, 5.0)
    cfg = IntegratorConfig.from_defaults(T=5.0, snapshot_times=times)
    traj = integrate(reference, monomer_state(1.0, 30), cfg)
    assert traj.snapshots[0].source == "initial"
    assert tuple(traj.times) == (0.0,) + times
    assert all(s.source == "accepted_step" for s in traj.snapshots[1:])
    assert traj.final.t == 5.0


def test_density_is_conserved(reference):
    cfg = IntegratorConfig.from_defaults(T=20.0, snapshot_times=snapshot_schedule(20.0, 10))
    traj = integrate(reference, monomer_state(2.0, 60), cfg)
    assert traj.stats.max_density_drift <= 1e-8
    assert np.max(np.abs(traj.densities() - 2.0)) <= 2e-8
    assert traj.stats.valid
    assert traj.stats.steps_accepted > 0
    assert np.all(traj.final.c >= 0.0)


def test_zero_initial_data_stays_zero(reference):
    cfg = IntegratorConfig.from_defaults(T=10.0, snapshot_times=(1.0, 10.0))
    traj = integrate(reference, monomer_state(0.0, 20), cfg)
    assert all(np.all(s.c == 0.0) for s in traj.states)
    assert traj.stats.valid


def test_equilibrium_is_preserved(reference):
    z = activity_of_density(reference, 1.0)
    profile = equilibrium_profile(reference, z, 200)
    cfg = IntegratorConfig.from_defaults(T=50.0, snapshot_times=(50.0,))
    traj = integrate(reference, State(profile.densities), cfg)
    np.testing.assert_allclose(traj.final.c, profile.densities, rtol=1e-7, atol=1e-14)


def test_monomers_relax_toward_equilibrium(reference):
    z = activity_of_density(reference, 0.5)
    L = 80
    profile = equilibrium_profile(reference, z, L)
    cfg = IntegratorConfig.from_defaults(T=200.0, snapshot_times=snapshot_schedule(200.0, 8))
    traj = integrate(reference, monomer_state(profile.rho, L), cfg)
    assert abs(traj.final.c[0] - z) <= 1e-3


def test_observer_receives_each_snapshot(reference):
    seen = []

    def observer(state):
        seen.append(state.t)
        return state.density

    cfg = IntegratorConfig.from_defaults(T=1.0, snapshot_times=(0.5, 1.0))
    traj = integrate(reference, monomer_state(1.0, 10), cfg, system=TruncatedSystem(reference, 10), observer=observer)
    assert seen == [0.0, 0.5, 1.0]
    assert traj.snapshots[-1].diagnostics == pytest.approx(1.0)


def test_step_underflow_raises_with_last_state(reference):
    # the step floor is 1e-14 * T = 1e-2, above the first rejected step
    cfg = IntegratorConfig(rel_tol=1e-30, abs_tol=1e-300, h_init=1e-3, h_max=1e-3, T=1e12, snapshot_times=(1e12,))
    with pytest.raises(StiffnessError) as err:
        integrate(reference, monomer_state(1.0, 10), cfg)
    assert err.value.last_state.L == 10
    assert err.value.h < 1e-2
    assert err.value.last_state.t == 0.0


def test_short_horizon_dimer_formation(reference):
    # c_2(h) = a_11 rho0^2 h / 2 + O(h^2), a_11 = 2
    h = 1e-6
    cfg = IntegratorConfig.from_defaults(T=h, snapshot_times=(h,))
    traj = integrate(reference, monomer_state(1.0, 10), cfg)
    assert traj.final.c[1] == pytest.approx(0.5 * 2.0 * 1.0**2 * h, rel=1e-4)
    assert traj.final.c[0] == pytest.approx(1.0 - 2.0 * h, rel=1e-9)


def _rk4(f, y, T, n):
    dt = T / n
    for _ in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def test_matches_fixed_step_reference_on_small_truncation(reference):
    system = TruncatedSystem(reference, 20)
    s0 = monomer_state(1.0, 20)
    cfg = IntegratorConfig.from_defaults(T=1.0, snapshot_times=(0.5, 1.0))
    traj = integrate(reference, s0, cfg, system=system)
    expected = _rk4(system.rhs, s0.c.copy(), 1.0, 2000)
    np.testing.assert_allclose(traj.final.c, expected, rtol=1e-6, atol=1e-10)
    assert abs(float(np.dot(np.arange(1, 21), expected)) - 1.0) <= 1e-12
    assert traj.stats.max_density_drift <= 1e-8


def test_small_negative_overshoots_are_clamped_and_counted(reference):
    # one landing step far outside the stability region; the huge abs_tol accepts it
    cfg = IntegratorConfig(rel_tol=1e-9, abs_tol=1e300, h_init=10.0, h_max=10.0, T=10.0, snapshot_times=(10.0,))
    traj = integrate(reference, monomer_state(1.0, 5), cfg)
    assert traj.stats.clamped_mass > 0.0
    assert not traj.stats.valid
    assert np.all(traj.final.c >= 0.0)


def test_large_negative_overshoots_reject_the_step(reference):
    cfg = IntegratorConfig(rel_tol=1e300, abs_tol=1e-12, h_init=10.0, h_max=10.0, T=10.0, snapshot_times=(10.0,))
    traj = integrate(reference, monomer_state(1.0, 5), cfg)
    assert traj.stats.negative_rejections > 0
    assert traj.final.t == 10.0
    assert np.all(traj.final.c >= 0.0)
