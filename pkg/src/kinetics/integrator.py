"""Adaptive Dormand-Prince 5(4) integration of the truncated system.

Steps are clipped so that every snapshot time is hit by an accepted step;
snapshots therefore carry integrator states, never interpolants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np
import structlog

from ..coefficients import CoefficientModel
from ..config import section
from .rhs import TruncatedSystem
from .state import State

log = structlog.get_logger("bdk.kinetics")

# Dormand-Prince tableau, FSAL: the 5th order weights are the last row
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_BT = {
    1: (1 / 5,),
    2: (3 / 40, 9 / 40),
    3: (44 / 45, -56 / 15, 32 / 9),
    4: (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    5: (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    6: (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
}
# b5 - b4
_TR = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_GROW_MAX = 5.0
_SHRINK_MIN = 0.2
_UNDERFLOW = 1e-14


class StiffnessError(RuntimeError):
    """Step size fell below the underflow limit."""

    def __init__(self, message: str, *, last_state: State, h: float):
        super().__init__(message)
        self.last_state = last_state
        self.h = h


def snapshot_schedule(T: float, n: int, spacing: str = "log") -> tuple[float, ...]:
    """n snapshot times ending at T; log spacing starts six decades below T."""
    if n < 1:
        raise ValueError(f"need at least one snapshot (got {n})")
    if spacing == "log":
        times = np.geomspace(T * 1e-6, T, n) if n > 1 else np.array([T])
    elif spacing == "linear":
        times = np.linspace(T / n, T, n)
    else:
        raise ValueError(f"unknown snapshot spacing {spacing!r}; use 'log' or 'linear'")
    times[-1] = T
    return tuple(float(x) for x in times)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float
    abs_tol: float
    h_init: float
    h_max: float
    T: float
    snapshot_times: tuple[float, ...]
    invalid_clamp_fraction: float = 1e-6

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("integrator tolerances must be > 0")
        if self.h_init <= 0 or self.h_max <= 0 or self.T <= 0:
            raise ValueError("h_init, h_max and T must be > 0")
        times = tuple(float(x) for x in self.snapshot_times)
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("snapshot times must be strictly increasing")
        if times and (times[0] < 0 or times[-1] > self.T):
            raise ValueError(f"snapshot times must lie in [0, T={self.T}]")
        object.__setattr__(self, "snapshot_times", times)

    @classmethod
    def from_defaults(cls, **overrides: Any) -> "IntegratorConfig":
        """config.yaml ``integrator`` section with keyword overrides."""
        cfg = section("integrator")
        values = {
            "rel_tol": float(cfg.get("rel_tol", 1e-9)),
            "abs_tol": float(cfg.get("abs_tol", 1e-12)),
            "h_init": float(cfg.get("h_init", 1e-4)),
            "h_max": float(cfg.get("h_max", 10.0)),
            "T": float(cfg.get("T", 1000.0)),
            "invalid_clamp_fraction": float(cfg.get("invalid_clamp_fraction", 1e-6)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None and k != "snapshot_times"})
        times = overrides.get("snapshot_times")
        if times is None:
            times = snapshot_schedule(
                values["T"], int(cfg.get("n_snapshots", 40)), str(cfg.get("spacing", "log"))
            )
        return cls(snapshot_times=tuple(times), **values)


@dataclass
class Snapshot:
    state: State
    diagnostics: Any = None
    source: str = "accepted_step"

    @property
    def t(self) -> float:
        return self.state.t


@dataclass
class RunStats:
    steps_accepted: int = 0
    steps_rejected: int = 0
    negative_rejections: int = 0
    rhs_evals: int = 0
    clamped_mass: float = 0.0
    rho0: float = 0.0
    max_density_drift: float = 0.0
    valid: bool = True

    def as_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class Trajectory:
    model: CoefficientModel
    L: int
    snapshots: list[Snapshot] = field(default_factory=list)
    stats: RunStats = field(default_factory=RunStats)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def states(self) -> list[State]:
        return [s.state for s in self.snapshots]

    @property
    def final(self) -> State:
        return self.snapshots[-1].state

    def densities(self) -> np.ndarray:
        return np.array([s.state.density for s in self.snapshots])


def _dp_step(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, k1: np.ndarray, h: float):
    ks = [k1]
    for stage in range(1, 7):
        incr = np.zeros_like(y)
        for coef, k in zip(_BT[stage], ks):
            if coef:
                incr += coef * k
        ks.append(f(y + h * incr))
    y_new = y + h * sum(coef * k for coef, k in zip(_BT[6], ks) if coef)
    err = h * sum(coef * k for coef, k in zip(_TR, ks) if coef)
    # ks[6] was evaluated at y_new (FSAL)
    return y_new, ks[6], err


def integrate(
    model: CoefficientModel,
    s0: State,
    cfg: IntegratorConfig,
    *,
    system: Optional[TruncatedSystem] = None,
    observer: Optional[Callable[[State], Any]] = None,
) -> Trajectory:
    """Integrate from s0 to cfg.T, snapshotting at cfg.snapshot_times.

    Error control uses the density norm: sum_j j |e_j| <= abs_tol + rel_tol * sum_j j |c_j|.
    A step leaving any c_j < -abs_tol is rejected and retried with half the
    step; smaller negatives are clamped to zero and their mass accumulated.
    ``observer`` maps each snapshot state to its diagnostics record.
    """
    system = system or TruncatedSystem(model, s0.L)
    f = system.rhs
    L = s0.L
    weights = np.arange(1, L + 1, dtype=float)
    y = s0.c.copy()
    t = s0.t
    rho0 = s0.density
    stats = RunStats(rho0=rho0)
    traj = Trajectory(model=model, L=L, stats=stats)
    traj.snapshots.append(Snapshot(s0, observer(s0) if observer else None, "initial"))

    targets = [x for x in cfg.snapshot_times if x > t]
    if not targets or targets[-1] < cfg.T:
        targets.append(cfg.T)
    h = min(cfg.h_init, cfg.h_max)
    h_min = _UNDERFLOW * cfg.T
    dy = f(y)
    stats.rhs_evals += 1
    log.info("integration_started", L=L, T=cfg.T, rho0=rho0, snapshots=len(targets))

    def underflow(h_now: float) -> StiffnessError:
        log.error("step_underflow", t=t, h=h_now, accepted=stats.steps_accepted)
        return StiffnessError(
            f"step size {h_now:.3e} below {h_min:.3e} at t={t!r}", last_state=State(y.copy(), t), h=h_now
        )

    for target in targets:
        while t < target:
            remaining = target - t
            landing = h >= remaining
            step = remaining if landing else h
            y_new, dy_new, err_vec = _dp_step(f, y, dy, step)
            stats.rhs_evals += 6
            scale = cfg.abs_tol + cfg.rel_tol * float(np.dot(weights, np.abs(y)))
            err = float(np.dot(weights, np.abs(err_vec))) / scale
            if not math.isfinite(err) or err > 1.0:
                stats.steps_rejected += 1
                shrink = _SHRINK_MIN if not math.isfinite(err) else max(_SHRINK_MIN, _SAFETY * err**-0.2)
                h = step * shrink
                if h < h_min:
                    raise underflow(h)
                continue
            if np.any(y_new < -cfg.abs_tol):
                stats.negative_rejections += 1
                h = 0.5 * step
                if h < h_min:
                    raise underflow(h)
                continue
            negative = y_new < 0
            if np.any(negative):
                stats.clamped_mass += float(np.dot(weights[negative], -y_new[negative]))
                y_new[negative] = 0.0
                dy_new = f(y_new)
                stats.rhs_evals += 1
            t = target if landing else t + step
            y, dy = y_new, dy_new
            stats.steps_accepted += 1
            grow = _GROW_MAX if err == 0 else min(_GROW_MAX, max(_SHRINK_MIN, _SAFETY * err**-0.2))
            proposal = min(cfg.h_max, step * grow)
            # a short landing step says nothing about the step size in use
            h = max(h, proposal) if landing else proposal
            h = min(h, cfg.h_max)

        state = State(y.copy(), t)
        if rho0 > 0:
            stats.max_density_drift = max(stats.max_density_drift, abs(state.density - rho0) / rho0)
        traj.snapshots.append(Snapshot(state, observer(state) if observer else None))

    stats.valid = stats.clamped_mass <= cfg.invalid_clamp_fraction * rho0
    log.info(
        "integration_finished",
        accepted=stats.steps_accepted,
        rejected=stats.steps_rejected,
        negative_rejections=stats.negative_rejections,
        clamped_mass=stats.clamped_mass,
        drift=stats.max_density_drift,
        valid=stats.valid,
    )
    return traj
