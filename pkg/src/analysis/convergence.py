"""Regime classification and long-time / refinement convergence diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from ..coefficients import CoefficientModel
from ..config import section
from ..equilibrium import CriticalData, activity_of_density, equilibrium_profile, finite_activity_of_density
from ..kinetics.state import State
from .tails import head_distance, tail_mass

SUBCRITICAL = "subcritical"
CRITICAL = "critical"
SUPERCRITICAL = "supercritical"


def classify_regime(rho0: float, rho_s: float, rel_tol: float | None = None) -> str:
    """Critical when |rho0 - rho_s| <= rel_tol * rho_s; an infinite rho_s is always subcritical."""
    if rel_tol is None:
        rel_tol = float(section("regimes").get("critical_rel_tol", 1e-6))
    if math.isinf(rho_s):
        return SUBCRITICAL
    if abs(rho0 - rho_s) <= rel_tol * rho_s:
        return CRITICAL
    return SUBCRITICAL if rho0 < rho_s else SUPERCRITICAL


@dataclass(frozen=True)
class LimitPrediction:
    regime: str
    limit_density: float
    z_limit: float
    mode: str
    excess: float


def predict_limit(model: CoefficientModel, rho0: float, critical: CriticalData) -> LimitPrediction:
    """Expected t -> infinity limit: the equilibrium with density min(rho0, rho_s).

    Strong convergence up to rho_s; above it the excess rho0 - rho_s leaves
    every finite cluster size and convergence is only weak-*.
    """
    regime = classify_regime(rho0, critical.rho_s)
    if regime == SUPERCRITICAL:
        return LimitPrediction(regime, critical.rho_s, critical.z_s, "weak-*", rho0 - critical.rho_s)
    if regime == CRITICAL:
        return LimitPrediction(regime, critical.rho_s, critical.z_s, "strong", 0.0)
    z = activity_of_density(model, rho0, critical=critical)
    return LimitPrediction(regime, rho0, z, "strong", 0.0)


def plateau_reached(previous: float, current: float, rel: float = 0.01) -> bool:
    """True once a diagnostic changes by less than ``rel`` relative between horizons."""
    if previous == current:
        return True
    return abs(current - previous) <= rel * abs(previous)


def decreasing_from(values: Sequence[float]) -> int:
    """First index after which the sequence never increases again (len - 1 if it ends on a rise)."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 0
    rises = np.nonzero(np.diff(v) > 0)[0]
    return 0 if rises.size == 0 else int(rises[-1] + 1)


def refinement_table(
    model: CoefficientModel,
    finals: dict[int, State],
    rho0: float,
    critical: CriticalData,
    *,
    J: int = 10,
) -> pd.DataFrame:
    """One row per truncation L with the finite-L activity and weak-* surrogates.

    Columns: L, z_L, gap (z_L - z_s), shrink (gap ratio to the previous L),
    head_dist (to the finite-L equilibrium), head_cauchy (to the previous L),
    tail_half (G_{L/2}), tail_fraction (G_{L/2} over the excess density).
    """
    rows = []
    prev_gap = None
    prev_state: State | None = None
    excess = rho0 - critical.rho_s if math.isfinite(critical.rho_s) else float("nan")
    for L in sorted(finals):
        state = finals[L]
        z_L = finite_activity_of_density(model, rho0, L)
        profile = equilibrium_profile(model, z_L, L)
        gap = z_L - critical.z_s
        G_half = tail_mass(state, max(1, L // 2))
        rows.append(
            {
                "L": L,
                "z_L": z_L,
                "gap": gap,
                "shrink": gap / prev_gap if prev_gap not in (None, 0.0) else float("nan"),
                "head_dist": head_distance(state, profile, J),
                "head_cauchy": head_distance(state, prev_state, J) if prev_state is not None else float("nan"),
                "tail_half": G_half,
                "tail_fraction": G_half / excess if excess and excess > 0 else float("nan"),
            }
        )
        prev_gap = gap
        prev_state = state
    return pd.DataFrame(rows, columns=["L", "z_L", "gap", "shrink", "head_dist", "head_cauchy", "tail_half", "tail_fraction"])
