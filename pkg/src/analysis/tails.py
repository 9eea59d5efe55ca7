"""Tail masses, moments and distances on single states."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from ..equilibrium import EquilibriumProfile
from ..kinetics.state import State


class ShapeMismatchError(ValueError):
    """Two density vectors of different truncation size."""


def _weighted(s: State) -> np.ndarray:
    return np.arange(1, s.L + 1) * s.c


def tail_masses(s: State) -> np.ndarray:
    """All G_i at once: ``out[i-1] = sum_{j>=i} j c_j``, accumulated from j = L down."""
    return np.cumsum(_weighted(s)[::-1])[::-1]


def tail_mass(s: State, i: int) -> float:
    if i < 1 or i > s.L + 1:
        raise IndexError(f"tail index i={i} outside [1, L+1] for L={s.L}")
    if i == s.L + 1:
        return 0.0
    return float(tail_masses(s)[i - 1])


def moment(s: State, mu: float) -> float:
    """sum_j j^mu c_j."""
    j = np.arange(1, s.L + 1, dtype=float)
    return float(np.cumsum((j**mu * s.c)[::-1])[-1])


def _reference_vector(ref: EquilibriumProfile | State | np.ndarray) -> np.ndarray:
    if isinstance(ref, EquilibriumProfile):
        return ref.densities
    if isinstance(ref, State):
        return ref.c
    return np.asarray(ref, dtype=float)


def strong_distance(s: State, ref: EquilibriumProfile | State | np.ndarray) -> float:
    """sum_j j |c_j - ref_j|, the density-norm distance."""
    other = _reference_vector(ref)
    if other.shape != s.c.shape:
        raise ShapeMismatchError(f"state has L={s.L}, reference has {other.shape[0]} entries")
    diff = np.arange(1, s.L + 1) * np.abs(s.c - other)
    return float(np.cumsum(diff[::-1])[-1])


def head_distance(s: State, ref: EquilibriumProfile | State | np.ndarray, J: int) -> float:
    """max_{j<=J} |c_j - ref_j|; the componentwise part of weak-* convergence."""
    other = _reference_vector(ref)
    J = min(J, s.L, other.shape[0])
    return float(np.max(np.abs(s.c[:J] - other[:J]))) if J > 0 else 0.0


@dataclass
class DiagnosticsSettings:
    G_indices: Sequence[int] = (1, 10, 50, 100)
    mu: Sequence[float] = (0.0, 2.0)
    J: int = 10
    reference: Optional[np.ndarray] = None


@dataclass
class DiagnosticsRecord:
    t: float
    rho: float
    G: dict[int, float]
    moments: dict[float, float]
    strong_dist: Optional[float]
    c_head: np.ndarray = field(repr=False)

    def to_row(self) -> dict[str, Any]:
        row: dict[str, Any] = {"t": self.t, "rho": self.rho}
        for mu, value in self.moments.items():
            row[f"moment_{mu:g}"] = value
        row["strong_dist"] = self.strong_dist if self.strong_dist is not None else float("nan")
        row["c1"] = float(self.c_head[0]) if self.c_head.size else 0.0
        for i, value in self.G.items():
            row[f"G_{i}"] = value
        return row


def diagnose(s: State, settings: DiagnosticsSettings) -> DiagnosticsRecord:
    G_all = tail_masses(s)
    G = {int(i): (float(G_all[i - 1]) if 1 <= i <= s.L else 0.0) for i in settings.G_indices}
    dist = strong_distance(s, settings.reference) if settings.reference is not None else None
    return DiagnosticsRecord(
        t=s.t,
        rho=float(G_all[0]),
        G=G,
        moments={float(mu): moment(s, mu) for mu in settings.mu},
        strong_dist=dist,
        c_head=s.c[: settings.J].copy(),
    )


def make_observer(settings: DiagnosticsSettings) -> Callable[[State], DiagnosticsRecord]:
    return lambda s: diagnose(s, settings)
