"""Decreasing tail envelopes r_k and the G_i(t) <= C r_i bound check.

Given g_1..g_M > 0 and lambda > 1 the envelope is built as

    gbar_1 = sup g + 1,  gbar_k = sup_{j>=k} g_j,  h_k = gbar_k - gbar_{k+1}
    s_1 = h_1,           s_{k+1} = max(s_k / lambda, h_{k+1})
    r_k = sum_{j>=k} s_j

with the tail past M continued geometrically, s_{M+m} = s_M lambda^{-m}.
Then r decreases strictly, r_k >= g_k, and consecutive differences
r_k - r_{k+1} = s_k shrink by at most a factor lambda.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import structlog

from ..coefficients import CoefficientModel
from ..equilibrium import log_profile
from ..kinetics.integrator import Trajectory
from ..kinetics.state import State
from .tails import tail_masses

log = structlog.get_logger("bdk.analysis")


class EnvelopeError(ValueError):
    """Invalid input to the envelope construction."""


@dataclass(frozen=True, eq=False)
class TailEnvelope:
    r: np.ndarray
    s: np.ndarray
    lam: float
    g: np.ndarray = field(repr=False)
    closure: float = 0.0

    @property
    def M(self) -> int:
        return int(self.r.size)

    def verify(self) -> dict[str, bool]:
        r, s, g = self.r, self.s, self.g
        return {
            "positive": bool(np.all(r > 0) and np.all(s > 0)),
            "strictly_decreasing": bool(np.all(r[:-1] > r[1:])),
            "dominates": bool(np.all(r >= g)),
            "ratio_bounded": bool(np.all(s[:-1] / s[1:] <= self.lam)),
        }


def build_tail_envelope(g: Sequence[float] | np.ndarray, lam: float) -> TailEnvelope:
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise EnvelopeError("g must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise EnvelopeError("g must be finite and strictly positive")
    if not lam > 1.0:
        raise EnvelopeError(f"lambda must be > 1 (got {lam})")

    M = g.size
    gbar = np.empty(M + 1)
    gbar[:M] = np.maximum.accumulate(g[::-1])[::-1]
    gbar[M] = 0.0
    gbar[0] = g.max() + 1.0
    h = gbar[:M] - gbar[1:]

    s = np.empty(M)
    s[0] = h[0]
    for k in range(1, M):
        nxt = max(s[k - 1] / lam, h[k])
        # rounding in s_{k-1}/lam can leave the ratio one ulp above lam
        while s[k - 1] / nxt > lam:
            nxt = np.nextafter(nxt, np.inf)
        s[k] = nxt

    closure = s[-1] / (lam - 1.0)
    # r_k = gbar_k + sum_{j>=k} (s_j - h_j) + closure; every added term is >= 0
    lift = np.cumsum((s - h)[::-1])[::-1] + closure
    r = gbar[:M] + lift
    return TailEnvelope(r=r, s=s, lam=float(lam), g=g, closure=float(closure))


def premise_holds(model: CoefficientModel, s: State, z: float) -> bool:
    """c_j <= Q_j z^j for every j <= N."""
    N = min(model.N, s.L)
    if z <= 0:
        return bool(np.all(s.c[:N] <= 0))
    bound = np.exp(log_profile(model, z, np.arange(1, N + 1)))
    return bool(np.all(s.c[:N] <= bound))


def premise_onset(traj: Trajectory, model: CoefficientModel, z: float) -> Optional[float]:
    """Earliest snapshot time from which the premise holds on every later snapshot."""
    onset = None
    for snap in reversed(traj.snapshots):
        if not premise_holds(model, snap.state, z):
            break
        onset = snap.t
    return onset


@dataclass
class BoundViolation:
    t: float
    i: int
    G: float
    bound: float


@dataclass
class BoundReport:
    C: float
    k0: int
    t0: float
    M: int
    snapshots_checked: int
    minimal_C: float
    violations: list[BoundViolation] = field(default_factory=list)
    premise_checked: bool = False
    premise_ok: bool = True
    premise_failures: list[float] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.premise_ok and not self.violations

    def render_text(self, limit: int = 20) -> str:
        lines = [
            f"Tail bound G_i(t) <= C r_i for i in [{self.k0}, {self.M}], t >= {self.t0!r}",
            f"C = {self.C!r}   minimal C = {self.minimal_C!r}   snapshots = {self.snapshots_checked}",
        ]
        if self.premise_checked:
            status = "holds" if self.premise_ok else f"fails at t = {self.premise_failures[:5]}"
            lines.append(f"premise c_j <= Q_j z^j (j <= N): {status}")
        lines.append(f"violations: {len(self.violations)}")
        if self.violations:
            lines.append(f"{'t':>14} {'i':>6} {'G_i':>14} {'C r_i':>14}")
            for v in self.violations[:limit]:
                lines.append(f"{v.t:>14.6g} {v.i:>6d} {v.G:>14.6e} {v.bound:>14.6e}")
            if len(self.violations) > limit:
                lines.append(f"... {len(self.violations) - limit} more")
        return "\n".join(lines)

    def to_records(self) -> dict[str, Any]:
        return {
            "C": self.C,
            "k0": self.k0,
            "t0": self.t0,
            "M": self.M,
            "snapshots_checked": self.snapshots_checked,
            "minimal_C": self.minimal_C,
            "violations": len(self.violations),
            "premise_checked": self.premise_checked,
            "premise_ok": self.premise_ok,
            "holds": self.holds,
        }


def check_tail_bound(
    traj: Trajectory,
    env: TailEnvelope,
    C: float,
    k0: int,
    *,
    t0: float = 0.0,
    z: Optional[float] = None,
    model: Optional[CoefficientModel] = None,
) -> BoundReport:
    """Check G_i(t) <= C r_i on every snapshot with t >= t0 and k0 <= i <= M.

    When ``z`` is given the premise c_j(t) <= Q_j z^j (j <= N) is verified on
    the same snapshots; the bound is only asserted where it holds.
    """
    if k0 < 1:
        raise EnvelopeError(f"k0 must be >= 1 (got {k0})")
    top = min(env.M, traj.L)
    report = BoundReport(C=float(C), k0=int(k0), t0=float(t0), M=top, snapshots_checked=0, minimal_C=0.0)
    if z is not None:
        report.premise_checked = True
        model = model or traj.model
    r = env.r[k0 - 1 : top]
    idx = np.arange(k0, top + 1)
    for snap in traj.snapshots:
        if snap.t < t0:
            continue
        report.snapshots_checked += 1
        if report.premise_checked and not premise_holds(model, snap.state, z):
            report.premise_ok = False
            report.premise_failures.append(snap.t)
        G = tail_masses(snap.state)[k0 - 1 : top]
        if G.size == 0:
            continue
        report.minimal_C = max(report.minimal_C, float(np.max(G / r)))
        bad = G > C * r
        for i, g_i, r_i in zip(idx[bad], G[bad], r[bad]):
            report.violations.append(BoundViolation(t=snap.t, i=int(i), G=float(g_i), bound=float(C * r_i)))
    log.info(
        "tail_bound_checked",
        C=C,
        k0=k0,
        t0=t0,
        minimal_C=report.minimal_C,
        violations=len(report.violations),
        premise_ok=report.premise_ok,
    )
    return report


def search_tail_constant(
    traj: Trajectory, env: TailEnvelope, k0_grid: Iterable[int], *, t0: float = 0.0
) -> dict[int, float]:
    """Minimal C for each k0 on the grid."""
    return {int(k0): check_tail_bound(traj, env, np.inf, int(k0), t0=t0).minimal_C for k0 in k0_grid}


def envelope_from_state(s: State, lam: float, *, M: Optional[int] = None) -> TailEnvelope:
    """Envelope of the tail masses G_1..G_M of one state (trailing zero tails dropped)."""
    G = tail_masses(s)
    if M is not None:
        G = G[:M]
    positive = np.nonzero(G > 0)[0]
    if positive.size == 0:
        raise EnvelopeError("state has no positive tail mass")
    return build_tail_envelope(G[: positive[-1] + 1], lam)
