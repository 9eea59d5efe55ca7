"""Equilibria c_j = Q_j z^j, the critical activity z_s and the critical density rho_s."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import structlog
from scipy import optimize
from scipy.special import logsumexp

from .coefficients import CoefficientModel, CustomTable, PowerLaw, log_q
from .config import section

log = structlog.get_logger("bdk.equilibrium")

_CHUNK = 4096


class LimitNotResolvedError(RuntimeError):
    """Q_j / Q_{j+1} has not stabilized over the tabulated range."""

    def __init__(self, message: str, *, low_probe: float, high_probe: float):
        super().__init__(message)
        self.low_probe = low_probe
        self.high_probe = high_probe


class SupercriticalDensityError(ValueError):
    """rho > rho_s: the infinite system has no equilibrium with this density."""

    def __init__(self, message: str, *, rho: float, rho_s: float):
        super().__init__(message)
        self.rho = rho
        self.rho_s = rho_s


@dataclass(frozen=True)
class SeriesResult:
    """Partial sum of sum_j j^weight Q_j z^j plus how it was stopped."""

    value: float
    terms: int
    tail_bound: float
    converged: bool
    divergent: bool


@dataclass(frozen=True)
class CriticalData:
    z_s: float
    rho_s: float
    rho_s_unweighted: float
    series_terms_used: int
    tail_bound: float
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def rho_s_divergent(self) -> bool:
        return math.isinf(self.rho_s)

    @property
    def rho_s_unweighted_divergent(self) -> bool:
        return math.isinf(self.rho_s_unweighted)


@dataclass(frozen=True, eq=False)
class EquilibriumProfile:
    z: float
    L: int
    densities: np.ndarray
    rho: float

    @property
    def c(self) -> np.ndarray:
        return self.densities


def log_profile(model: CoefficientModel, z: float, j) -> np.ndarray:
    """log c_j = log Q_j + j log z for z > 0.

    For the PowerLaw family this is j (log z + C2) - C2 j^delta, which keeps
    the large terms C2 j and j log z from cancelling in floating point.
    """
    j = np.asarray(j)
    fam = model.family
    if isinstance(fam, PowerLaw):
        jf = j.astype(float)
        return jf * (math.log(z) + fam.C2) - fam.C2 * jf**fam.delta
    return np.asarray(log_q(model, j)) + j * math.log(z)


def _series_settings() -> dict:
    cfg = section("series")
    return {
        "q": float(cfg.get("ratio_bound", 0.999)),
        "window": int(cfg.get("window", 10)),
        "term_cap": int(cfg.get("term_cap", 10_000_000)),
        "divergence": float(cfg.get("divergence_threshold", 1e12)),
    }


def default_series_tol() -> float:
    return float(section("series").get("tol", 1e-12))


def series_sum(model: CoefficientModel, z: float, tol: float, *, weight: int = 1) -> SeriesResult:
    """Sum j^weight Q_j z^j in chunks until a geometric tail majorant is below ``tol``.

    Terms are formed in log space. Once every ratio of consecutive terms over
    the last ``window`` terms is at most q < 1, the remainder after the last
    term t is bounded by t r / (1 - r), r being the largest observed ratio.
    """
    if z < 0 or tol <= 0:
        raise ValueError(f"need z >= 0 and tol > 0 (got z={z}, tol={tol})")
    if z == 0:
        return SeriesResult(0.0, 0, 0.0, True, False)

    s = _series_settings()
    cap = s["term_cap"]
    if isinstance(model.family, CustomTable):
        cap = min(cap, model.family.q_len)
    total = 0.0
    start = 1
    tail = math.inf
    ratio = math.inf
    while start <= cap:
        stop = min(start + _CHUNK, cap + 1)
        j = np.arange(start, stop)
        log_terms = log_profile(model, z, j)
        if weight:
            log_terms = log_terms + weight * np.log(j)
        with np.errstate(over="ignore"):
            terms = np.exp(log_terms)
        total += float(np.sum(terms))
        if not math.isfinite(total):
            log.info("series_divergent", z=z, terms=int(stop - 1), reason="overflow")
            return SeriesResult(math.inf, int(stop - 1), math.inf, False, True)

        window = min(s["window"], len(log_terms) - 1)
        if window >= 1:
            ratio = float(np.exp(np.max(np.diff(log_terms[-(window + 1):]))))
            if ratio <= s["q"]:
                tail = float(np.exp(log_terms[-1])) * ratio / (1.0 - ratio)
                if tail <= tol:
                    return SeriesResult(total, int(stop - 1), tail, True, False)
        if total > s["divergence"] and ratio >= 1.0:
            log.info("series_divergent", z=z, terms=int(stop - 1), reason="non-decaying terms")
            return SeriesResult(math.inf, int(stop - 1), math.inf, False, True)
        start = stop

    if total > s["divergence"] or ratio >= 1.0:
        log.info("series_divergent", z=z, terms=cap, reason="term cap")
        return SeriesResult(math.inf, cap, math.inf, False, True)
    log.warning("series_not_converged", z=z, terms=cap, tail_bound=tail, partial_sum=total)
    return SeriesResult(total, cap, tail, False, False)


def critical_activity(model: CoefficientModel, j_probe: int | None = None, *, tol: float | None = None) -> float:
    """z_s = lim Q_j / Q_{j+1}; closed form e^{-C2} for the PowerLaw family.

    Custom tables compare the ratio at j_probe and j_probe // 2, the same probes
    and tolerance ``validate_hypotheses`` uses (defaults: ``validation.j_max``
    and ``validation.limit_tol``), so a model that passed validation resolves here.
    """
    fam = model.family
    if isinstance(fam, PowerLaw):
        return math.exp(-fam.C2)
    vcfg = section("validation")
    tol = float(tol if tol is not None else vcfg.get("limit_tol", 1e-6))
    j_probe = int(j_probe if j_probe is not None else vcfg.get("j_max", 10_000))
    j_hi = min(j_probe, fam.q_len - 1)
    j_lo = max(1, j_hi // 2)
    high = math.exp(float(log_q(model, j_hi)) - float(log_q(model, j_hi + 1)))
    low = math.exp(float(log_q(model, j_lo)) - float(log_q(model, j_lo + 1)))
    if abs(high - low) > tol:
        raise LimitNotResolvedError(
            f"Q_j/Q_(j+1) not resolved: {low!r} at j={j_lo} vs {high!r} at j={j_hi}",
            low_probe=low,
            high_probe=high,
        )
    return high


def density_of_activity(model: CoefficientModel, z: float, tol: float | None = None) -> float:
    """Density sum_j j Q_j z^j; ``math.inf`` when the series diverges."""
    return series_sum(model, z, tol if tol is not None else default_series_tol()).value


def critical_density(
    model: CoefficientModel,
    tol: float | None = None,
    *,
    j_probe: int | None = None,
    limit_tol: float | None = None,
) -> CriticalData:
    """rho_s with the j-weight, plus the unweighted sum_j Q_j z_s^j reading."""
    tol = tol if tol is not None else default_series_tol()
    z_s = critical_activity(model, j_probe, tol=limit_tol)
    weighted = series_sum(model, z_s, tol, weight=1)
    unweighted = series_sum(model, z_s, tol, weight=0)
    data = CriticalData(
        z_s=z_s,
        rho_s=weighted.value,
        rho_s_unweighted=unweighted.value,
        series_terms_used=weighted.terms,
        tail_bound=weighted.tail_bound,
        flags={"converged": weighted.converged, "unweighted_converged": unweighted.converged},
    )
    log.info("critical_density", z_s=z_s, rho_s=data.rho_s, rho_s_unweighted=data.rho_s_unweighted)
    return data


def activity_of_density(
    model: CoefficientModel,
    rho: float,
    tol: float | None = None,
    *,
    critical: CriticalData | None = None,
) -> float:
    """Activity z in [0, z_s] with density rho, by bisection on the increasing density map."""
    tol = tol if tol is not None else default_series_tol()
    if rho < 0:
        raise ValueError(f"density must be >= 0 (got {rho})")
    if rho == 0:
        return 0.0
    crit = critical or critical_density(model, tol / 4)
    if math.isfinite(crit.rho_s):
        if rho > crit.rho_s + tol:
            raise SupercriticalDensityError(
                f"supercritical density has no equilibrium: rho={rho} > rho_s={crit.rho_s}",
                rho=rho,
                rho_s=crit.rho_s,
            )
        if abs(rho - crit.rho_s) <= tol:
            return crit.z_s

    max_iter = int(section("series").get("bisection_max_iter", 200))
    lo, hi = 0.0, crit.z_s
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        value = density_of_activity(model, mid, tol / 4)
        if abs(value - rho) <= tol:
            return mid
        if value < rho:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    log.warning("bisection_stopped", rho=rho, z=mid, bracket=(lo, hi))
    return mid


def equilibrium_profile(model: CoefficientModel, z: float, L: int) -> EquilibriumProfile:
    """c_j = exp(log Q_j + j log z) for j = 1..L with its truncated density."""
    if z < 0 or L < 1:
        raise ValueError(f"need z >= 0 and L >= 1 (got z={z}, L={L})")
    j = np.arange(1, L + 1)
    if z == 0:
        c = np.zeros(L)
    else:
        with np.errstate(over="ignore"):
            c = np.exp(log_profile(model, z, j))
        c[0] = z
    rho = float(np.cumsum((j * c)[::-1])[-1])
    return EquilibriumProfile(z=float(z), L=int(L), densities=c, rho=rho)


def finite_activity_of_density(model: CoefficientModel, rho: float, L: int, tol: float | None = None) -> float:
    """Activity of the closed truncated system's equilibrium: sum_{j<=L} j Q_j z^j = rho.

    Defined for every rho >= 0; above rho_s the root sits above z_s and moves
    down towards it as L grows. Solved for log z with brentq on a bracket
    that follows from c_1 = z <= rho and sum_j j Q_j z^j <= z sum_j j Q_j for z <= 1.
    """
    tol = tol if tol is not None else default_series_tol()
    if rho < 0:
        raise ValueError(f"density must be >= 0 (got {rho})")
    if rho == 0:
        return 0.0
    j = np.arange(1, L + 1)
    base = np.asarray(log_q(model, j)) + np.log(j)

    def excess(x: float) -> float:
        return float(logsumexp(base + j * x)) - math.log(rho)

    hi = math.log(rho)
    # for x <= 0 the sum is at most e^x sum_j j Q_j, so f(lo) <= -1
    lo = min(0.0, hi - float(logsumexp(base))) - 1.0
    xtol = max(tol / (rho * L), 1e-300)
    sol = optimize.root_scalar(excess, bracket=[lo, hi], method="brentq", xtol=xtol, maxiter=200)
    if not sol.converged:
        log.warning("finite_activity_not_converged", rho=rho, L=L, flag=sol.flag)
    return math.exp(sol.root)
