"""Coagulation/fragmentation coefficient models under detailed balance.

Two kernel families are supported:

* ``PowerLaw``: a_jk = C1 (j^alpha + k^alpha) for min{j,k} <= N and
  log Q_j = C2 (j - j^delta), the canonical example family.
* ``CustomTable``: tabulated a_jk for j <= N and tabulated log Q_j.

Fragmentation rates are never stored; they are derived from detailed balance
b_jk = a_jk Q_j Q_k / Q_{j+k}. Q_j is handled in log space only, since it
grows like exp(C2 j) and overflows double precision long before the cluster
sizes we integrate.

All rate functions accept ints or integer arrays and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Union

import numpy as np
import structlog

from .config import section

log = structlog.get_logger("bdk.coefficients")

IntLike = Union[int, np.ndarray]


class CoefficientError(ValueError):
    """Invalid kernel parameters or table contents."""


class TableRangeError(IndexError):
    """Lookup outside the tabulated range of a custom kernel."""

    def __init__(self, message: str, *, index: int | None = None, limit: int | None = None):
        super().__init__(message)
        self.index = index
        self.limit = limit


@dataclass(frozen=True)
class PowerLaw:
    C1: float
    alpha: float
    C2: float
    delta: float

    def __post_init__(self) -> None:
        if self.C1 < 0 or self.C2 < 0:
            raise CoefficientError(f"C1 and C2 must be >= 0 (got C1={self.C1}, C2={self.C2})")
        if not 0.0 <= self.alpha < 1.0:
            raise CoefficientError(f"alpha must lie in [0, 1) (got {self.alpha})")
        if not 0.0 <= self.delta < 1.0:
            raise CoefficientError(f"delta must lie in [0, 1) (got {self.delta})")


@dataclass(frozen=True, eq=False)
class CustomTable:
    """Tabulated kernel.

    ``a[j-1, k-1]`` holds a_jk for j <= N and k <= width; entries with j > N
    are read through symmetry. ``log_q[j-1]`` holds log Q_j. ``alpha`` is the
    growth exponent the Hyp 3 check tests the table against.
    """

    a: np.ndarray
    log_q: np.ndarray
    alpha: float = 0.5

    @property
    def width(self) -> int:
        return int(self.a.shape[1])

    @property
    def q_len(self) -> int:
        return int(self.log_q.shape[0])


Family = Union[PowerLaw, CustomTable]


@dataclass(frozen=True, eq=False)
class CoefficientModel:
    """Kernel family plus interaction cutoff N and the Hyp 3 / Hyp 6 constants.

    ``K`` and ``K_a`` are optional claims; when given, validation checks the
    observed maxima against them.
    """

    N: int
    family: Family
    K: float | None = None
    K_a: float | None = None

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise CoefficientError(f"interaction cutoff N must be an integer >= 2 (got {self.N})")
        fam = self.family
        if isinstance(fam, CustomTable):
            a = np.array(fam.a, dtype=float)
            lq = np.array(fam.log_q, dtype=float)
            if a.ndim != 2 or a.shape[0] != self.N or a.shape[1] < self.N:
                raise CoefficientError(f"custom a table must have shape (N, K>=N); got {a.shape} for N={self.N}")
            if lq.ndim != 1 or lq.shape[0] < 2:
                raise CoefficientError("custom log_q table must be 1-D with at least two entries")
            if lq[0] != 0.0:
                raise CoefficientError(f"log Q_1 must be 0 (got {lq[0]})")
            if not np.all(np.isfinite(a)) or not np.all(np.isfinite(lq)):
                raise CoefficientError("custom tables must be finite")
            block = a[:, : self.N]
            if not np.array_equal(block, block.T):
                raise CoefficientError("custom a table is not symmetric on its j,k <= N block")
            a.setflags(write=False)
            lq.setflags(write=False)
            object.__setattr__(self, "family", CustomTable(a=a, log_q=lq, alpha=float(fam.alpha)))

    @property
    def is_power_law(self) -> bool:
        return isinstance(self.family, PowerLaw)

    @property
    def growth_exponent(self) -> float:
        return float(self.family.alpha)


def power_law_model(C1: float, alpha: float, C2: float, delta: float, N: int, **kwargs: Any) -> CoefficientModel:
    """PowerLaw model; K defaults to C1, the sharp Hyp 3 constant for this family."""
    kwargs.setdefault("K", C1)
    return CoefficientModel(N=N, family=PowerLaw(C1=C1, alpha=alpha, C2=C2, delta=delta), **kwargs)


def tabulate_model(
    N: int,
    a_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    log_q_fn: Callable[[np.ndarray], np.ndarray],
    width: int,
    q_len: int,
    *,
    alpha: float = 0.5,
    **kwargs: Any,
) -> CoefficientModel:
    """Build a Custom model by evaluating ``a_fn(j, k)`` and ``log_q_fn(j)`` on a grid."""
    j = np.arange(1, N + 1)[:, None]
    k = np.arange(1, width + 1)[None, :]
    a = np.asarray(a_fn(j, k), dtype=float) * np.ones((N, width))
    lq = np.asarray(log_q_fn(np.arange(1, q_len + 1)), dtype=float)
    lq = lq - lq[0]
    return CoefficientModel(N=N, family=CustomTable(a=a, log_q=lq, alpha=alpha), **kwargs)


def load_custom_table(path: Path | str, N: int, **kwargs: Any) -> CoefficientModel:
    """Load a Custom model from an ``.npz`` file with arrays ``a`` and ``log_q`` (optional ``alpha``)."""
    path = Path(path)
    if not path.exists():
        raise CoefficientError(f"custom table not found: {path}")
    with np.load(path) as data:
        if "a" not in data or "log_q" not in data:
            raise CoefficientError(f"{path} must contain arrays 'a' and 'log_q'")
        alpha = float(data["alpha"]) if "alpha" in data else 0.5
        table = CustomTable(a=np.array(data["a"], dtype=float), log_q=np.array(data["log_q"], dtype=float), alpha=alpha)
    log.debug("custom_table_loaded", path=str(path), width=table.width, q_len=table.q_len)
    return CoefficientModel(N=N, family=table, **kwargs)


def max_truncation(model: CoefficientModel) -> int | None:
    """Largest truncation L a custom table covers (a_{p,k} for k < L, Q_j for j <= L); None if unbounded."""
    fam = model.family
    if isinstance(fam, CustomTable):
        return min(fam.q_len, fam.width + 1)
    return None


def _as_index(x: IntLike, name: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.dtype.kind not in "iu":
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise CoefficientError(f"{name} must be integer cluster sizes")
        arr = arr.astype(np.int64)
    if np.any(arr < 1):
        raise CoefficientError(f"{name} must be >= 1")
    return arr.astype(np.int64)


def _scalar_or_array(out: np.ndarray, *inputs: IntLike) -> Any:
    if all(np.ndim(x) == 0 for x in inputs):
        return float(out)
    return out


def _custom_log_q(table: CustomTable, j: np.ndarray) -> np.ndarray:
    if j.size and int(j.max()) > table.q_len:
        raise TableRangeError(
            f"log Q_j requested for j={int(j.max())} beyond table length {table.q_len}",
            index=int(j.max()),
            limit=table.q_len,
        )
    return table.log_q[j - 1]


def coag_rate(model: CoefficientModel, j: IntLike, k: IntLike) -> Any:
    """a_jk; zero whenever min{j,k} > N."""
    jj, kk = np.broadcast_arrays(_as_index(j, "j"), _as_index(k, "k"))
    lo = np.minimum(jj, kk)
    hi = np.maximum(jj, kk)
    active = lo <= model.N
    fam = model.family
    if isinstance(fam, PowerLaw):
        jf = jj.astype(float)
        kf = kk.astype(float)
        out = np.where(active, fam.C1 * (jf**fam.alpha + kf**fam.alpha), 0.0)
    else:
        if np.any(active & (hi > fam.width)):
            bad = int(hi[active].max())
            raise TableRangeError(
                f"a_jk requested for k={bad} beyond table width {fam.width}", index=bad, limit=fam.width
            )
        rows = np.where(active, lo, 1) - 1
        cols = np.where(active, hi, 1) - 1
        out = np.where(active, fam.a[rows, cols], 0.0)
    return _scalar_or_array(np.asarray(out, dtype=float), j, k)


def log_q(model: CoefficientModel, j: IntLike) -> Any:
    """log Q_j; exactly 0 for j = 1."""
    jj = _as_index(j, "j")
    fam = model.family
    if isinstance(fam, PowerLaw):
        jf = jj.astype(float)
        out = fam.C2 * (jf - jf**fam.delta)
    else:
        out = _custom_log_q(fam, jj)
    return _scalar_or_array(np.asarray(out, dtype=float), j)


def log_balance_factor(model: CoefficientModel, j: IntLike, k: IntLike) -> Any:
    """log Q_j + log Q_k - log Q_{j+k}, i.e. log(b_jk / a_jk).

    The PowerLaw family uses the closed form C2((j+k)^delta - j^delta - k^delta),
    which avoids cancelling two numbers of size C2*j.
    """
    jj, kk = np.broadcast_arrays(_as_index(j, "j"), _as_index(k, "k"))
    fam = model.family
    if isinstance(fam, PowerLaw):
        jf = jj.astype(float)
        kf = kk.astype(float)
        out = fam.C2 * ((jf + kf) ** fam.delta - (jf**fam.delta + kf**fam.delta))
    else:
        out = _custom_log_q(fam, jj) + _custom_log_q(fam, kk) - _custom_log_q(fam, jj + kk)
    return _scalar_or_array(np.asarray(out, dtype=float), j, k)


def frag_rate(model: CoefficientModel, j: IntLike, k: IntLike) -> Any:
    """b_jk = a_jk exp(log Q_j + log Q_k - log Q_{j+k}); zero whenever min{j,k} > N."""
    jj, kk = np.broadcast_arrays(_as_index(j, "j"), _as_index(k, "k"))
    a = np.asarray(coag_rate(model, jj, kk), dtype=float)
    active = np.minimum(jj, kk) <= model.N
    out = np.zeros(jj.shape, dtype=float)
    if np.any(active):
        out[active] = a[active] * np.exp(log_balance_factor(model, jj[active], kk[active]))
    return _scalar_or_array(out, j, k)


def detailed_balance_residual(model: CoefficientModel, j: IntLike, k: IntLike) -> Any:
    """Relative mismatch of a_jk Q_j Q_k = b_jk Q_{j+k}, measured in log space.

    Both products overflow for large clusters, so the comparison is
    |log(b Q_{j+k}) - log(a Q_j Q_k)| / max(1, |log(a Q_j Q_k)|). Inactive
    pairs (min{j,k} > N) report 0.
    """
    jj, kk = np.broadcast_arrays(_as_index(j, "j"), _as_index(k, "k"))
    active = np.minimum(jj, kk) <= model.N
    out = np.zeros(jj.shape, dtype=float)
    if np.any(active):
        ja, ka = jj[active], kk[active]
        a = np.asarray(coag_rate(model, ja, ka), dtype=float)
        b = np.asarray(frag_rate(model, ja, ka), dtype=float)
        with np.errstate(divide="ignore"):
            lhs = np.log(b) + np.asarray(log_q(model, ja + ka))
            rhs = np.log(a) + np.asarray(log_q(model, ja)) + np.asarray(log_q(model, ka))
        out[active] = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))
    return _scalar_or_array(out, j, k)


# ---------------------------------------------------------------------------
# Hypothesis validation
# ---------------------------------------------------------------------------

EXACT = "exact"
NUMERICAL = "numerically supported"
CLOSED_FORM = "closed form"


@dataclass
class HypothesisCheck:
    key: str
    title: str
    passed: bool
    evidence: str
    detail: str = ""
    values: dict[str, float] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if not self.passed:
            return "FAIL"
        return "PASS" if self.evidence == EXACT else f"PASS ({self.evidence})"


@dataclass
class ValidationReport:
    j_max: int
    checks: list[HypothesisCheck]
    z_s_estimate: float
    degenerate: bool
    notes: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, key: str) -> HypothesisCheck:
        for c in self.checks:
            if c.key == key:
                return c
        raise KeyError(key)

    def render_text(self) -> str:
        lines = [f"Hypothesis validation (indices up to j_max={self.j_max})", ""]
        for c in self.checks:
            lines.append(f"- {c.key} {c.title}: {c.status}")
            if c.detail:
                lines.append(f"    {c.detail}")
            for name, value in c.values.items():
                lines.append(f"    {name} = {value!r}")
        lines.append("")
        lines.append(f"z_s estimate: {self.z_s_estimate!r}{' (degenerate)' if self.degenerate else ''}")
        for name, value in self.notes.items():
            lines.append(f"{name}: {value!r}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_records(self) -> dict[str, Any]:
        rec: dict[str, Any] = {"j_max": self.j_max, "passed": self.passed, "degenerate": self.degenerate}
        rec["z_s_estimate"] = self.z_s_estimate
        for c in self.checks:
            rec[f"{c.key}.passed"] = c.passed
            rec[f"{c.key}.evidence"] = c.evidence
            for name, value in c.values.items():
                rec[f"{c.key}.{name}"] = value
        for name, value in self.notes.items():
            rec[f"note.{name}"] = value
        return rec


def _pair_limit(model: CoefficientModel, j_max: int) -> int:
    """Largest k usable for a_{j,k+m} lookups (m <= N) within j_max and the table."""
    fam = model.family
    if isinstance(fam, CustomTable):
        return max(1, min(j_max, fam.width - model.N, fam.q_len - model.N))
    return j_max


def _q_limit(model: CoefficientModel, j_max: int) -> int:
    fam = model.family
    if isinstance(fam, CustomTable):
        return min(2 * j_max, fam.q_len)
    return 2 * j_max


_BLOCK = 256


def _upper_pairs(lo: int, hi: int, k_hi: int):
    """Row blocks of index pairs lo <= j <= hi, j <= k <= k_hi as (j, k, mask)."""
    for start in range(lo, hi + 1, _BLOCK):
        j = np.arange(start, min(start + _BLOCK, hi + 1))[:, None]
        k = np.arange(start, k_hi + 1)[None, :]
        if k.size == 0:
            return
        yield j, k, k >= j


def _check_hyp1(model: CoefficientModel, j_max: int) -> HypothesisCheck:
    N = model.N
    k_top = _pair_limit(model, j_max)
    j = np.arange(1, N + 1)[:, None]
    k = np.arange(1, k_top + 1)[None, :]
    problems: list[str] = []
    if N < 2:
        problems.append("N < 2")
    a = coag_rate(model, j, k)
    b = frag_rate(model, j, k)
    if not np.all(a > 0) or not np.all(b > 0):
        problems.append("non-positive rate with min{j,k} <= N")
    if not np.array_equal(a, coag_rate(model, k, j)) or not np.array_equal(b, frag_rate(model, k, j)):
        problems.append("asymmetric rates")
    # zero region above the cutoff; symmetry covers k < j
    for j_blk, k_blk, upper in _upper_pairs(N + 1, k_top, k_top):
        if np.any(coag_rate(model, j_blk, k_blk)[upper] != 0.0) or np.any(frag_rate(model, j_blk, k_blk)[upper] != 0.0):
            problems.append(f"non-zero rate with min{{j,k}} > N for j in [{int(j_blk[0, 0])}, {int(j_blk[-1, 0])}]")
            break
    return HypothesisCheck(
        key="hyp1",
        title="cutoff, positivity and symmetry",
        passed=not problems,
        evidence=EXACT,
        detail="; ".join(problems),
        values={"N": float(N), "k_checked": float(k_top)},
    )


def _check_hyp2(model: CoefficientModel, j_max: int, tol: float) -> HypothesisCheck:
    k_top = _pair_limit(model, j_max)
    if isinstance(model.family, CustomTable):
        k_top = min(k_top, model.family.q_len - model.N)
    j = np.arange(1, model.N + 1)[:, None]
    k = np.arange(1, k_top + 1)[None, :]
    resid = float(np.max(detailed_balance_residual(model, j, k)))
    q1 = float(log_q(model, 1))
    ok = resid <= tol and q1 == 0.0
    return HypothesisCheck(
        key="hyp2",
        title="detailed balance",
        passed=ok,
        evidence=EXACT,
        detail="" if ok else f"max residual {resid:.3e} (tol {tol:.1e}), log Q_1 = {q1}",
        values={"max_residual": resid},
    )


def _check_hyp3(model: CoefficientModel, j_max: int, tol: float) -> HypothesisCheck:
    alpha = model.growth_exponent
    k_top = _pair_limit(model, j_max)
    if isinstance(model.family, CustomTable):
        k_top = min(k_top, model.family.q_len - model.N)
    j = np.arange(1, model.N + 1)[:, None]
    k = np.arange(1, k_top + 1)[None, :]
    scale = j.astype(float) ** alpha + k.astype(float) ** alpha
    ratio = np.maximum(coag_rate(model, j, k), frag_rate(model, j, k)) / scale
    k_full = float(ratio.max())
    k_half = float(ratio[:, : max(1, k_top // 2)].max())
    stable = abs(k_full - k_half) <= tol * max(1.0, k_full)
    within_claim = model.K is None or k_full <= model.K * (1.0 + 1e-12)
    detail = []
    if alpha >= 1.0:
        detail.append(f"growth exponent {alpha} >= 1")
    if not stable:
        detail.append(f"sup a/(j^a+k^a) still growing: {k_half:.6g} -> {k_full:.6g}")
    if not within_claim:
        detail.append(f"observed K {k_full:.6g} exceeds declared K {model.K}")
    return HypothesisCheck(
        key="hyp3",
        title="growth bound",
        passed=alpha < 1.0 and stable and within_claim,
        evidence=NUMERICAL,
        detail="; ".join(detail),
        values={"alpha": alpha, "K_estimate": k_full},
    )


def _check_hyp4(model: CoefficientModel, j_max: int, slack: float, tol: float, degenerate_tol: float):
    q_top = _q_limit(model, j_max)
    worst = -np.inf
    for j_blk, k_blk, upper in _upper_pairs(1, min(j_max, q_top // 2), min(j_max, q_top - 1)):
        inside = upper & (j_blk + k_blk <= q_top)
        kk = np.where(inside, k_blk, j_blk)
        jj = np.broadcast_to(j_blk, kk.shape)
        excess = np.asarray(log_balance_factor(model, jj, kk)) - slack * np.maximum(
            1.0, np.abs(np.asarray(log_q(model, jj + kk)))
        )
        if np.any(inside):
            worst = max(worst, float(excess[inside].max()))
    superadditive = worst <= 0.0

    fam = model.family
    j_hi = min(j_max, q_top - 1)
    j_lo = max(1, j_hi // 2)
    r_hi = float(np.exp(log_q(model, j_hi) - log_q(model, j_hi + 1)))
    r_lo = float(np.exp(log_q(model, j_lo) - log_q(model, j_lo + 1)))
    if isinstance(fam, PowerLaw):
        z_s = float(np.exp(-fam.C2))
        limit_ok = fam.delta < 1.0
        evidence = CLOSED_FORM
    else:
        z_s = r_hi
        limit_ok = abs(r_hi - r_lo) <= tol
        evidence = NUMERICAL
    degenerate = z_s <= degenerate_tol
    detail = []
    if not superadditive:
        detail.append("log Q_j + log Q_k > log Q_{j+k} for some tested pair")
    if not limit_ok:
        detail.append(f"Q_j/Q_(j+1) not stabilized: {r_lo:.9g} (j={j_lo}) vs {r_hi:.9g} (j={j_hi})")
    if degenerate:
        detail.append("degenerate: critical activity at or below tolerance")
    check = HypothesisCheck(
        key="hyp4",
        title="superadditive log Q and critical activity limit",
        passed=superadditive and limit_ok and not degenerate,
        evidence=evidence if superadditive else EXACT,
        detail="; ".join(detail),
        values={"ratio_low_probe": r_lo, "ratio_high_probe": r_hi, "z_s": z_s},
    )
    return check, z_s, degenerate, j_hi


def _check_hyp5(model: CoefficientModel, j_max: int, tol: float) -> HypothesisCheck:
    N = model.N
    k_hi = _pair_limit(model, j_max)
    k_lo = max(1, k_hi // 2)
    dev_hi = 0.0
    dev_lo = 0.0
    for jr in range(1, N + 1):
        for m in range(1, N + 1):
            dev_hi = max(dev_hi, abs(coag_rate(model, jr, k_hi) / coag_rate(model, jr, k_hi + m) - 1.0))
            dev_lo = max(dev_lo, abs(coag_rate(model, jr, k_lo) / coag_rate(model, jr, k_lo + m) - 1.0))
    if isinstance(model.family, PowerLaw):
        ok, evidence = True, CLOSED_FORM
    else:
        ok = dev_hi <= tol and dev_hi <= dev_lo
        evidence = NUMERICAL
    return HypothesisCheck(
        key="hyp5",
        title="a_jk / a_(j,k+m) -> 1",
        passed=ok,
        evidence=evidence,
        detail="" if ok else f"deviation {dev_hi:.6g} at k={k_hi} (k={k_lo}: {dev_lo:.6g}, tol {tol:.1e})",
        values={"deviation_high_probe": dev_hi, "deviation_low_probe": dev_lo},
    )


def _check_hyp6(model: CoefficientModel, j_max: int, tol: float) -> HypothesisCheck:
    N = model.N
    k_hi = _pair_limit(model, j_max)
    k = np.arange(1, k_hi + 1)
    diffs = np.zeros(k_hi)
    for jr in range(1, N + 1):
        base = coag_rate(model, jr, k)
        for m in range(1, N + 1):
            diffs = np.maximum(diffs, np.abs(base - coag_rate(model, jr, k + m)))
    ka_full = float(diffs.max())
    ka_half = float(diffs[: max(1, k_hi // 2)].max())
    stable = ka_full - ka_half <= tol * max(1.0, ka_full)
    within_claim = model.K_a is None or ka_full <= model.K_a * (1.0 + 1e-12)
    detail = []
    if not stable:
        detail.append(f"sup |a_jk - a_(j,k+m)| still growing: {ka_half:.6g} -> {ka_full:.6g}")
    if not within_claim:
        detail.append(f"observed K_a {ka_full:.6g} exceeds declared K_a {model.K_a}")
    return HypothesisCheck(
        key="hyp6",
        title="bounded increments |a_jk - a_(j,k+m)| <= K_a",
        passed=stable and within_claim,
        evidence=NUMERICAL,
        detail="; ".join(detail),
        values={"K_a_estimate": ka_full},
    )


def validate_hypotheses(model: CoefficientModel, j_max: int, *, limit_tol: float | None = None) -> ValidationReport:
    """Check Hyps 1-6 for all indices up to ``j_max``.

    Finite checks of limits (the Q_j ratio limit of Hyp 4, Hyp 5, the
    stabilizing sups of Hyp 3 / Hyp 6) can only be numerically supported, never proved; the
    report says so. Failures are report entries, not exceptions.
    """
    if j_max < 2 * model.N:
        raise CoefficientError(f"j_max must be >= 2N = {2 * model.N} (got {j_max})")
    vcfg = section("validation")
    tol = float(limit_tol if limit_tol is not None else vcfg.get("limit_tol", 1e-6))
    balance_tol = float(vcfg.get("balance_tol", 1e-14))
    slack = float(vcfg.get("superadditivity_slack", 1e-12))
    degenerate_tol = float(vcfg.get("degenerate_activity", 1e-12))

    hyp4, z_s, degenerate, j_hi = _check_hyp4(model, j_max, slack, tol, degenerate_tol)
    checks = [
        _check_hyp1(model, j_max),
        _check_hyp2(model, j_max, balance_tol),
        _check_hyp3(model, j_max, tol),
        hyp4,
        _check_hyp5(model, j_max, tol),
        _check_hyp6(model, j_max, tol),
    ]
    # consequences of the z_s limit: Q_j/Q_(j+m) -> z_s^m and Q_j^(1/j) -> 1/z_s
    notes: dict[str, float] = {}
    lq_hi = float(log_q(model, j_hi))
    notes["Q_j^(1/j) at j_hi"] = float(np.exp(lq_hi / j_hi))
    notes["1/z_s"] = 1.0 / z_s if z_s > 0 else float("inf")
    for m in range(2, model.N + 1):
        if j_hi + m <= _q_limit(model, j_max) or isinstance(model.family, PowerLaw):
            notes[f"Q_j/Q_(j+{m}) at j_hi"] = float(np.exp(lq_hi - log_q(model, j_hi + m)))
            notes[f"z_s^{m}"] = z_s**m

    report = ValidationReport(j_max=j_max, checks=checks, z_s_estimate=z_s, degenerate=degenerate, notes=notes)
    for c in checks:
        if not c.passed:
            log.warning("hypothesis_failed", key=c.key, detail=c.detail)
    log.info("hypotheses_validated", j_max=j_max, passed=report.passed, degenerate=degenerate)
    return report
