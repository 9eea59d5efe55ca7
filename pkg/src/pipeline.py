"""Run, validate and equilibrium pipelines behind the ``bdk`` CLI.

A run validates the model, computes the critical data, integrates the
truncated system from the configured initial data and writes every artifact
of its run directory. Refinement configs repeat this for each L of the sweep
and add ``refinement.csv`` at the sweep root.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import structlog

from .analysis import (
    DiagnosticsSettings,
    check_tail_bound,
    classify_regime,
    envelope_from_state,
    head_distance,
    make_observer,
    predict_limit,
    refinement_table,
)
from .analysis.envelope import BoundReport
from .coefficients import (
    CoefficientError,
    CoefficientModel,
    TableRangeError,
    ValidationReport,
    max_truncation,
    validate_hypotheses,
)
from .config import get_output_root, section
from .equilibrium import (
    CriticalData,
    EquilibriumProfile,
    LimitNotResolvedError,
    SupercriticalDensityError,
    activity_of_density,
    critical_density,
    equilibrium_profile,
    finite_activity_of_density,
)
from .kinetics import (
    IntegratorConfig,
    State,
    StiffnessError,
    Trajectory,
    TruncatedSystem,
    equilibrium_plus_monomer,
    equilibrium_state,
    file_state,
    integrate,
    monomer_state,
    snapshot_schedule,
    truncate_initial,
)
from .mlflow_telemetry import log_run_metrics
from .runconfig import ConfigError, RunConfig
from .storage import ArtifactWriter

log = structlog.get_logger("bdk.pipeline")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INTEGRATION = 3


@dataclass
class RunOutcome:
    exit_code: int
    run_dir: Path
    status: str
    summary: dict[str, Any] = field(default_factory=dict)
    validation: Optional[ValidationReport] = None
    trajectory: Optional[Trajectory] = None
    bound_report: Optional[BoundReport] = None
    error: Optional[str] = None
    children: list["RunOutcome"] = field(default_factory=list)


def run_directory(cfg: RunConfig) -> Path:
    if cfg.output.dir:
        return cfg.resolve(cfg.output.dir)
    return get_output_root() / cfg.label


def integrator_config(cfg: RunConfig) -> IntegratorConfig:
    opts = cfg.integrator
    defaults = section("integrator")
    T = opts.T if opts.T is not None else float(defaults.get("T", 1000.0))
    if opts.snapshots:
        times = tuple(opts.snapshots)
    else:
        n = opts.n_snapshots or int(defaults.get("n_snapshots", 40))
        times = snapshot_schedule(T, n, opts.spacing or str(defaults.get("spacing", "log")))
    return IntegratorConfig.from_defaults(
        rel_tol=opts.rel_tol,
        abs_tol=opts.abs_tol,
        h_init=opts.h_init,
        h_max=opts.h_max,
        T=T,
        snapshot_times=times,
    )


def diagnostics_settings(cfg: RunConfig, reference: Optional[np.ndarray]) -> DiagnosticsSettings:
    defaults = section("diagnostics")
    opts = cfg.diagnostics
    return DiagnosticsSettings(
        G_indices=tuple(opts.G_indices or defaults.get("G_indices", [1, 10, 50, 100])),
        mu=tuple(opts.mu or defaults.get("mu", [0.0, 2.0])),
        J=int(opts.J or defaults.get("J", 10)),
        reference=reference,
    )


def validation_j_max(cfg: RunConfig, model: CoefficientModel) -> int:
    j_max = cfg.validation.j_max or int(section("validation").get("j_max", 10_000))
    return max(j_max, 2 * model.N)


def critical_for(cfg: RunConfig, model: CoefficientModel) -> CriticalData:
    """Critical data with the same ratio probes and tolerance the validation used."""
    return critical_density(model, j_probe=validation_j_max(cfg, model), limit_tol=cfg.validation.limit_tol)


def initial_state(cfg: RunConfig, model: CoefficientModel, L: int) -> State:
    ic = cfg.initial
    if ic.kind == "monomer":
        state = monomer_state(ic.rho0, L)
    elif ic.kind == "equilibrium":
        state = equilibrium_state(model, ic.rho, L)
    elif ic.kind == "equilibrium_plus_monomer":
        state = equilibrium_plus_monomer(model, ic.rho_eq, ic.rho_extra, L)
    else:
        state = file_state(cfg.resolve(ic.path), L)
    if ic.n is not None:
        state = truncate_initial(state.c, ic.n, L)
    return state


def reference_profile(
    cfg: RunConfig, model: CoefficientModel, critical: CriticalData, rho0: float, L: int
) -> EquilibriumProfile:
    """Strong-distance reference: the configured density, else the predicted limit equilibrium."""
    if cfg.diagnostics.reference_rho is not None:
        z = activity_of_density(model, cfg.diagnostics.reference_rho, critical=critical)
    else:
        z = predict_limit(model, rho0, critical).z_limit
    return equilibrium_profile(model, z, L)


def write_validation(writer: ArtifactWriter, report: ValidationReport) -> None:
    writer.write_text("validation.txt", report.render_text())
    writer.write_records("validation.kv", report.to_records())


def _trajectory_rows(traj: Trajectory, J: int) -> list[dict[str, float]]:
    rows = []
    for snap in traj.snapshots:
        row = {"t": snap.t, "rho": snap.state.density}
        head = snap.state.c[:J]
        for j, value in enumerate(head, start=1):
            row[f"c_{j}"] = float(value)
        rows.append(row)
    return rows


def _summary_text(summary: dict[str, Any]) -> str:
    lines = [f"bdk run '{summary['label']}' (L={summary['L']}, T={summary['T']})", ""]
    lines.append(f"status:              {summary['status']}")
    lines.append(f"regime:              {summary['regime']}  (rho0 = {summary['rho0']!r})")
    lines.append(f"z_s:                 {summary['z_s']!r}")
    lines.append(f"rho_s (sum j Q_j z_s^j): {summary['rho_s']!r}")
    lines.append(f"rho_s (sum Q_j z_s^j):   {summary['rho_s_unweighted']!r}")
    lines.append(f"limit:               {summary['limit_mode']} to density {summary['limit_density']!r}"
                 f" (excess {summary['excess']!r})")
    for key in ("final_strong_dist", "final_c1", "final_head_dist", "density_drift", "clamped_mass", "valid"):
        if key in summary:
            lines.append(f"{key + ':':<21}{summary[key]!r}")
    return "\n".join(lines)


def run_single(cfg: RunConfig, L: int, run_dir: Path) -> RunOutcome:
    """One (config, L) run with its artifacts in ``run_dir``."""
    writer = ArtifactWriter(run_dir)
    config_echo = cfg.model_dump(by_alias=True)
    config_echo["L"] = L
    bound_log = log.bind(label=cfg.label, L=L)

    def finish(outcome: RunOutcome) -> RunOutcome:
        writer.finalize(cfg.label, config_echo, status=outcome.status, exit_code=outcome.exit_code, error=outcome.error)
        return outcome

    try:
        model = cfg.build_model()
        top = max_truncation(model)
        if top is not None and L > top:
            raise TableRangeError(f"truncation L={L} exceeds the custom table range {top}", index=L, limit=top)
        report = validate_hypotheses(model, validation_j_max(cfg, model), limit_tol=cfg.validation.limit_tol)
    except (CoefficientError, TableRangeError) as exc:
        bound_log.error("model_rejected", error=str(exc))
        return finish(RunOutcome(EXIT_VALIDATION, run_dir, "invalid_model", error=str(exc)))
    write_validation(writer, report)
    if not report.passed:
        bound_log.error("validation_failed", failed=[c.key for c in report.checks if not c.passed])
        return finish(RunOutcome(EXIT_VALIDATION, run_dir, "validation_failed", validation=report))

    try:
        critical = critical_for(cfg, model)
        s0 = initial_state(cfg, model, L)
        rho0 = s0.density
        prediction = predict_limit(model, rho0, critical)
        reference = reference_profile(cfg, model, critical, rho0, L)
    except SupercriticalDensityError as exc:
        bound_log.error("supercritical_equilibrium_requested", rho=exc.rho, rho_s=exc.rho_s)
        return finish(RunOutcome(EXIT_VALIDATION, run_dir, "supercritical_density", validation=report, error=str(exc)))
    except (LimitNotResolvedError, TableRangeError) as exc:
        bound_log.error("critical_data_unavailable", error=str(exc))
        return finish(RunOutcome(EXIT_VALIDATION, run_dir, "critical_data_unavailable", validation=report, error=str(exc)))

    settings = diagnostics_settings(cfg, reference.densities)
    icfg = integrator_config(cfg)
    summary: dict[str, Any] = {
        "label": cfg.label,
        "L": L,
        "T": icfg.T,
        "rho0": rho0,
        "regime": classify_regime(rho0, critical.rho_s),
        "z_s": critical.z_s,
        "rho_s": critical.rho_s,
        "rho_s_divergent": critical.rho_s_divergent,
        "rho_s_unweighted": critical.rho_s_unweighted,
        "rho_s_unweighted_divergent": critical.rho_s_unweighted_divergent,
        "limit_mode": prediction.mode,
        "limit_density": prediction.limit_density,
        "z_limit": prediction.z_limit,
        "excess": prediction.excess,
        "z_L": finite_activity_of_density(model, rho0, L) if rho0 > 0 else 0.0,
    }

    try:
        traj = integrate(model, s0, icfg, system=TruncatedSystem(model, L), observer=make_observer(settings))
    except StiffnessError as exc:
        summary.update(status="stiffness_failure", exit_code=EXIT_INTEGRATION, failed_at=exc.last_state.t, h=exc.h)
        writer.write_state("states/last_valid.bin", exc.last_state)
        writer.write_records("summary.kv", summary)
        writer.write_text("summary.txt", _summary_text(summary))
        return finish(RunOutcome(EXIT_INTEGRATION, run_dir, "stiffness_failure", summary, report, error=str(exc)))

    final = traj.final
    last = traj.snapshots[-1].diagnostics
    summary.update(
        final_strong_dist=last.strong_dist,
        final_c1=float(final.c[0]),
        final_head_dist=head_distance(final, reference, settings.J),
        density_drift=traj.stats.max_density_drift,
        clamped_mass=traj.stats.clamped_mass,
        steps_accepted=traj.stats.steps_accepted,
        steps_rejected=traj.stats.steps_rejected,
        valid=traj.stats.valid,
    )

    writer.write_rows("trajectory.csv", _trajectory_rows(traj, settings.J))
    writer.write_rows("diagnostics.csv", [snap.diagnostics.to_row() for snap in traj.snapshots])
    if cfg.output.state_binaries:
        for index, snap in enumerate(traj.snapshots):
            writer.write_state(f"states/snap_{index}.bin", snap.state)

    bound = None
    if cfg.envelope.enabled:
        bound = tail_bound_for(cfg, model, traj)
        writer.write_text("bound_report.txt", bound.render_text())
        writer.write_records("bound_report.kv", bound.to_records())
        summary["tail_bound_minimal_C"] = bound.minimal_C
        summary["tail_bound_holds"] = bound.holds

    exit_code = EXIT_OK if traj.stats.valid else EXIT_INTEGRATION
    status = "success" if exit_code == EXIT_OK else "invalid_trajectory"
    summary.update(status=status, exit_code=exit_code)
    writer.write_records("summary.kv", summary)
    writer.write_text("summary.txt", _summary_text(summary))
    log_run_metrics(run_name=f"{cfg.label}-L{L}", summary=summary, tags={"regime": summary["regime"]})
    bound_log.info("run_finished", status=status, regime=summary["regime"], final_strong_dist=last.strong_dist)
    return finish(RunOutcome(exit_code, run_dir, status, summary, report, traj, bound))


def tail_bound_for(cfg: RunConfig, model: CoefficientModel, traj: Trajectory) -> BoundReport:
    """Envelope from G_i at the first snapshot with t >= envelope.t0, checked on [t0, T]."""
    opts = cfg.envelope
    base = next((s for s in traj.snapshots if s.t >= opts.t0), traj.snapshots[-1])
    env = envelope_from_state(base.state, opts.lam)
    C = opts.C if opts.C is not None else math.inf
    return check_tail_bound(traj, env, C, opts.k0, t0=base.t, z=opts.z, model=model)


def _sweep_worker(payload: tuple[dict, Optional[str], int, str]) -> tuple[int, int, str, Optional[np.ndarray], dict]:
    from .logging_config import configure_logging

    configure_logging()
    data, base_dir, L, run_dir = payload
    cfg = RunConfig.model_validate({**data, "base_dir": base_dir})
    outcome = run_single(cfg, L, Path(run_dir))
    final = outcome.trajectory.final.c if outcome.trajectory is not None else None
    return L, outcome.exit_code, outcome.status, final, outcome.summary


def run_sweep(cfg: RunConfig) -> RunOutcome:
    root = run_directory(cfg)
    root.mkdir(parents=True, exist_ok=True)
    payloads = [(cfg.model_dump(by_alias=True), cfg.base_dir, L, str(root / f"L_{L}")) for L in cfg.sizes()]
    if cfg.sweep.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.sweep.workers) as pool:
            results = list(pool.map(_sweep_worker, payloads))
    else:
        results = [_sweep_worker(p) for p in payloads]

    children = [RunOutcome(code, Path(p[3]), status, summary) for (_, code, status, _, summary), p in zip(results, payloads)]
    exit_code = max(child.exit_code for child in children)
    finals = {L: State(c, 0.0) for L, _, _, c, _ in results if c is not None}
    writer = ArtifactWriter(root)
    if finals and exit_code != EXIT_VALIDATION:
        model = cfg.build_model()
        critical = critical_for(cfg, model)
        rho0 = next(iter(finals.values())).density
        J = diagnostics_settings(cfg, None).J
        writer.write_csv("refinement.csv", refinement_table(model, finals, rho0, critical, J=J))
    status = "success" if exit_code == EXIT_OK else "failed"
    writer.finalize(cfg.label, cfg.model_dump(by_alias=True), status=status, exit_code=exit_code)
    log.info("sweep_finished", label=cfg.label, sizes=cfg.sizes(), exit_code=exit_code)
    return RunOutcome(exit_code, root, status, children=children)


def run_config(cfg: RunConfig) -> RunOutcome:
    if cfg.sweep.L:
        return run_sweep(cfg)
    return run_single(cfg, cfg.L, run_directory(cfg))


def validate_config(cfg: RunConfig, out_dir: Optional[Path] = None) -> ValidationReport:
    model = cfg.build_model()
    report = validate_hypotheses(model, validation_j_max(cfg, model), limit_tol=cfg.validation.limit_tol)
    if out_dir is not None:
        writer = ArtifactWriter(out_dir)
        write_validation(writer, report)
        writer.finalize(cfg.label, cfg.model_dump(by_alias=True), status="validated" if report.passed else "validation_failed")
    return report


def equilibrium_summary(cfg: RunConfig, rho: float) -> dict[str, Any]:
    """Activity and profile head for density rho, both rho_s readings and the finite-L activity."""
    model = cfg.build_model()
    critical = critical_for(cfg, model)
    J = diagnostics_settings(cfg, None).J
    result: dict[str, Any] = {
        "rho": rho,
        "z_s": critical.z_s,
        "rho_s": critical.rho_s,
        "rho_s_unweighted": critical.rho_s_unweighted,
        "regime": classify_regime(rho, critical.rho_s),
        "z_L": finite_activity_of_density(model, rho, cfg.L),
    }
    z = activity_of_density(model, rho, critical=critical)
    profile = equilibrium_profile(model, z, max(J, 1))
    result["z"] = z
    result["head"] = [float(x) for x in profile.densities[:J]]
    return result


__all__ = [
    "EXIT_INTEGRATION",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "ConfigError",
    "RunOutcome",
    "equilibrium_summary",
    "run_config",
    "run_directory",
    "run_single",
    "run_sweep",
    "validate_config",
]
