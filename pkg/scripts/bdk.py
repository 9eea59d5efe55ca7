#!/usr/bin/env python3
"""bdk: batch runner for the truncated generalized Becker-Doring system.

Usage:
  python scripts/bdk.py run configs/subcritical.kv
  python scripts/bdk.py preset subcritical --emit configs/subcritical.kv
  python scripts/bdk.py validate configs/custom.kv
  python scripts/bdk.py equilibrium configs/subcritical.kv --rho 5.0

Exit codes: 0 success, 2 config/validation failure, 3 integration failure.
BDK_OUT_DIR overrides the output root from config.yaml.
"""

import argparse
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.coefficients import CoefficientError, TableRangeError
from src.equilibrium import LimitNotResolvedError, SupercriticalDensityError
from src.logging_config import configure_logging
from src.pipeline import (
    EXIT_OK,
    EXIT_VALIDATION,
    equilibrium_summary,
    run_config,
    run_directory,
    validate_config,
)
from src.runconfig import PRESETS, ConfigError, load_run_config, preset, to_kv


def cmd_run(args) -> int:
    cfg = load_run_config(args.config)
    outcome = run_config(cfg)
    print(f"Run '{cfg.label}': {outcome.status} (exit {outcome.exit_code})")
    print(f"Artifacts: {outcome.run_dir}")
    if outcome.error:
        print(f"Error: {outcome.error}", file=sys.stderr)
    for child in outcome.children:
        print(f"  {child.run_dir.name}: {child.status}")
    return outcome.exit_code


def cmd_preset(args) -> int:
    cfg = preset(args.name)
    text = to_kv(cfg)
    if args.emit:
        out = Path(args.emit)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        print(f"Wrote preset '{args.name}' to {out}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_run_config(args.config)
    report = validate_config(cfg, run_directory(cfg))
    print(report.render_text())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_equilibrium(args) -> int:
    cfg = load_run_config(args.config)
    result = equilibrium_summary(cfg, args.rho)
    print(f"rho = {result['rho']!r}  ({result['regime']})")
    print(f"z   = {result['z']!r}")
    print(f"z_s = {result['z_s']!r}")
    print(f"rho_s (sum j Q_j z_s^j) = {result['rho_s']!r}")
    print(f"rho_s (sum Q_j z_s^j)   = {result['rho_s_unweighted']!r}")
    print(f"z_L (L={cfg.L})          = {result['z_L']!r}")
    print("head:")
    for j, value in enumerate(result["head"], start=1):
        print(f"  c_{j:<4d} {value!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdk", description="Generalized Becker-Doring numerical lab")
    parser.add_argument("--log-level", help="Override BDK_LOG_LEVEL / config.yaml logging.level")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="Validate, integrate and write run artifacts")
    p_run.add_argument("config", help="Run config (key = value, or .yaml)")
    p_run.set_defaults(func=cmd_run)

    p_preset = sub.add_parser("preset", help="Print or write an acceptance-scenario config")
    p_preset.add_argument("name", help=f"One of: {', '.join(PRESETS)}")
    p_preset.add_argument("--emit", help="Write the config to this path instead of stdout")
    p_preset.set_defaults(func=cmd_preset)

    p_val = sub.add_parser("validate", help="Check the coefficient hypotheses for a config's model")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate)

    p_eq = sub.add_parser("equilibrium", help="Equilibrium activity and profile for a density")
    p_eq.add_argument("config")
    p_eq.add_argument("--rho", type=float, required=True, help="Total density (>= 0)")
    p_eq.set_defaults(func=cmd_equilibrium)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except (ConfigError, CoefficientError, SupercriticalDensityError, TableRangeError, LimitNotResolvedError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        # out-of-range CLI values such as a negative --rho
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
