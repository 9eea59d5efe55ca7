"""Run configuration: schema, ``key = value`` parser, presets and serializer.

A run config is a flat text file::

    # comment
    label = subcritical
    model.C1 = 1.0
    initial.kind = monomer
    integrator.snapshots = [1.0, 10.0, 100.0]

Values are YAML flow scalars. ``.yaml``/``.yml`` files with the same nested
keys are accepted too.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .coefficients import CoefficientError, CoefficientModel, load_custom_table, max_truncation, power_law_model
from .storage.writer import format_value

PRESETS = ("subcritical", "critical", "supercritical", "refinement")


class ConfigError(ValueError):
    """Schema or consistency problem in a run config, located by key and line."""

    def __init__(self, message: str, *, key: Optional[str] = None, line: Optional[int] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, protected_namespaces=())


class ModelSection(_Section):
    family: Literal["power_law", "custom"] = "power_law"
    N: int = Field(2, ge=2)
    C1: float = Field(1.0, ge=0)
    alpha: float = Field(0.5, ge=0, lt=1)
    C2: float = Field(1.0, ge=0)
    delta: float = Field(0.5, ge=0, lt=1)
    K: Optional[float] = Field(None, gt=0)
    K_a: Optional[float] = Field(None, gt=0)
    table: Optional[str] = None

    @model_validator(mode="after")
    def _custom_needs_table(self) -> "ModelSection":
        if self.family == "custom" and not self.table:
            raise ValueError("model.table is required for the custom family")
        return self


class InitialSection(_Section):
    kind: Literal["monomer", "equilibrium", "file", "equilibrium_plus_monomer"] = "monomer"
    rho0: Optional[float] = Field(None, ge=0)
    rho: Optional[float] = Field(None, ge=0)
    rho_eq: Optional[float] = Field(None, ge=0)
    rho_extra: Optional[float] = Field(None, ge=0)
    path: Optional[str] = None
    n: Optional[int] = Field(None, ge=0)

    @model_validator(mode="after")
    def _fields_for_kind(self) -> "InitialSection":
        needed = {
            "monomer": ("rho0",),
            "equilibrium": ("rho",),
            "file": ("path",),
            "equilibrium_plus_monomer": ("rho_eq", "rho_extra"),
        }[self.kind]
        missing = [name for name in needed if getattr(self, name) is None]
        if missing:
            raise ValueError(f"initial.kind={self.kind} needs {', '.join('initial.' + m for m in missing)}")
        return self


class IntegratorSection(_Section):
    rel_tol: Optional[float] = Field(None, gt=0)
    abs_tol: Optional[float] = Field(None, gt=0)
    h_init: Optional[float] = Field(None, gt=0)
    h_max: Optional[float] = Field(None, gt=0)
    T: Optional[float] = Field(None, gt=0)
    snapshots: Optional[list[float]] = None
    n_snapshots: Optional[int] = Field(None, ge=1)
    spacing: Optional[Literal["log", "linear"]] = None

    @field_validator("snapshots")
    @classmethod
    def _increasing(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("snapshot times must be strictly increasing")
        return value


class DiagnosticsSection(_Section):
    G_indices: Optional[list[int]] = None
    mu: Optional[list[float]] = None
    J: Optional[int] = Field(None, ge=1)
    reference_rho: Optional[float] = Field(None, ge=0)


class EnvelopeSection(_Section):
    t0: Optional[float] = Field(None, ge=0)
    z: Optional[float] = Field(None, gt=0)
    lam: float = Field(1.5, gt=1, alias="lambda")
    k0: int = Field(1, ge=1)
    C: Optional[float] = Field(None, ge=0)

    @property
    def enabled(self) -> bool:
        return self.t0 is not None


class SweepSection(_Section):
    L: Optional[list[int]] = None
    workers: int = Field(1, ge=1)


class ValidationSection(_Section):
    j_max: Optional[int] = Field(None, ge=4)
    limit_tol: Optional[float] = Field(None, gt=0)


class OutputSection(_Section):
    state_binaries: bool = False
    dir: Optional[str] = None


class RunConfig(_Section):
    label: str = "run"
    model: ModelSection = Field(default_factory=ModelSection)
    L: int = Field(2000, ge=1)
    sweep: SweepSection = Field(default_factory=SweepSection)
    initial: InitialSection = Field(default_factory=lambda: InitialSection(rho0=0.0))
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    diagnostics: DiagnosticsSection = Field(default_factory=DiagnosticsSection)
    envelope: EnvelopeSection = Field(default_factory=EnvelopeSection)
    validation: ValidationSection = Field(default_factory=ValidationSection)
    output: OutputSection = Field(default_factory=OutputSection)
    # directory relative paths in the config resolve against
    base_dir: Optional[str] = Field(None, exclude=True)

    def resolve(self, path: str) -> Path:
        p = Path(path).expanduser()
        if not p.is_absolute() and self.base_dir:
            p = Path(self.base_dir) / p
        return p

    def build_model(self) -> CoefficientModel:
        m = self.model
        if m.family == "custom":
            return load_custom_table(self.resolve(m.table), m.N, K=m.K, K_a=m.K_a)
        return power_law_model(m.C1, m.alpha, m.C2, m.delta, m.N, K=m.K if m.K is not None else m.C1, K_a=m.K_a)

    def sizes(self) -> list[int]:
        return list(self.sweep.L) if self.sweep.L else [self.L]


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def parse_kv(text: str) -> tuple[dict[str, Any], dict[str, int]]:
    """Parse ``key = value`` lines into a nested dict and a dotted-key -> line map."""
    nested: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, value_text = stripped.partition("=")
        key = key.strip()
        if not key or any(not part for part in key.split(".")):
            raise ConfigError("empty key", key=key or None, line=lineno)
        if key in lines:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", key=key, line=lineno)
        try:
            value = yaml.safe_load(value_text.strip()) if value_text.strip() else None
        except yaml.YAMLError as exc:
            raise ConfigError(f"unparseable value: {exc}", key=key, line=lineno) from exc
        if value is None:
            raise ConfigError("missing value", key=key, line=lineno)
        node = nested
        parts = key.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError(f"'{part}' is both a value and a section", key=key, line=lineno)
            node = child
        if isinstance(node.get(parts[-1]), dict):
            raise ConfigError(f"'{parts[-1]}' is both a value and a section", key=key, line=lineno)
        node[parts[-1]] = value
        lines[key] = lineno
    return nested, lines


def _flatten(data: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def _key_for(loc: tuple, lines: dict[str, int]) -> tuple[str, Optional[int]]:
    parts = [str(p) for p in loc if not isinstance(p, int)]
    while parts:
        key = ".".join(parts)
        if key in lines:
            return key, lines[key]
        prefixed = [k for k in lines if k.startswith(key + ".")]
        if prefixed:
            first = min(prefixed, key=lines.get)
            return key, lines[first]
        parts.pop()
    return ".".join(str(p) for p in loc if not isinstance(p, int)), None


def config_from_dict(data: dict[str, Any], lines: Optional[dict[str, int]] = None, *, base_dir: Optional[Path] = None) -> RunConfig:
    lines = lines or {}
    try:
        cfg = RunConfig.model_validate({**data, "base_dir": str(base_dir) if base_dir else None})
    except ValidationError as exc:
        err = exc.errors()[0]
        key, line = _key_for(tuple(err.get("loc", ())), lines)
        raise ConfigError(err.get("msg", "invalid value"), key=key or None, line=line) from exc
    check_consistency(cfg, lines)
    return cfg


def check_consistency(cfg: RunConfig, lines: Optional[dict[str, int]] = None) -> None:
    """Cross-field rules: L >= 2N+1 for every size, snapshots within T, referenced files exist."""
    lines = lines or {}
    N = cfg.model.N
    for L in cfg.sizes():
        if L < 2 * N + 1:
            key = "sweep.L" if cfg.sweep.L else "L"
            raise ConfigError(f"truncation {L} must be >= 2N+1 = {2 * N + 1}", key=key, line=lines.get(key))
    integ = cfg.integrator
    if integ.snapshots and integ.T is not None and integ.snapshots[-1] > integ.T:
        raise ConfigError("snapshot beyond horizon T", key="integrator.snapshots", line=lines.get("integrator.snapshots"))
    if cfg.model.table and not cfg.resolve(cfg.model.table).exists():
        raise ConfigError(f"file not found: {cfg.model.table}", key="model.table", line=lines.get("model.table"))
    if cfg.model.family == "custom" and cfg.model.table:
        try:
            top = max_truncation(cfg.build_model())
        except CoefficientError as exc:
            raise ConfigError(str(exc), key="model.table", line=lines.get("model.table")) from exc
        if top is not None and max(cfg.sizes()) > top:
            key = "sweep.L" if cfg.sweep.L else "L"
            raise ConfigError(
                f"truncation {max(cfg.sizes())} exceeds the custom table range {top}", key=key, line=lines.get(key)
            )
    if cfg.initial.kind == "file" and not cfg.resolve(cfg.initial.path).exists():
        raise ConfigError(f"file not found: {cfg.initial.path}", key="initial.path", line=lines.get("initial.path"))
    if cfg.initial.n is not None and cfg.initial.n > min(cfg.sizes()):
        raise ConfigError("truncation index exceeds L", key="initial.n", line=lines.get("initial.n"))


def load_run_config(path: Path | str) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("top level of a YAML run config must be a mapping")
        return config_from_dict(data, base_dir=path.parent.resolve())
    data, lines = parse_kv(text)
    return config_from_dict(data, lines, base_dir=path.parent.resolve())


def to_kv(cfg: RunConfig) -> str:
    """Serialize to the flat format; ``load_run_config`` reads it back to an equal config."""
    data = cfg.model_dump(by_alias=True, exclude_none=True)
    header = f"# bdk run config: {cfg.label}\n"
    return header + "".join(f"{k} = {format_value(v)}\n" for k, v in _flatten(data).items())


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

_REFERENCE_MODEL = {"family": "power_law", "N": 2, "C1": 1.0, "alpha": 0.5, "C2": 1.0, "delta": 0.5}


def preset(name: str) -> RunConfig:
    """Acceptance-scenario configs on the reference model C1=1, alpha=0.5, C2=1, delta=0.5, N=2."""
    base: dict[str, Any] = {
        "model": dict(_REFERENCE_MODEL),
        "L": 2000,
        "integrator": {"T": 1000.0},
    }
    if name == "subcritical":
        base.update(label="subcritical", initial={"kind": "monomer", "rho0": 2.0})
    elif name == "critical":
        from .equilibrium import critical_density

        rho_s = critical_density(RunConfig.model_validate({"model": _REFERENCE_MODEL}).build_model()).rho_s
        base.update(label="critical", initial={"kind": "monomer", "rho0": rho_s})
    elif name == "supercritical":
        base.update(label="supercritical", initial={"kind": "monomer", "rho0": 20.0})
    elif name == "refinement":
        base.update(
            label="refinement",
            initial={"kind": "monomer", "rho0": 20.0},
            sweep={"L": [250, 500, 1000, 2000], "workers": 4},
        )
    else:
        raise ConfigError(f"unknown preset {name!r}; choose one of: {', '.join(PRESETS)}")
    return config_from_dict(base)
