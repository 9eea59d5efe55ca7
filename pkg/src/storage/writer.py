"""Artifact writer for one run directory: CSV tables, key-value records, state binaries."""

import math
from pathlib import Path
from typing import Any, Iterable, Optional

import pandas as pd
import structlog

from ..kinetics.state import State, write_state
from .metadata import compute_sha256, create_manifest, save_manifest

log = structlog.get_logger("bdk.storage")


def format_value(value: Any) -> str:
    """Render a scalar or list as a YAML flow value that reads back to the same thing."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ".nan"
        if math.isinf(value):
            return ".inf" if value > 0 else "-.inf"
        text = repr(float(value))
        # PyYAML only reads exponent floats that carry a dot
        if "e" in text and "." not in text:
            mantissa, exponent = text.split("e")
            text = f"{mantissa}.0e{exponent}"
        return text
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    if hasattr(value, "item"):
        return format_value(value.item())
    return str(value)


def format_records(records: dict[str, Any]) -> str:
    """``key = value`` lines in the order given."""
    return "".join(f"{k} = {format_value(v)}\n" for k, v in records.items())


class ArtifactWriter:
    """Writes the files of one run and the manifest listing them."""

    def __init__(self, run_dir: Path):
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self._written: list[Path] = []

    def _track(self, path: Path) -> Path:
        if path not in self._written:
            self._written.append(path)
        log.debug("artifact_written", path=str(path))
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self.run_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        return self._track(path)

    def write_records(self, name: str, records: dict[str, Any]) -> Path:
        return self.write_text(name, format_records(records))

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        """CSV with Python's shortest round-trip float repr."""
        path = self.run_dir / name
        frame.to_csv(path, index=False, float_format=None, lineterminator="\n")
        return self._track(path)

    def write_rows(self, name: str, rows: Iterable[dict[str, Any]], columns: Optional[list[str]] = None) -> Path:
        return self.write_csv(name, pd.DataFrame(list(rows), columns=columns))

    def write_state(self, name: str, state: State) -> Path:
        return self._track(write_state(state, self.run_dir / name))

    def finalize(
        self,
        label: str,
        config: dict,
        *,
        status: str = "success",
        exit_code: int = 0,
        error: Optional[str] = None,
    ) -> Path:
        """Checksum every written artifact and save ``manifest.json``."""
        artifacts = [
            {
                "path": str(p.relative_to(self.run_dir)),
                "bytes": p.stat().st_size,
                "checksum_sha256": compute_sha256(p),
            }
            for p in self._written
        ]
        manifest = create_manifest(
            label=label, artifacts=artifacts, config=config, status=status, exit_code=exit_code, error=error
        )
        path = save_manifest(manifest, self.run_dir)
        log.info("run_artifacts_saved", run_dir=str(self.run_dir), files=len(artifacts), status=status)
        return path
