"""Manifest and metadata generation for run artifacts."""

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


def create_manifest(
    label: str,
    artifacts: list[dict],
    config: dict,
    status: str = "success",
    exit_code: int = 0,
    error: Optional[str] = None,
    schema_version: str = "1.0",
) -> dict:
    """Create a manifest dict for one run directory."""
    manifest = {
        "label": label,
        "created_at": utc_now(),
        "schema_version": schema_version,
        "status": status,
        "exit_code": exit_code,
        "error": error,
        "config": config,
        "artifacts": artifacts,
    }
    return manifest


def compute_sha256(file_path: Path) -> str:
    """Compute SHA256 checksum of a file."""
    sha256 = hashlib.sha256()
    with open(file_path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            sha256.update(chunk)
    return sha256.hexdigest()


def save_manifest(manifest: dict, run_dir: Path) -> Path:
    """Save manifest to the run directory as JSON."""
    run_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = run_dir / "manifest.json"
    with open(manifest_path, "w") as f:
        json.dump(manifest, f, indent=2, default=_json_default)
    return manifest_path


def load_manifest(run_dir: Path) -> dict[str, Any]:
    with open(Path(run_dir) / "manifest.json") as f:
        return json.load(f)


def _json_default(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)
