"""Storage utilities for bdk run artifacts."""

from .metadata import compute_sha256, create_manifest, load_manifest
from .writer import ArtifactWriter, format_records, format_value

__all__ = ["ArtifactWriter", "compute_sha256", "create_manifest", "format_records", "format_value", "load_manifest"]
