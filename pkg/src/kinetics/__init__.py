"""Truncated generalized Becker-Doring dynamics."""

from .integrator import (
    IntegratorConfig,
    RunStats,
    Snapshot,
    StiffnessError,
    Trajectory,
    integrate,
    snapshot_schedule,
)
from .rhs import TruncatedSystem, net_flux, rhs, rhs_dense
from .state import (
    State,
    StateFormatError,
    TruncationError,
    equilibrium_plus_monomer,
    equilibrium_state,
    file_state,
    monomer_state,
    read_state,
    truncate_initial,
    write_state,
)

__all__ = [
    "IntegratorConfig",
    "RunStats",
    "Snapshot",
    "State",
    "StateFormatError",
    "StiffnessError",
    "Trajectory",
    "TruncatedSystem",
    "TruncationError",
    "equilibrium_plus_monomer",
    "equilibrium_state",
    "file_state",
    "integrate",
    "monomer_state",
    "net_flux",
    "read_state",
    "rhs",
    "rhs_dense",
    "snapshot_schedule",
    "truncate_initial",
    "write_state",
]
