"""Phase points of the truncated system, initial data and the BDK1 state file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import structlog

from ..coefficients import CoefficientModel
from ..equilibrium import activity_of_density, equilibrium_profile

log = structlog.get_logger("bdk.kinetics")

MAGIC = b"BDK1"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQ")


class TruncationError(ValueError):
    """Index or size incompatible with the truncated system."""


class StateFormatError(ValueError):
    """Unreadable or inconsistent state file."""


@dataclass(frozen=True, eq=False)
class State:
    """Densities c_1..c_L at time t. ``c[j-1]`` holds c_j."""

    c: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        c = np.array(self.c, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise TruncationError(f"state vector must be 1-D and non-empty (got shape {c.shape})")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "t", float(self.t))

    @property
    def L(self) -> int:
        return int(self.c.size)

    @property
    def density(self) -> float:
        """sum_j j c_j, accumulated from the largest cluster down."""
        weighted = np.arange(1, self.L + 1) * self.c
        return float(np.cumsum(weighted[::-1])[-1])

    def at(self, t: float) -> "State":
        return State(self.c, t)


def truncate_initial(c0, n: int, L: int) -> State:
    """c^{0,n}: keep c0_j for j <= n, zero up to L, t = 0."""
    if n < 0 or n > L:
        raise TruncationError(f"truncation index n={n} must satisfy 0 <= n <= L={L}")
    c0 = np.asarray(c0, dtype=float)
    c = np.zeros(L)
    keep = min(n, c0.size)
    c[:keep] = c0[:keep]
    return State(c, 0.0)


def monomer_state(rho0: float, L: int) -> State:
    if rho0 < 0:
        raise ValueError(f"rho0 must be >= 0 (got {rho0})")
    c = np.zeros(L)
    c[0] = rho0
    return State(c, 0.0)


def equilibrium_state(model: CoefficientModel, rho: float, L: int, *, n: int | None = None) -> State:
    """Truncation to n (default L) of the equilibrium with density rho."""
    z = activity_of_density(model, rho)
    profile = equilibrium_profile(model, z, L)
    return truncate_initial(profile.densities, L if n is None else n, L)


def equilibrium_plus_monomer(model: CoefficientModel, rho_eq: float, rho_extra: float, L: int) -> State:
    base = equilibrium_state(model, rho_eq, L)
    c = base.c.copy()
    c[0] += rho_extra
    return State(c, 0.0)


def write_state(state: State, path: Path | str) -> Path:
    """Header (magic, version, L) then t and c_1..c_L as little-endian float64."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = np.concatenate(([state.t], state.c)).astype("<f8")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, FORMAT_VERSION, state.L))
        f.write(body.tobytes())
    return path


def read_state(path: Path | str) -> State:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise StateFormatError(f"{path}: file shorter than header")
    magic, version, L = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise StateFormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise StateFormatError(f"{path}: unsupported version {version}")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != L + 1:
        raise StateFormatError(f"{path}: header says L={L} but payload holds {body.size - 1} densities")
    return State(body[1:].astype(float), float(body[0]))


def file_state(path: Path | str, L: int, *, n: int | None = None) -> State:
    """Initial data from a BDK1 file, truncated/padded to L (and to n if given)."""
    loaded = read_state(path)
    log.debug("state_loaded", path=str(path), L=loaded.L, t=loaded.t)
    return truncate_initial(loaded.c, min(loaded.L, L if n is None else n), L)
