"""Exact rate identities and the A/B coefficient ratio."""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from ..coefficients import CoefficientModel, coag_rate, frag_rate, log_balance_factor, log_q
from ..kinetics.rhs import TruncatedSystem
from ..kinetics.state import State


class IdentityRangeError(ValueError):
    """Index outside the range where the identity is derived."""


class FluxIdentity(NamedTuple):
    analytic: float
    numeric: float
    scale: float

    @property
    def discrepancy(self) -> float:
        return abs(self.analytic - self.numeric)


def _system(model: CoefficientModel, s: State, system: Optional[TruncatedSystem]) -> TruncatedSystem:
    return system if system is not None else TruncatedSystem(model, s.L)


def weighted_rate(
    model: CoefficientModel, s: State, psi: np.ndarray, *, system: Optional[TruncatedSystem] = None
) -> float:
    """d/dt sum_j psi_j c_j = 1/2 sum_{j+k<=L} (psi_{j+k} - psi_j - psi_k) W_jk over ordered pairs."""
    system = _system(model, s, system)
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (s.L,):
        raise IdentityRangeError(f"weight vector must have length L={s.L}")
    W = system.flux_table(s.c)
    total = 0.0
    for p in range(1, system.N + 1):
        width = s.L - p
        jump = psi[p : p + width] - psi[p - 1] - psi[:width]
        total += float(np.sum(system.weights[:width] * jump * W[p - 1, :width]))
    return total


def tail_flux_identity(
    model: CoefficientModel, s: State, i: int, *, system: Optional[TruncatedSystem] = None
) -> FluxIdentity:
    """Both sides of d/dt G_i for 2N < i <= L - N.

    analytic = sum_{j<=N} [ sum_{k=i-j}^{i-1} (j+k) W_jk + sum_{k>=i} j W_jk ]
    numeric  = sum_{j>=i} j (dc_j/dt)
    ``scale`` bounds the magnitude of the terms being cancelled.
    """
    N = model.N
    if i <= 2 * N or i > s.L - N:
        raise IdentityRangeError(f"tail flux identity needs 2N < i <= L - N (got i={i}, N={N}, L={s.L})")
    system = _system(model, s, system)
    W = system.flux_table(s.c)
    analytic = 0.0
    for j in range(1, N + 1):
        near = np.arange(i - j, i)
        analytic += float(np.sum((j + near) * W[j - 1, near - 1]))
        far = np.arange(i, s.L - j + 1)
        analytic += float(j * np.sum(W[j - 1, far - 1]))
    idx = np.arange(i, s.L + 1)
    rates = system.rhs(s.c)
    numeric = float(np.cumsum((idx * rates[i - 1 :])[::-1])[-1])
    scale = float(np.sum(idx * system.scale(s.c)[i - 1 :]))
    return FluxIdentity(analytic=analytic, numeric=numeric, scale=scale)


def _z_j(model: CoefficientModel, z: float, j: int) -> float:
    return math.exp(float(log_q(model, j)) + j * math.log(z))


def ab_coefficients(model: CoefficientModel, z: float, j: int, k: int) -> tuple[float, float]:
    """A_jk = (j+k) a_jk z_j / k and B_jk = ((j+k) b_jk - j a_{j,j+k} z_j) / (j+k), z_j = Q_j z^j."""
    if not 1 <= j <= model.N or k < 1:
        raise IdentityRangeError(f"need 1 <= j <= N={model.N} and k >= 1 (got j={j}, k={k})")
    if z <= 0:
        raise ValueError(f"activity must be > 0 (got {z})")
    zj = _z_j(model, z, j)
    a = float(coag_rate(model, j, k))
    A = (j + k) * a * zj / k
    B = ((j + k) * float(frag_rate(model, j, k)) - j * float(coag_rate(model, j, j + k)) * zj) / (j + k)
    return A, B


def ab_ratio(model: CoefficientModel, z: float, j: int, k: int) -> float:
    """B_jk / A_jk = k/(j+k) Q_k/(Q_{j+k} z^j) - j k a_{j,j+k} / ((j+k)^2 a_jk).

    The Q ratio is log Q_k - log Q_{j+k} = log_balance_factor(j, k) - log Q_j.
    """
    if not 1 <= j <= model.N or k < 1:
        raise IdentityRangeError(f"need 1 <= j <= N={model.N} and k >= 1 (got j={j}, k={k})")
    if z <= 0:
        raise ValueError(f"activity must be > 0 (got {z})")
    a = float(coag_rate(model, j, k))
    if a == 0.0:
        raise ZeroDivisionError(f"a_{j},{k} = 0")
    exponent = float(log_balance_factor(model, j, k)) - float(log_q(model, j)) - j * math.log(z)
    first = k / (j + k) * math.exp(exponent)
    second = j * k * float(coag_rate(model, j, j + k)) / ((j + k) ** 2 * a)
    return first - second
