"""Right-hand side of the closed truncated generalized Becker-Doring system.

Only pairs with min{j,k} <= N react, so every flux lives in an N x L table
W[p, k] = a_pk c_p c_k - b_pk c_{p+k} (p <= N). Coagulations with p + k > L
are removed together with their losses, which keeps sum_j j c_j exact.
"""

from __future__ import annotations

import numpy as np
import structlog

from ..coefficients import CoefficientModel, coag_rate, frag_rate
from .state import State, TruncationError

log = structlog.get_logger("bdk.kinetics")


class TruncatedSystem:
    """Rate tables of one (model, L) pair, shared by every rhs evaluation."""

    def __init__(self, model: CoefficientModel, L: int):
        N = model.N
        if L < 2 * N + 1:
            raise TruncationError(f"truncation L={L} must be >= 2N+1 = {2 * N + 1}")
        self.model = model
        self.L = int(L)
        self.N = N
        self.A = np.zeros((N, L))
        self.B = np.zeros((N, L))
        for p in range(1, N + 1):
            k = np.arange(1, L - p + 1)
            self.A[p - 1, : L - p] = coag_rate(model, p, k)
            self.B[p - 1, : L - p] = frag_rate(model, p, k)
        # pairs with both members <= N appear in two rows
        self.weights = np.ones(L)
        self.weights[:N] = 0.5
        self.A.setflags(write=False)
        self.B.setflags(write=False)
        log.debug("truncated_system_built", N=N, L=L)

    def _check(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        if c.shape != (self.L,):
            raise TruncationError(f"state length {c.shape} does not match L={self.L}")
        return c

    def flux_table(self, c: np.ndarray) -> np.ndarray:
        """W[p-1, k-1] = W_pk for p <= N, zero where p + k > L."""
        c = self._check(c)
        W = np.zeros((self.N, self.L))
        for p in range(1, self.N + 1):
            width = self.L - p
            W[p - 1, :width] = self.A[p - 1, :width] * c[p - 1] * c[:width] - self.B[p - 1, :width] * c[p : p + width]
        return W

    def split(self, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Gain and loss vectors, rhs = gain - loss."""
        W = self.flux_table(c)
        N, L = self.N, self.L
        loss = np.empty(L)
        loss[:N] = W.sum(axis=1)
        loss[N:] = W[:, N:].sum(axis=0)
        gain = np.zeros(L)
        weighted = W * self.weights
        for p in range(1, N + 1):
            width = L - p
            gain[p:] += weighted[p - 1, :width]
        return gain, loss

    def rhs(self, c: np.ndarray) -> np.ndarray:
        gain, loss = self.split(c)
        return gain - loss

    def scale(self, c: np.ndarray) -> np.ndarray:
        """Componentwise sum of |coagulation| + |fragmentation| contributions; the size of rhs before cancellation."""
        c = self._check(c)
        N, L = self.N, self.L
        out = np.zeros(L)
        for p in range(1, N + 1):
            width = L - p
            coag = self.A[p - 1, :width] * c[p - 1] * c[:width]
            frag = self.B[p - 1, :width] * c[p : p + width]
            mag = coag + frag
            w = self.weights[:width]
            out[p:] += w * mag
            out[p - 1] += mag.sum()
            # column part of the loss for k > N
            out[N:width] += mag[N:width]
        return out


def rhs(model: CoefficientModel, s: State, *, system: TruncatedSystem | None = None) -> np.ndarray:
    """dc/dt of the truncated system at state s (length L, O(L N))."""
    system = system or TruncatedSystem(model, s.L)
    return system.rhs(s.c)


def net_flux(model: CoefficientModel, s: State, j: int, k: int) -> float:
    """W_jk = a_jk c_j c_k - b_jk c_{j+k}."""
    if j < 1 or k < 1:
        raise TruncationError(f"cluster sizes must be >= 1 (got j={j}, k={k})")
    if j + k > s.L:
        raise TruncationError(f"j+k={j + k} exceeds truncation L={s.L}")
    if min(j, k) > model.N:
        return 0.0
    c = s.c
    return float(coag_rate(model, j, k) * c[j - 1] * c[k - 1] - frag_rate(model, j, k) * c[j + k - 1])


def rhs_dense(model: CoefficientModel, s: State) -> np.ndarray:
    """Reference O(L^2) evaluation of the generic coagulation-fragmentation rhs.

    dc_n/dt = 1/2 sum_{j+k=n} W_jk - sum_{k<=L-n} W_nk over all ordered pairs,
    with the cutoff kernel supplying the zeros.
    """
    L = s.L
    c = s.c
    idx = np.arange(1, L)
    j, k = np.meshgrid(idx, idx, indexing="ij")
    inside = (j + k) <= L
    W = np.zeros((L - 1, L - 1))
    jj, kk = j[inside], k[inside]
    W[inside] = coag_rate(model, jj, kk) * c[jj - 1] * c[kk - 1] - frag_rate(model, jj, kk) * c[jj + kk - 1]
    out = np.zeros(L)
    for n in range(1, L + 1):
        if n >= 2:
            first = np.arange(1, n)
            out[n - 1] += 0.5 * W[first - 1, n - first - 1].sum()
        if n <= L - 1:
            out[n - 1] -= W[n - 1, : L - n].sum()
    return out
