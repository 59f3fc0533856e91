"""Conjugate beamforming downlink, large-M SINR and sum-rate."""

import enum
from dataclasses import dataclass

import numpy as np

SINR_CAP = 1e6


class ColumnSource(enum.Enum):
    ESTIMATED = "estimated"
    PREDICTED = "predicted"
    STALE = "stale"


@dataclass
class HybridChannel:
    """Per-cell precoding matrix with one source tag per column."""

    G_hat: np.ndarray
    sources: list

    def __post_init__(self):
        if len(self.sources) != self.G_hat.shape[1]:
            raise ValueError("one source tag per column is required")


@dataclass
class LinkMetrics:
    sinr: np.ndarray
    rate: np.ndarray
    sum_rate: float


def precode_conjugate(G_hat, x):
    """Transmit vector G_hat^* x."""
    G_hat = np.asarray(G_hat)
    x = np.asarray(x)
    if G_hat.shape[-1] != x.shape[-1]:
        raise ValueError(f"precoder has {G_hat.shape[-1]} columns, got {x.shape[-1]} symbols")
    return G_hat.conj() @ x


def _cross_gains(channels, precoders):
    """A[j, k, l, i] = g_{l->(j,k)}^T conj(g_hat_{l,i}).

    channels[l][j] is the M x K channel between BS l and the UTs of cell j.
    """
    G = np.asarray(channels)
    P = np.asarray(precoders)
    if G.ndim != 4 or P.ndim != 3 or G.shape[0] != P.shape[0] or G.shape[2:] != P.shape[1:]:
        raise ValueError(f"dimension mismatch: channels {G.shape}, precoders {P.shape}")
    return np.einsum("ljmk,lmi->jkli", G, P.conj())


def downlink_received(channels, precoders, x, P_d, rng=None, noise=True):
    """Received downlink samples y[j, k] for all UTs of all cells.

    channels: L x L x M x K array, ``channels[l, j]`` = G between BS l and cell j.
    precoders: L x M x K array of per-BS precoding matrices.
    x: L x K symbols.
    """
    x = np.asarray(x)
    A = _cross_gains(channels, precoders)
    if x.shape != A.shape[2:]:
        raise ValueError(f"symbols must have shape {A.shape[2:]}")
    y = np.sqrt(P_d) * np.einsum("jkli,li->jk", A, x)
    if noise:
        if rng is None:
            raise ValueError("rng required when noise=True")
        y = y + (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)) / np.sqrt(2.0)
    return y


def empirical_sinr(channels, precoders, P_d):
    """Realised SINR of each UT for one channel draw, unit-power symbols and noise."""
    A = _cross_gains(channels, precoders)
    L, K = A.shape[:2]
    power = P_d * np.abs(A) ** 2
    desired = power[np.arange(L)[:, None], np.arange(K)[None, :],
                    np.arange(L)[:, None], np.arange(K)[None, :]]
    interference = power.sum(axis=(2, 3)) - desired
    return desired / (interference + 1.0)


def asymptotic_sinr(beta_own, beta_interferers, sinr_cap=SINR_CAP):
    """Pilot-contamination-limited SINR beta_own^2 / sum(beta_int^2)."""
    beta_int = np.asarray(list(beta_interferers), dtype=float)
    if beta_own < 0 or np.any(beta_int < 0):
        raise ValueError("large-scale coefficients must be >= 0")
    if beta_own == 0 and not np.any(beta_int):
        raise ValueError("undefined UT: all large-scale coefficients are zero")
    own2 = beta_own * beta_own
    denom = float(np.sum(beta_int * beta_int))
    if denom <= 1e-12 * own2:
        return sinr_cap
    return min(own2 / denom, sinr_cap)


def sum_rate(sinr):
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0) or np.any(np.isnan(sinr)):
        raise ValueError("SINR must be >= 0")
    rate = np.log2(1.0 + sinr)
    return LinkMetrics(sinr=sinr, rate=rate, sum_rate=float(rate.sum()))
