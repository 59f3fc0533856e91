"""TDD format switch, pilot book and least-squares channel estimation."""

import enum
import math

import numpy as np


class TddFormat(enum.Enum):
    INITIATIVE = "initiative"  # carries the UT's pilot
    PREDICTIVE = "predictive"  # no pilot; the BS predicts the channel

    @property
    def has_pilot(self):
        return self is TddFormat.INITIATIVE


def decide_format(prev_downlink_snr, snr_threshold, force_pilot=False):
    """UT-side switch. ``prev_downlink_snr=None`` means no history.

    The boundary ``snr == threshold`` goes to Predictive.
    """
    if force_pilot or prev_downlink_snr is None or math.isnan(prev_downlink_snr):
        return TddFormat.INITIATIVE
    if prev_downlink_snr < snr_threshold:
        return TddFormat.INITIATIVE
    return TddFormat.PREDICTIVE


def pilot_participation(L, alpha):
    """Number of cells sharing a pilot, round-half-up of L * alpha."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return int(min(max(math.floor(L * alpha + 0.5), 0), L))


class PilotBook:
    """tau x K pilot matrix with orthonormal columns (truncated DFT).

    UT k of every cell uses column k, so each sequence is reused once per cell.
    """

    def __init__(self, tau, K, sequences=None):
        if K > tau:
            raise ValueError(f"need tau >= K orthogonal pilots (tau={tau}, K={K})")
        if sequences is None:
            n = np.arange(tau)
            sequences = np.exp(-2j * np.pi * np.outer(n, n[:K]) / tau) / np.sqrt(tau)
        self.sequences = np.asarray(sequences, dtype=complex)
        if self.sequences.shape != (tau, K):
            raise ValueError(f"pilot matrix must be {tau}x{K}")
        self.tau = tau
        self.K = K

    def check_orthonormal(self, atol=1e-9):
        gram = self.sequences.conj().T @ self.sequences
        if not np.allclose(gram, np.eye(self.K), atol=atol):
            raise ValueError("pilot book columns are not orthonormal")


def received_pilot_signal(channels, indicators, pilots, P_u, tau, rng=None, noise=True):
    """Pilot-phase observation at one BS.

    channels: sequence of M x K matrices G_jl, one per transmitting cell l.
    indicators: matching sequence of K binary flags s_l.
    Returns the M x tau matrix sqrt(tau P_u) sum_l G_jl diag(s_l) X^T + W.
    """
    X = pilots.sequences
    if X.shape[0] != tau:
        raise ValueError("pilot length does not match tau")
    if len(channels) != len(indicators):
        raise ValueError("one indicator vector per channel matrix is required")
    M = None
    acc = None
    for G, s in zip(channels, indicators):
        G = np.asarray(G)
        s = np.asarray(s, dtype=float)
        if G.ndim != 2 or G.shape[1] != X.shape[1] or s.shape != (X.shape[1],):
            raise ValueError("channel / indicator / pilot dimensions disagree")
        if M is None:
            M = G.shape[0]
        elif G.shape[0] != M:
            raise ValueError("all channel matrices must have the same antenna count")
        term = (G * s) @ X.T
        acc = term if acc is None else acc + term
    Y = math.sqrt(tau * P_u) * acc
    if noise:
        if rng is None:
            raise ValueError("rng required when noise=True")
        Y = Y + (rng.standard_normal(Y.shape) + 1j * rng.standard_normal(Y.shape)) / math.sqrt(2.0)
    return Y


def ls_estimate(Y_p, pilots, P_u=None, tau=None):
    """Least-squares channel estimate Y_p X^* (M x K).

    With orthonormal pilot columns the normal equations reduce to a plain
    correlation, so the result keeps the sqrt(tau P_u) scaling of the pilot
    observation. ``P_u`` and ``tau`` are accepted for signature symmetry.
    """
    pilots.check_orthonormal()
    Y_p = np.asarray(Y_p)
    if Y_p.shape[-1] != pilots.tau:
        raise ValueError("observation length does not match pilot length")
    return Y_p @ pilots.sequences.conj()


def gain_from_estimate(G_hat, P_u, tau):
    """Bias-corrected squared gain per column: ||g_k||^2 / (M tau P_u) - 1/(tau P_u)."""
    M = G_hat.shape[-2]
    power = np.sum(np.abs(G_hat) ** 2, axis=-2) / (M * tau * P_u)
    return np.maximum(power - 1.0 / (tau * P_u), 0.0)
