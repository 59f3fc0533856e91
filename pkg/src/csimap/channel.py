"""Large-scale fading, fast fading and their composition G = H D^(1/2)."""

from dataclasses import dataclass

import numpy as np

MIN_DISTANCE = 1.0  # metres; keeps z / r^gamma finite next to the BS


def draw_shadow(sigma_db, rng, size=None):
    """Lognormal shadowing: 10*log10(z) ~ N(0, sigma_db^2)."""
    if sigma_db < 0:
        raise ValueError("sigma_db must be >= 0")
    if sigma_db == 0:
        return 1.0 if size is None else np.ones(size)
    return 10.0 ** (sigma_db * rng.standard_normal(size) / 10.0)


def large_scale_fading(z, r, gamma):
    """beta = z / r^gamma, element-wise."""
    z = np.asarray(z, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be > 0")
    if np.any(z < 0):
        raise ValueError("shadow coefficient must be >= 0")
    beta = z / r**gamma
    return beta if beta.ndim else float(beta)


@dataclass
class LargeScaleFading:
    """Per-entry shadow draw ``z``, distance ``r`` and ``beta = z / r**gamma``."""

    z: np.ndarray
    r: np.ndarray
    beta: np.ndarray
    gamma: float

    @classmethod
    def from_components(cls, z, r, gamma):
        z = np.asarray(z, dtype=float)
        r = np.maximum(np.asarray(r, dtype=float), MIN_DISTANCE)
        return cls(z=z, r=r, beta=large_scale_fading(z, r, gamma), gamma=gamma)


def draw_fast_fading(M, K, rng, size=()):
    """i.i.d. CN(0, 1) entries with shape ``size + (M, K)``."""
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    shape = tuple(size) + (M, K)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def assemble_channel(H, D):
    """Scale column k of H by sqrt(D[k, k]).

    ``D`` may be the K x K diagonal matrix or the vector of its diagonal.
    """
    H = np.asarray(H)
    D = np.asarray(D, dtype=float)
    if D.ndim == 2:
        if D.shape[0] != D.shape[1] or np.any(D - np.diag(np.diag(D))):
            raise ValueError("D must be a square diagonal matrix")
        d = np.diag(D)
    elif D.ndim == 1:
        d = D
    else:
        raise ValueError("D must be a diagonal matrix or its diagonal")
    if H.ndim != 2 or H.shape[1] != d.shape[0]:
        raise ValueError(f"dimension mismatch: H {H.shape} vs D of size {d.shape[0]}")
    if np.any(d < 0):
        raise ValueError("large-scale coefficients must be >= 0")
    return H * np.sqrt(d)


@dataclass
class ChannelRealization:
    H: np.ndarray
    D: np.ndarray
    G: np.ndarray

    @classmethod
    def draw(cls, beta, M, rng):
        beta = np.asarray(beta, dtype=float)
        H = draw_fast_fading(M, beta.size, rng)
        return cls(H=H, D=np.diag(beta), G=assemble_channel(H, beta))


def hardening_deviation(G, D, M=None):
    """||G^H G / M - D||_F / ||D||_F; how far the channel is from hardened."""
    G = np.asarray(G)
    D = np.asarray(D, dtype=float)
    if D.ndim == 1:
        D = np.diag(D)
    M = G.shape[0] if M is None else M
    norm_d = np.linalg.norm(D)
    if norm_d == 0:
        raise ValueError("D is all-zero")
    gram = G.conj().T @ G / M
    return float(np.linalg.norm(gram - D) / norm_d)
