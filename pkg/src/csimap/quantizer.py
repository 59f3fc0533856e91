"""Two-part (shadow x distance) codebook for large-scale channel gains.

A codeword is a pair (z_i, r_n) with induced power z_i / r_n**gamma. Gains are
compared in the squared (power) domain, i.e. against beta.
"""

import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np


class CodebookError(ValueError):
    pass


class Qcsi(NamedTuple):
    i: int
    n: int


@dataclass(eq=False)
class Codebook:
    z_values: np.ndarray
    r_values: np.ndarray
    gamma: float
    version_id: int = 0

    def __post_init__(self):
        self.z_values = np.asarray(self.z_values, dtype=float)
        self.r_values = np.asarray(self.r_values, dtype=float)
        for name, v in (("z_values", self.z_values), ("r_values", self.r_values)):
            if v.ndim != 1 or v.size < 1:
                raise CodebookError(f"{name} must be a non-empty vector")
            if not np.all(np.isfinite(v)) or np.any(v <= 0):
                raise CodebookError(f"{name} must be finite and > 0")
            if np.any(np.diff(v) <= 0):
                raise CodebookError(f"{name} must be strictly increasing")
        if not self.gamma > 0:
            raise CodebookError("gamma must be > 0")
        self._power = self.z_values[:, None] / self.r_values[None, :] ** self.gamma
        if not np.all(np.isfinite(self._power)) or np.any(self._power <= 0):
            raise CodebookError("induced codewords must be finite and > 0")
        self._flat = self._power.ravel()

    @property
    def I(self):
        return self.z_values.size

    @property
    def N(self):
        return self.r_values.size

    @property
    def power_grid(self):
        """I x N array of z_i / r_n**gamma."""
        return self._power

    def __eq__(self, other):
        if not isinstance(other, Codebook):
            return NotImplemented
        return (np.array_equal(self.z_values, other.z_values)
                and np.array_equal(self.r_values, other.r_values)
                and self.gamma == other.gamma and self.version_id == other.version_id)


def quantize(gain, codebook):
    """Nearest codeword to ``gain**2``; ties go to the lower (i, n)."""
    if gain < 0:
        raise ValueError("gain must be >= 0")
    k = int(np.argmin(np.abs(codebook._flat - gain * gain)))
    return Qcsi(*divmod(k, codebook.N))


def quantize_many(gains, codebook):
    """Vectorised :func:`quantize`; returns integer arrays (i, n)."""
    g2 = np.square(np.asarray(gains, dtype=float))
    k = np.argmin(np.abs(g2[..., None] - codebook._flat), axis=-1)
    return np.divmod(k, codebook.N)


def dequantize(q, codebook, version_id=None):
    """Return (gain, beta) for a QCSI index pair."""
    if version_id is not None and version_id != codebook.version_id:
        raise CodebookError(
            f"QCSI from codebook version {version_id}, current is {codebook.version_id}")
    i, n = q
    if not (0 <= i < codebook.I and 0 <= n < codebook.N):
        raise CodebookError(f"QCSI {tuple(q)} out of range for {codebook.I}x{codebook.N} codebook")
    beta = float(codebook._power[i, n])
    return float(np.sqrt(beta)), beta


def _spread_seeds(values, count, rng):
    """k-means++ style seeding on a 1-D sample; returns ``count`` distinct values."""
    uniq = np.unique(values)
    if uniq.size < count:
        raise CodebookError(f"need at least {count} distinct samples, got {uniq.size}")
    seeds = [uniq[rng.integers(uniq.size)]]
    d2 = (uniq - seeds[0]) ** 2
    while len(seeds) < count:
        total = d2.sum()
        k = rng.choice(uniq.size, p=d2 / total) if total > 0 else rng.integers(uniq.size)
        seeds.append(uniq[k])
        d2 = np.minimum(d2, (uniq - uniq[k]) ** 2)
    return np.sort(np.array(seeds))


def _distortion(x, codewords):
    d = np.abs(x[:, None] - codewords[None, :])
    k = np.argmin(d, axis=1)
    err = x - codewords[k]
    return float(np.mean(err * err)), k


def lloyd_design(training_gains, I, N, gamma, *, distances=None, max_iters=200, tol=1e-9,
                 rng=None):
    """Alternating Lloyd iteration over the I x N product codebook.

    Distortion is the mean squared error between ``g**2`` and the assigned
    codeword ``z_i / r_n**gamma``. Each pass assigns samples to the nearest
    codeword, then solves for Z with R fixed and for R with Z fixed; both are
    exact least-squares coordinate updates, so the distortion never rises.

    ``distances`` (metres) seeds R from the known geometry; without it R
    starts at 1, 2, ..., N. Returns the codebook and the distortion history.
    """
    x = np.square(np.asarray(training_gains, dtype=float)).ravel()
    if x.size == 0:
        raise CodebookError("training set is empty")
    if I * N > x.size:
        raise CodebookError(
            f"codebook size I*N = {I * N} exceeds the {x.size} training samples")
    if np.any(~np.isfinite(x)):
        raise CodebookError("training gains must be finite")
    rng = np.random.default_rng(0) if rng is None else rng

    if distances is not None and N > 1:
        r = _spread_seeds(np.maximum(np.asarray(distances, dtype=float).ravel(), 1e-9), N, rng)
    else:
        r = np.arange(1, N + 1, dtype=float)
    u = r ** -gamma  # work with u_n = r_n^-gamma, codeword = z_i * u_n
    r_mid = float(np.median(r))
    positive = x[x > 0]
    if positive.size == 0:
        raise CodebookError("training gains are all zero")
    if I == 1:
        z = np.array([float(np.mean(positive))])
    elif np.unique(positive).size >= I:
        z = _spread_seeds(positive, I, rng)
    else:
        z = np.geomspace(positive.min(), positive.max() * 1.01, I)
    z = z * r_mid ** gamma

    history = []
    prev = None
    for _ in range(max_iters):
        D, k = _distortion(x, np.outer(z, u).ravel())
        history.append(D)
        if prev is not None and (D == 0 or (prev - D) <= tol * prev):
            break
        prev = D
        if D == 0:
            break
        ii, nn = np.divmod(k, N)
        # Z given R: z_i = sum x u_n / sum u_n^2 over samples in row i
        num = np.bincount(ii, weights=x * u[nn], minlength=I)
        den = np.bincount(ii, weights=u[nn] ** 2, minlength=I)
        ok = (den > 0) & (num > 0)
        z = np.where(ok, num / np.where(ok, den, 1.0), z)
        # R given Z: u_n = sum x z_i / sum z_i^2 over samples in column n
        num = np.bincount(nn, weights=x * z[ii], minlength=N)
        den = np.bincount(nn, weights=z[ii] ** 2, minlength=N)
        ok = (den > 0) & (num > 0)
        u = np.where(ok, num / np.where(ok, den, 1.0), u)

    z, u = _distinct(z), _distinct(u)
    r = u ** (-1.0 / gamma)
    z = np.sort(z)
    r = np.sort(_distinct(r))
    book = Codebook(z, r, gamma)
    book.version_id = codebook_version(book)
    return book, history


def _distinct(v):
    """Sort and nudge exact duplicates apart by one ulp steps."""
    v = np.sort(np.asarray(v, dtype=float))
    for k in range(1, v.size):
        if v[k] <= v[k - 1]:
            v[k] = np.nextafter(v[k - 1], np.inf)
    return v


def design_codebook(training_gains, I, N, gamma, **kwargs):
    return lloyd_design(training_gains, I, N, gamma, **kwargs)[0]


def codebook_distortion(training_gains, codebook):
    x = np.square(np.asarray(training_gains, dtype=float)).ravel()
    return _distortion(x, codebook._flat)[0]


def codebook_version(codebook):
    """CRC32 of the codeword values: changes whenever the codebook does."""
    payload = b"".join(np.asarray(v, dtype="<f8").tobytes()
                       for v in (codebook.z_values, codebook.r_values, [codebook.gamma]))
    return zlib.crc32(payload)


def dumps_codebook(codebook):
    lines = [f"{codebook.I} {codebook.N} {codebook.gamma!r} {codebook.version_id}"]
    lines += [f"{v:.17g}" for v in codebook.z_values]
    lines += [f"{v:.17g}" for v in codebook.r_values]
    return "\n".join(lines) + "\n"


def loads_codebook(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CodebookError("codebook file is empty")
    head = lines[0].split()
    try:
        I, N, gamma, version = int(head[0]), int(head[1]), float(head[2]), int(head[3])
    except (IndexError, ValueError):
        raise CodebookError(f"line 1: bad header {lines[0]!r}") from None
    if len(head) != 4:
        raise CodebookError(f"line 1: expected 'I N gamma version', got {lines[0]!r}")
    if len(lines) != 1 + I + N:
        raise CodebookError(f"expected {I + N} values after the header, found {len(lines) - 1}")
    values = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            values.append(float(ln))
        except ValueError:
            raise CodebookError(f"line {lineno}: bad value {ln!r}") from None
    return Codebook(values[:I], values[I:], gamma, version)


def save_codebook(codebook, path):
    Path(path).write_text(dumps_codebook(codebook))


def load_codebook(path):
    return loads_codebook(Path(path).read_text())
