"""Scalar model parameters and the INI-style experiment config file."""

import configparser
import hashlib
import math
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
from typing import Optional


class ConfigError(ValueError):
    """Raised for invalid or unreadable configuration."""


@dataclass
class SystemConfig:
    """Physical layer parameters shared by every module.

    Powers are linear ratios; ``shadow_sigma_db`` is the standard deviation of
    the shadowing in dB; ``cell_area`` is in m^2 per cell.
    """

    num_cells: int = 6
    num_antennas: int = 128
    num_uts_per_cell: int = 8
    pilot_length: int = 8
    path_loss_exponent: float = 3.8
    shadow_sigma_db: float = 8.0
    uplink_snr: float = 10.0
    downlink_snr: float = 10.0
    cell_area: float = 50.0
    overlap_fraction: float = 0.15
    snr_threshold: float = 10.0
    rng_seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("num_cells", "num_antennas", "num_uts_per_cell", "pilot_length"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.pilot_length < self.num_uts_per_cell:
            raise ConfigError(
                f"pilot_length ({self.pilot_length}) must be >= num_uts_per_cell "
                f"({self.num_uts_per_cell})"
            )
        for name in ("path_loss_exponent", "uplink_snr", "downlink_snr", "cell_area"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if self.shadow_sigma_db < 0:
            raise ConfigError("shadow_sigma_db must be >= 0")
        if not 0 <= self.overlap_fraction < 1:
            raise ConfigError("overlap_fraction must lie in [0, 1)")
        if math.isnan(self.snr_threshold) or self.snr_threshold < 0:
            raise ConfigError("snr_threshold must be >= 0")


METRIC_MODES = ("paper-faithful", "penalized")
ESTIMATORS = ("asymptotic", "monte_carlo")


@dataclass
class ExperimentConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    # quantizer
    codebook_size_z: int = 8
    codebook_size_r: int = 8
    lloyd_max_iters: int = 200
    lloyd_tol: float = 1e-9
    training_sessions: int = 200
    # map
    theta: float = 0.1
    gc_threshold: float = 0.02
    gc_period: int = 1000
    # mobility
    grid_step: float = 1.0
    dwell_prob: float = 0.8
    # experiment
    num_sessions: int = 2000
    snr_sweep_db: tuple = (0.0, 10.0, 20.0)
    metric_mode: str = "paper-faithful"
    hit_window: int = 500
    refresh_period: int = 20
    estimator: str = "asymptotic"
    hit_bands: tuple = (0.0, 0.25, 0.5, 0.75, 0.9)
    band_sessions: int = 300
    mc_sessions: int = 20
    search_budget: int = 8
    search_sessions: int = 1500
    force_hit_ratio: Optional[float] = None

    def __post_init__(self):
        self.snr_sweep_db = tuple(float(v) for v in self.snr_sweep_db)
        self.hit_bands = tuple(float(v) for v in self.hit_bands)
        self.validate()

    def validate(self):
        self.system.validate()
        if self.codebook_size_z < 1 or self.codebook_size_r < 1:
            raise ConfigError("codebook sizes must be >= 1")
        if not 0 < self.theta < 1:
            raise ConfigError("theta must lie in (0, 1)")
        if not 0 <= self.gc_threshold < 1:
            raise ConfigError("gc_threshold must lie in [0, 1)")
        if self.gc_period < 1:
            raise ConfigError("gc_period must be >= 1")
        if not self.grid_step > 0:
            raise ConfigError("grid_step must be > 0")
        if not 0 <= self.dwell_prob <= 1:
            raise ConfigError("dwell_prob must lie in [0, 1]")
        if self.num_sessions < 1:
            raise ConfigError("num_sessions must be >= 1")
        if not self.snr_sweep_db:
            raise ConfigError("snr_sweep_db must be non-empty")
        if self.metric_mode not in METRIC_MODES:
            raise ConfigError(f"metric_mode must be one of {METRIC_MODES}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator must be one of {ESTIMATORS}")
        if self.hit_window < 1 or self.refresh_period < 1:
            raise ConfigError("hit_window and refresh_period must be >= 1")
        if any(not 0 <= b < 1 for b in self.hit_bands):
            raise ConfigError("hit_bands must lie in [0, 1)")
        if self.force_hit_ratio is not None and not 0 <= self.force_hit_ratio <= 1:
            raise ConfigError("force_hit_ratio must lie in [0, 1]")

    def digest(self) -> str:
        """Short stable hash of every parameter, written to run metadata."""
        text = repr(sorted(_flatten(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _flatten(cfg: ExperimentConfig) -> dict:
    out = {f"system.{k}": v for k, v in asdict(cfg.system).items()}
    for f in fields(cfg):
        if f.name != "system":
            out[f.name] = getattr(cfg, f.name)
    return out


# section -> {key: (target, parser)}; target "system" means a SystemConfig field
_SYSTEM_KEYS = {f.name: f.type for f in fields(SystemConfig)}
_SECTIONS = {
    "system": list(_SYSTEM_KEYS),
    "quantizer": ["codebook_size_z", "codebook_size_r", "lloyd_max_iters", "lloyd_tol",
                  "training_sessions"],
    "map": ["theta", "gc_threshold", "gc_period"],
    "mobility": ["grid_step", "dwell_prob"],
    "experiment": ["num_sessions", "snr_sweep_db", "metric_mode", "hit_window",
                   "refresh_period", "estimator", "hit_bands", "band_sessions",
                   "mc_sessions", "search_budget", "search_sessions", "force_hit_ratio"],
}
_INT_KEYS = {"num_cells", "num_antennas", "num_uts_per_cell", "pilot_length", "rng_seed",
             "codebook_size_z", "codebook_size_r", "lloyd_max_iters", "training_sessions",
             "gc_period", "num_sessions", "hit_window", "refresh_period", "band_sessions",
             "mc_sessions", "search_budget", "search_sessions"}
_LIST_KEYS = {"snr_sweep_db", "hit_bands"}
_STR_KEYS = {"metric_mode", "estimator"}


def _parse_value(key, raw):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _LIST_KEYS:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if key in _STR_KEYS:
            return raw
        if key == "force_hit_ratio" and raw.lower() in ("", "none"):
            return None
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from None


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    system_kw, exp_kw = {}, {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        allowed = _SECTIONS[section]
        for key, raw in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            value = _parse_value(key, raw)
            (system_kw if section == "system" else exp_kw)[key] = value
    return ExperimentConfig(system=SystemConfig(**system_kw), **exp_kw)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text, source=str(path))


def dump_config(cfg: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config`."""
    lines = []
    for section, keys in _SECTIONS.items():
        lines.append(f"[{section}]")
        for key in keys:
            value = getattr(cfg.system if section == "system" else cfg, key)
            if isinstance(value, tuple):
                value = ", ".join(repr(v) for v in value)
            elif value is None:
                value = "none"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
