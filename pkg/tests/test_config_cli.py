from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from csimap import cli
from csimap.config import (
    ConfigError,
    ExperimentConfig,
    SystemConfig,
    dump_config,
    load_config,
    parse_config,
)
from csimap.csi_map import CsiMap

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

TINY = """
[system]
num_cells = 2
num_antennas = 8
num_uts_per_cell = 2
pilot_length = 2
cell_area = 9
overlap_fraction = 0.3
[quantizer]
codebook_size_z = 2
codebook_size_r = 2
training_sessions = 10
[mobility]
dwell_prob = 0.7
[experiment]
num_sessions = 60
band_sessions = 10
mc_sessions = 1
hit_window = 20
"""


def test_defaults_validate():
    cfg = ExperimentConfig()
    assert cfg.system.num_cells == 6 and cfg.hit_window == 500


@pytest.mark.parametrize("kw", [
    dict(num_uts_per_cell=9, pilot_length=8),
    dict(num_cells=0),
    dict(overlap_fraction=1.0),
    dict(shadow_sigma_db=-1.0),
    dict(cell_area=0.0),
])
def test_system_validation(kw):
    with pytest.raises(ConfigError):
        SystemConfig(**kw)


@pytest.mark.parametrize("kw", [
    dict(dwell_prob=1.5), dict(theta=1.0), dict(num_sessions=0), dict(snr_sweep_db=()),
    dict(metric_mode="other"), dict(estimator="exact"), dict(gc_threshold=1.0),
])
def test_experiment_validation(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw)


@pytest.mark.parametrize("text, msg", [
    ("[nope]\nx = 1\n", "unknown section"),
    ("[system]\nfoo = 1\n", "unknown key"),
    ("[system]\nnum_cells = many\n", "bad value"),
    ("[map]\ntheta = 2\n", "theta"),
    ("not an ini", "<string>"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(text)


@given(st.floats(0.01, 0.99), st.floats(0, 1), st.integers(1, 10_000))
def test_dump_parse_round_trip(theta, dwell, n):
    cfg = ExperimentConfig(theta=theta, dwell_prob=dwell, num_sessions=n, force_hit_ratio=0.5)
    back = parse_config(dump_config(cfg))
    assert back == cfg
    assert back.digest() == cfg.digest()


def test_digest_changes_with_parameters():
    assert ExperimentConfig().digest() != ExperimentConfig(theta=0.2).digest()


@pytest.mark.parametrize("name", ["default.ini", "paper.ini", "fig7.ini"])
def test_shipped_configs_load(name):
    load_config(CONFIGS / name)


def test_missing_config_names_the_path(tmp_path, capsys):
    missing = tmp_path / "absent.ini"
    code = cli.main(["run", "--config", str(missing), "--out-dir", str(tmp_path / "o")])
    assert code == 1
    assert str(missing) in capsys.readouterr().err


def test_unknown_flag_is_usage_error(capsys):
    assert cli.main(["sweep", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert cli.main([]) == 1


def test_codebook_too_large_for_training_set(tmp_path, capsys):
    cfg = tmp_path / "big.ini"
    cfg.write_text(TINY.replace("codebook_size_z = 2", "codebook_size_z = 64"))
    code = cli.main(["design-codebook", "--config", str(cfg), "--out", str(tmp_path / "cb")])
    assert code == 1
    assert "exceeds" in capsys.readouterr().err


def test_design_run_and_dump(tmp_path, capsys):
    cfg = tmp_path / "tiny.ini"
    cfg.write_text(TINY)
    cb = tmp_path / "cb.txt"
    assert cli.main(["design-codebook", "--config", str(cfg), "--out", str(cb)]) == 0
    out = tmp_path / "run"
    assert cli.main(["run", "--config", str(cfg), "--codebook", str(cb),
                     "--out-dir", str(out)]) == 0
    for name in ("fig7.csv", "alpha.csv", "sessions.csv", "map_0.txt", "run_meta.txt"):
        assert (out / name).exists()
    assert len((out / "alpha.csv").read_text().splitlines()) == 61
    CsiMap.loads((out / "map_1.txt").read_text())
    capsys.readouterr()
    assert cli.main(["map-dump", "--map", str(out / "map_0.txt")]) == 0
    assert "nodes" in capsys.readouterr().out


def test_map_dump_errors(tmp_path, capsys):
    assert cli.main(["map-dump", "--map", str(tmp_path / "none.txt")]) == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("CSIMAP v1 0.1 0.02 0\nN 0 0 0\n")
    assert cli.main(["map-dump", "--map", str(bad)]) == 1
    assert "truncated" in capsys.readouterr().err


def test_runtime_error_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli.sim, "run", boom)
    cfg = tmp_path / "tiny.ini"
    cfg.write_text(TINY)
    assert cli.main(["run", "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) == 2


def test_sweep_default_outputs(tmp_path):
    cfg = tmp_path / "tiny.ini"
    cfg.write_text(TINY)
    out = tmp_path / "sweep"
    assert cli.main(["sweep", "--config", str(cfg), "--out-dir", str(out)]) == 0
    for name in ("fig6.csv", "fig7.csv", "alpha.csv", "run_meta.txt"):
        assert (out / name).exists()
    assert (out / "fig6.csv").read_text().startswith("snr_db,hit_band,sum_rate_bits")
