"""TOML run configurations and their per-command views."""

from fractions import Fraction

import pytest

from sidonlab import config as cfgmod
from sidonlab.config import ConfigError, load_config, parse_rational

GOOD = """
[construction]
kind = "sidon_power"
h1 = 1
r = 3
base = 10
stages = 3
depth = 4

[autocorr]
m_lo = 1
m_hi = 500

[sidon]
stage = 1

[power_disjoint]
stage = 1
p = 11

[lp]
c = "5/2"
p = 3
j_max = 4

[oracle]
n_samples = 1000
d_values = [10, 100]

[gamma]
seeds = ["000", "101"]
block = 2
"""


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_rational():
    assert parse_rational(3, "x") == 3
    assert parse_rational("5/2", "x") == Fraction(5, 2)
    with pytest.raises(ConfigError):
        parse_rational(True, "x")
    with pytest.raises(ConfigError):
        parse_rational("abc", "x")


def test_load_good_config(tmp_path):
    cfg = load_config(write(tmp_path, GOOD))
    assert cfg.depth == 4
    assert cfg.params.h1 == 1
    assert len(cfg.params.stages) == 3
    assert cfgmod.autocorr_settings(cfg) == (1, 1, 500)
    assert cfgmod.sidon_settings(cfg) == (1, None)
    assert cfgmod.power_settings(cfg) == (1, 11, None)
    assert cfgmod.lp_settings(cfg) == (Fraction(5, 2), 3, 4)
    assert cfgmod.gamma_settings(cfg) == (["000", "101"], 2, [2, 3], None)
    oracle = cfgmod.oracle_settings(cfg)
    assert oracle["d_values"] == [10, 100]
    assert oracle["allowed_misses"] == 1


def test_depth_defaults_to_all_stages(tmp_path):
    text = GOOD.replace("depth = 4\n", "")
    cfg = load_config(write(tmp_path, text))
    assert cfg.depth == 4


def test_missing_file_and_bad_toml(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.toml"))
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "this is [[[ not toml"))


def test_missing_construction_table(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "[autocorr]\nm_lo = 1\nm_hi = 2\n"))


def test_unknown_kind(tmp_path):
    text = GOOD.replace('kind = "sidon_power"', 'kind = "mystery"')
    with pytest.raises(ConfigError) as e:
        load_config(write(tmp_path, text))
    assert "mystery" in str(e.value)


def test_explicit_construction(tmp_path):
    text = """
[construction]
kind = "explicit"
h1 = 2
stages = [ { r = 2, spacers = [0, 3] }, { r = 3, spacers = [1, 2, 3] } ]
"""
    cfg = load_config(write(tmp_path, text))
    assert cfg.params.stages[0].spacers == (0, 3)
    assert cfg.params.stages[1].r == 3
    assert cfg.depth == 3


def test_geometric_psi_construction(tmp_path):
    text = """
[construction]
kind = "geometric_psi"
h1 = 1
r = 4
psi0 = 20
psi_step = 10
stages = 3
r_power = true
"""
    cfg = load_config(write(tmp_path, text))
    assert [s.r for s in cfg.params.stages] == [4, 16, 64]


def test_missing_command_table(tmp_path):
    cfg = load_config(write(tmp_path, GOOD))
    with pytest.raises(ConfigError) as e:
        cfgmod.mixing_settings(cfg)
    assert "[mixing]" in str(e.value)


def test_bool_is_not_an_int(tmp_path):
    text = GOOD.replace("stage = 1", "stage = true", 1)
    with pytest.raises(ConfigError):
        cfgmod.sidon_settings(load_config(write(tmp_path, text)))


def test_half_open_window_rejected(tmp_path):
    text = GOOD.replace("[sidon]\nstage = 1", "[sidon]\nstage = 1\nm_lo = 5")
    with pytest.raises(ConfigError) as e:
        cfgmod.sidon_settings(load_config(write(tmp_path, text)))
    assert "come together" in str(e.value)


def test_gamma_needs_two_seeds(tmp_path):
    text = GOOD.replace('seeds = ["000", "101"]', 'seeds = ["000"]')
    with pytest.raises(ConfigError):
        cfgmod.gamma_settings(load_config(write(tmp_path, text)))
