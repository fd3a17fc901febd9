import json

import numpy as np
import pytest

from active_ris.config import (
    SystemConfig,
    config_from_dict,
    config_to_dict,
    dbm_to_watt,
    default_config,
    load_config,
    watt_to_dbm,
)
from active_ris.errors import ConfigError


def test_default_config_is_valid():
    cfg = default_config()
    assert cfg.M == 16 and cfg.N == 25
    assert cfg.sigma2_vu == pytest.approx(dbm_to_watt(-70))
    assert cfg.sigma2_nu == pytest.approx(dbm_to_watt(-80))


def test_dbm_round_trip():
    for dbm in (-80, -10, 0, 10, 30):
        assert watt_to_dbm(dbm_to_watt(dbm)) == pytest.approx(dbm)
    assert dbm_to_watt(30) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [
    {"M": 5}, {"N": 12},
    {"k1": -1.0}, {"pt": -0.1},
    {"sigma2_nu": 0.0}, {"sigma2_vd": -1e-9},
    {"bits": -1},
])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigError):
        config_from_dict(bad)


def test_dbm_suffix_keys():
    cfg = config_from_dict({"pt_dbm": 20, "sigma2_nu_dbm": -90})
    assert cfg.pt == pytest.approx(0.1)
    assert cfg.sigma2_nu == pytest.approx(1e-12)


def test_conflicting_linear_and_dbm_keys_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"pt": 0.1, "pt_dbm": 20})


def test_unknown_key_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"carrier_ghz": 28})


def test_angles_nested_object():
    cfg = config_from_dict({"angles": {"up_bs_az": 1.0}})
    assert cfg.angles.up_bs_az == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        config_from_dict({"angles": {"nonsense": 1.0}})


def test_json_file_round_trip(tmp_path):
    cfg = default_config()
    doc = config_to_dict(cfg)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    again = load_config(path)
    assert again == cfg


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)


def test_with_powers_returns_new_config():
    cfg = default_config()
    cfg2 = cfg.with_powers(0.5, 0.25)
    assert (cfg2.pt, cfg2.pr) == (0.5, 0.25)
    assert cfg.pt != 0.5
