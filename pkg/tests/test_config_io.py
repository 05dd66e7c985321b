from importlib import resources

import numpy as np
import pytest

from rbpulse import io
from rbpulse.chain import ChainConfig
from rbpulse.config import ConfigError, ExperimentConfig, load_config, parse_config


def test_no_file_gives_defaults():
    assert load_config(None) == ExperimentConfig()


def test_shipped_default_is_nominal_point():
    path = resources.files("rbpulse.data").joinpath("default.ini")
    cfg = load_config(str(path))
    assert cfg.chain == ChainConfig()
    assert cfg.noise.relative_sigma == 0.10


def test_sections_map_to_fields():
    cfg = parse_config(
        """
[pulse]
fwhm = 2.6e-9
shape = gaussian
[laser]
temp_c = 35.0
current_ma = 300
[shg]
temp_c = 200.3
temp_acceptance_fwhm_c = 2.0
[chain]
fiber_coupled = no
[atom]
detuning_hz = 5e6
[noise]
seed = 42
"""
    )
    assert cfg.chain.pulse.fwhm == 2.6e-9
    assert cfg.chain.pulse.shape == "gaussian"
    assert cfg.chain.laser_temp_c == 35.0
    assert cfg.chain.laser_current_ma == 300.0
    assert cfg.chain.shg_temp_c == 200.3
    assert cfg.chain.shg.temp_acceptance_fwhm_c == 2.0
    assert cfg.chain.fiber_coupled is False
    assert cfg.atom.detuning_hz == 5e6
    assert cfg.noise.seed == 42


@pytest.mark.parametrize(
    "text",
    [
        "[nonsense]\nx = 1\n",
        "[pulse]\nwidth = 1\n",
        "[pulse]\nfwhm = fast\n",
        "[pulse]\nfwhm = -1\n",
        "[chain]\nfiber_coupled = perhaps\n",
        "not an ini file",
    ],
)
def test_bad_config(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_line_table_relative_to_config(tmp_path):
    (tmp_path / "lines.csv").write_text(
        "isotope,F,offset_hz,strength,mass_kg\n87,2,-1e9,1.0,1.44e-25\n", encoding="utf-8"
    )
    ini = tmp_path / "run.ini"
    ini.write_text("[vapor]\nline_table = lines.csv\ntemperature_k = 300\n", encoding="utf-8")
    cfg = load_config(ini)
    assert len(cfg.lines()) == 1
    assert cfg.vapor.temperature_k == 300.0


def test_csv_roundtrip(tmp_path):
    t = np.linspace(0, 1e-9, 7)
    v = np.sin(t * 1e9) * 1e3
    path = io.write_csv(tmp_path / "x.csv", ["t_s", "value"], t, v)
    header, data = io.read_csv(path)
    assert header == ["t_s", "value"]
    np.testing.assert_allclose(data[:, 0], t, rtol=1e-11)
    np.testing.assert_allclose(data[:, 1], v, rtol=1e-11)
    first = path.read_text(encoding="utf-8").splitlines()[2]
    assert first == f"{t[1]:.12g},{v[1]:.12g}"
