import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from rbpulse.chain import LaserParams
from rbpulse.errors import DomainError
from rbpulse.peaks import local_extrema, refine_peak
from rbpulse.spectroscopy import (
    Line,
    LineTable,
    VaporParams,
    current_scan_to_frequency,
    doppler_sigma,
    find_peaks,
    resolved_groups,
    vapor_spectrum,
)

TABLE = LineTable.default()
SCAN = np.linspace(-5e9, 6e9, 4001)


def test_default_table():
    assert len(TABLE) == 4
    assert {ln.isotope for ln in TABLE.lines} == {85, 87}
    rb87 = {ln.ground_f: ln.center_offset_hz for ln in TABLE.lines if ln.isotope == 87}
    assert rb87[1] - rb87[2] == pytest.approx(6.83e9, abs=10e6)


def test_table_rejects_wrong_splitting():
    text = "isotope,F,offset_hz,strength,mass_kg\n87,2,0,1,1.4e-25\n87,1,5e9,1,1.4e-25\n"
    with pytest.raises(DomainError):
        LineTable.read(io.StringIO(text))


def test_table_rejects_non_positive_strength():
    with pytest.raises(DomainError):
        LineTable((Line(87, 2, 0.0, 0.0, 1.4e-25),))


def test_table_from_path_with_comments(tmp_path):
    path = tmp_path / "lines.csv"
    path.write_text("# one line\nisotope,F,offset_hz,strength,mass_kg\n87,2,-1e9,0.5,1.44e-25\n", encoding="utf-8")
    table = LineTable.read(path)
    assert table.lines == (Line(87, 2, -1e9, 0.5, 1.44e-25),)


class TestDoppler:
    def test_rb87_room_temperature(self):
        fwhm = 2.3548200450309493 * doppler_sigma(384.23e12, oracles.RB87_MASS_KG, 295.0)
        assert fwhm == pytest.approx(0.51e9, rel=0.02)
        sigma = doppler_sigma(384.2305e12, oracles.RB87_MASS_KG, 295.0)
        assert 2 * math.sqrt(2 * math.log(2)) * sigma == pytest.approx(oracles.DOPPLER_FWHM_87_295K, rel=1e-12)

    def test_sqrt_temperature(self):
        s1 = doppler_sigma(384e12, oracles.RB87_MASS_KG, 300.0)
        assert doppler_sigma(384e12, oracles.RB87_MASS_KG, 1200.0) == pytest.approx(2 * s1)

    def test_zero_frequency(self):
        assert doppler_sigma(0.0, oracles.RB87_MASS_KG, 300.0) == 0.0

    @pytest.mark.parametrize("args", [(-1.0, 1e-25, 300.0), (1e14, 0.0, 300.0), (1e14, 1e-25, 0.0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            doppler_sigma(*args)


class TestSpectrum:
    def test_four_peaks_and_splitting(self):
        peaks = find_peaks(SCAN, vapor_spectrum(SCAN, TABLE))
        assert len(peaks) == 4
        assert peaks[-1] - peaks[0] == pytest.approx(6.83e9, abs=50e6)

    def test_single_line_symmetric(self):
        table = LineTable((Line(87, 2, 1e9, 1.0, oracles.RB87_MASS_KG),))
        d = np.linspace(0, 2e9, 101)
        s = vapor_spectrum(1e9 + d, table)
        np.testing.assert_allclose(vapor_spectrum(1e9 - d, table), s, rtol=1e-12)

    def test_order_invariant(self):
        shuffled = LineTable(tuple(reversed(TABLE.lines)))
        np.testing.assert_allclose(vapor_spectrum(SCAN, shuffled), vapor_spectrum(SCAN, TABLE), rtol=1e-14)

    @given(st.integers(0, 3), st.floats(0.1, 10.0))
    def test_linear_in_strength(self, idx, factor):
        lines = list(TABLE.lines)
        one = LineTable((lines[idx],))
        scaled = LineTable((Line(lines[idx].isotope, lines[idx].ground_f, lines[idx].center_offset_hz,
                                 factor * lines[idx].strength, lines[idx].mass_kg),))
        f = np.array([lines[idx].center_offset_hz])
        assert vapor_spectrum(f, scaled)[0] == pytest.approx(factor * vapor_spectrum(f, one)[0], rel=1e-12)

    def test_peak_count_matches_resolved_groups(self):
        assert resolved_groups(TABLE) == len(find_peaks(SCAN, vapor_spectrum(SCAN, TABLE)))

    def test_hot_cell_merges_peaks(self):
        hot = VaporParams(temperature_k=3000.0)
        assert resolved_groups(TABLE, hot) < 4

    def test_vapor_domain(self):
        with pytest.raises(DomainError):
            VaporParams(temperature_k=0.0)


class TestCurrentScan:
    laser = LaserParams()

    def test_step(self):
        f = current_scan_to_frequency(np.array([338.0, 348.0]), self.laser, 34.8)
        assert f[1] - f[0] == pytest.approx(-4.0e9, rel=1e-6)

    def test_zero_step(self):
        f = current_scan_to_frequency(np.array([338.0, 338.0]), self.laser, 34.8)
        assert f[1] == f[0]

    def test_full_sweep_covers_ground_splitting(self):
        f = current_scan_to_frequency(np.array([338.0 - 17, 338.0 + 17]), self.laser, 34.8)
        assert f[0] - f[1] == pytest.approx(13.6e9, rel=1e-6)
        assert 0.5 * (f[0] - f[1]) >= 6.8e9 - 1e6


class TestPeaks:
    def test_prominence_filters_ripple(self):
        x = np.linspace(0, 10, 2001)
        y = np.exp(-((x - 3) ** 2)) + np.exp(-((x - 7) ** 2)) + 1e-3 * np.sin(40 * x)
        maxima, minima = local_extrema(y, prominence=0.05)
        assert len(maxima) == 2
        assert len(minima) == 1

    def test_refine_peak_parabola(self):
        x = np.linspace(0, 1, 11)
        y = -((x - 0.437) ** 2)
        assert refine_peak(x, y, int(np.argmax(y))) == pytest.approx(0.437, abs=1e-12)
