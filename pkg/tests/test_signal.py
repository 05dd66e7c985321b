import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from rbpulse.constants import DETECTOR_FWHM
from rbpulse.errors import DomainError, MetrologyError, ResolutionError, WindowingError
from rbpulse.signal import (
    PulseSpec,
    SampledEnvelope,
    TimeGrid,
    detector_response,
    fwhm_of,
    min_gaussian_duration,
    power_spectrum,
    synthesize_pulse,
)

GRID = TimeGrid()


def test_oracles_reproduce_frozen_values():
    assert oracles.square_tbp() == pytest.approx(oracles.TBP_SQUARE, rel=1e-13)
    assert oracles.gaussian_tbp() == pytest.approx(oracles.TBP_GAUSSIAN, rel=1e-13)
    assert oracles.sinc2_half_x() == pytest.approx(oracles.SINC2_HALF_X, rel=1e-13)
    for tau, frozen in oracles.CONVOLVED_FWHM_NS.items():
        assert oracles.convolved_square_fwhm(tau, 0.9) == pytest.approx(frozen, rel=1e-12)
    assert oracles.doppler_fwhm(384.2305e12, oracles.RB87_MASS_KG, 295.0) == pytest.approx(
        oracles.DOPPLER_FWHM_87_295K, rel=1e-12
    )
    assert oracles.gaussian_tbp() / 267e6 == pytest.approx(oracles.MIN_GAUSS_267MHZ, rel=1e-13)


class TestTimeGrid:
    def test_defaults_cover_one_period(self):
        assert GRID.span == pytest.approx(200e-9)
        assert GRID.times[1] - GRID.times[0] == pytest.approx(10e-12)

    @pytest.mark.parametrize("kw", [{"dt": 0.0}, {"dt": -1e-12}, {"n_samples": 1}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            TimeGrid(**kw)

    def test_covering(self):
        g = TimeGrid.covering(200e-9, 10e-12)
        assert g.n_samples == 20000


class TestSynthesize:
    def test_average_power_from_duty_cycle(self):
        env = synthesize_pulse(PulseSpec(fwhm=4e-9, peak_power=40.0), GRID)
        assert env.average_power == pytest.approx(0.8, rel=1e-12)
        assert env.peak_power == pytest.approx(40.0)

    def test_zero_peak_gives_zero_envelope(self):
        env = synthesize_pulse(PulseSpec(peak_power=0.0), GRID)
        assert not np.any(env.amplitude)

    def test_residual_floor(self):
        env = synthesize_pulse(PulseSpec(fwhm=4e-9, peak_power=40.0, residual_fraction=0.003), GRID)
        assert env.power[0] == pytest.approx(0.12)
        assert env.power.min() / env.peak_power == pytest.approx(0.003)

    def test_constant_phase(self):
        env = synthesize_pulse(PulseSpec(), GRID, carrier_offset_hz=5e6)
        assert np.all(np.angle(env.amplitude[env.power > 0]) == 0.0)
        assert env.carrier_offset_hz == 5e6

    def test_square_width_is_exact_on_cell_boundaries(self):
        env = synthesize_pulse(PulseSpec(fwhm=4e-9), GRID)
        assert fwhm_of(env.power, GRID.dt) == pytest.approx(4e-9, abs=GRID.dt)

    def test_box_averaged_energy_for_off_grid_duration(self):
        env = synthesize_pulse(PulseSpec(fwhm=4.003e-9), GRID)
        assert env.energy == pytest.approx(4.003e-9, rel=1e-9)

    def test_gaussian_shape(self):
        env = synthesize_pulse(PulseSpec(fwhm=3e-9, shape="gaussian"), GRID)
        assert fwhm_of(env.power, GRID.dt) == pytest.approx(3e-9, rel=1e-3)

    def test_too_coarse_grid(self):
        with pytest.raises(ResolutionError):
            synthesize_pulse(PulseSpec(fwhm=1e-9), TimeGrid(dt=100e-12, n_samples=2000))

    def test_too_short_grid(self):
        with pytest.raises(ResolutionError):
            synthesize_pulse(PulseSpec(), TimeGrid(n_samples=1000))

    @pytest.mark.parametrize(
        "kw",
        [{"fwhm": 0.0}, {"fwhm": 300e-9}, {"peak_power": -1.0}, {"residual_fraction": 1.0}, {"shape": "sech"}],
    )
    def test_spec_invariants(self, kw):
        with pytest.raises(DomainError):
            PulseSpec(**kw)

    def test_amplitude_is_read_only(self):
        env = synthesize_pulse(PulseSpec(), GRID)
        with pytest.raises(ValueError):
            env.amplitude[0] = 1.0


class TestFwhm:
    def test_gaussian_sigma(self):
        x = np.linspace(-10, 10, 20001)
        sigma = 1.7
        y = np.exp(-0.5 * (x / sigma) ** 2)
        assert fwhm_of(y, x[1] - x[0]) == pytest.approx(2.3548200450309493 * sigma, rel=1e-3)

    @pytest.mark.parametrize("trace", [np.ones(50), np.arange(50.0), np.zeros(10)])
    def test_no_crossing(self, trace):
        with pytest.raises(MetrologyError):
            fwhm_of(trace)

    @given(st.floats(1e-6, 1e6))
    def test_scale_invariant(self, scale):
        x = np.linspace(-5, 5, 1001)
        y = np.exp(-(x**2))
        assert fwhm_of(scale * y) == pytest.approx(fwhm_of(y), rel=1e-12)


class TestSpectrum:
    def test_square_4ns(self):
        spec = power_spectrum(synthesize_pulse(PulseSpec(fwhm=4e-9), GRID))
        assert spec.fwhm() == pytest.approx(oracles.TBP_SQUARE / 4e-9, rel=0.01)

    @pytest.mark.parametrize("tau", [1.3e-9, 2.0e-9, 4.0e-9, 6.1e-9])
    def test_gaussian_tbp(self, tau):
        spec = power_spectrum(synthesize_pulse(PulseSpec(fwhm=tau, shape="gaussian"), GRID))
        assert spec.fwhm() * tau == pytest.approx(oracles.TBP_GAUSSIAN, rel=0.01)

    @settings(deadline=None, max_examples=20)
    @given(st.floats(1e-9, 10e-9))
    def test_square_tbp_property(self, tau):
        spec = power_spectrum(synthesize_pulse(PulseSpec(fwhm=tau), GRID))
        assert spec.fwhm() * tau == pytest.approx(oracles.TBP_SQUARE, rel=0.02)

    @settings(deadline=None, max_examples=20)
    @given(
        st.floats(1e-9, 10e-9),
        st.floats(0.0, 0.005),
        st.sampled_from(["square", "gaussian"]),
        st.floats(0.1, 100.0),
    )
    def test_parseval(self, tau, residual, shape, peak):
        env = synthesize_pulse(PulseSpec(fwhm=tau, residual_fraction=residual, shape=shape, peak_power=peak), GRID)
        above_floor = float(np.sum(env.power - env.power.min()) * GRID.dt)
        assert power_spectrum(env).energy == pytest.approx(above_floor, rel=1e-9)

    def test_zero_envelope(self):
        spec = power_spectrum(SampledEnvelope.cw(GRID, 0.0))
        assert not np.any(spec.density)

    def test_carrier_offset_shifts_axis(self):
        env = synthesize_pulse(PulseSpec(), GRID, carrier_offset_hz=1e9)
        spec = power_spectrum(env)
        assert spec.f_hz[np.argmax(spec.density)] == pytest.approx(1e9, abs=spec.df)

    def test_truncated_pulse(self):
        env = synthesize_pulse(PulseSpec(), GRID, centre=0.0)
        with pytest.raises(WindowingError):
            power_spectrum(env)


class TestDetector:
    def test_zero_width_is_identity(self):
        y = np.random.default_rng(1).random(100)
        np.testing.assert_array_equal(detector_response(y, 1.0, 0.0), y)

    def test_integral_preserved(self):
        env = synthesize_pulse(PulseSpec(fwhm=1.3e-9), GRID)
        out = detector_response(env.power, GRID.dt, DETECTOR_FWHM)
        assert out.sum() == pytest.approx(env.power.sum(), rel=1e-6)

    @pytest.mark.parametrize("tau_ns", sorted(oracles.CONVOLVED_FWHM_NS))
    def test_against_erf_oracle(self, tau_ns):
        env = synthesize_pulse(PulseSpec(fwhm=tau_ns * 1e-9), GRID)
        out = detector_response(env.power, GRID.dt, DETECTOR_FWHM)
        t = GRID.times - (GRID.t_start + 0.5 * GRID.span - 0.5 * GRID.dt)
        ref = oracles.convolved_square(t, tau_ns * 1e-9, DETECTOR_FWHM)
        assert np.max(np.abs(out - ref)) < 2e-3
        assert fwhm_of(out, GRID.dt) == pytest.approx(oracles.CONVOLVED_FWHM_NS[tau_ns] * 1e-9, abs=2 * GRID.dt)

    def test_short_pulse_rounded(self):
        env = synthesize_pulse(PulseSpec(fwhm=1.3e-9), GRID)
        out = detector_response(env.power, GRID.dt, DETECTOR_FWHM)
        assert out.max() < 0.99
        assert 1.3e-9 <= fwhm_of(out, GRID.dt) <= 1.45e-9

    def test_long_pulse_plateau_kept(self):
        env = synthesize_pulse(PulseSpec(fwhm=6.1e-9), GRID)
        assert detector_response(env.power, GRID.dt, DETECTOR_FWHM).max() > 0.99

    @given(st.floats(0.01, 100.0), st.integers(-500, 500))
    def test_linear_and_shift_invariant(self, scale, shift):
        y = synthesize_pulse(PulseSpec(fwhm=2e-9), GRID).power
        base = detector_response(y, GRID.dt, DETECTOR_FWHM)
        np.testing.assert_allclose(detector_response(scale * y, GRID.dt, DETECTOR_FWHM), scale * base, atol=1e-12 * scale)
        np.testing.assert_allclose(
            detector_response(np.roll(y, shift), GRID.dt, DETECTOR_FWHM), np.roll(base, shift), atol=1e-12
        )

    def test_negative_width(self):
        with pytest.raises(DomainError):
            detector_response(np.ones(4), 1.0, -1.0)


class TestMinGaussianDuration:
    def test_hyperfine_splitting(self):
        assert min_gaussian_duration(267e6) == pytest.approx(1.65e-9, abs=0.01e-9)
        assert min_gaussian_duration(267e6) == pytest.approx(oracles.MIN_GAUSS_267MHZ, rel=1e-12)

    def test_ground_splitting(self):
        assert min_gaussian_duration(6.83e9) == pytest.approx(64.6e-12, rel=1e-3)

    def test_unit_case(self):
        assert min_gaussian_duration(oracles.TBP_GAUSSIAN) == pytest.approx(1.0)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            min_gaussian_duration(bad)
