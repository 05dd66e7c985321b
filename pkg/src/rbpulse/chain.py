"""Stage models of the 1560 nm -> 780 nm pulsed laser chain.

DFB laser -> Mach-Zehnder intensity modulator -> erbium fibre amplifier ->
fibre coupler -> PPLN frequency doubler -> dichroic + band-pass filters ->
single-mode fibre.  Every stage maps a :class:`SampledEnvelope` to a new one.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.constants import c

from .constants import F_D2, F_DWDM_C21
from .errors import (
    DomainError,
    ExtrapolationWarning,
    MetrologyError,
    SaturationWarning,
    ThermalShutdownError,
    WindowingError,
)
from .signal import PulseSpec, SampledEnvelope, TimeGrid, fwhm_of, pulse_profile, power_spectrum

#: x at which sinc(x)**2 == 1/2, with sinc(x) = sin(x)/x.
SINC2_HALF_POINT = 1.3915573782515103


@dataclass(frozen=True)
class LaserParams:
    """Linear tuning law of the DFB diode around its design point."""

    ref_frequency_hz: float = c / 1560.61e-9
    ref_temp_c: float = 34.8
    ref_current_ma: float = 338.0
    dnu_dT_hz_per_c: float = -11e9
    dnu_dI_hz_per_ma: float = -0.20e9
    output_power_w: float = 0.030
    temp_window_c: float = 5.0
    current_window_ma: float = 50.0
    mode_hop_free_range_hz: float = 4e9

    def __post_init__(self):
        if not self.output_power_w > 0:
            raise DomainError("laser output power must be positive")
        if self.dnu_dT_hz_per_c >= 0 or self.dnu_dI_hz_per_ma >= 0:
            raise DomainError("tuning coefficients must be negative")


@dataclass(frozen=True)
class ModulatorParams:
    v_pi_bias_v: float = 7.9
    v_pi_rf_v: float = 4.0
    extinction_db: float = 20.0
    insertion_loss_db: float = 4.0
    v_null_v: float = 0.0

    def __post_init__(self):
        if not (self.v_pi_bias_v > 0 and self.v_pi_rf_v > 0):
            raise DomainError("half-wave voltages must be positive")
        if self.extinction_db < 0:
            raise DomainError("extinction ratio must be >= 0 dB")

    @property
    def floor(self) -> float:
        return 10.0 ** (-self.extinction_db / 10.0)

    @property
    def insertion_transmission(self) -> float:
        return 10.0 ** (-self.insertion_loss_db / 10.0)


@dataclass(frozen=True)
class AmplifierParams:
    sat_avg_power_w: float = 1.0
    small_signal_gain_db: float = 55.0
    max_avg_input_w: float = 3e-3

    def __post_init__(self):
        if not (self.sat_avg_power_w > 0 and self.max_avg_input_w > 0):
            raise DomainError("amplifier powers must be positive")

    @property
    def small_signal_gain(self) -> float:
        return 10.0 ** (self.small_signal_gain_db / 10.0)


@dataclass(frozen=True)
class ShgParams:
    """Single-pass PPLN doubler.

    The conversion constant is fixed by one calibration point: a square pulse
    of peak power ``calib_peak_power_w`` is converted with pulse-energy
    efficiency ``calib_peak_efficiency``.  The default point is the nominal
    4 ns, 0.8 W average (40 W peak) operating condition.
    """

    crystal_length_m: float = 0.040
    rayleigh_range_m: float = 0.020
    optimal_temp_c: float = 200.0
    temp_acceptance_fwhm_c: float = 1.0
    calib_peak_efficiency: float = 0.15
    calib_peak_power_w: float = 40.0
    max_avg_input_w: float = 2.0

    def __post_init__(self):
        if not self.crystal_length_m > 0:
            raise DomainError("crystal length must be positive")
        if not 0 < self.calib_peak_efficiency < 1:
            raise DomainError("calibration efficiency must lie in (0, 1)")
        if not (self.calib_peak_power_w > 0 and self.temp_acceptance_fwhm_c > 0):
            raise DomainError("calibration power and acceptance width must be positive")

    @property
    def kappa(self) -> float:
        """Conversion constant (1/W): P_sh = kappa * P_fund**2 at phase matching."""
        return self.calib_peak_efficiency / self.calib_peak_power_w


@dataclass(frozen=True)
class FilterParams:
    dichroic_t_780: float = 0.85
    dichroic_r_1560: float = 0.995
    bandpass_t_780: float = 0.85
    bandpass_od_1560: float = 4.0
    fiber_coupling_780: float = 0.90

    def __post_init__(self):
        for name in ("dichroic_t_780", "dichroic_r_1560", "bandpass_t_780", "fiber_coupling_780"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise DomainError(f"{name} must lie in (0, 1], got {v}")
        if self.bandpass_od_1560 < 0:
            raise DomainError("optical density must be >= 0")

    @property
    def transmission_780(self) -> float:
        return self.dichroic_t_780 * self.bandpass_t_780

    @property
    def leakage_1560(self) -> float:
        return (1.0 - self.dichroic_r_1560) * 10.0 ** (-self.bandpass_od_1560)


@dataclass(frozen=True)
class ChainConfig:
    """Operating point and component parameters of the whole chain.

    ``pulse.peak_power`` is ignored here; powers follow from the stages.
    ``pulse.residual_fraction`` is the floor the bias servo holds the
    modulator at, relative to full transmission.
    """

    laser: LaserParams = field(default_factory=LaserParams)
    modulator: ModulatorParams = field(default_factory=ModulatorParams)
    amplifier: AmplifierParams = field(default_factory=AmplifierParams)
    shg: ShgParams = field(default_factory=ShgParams)
    filters: FilterParams = field(default_factory=FilterParams)
    pulse: PulseSpec = field(default_factory=PulseSpec)
    grid: TimeGrid = field(default_factory=TimeGrid)
    laser_temp_c: float = 36.5
    laser_current_ma: float = 165.93
    shg_temp_c: float = 200.0
    delivery_efficiency: float = 0.8
    fiber_coupled: bool = True
    bypass_amplifier: bool = False
    f_d2_hz: float = F_D2
    f_c_hz: float = F_DWDM_C21

    def __post_init__(self):
        if self.pulse.period < 5 * self.pulse.fwhm:
            raise DomainError("pulse period must be much longer than the pulse")
        if not 0 < self.delivery_efficiency <= 1:
            raise DomainError("delivery_efficiency must lie in (0, 1]")

    def replace(self, **changes) -> "ChainConfig":
        return dataclasses.replace(self, **changes)


# -- stage operations -------------------------------------------------------


def laser_frequency(p: LaserParams, temp_c, current_ma):
    """Optical frequency (Hz) of the diode at a temperature and drive current.

    Accepts scalars or arrays.  Emits :class:`ExtrapolationWarning` outside
    the linear-validity window.
    """
    dT = np.asarray(temp_c, dtype=float) - p.ref_temp_c
    dI = np.asarray(current_ma, dtype=float) - p.ref_current_ma
    if np.any(np.abs(dT) > p.temp_window_c) or np.any(np.abs(dI) > p.current_window_ma):
        warnings.warn(
            f"laser operating point ({np.max(temp_c):g} C, {np.min(current_ma):g} mA) outside linear "
            f"tuning window (+/-{p.temp_window_c:g} C, +/-{p.current_window_ma:g} mA)",
            ExtrapolationWarning,
            stacklevel=2,
        )
    nu = p.ref_frequency_hz + p.dnu_dT_hz_per_c * dT + p.dnu_dI_hz_per_ma * dI
    return float(nu) if nu.ndim == 0 else nu


def current_for_frequency(p: LaserParams, temp_c: float, target_hz: float) -> float:
    """Drive current (mA) that puts the diode on ``target_hz`` at ``temp_c``."""
    dnu = target_hz - p.ref_frequency_hz - p.dnu_dT_hz_per_c * (temp_c - p.ref_temp_c)
    return p.ref_current_ma + dnu / p.dnu_dI_hz_per_ma


def modulator_transmission(p: ModulatorParams, bias_v: float, drive_v=0.0) -> np.ndarray:
    """Mach-Zehnder power transmission, insertion loss excluded."""
    phase = 0.5 * math.pi * ((bias_v - p.v_null_v) / p.v_pi_bias_v + np.asarray(drive_v) / p.v_pi_rf_v)
    eps = p.floor
    return eps + (1.0 - eps) * np.sin(phase) ** 2


def drive_for_profile(p: ModulatorParams, profile) -> np.ndarray:
    """RF voltage that makes a null-biased modulator follow ``profile`` (0..1) in power."""
    prof = np.clip(np.asarray(profile, dtype=float), 0.0, 1.0)
    return (2.0 * p.v_pi_rf_v / math.pi) * np.arcsin(np.sqrt(prof))


def modulator_transmit(p: ModulatorParams, bias_v: float, drive_trace, input: SampledEnvelope) -> SampledEnvelope:
    t = modulator_transmission(p, bias_v, drive_trace) * p.insertion_transmission
    return input.replace(amplitude=input.amplitude * np.sqrt(t))


def amplify(p: AmplifierParams, input: SampledEnvelope) -> SampledEnvelope:
    """Saturated, shape-preserving fibre amplifier.

    A single real gain ``g`` with ``g**2 = min(G_ss, P_sat / P_avg_in)``
    multiplies every sample.

    Raises
    ------
    ThermalShutdownError
        If the average input power exceeds ``p.max_avg_input_w``.
    """
    p_in = input.average_power
    if p_in > p.max_avg_input_w:
        raise ThermalShutdownError(
            f"average input {p_in * 1e3:.3g} mW exceeds amplifier limit "
            f"{p.max_avg_input_w * 1e3:.3g} mW"
        )
    if p_in == 0:
        return input.replace(amplitude=np.zeros_like(input.amplitude))
    gain = min(p.small_signal_gain, p.sat_avg_power_w / p_in)
    return input.replace(amplitude=input.amplitude * math.sqrt(gain))


def temperature_acceptance(p: ShgParams, temp_c: float) -> float:
    """Phase-matching factor in (0, 1]; equals 1/2 at ``T_opt +/- fwhm/2``."""
    x = 2.0 * SINC2_HALF_POINT * (temp_c - p.optimal_temp_c) / p.temp_acceptance_fwhm_c
    return float(np.sinc(x / math.pi) ** 2)


def shg_convert(p: ShgParams, temp_c: float, input: SampledEnvelope) -> tuple[SampledEnvelope, SampledEnvelope]:
    """Quadratic-law frequency doubling with energy bookkeeping.

    Returns ``(second_harmonic, depleted_fundamental)``.  The second
    harmonic carrier offset is twice the input offset.
    """
    if input.average_power >= p.max_avg_input_w:
        raise DomainError(
            f"average input {input.average_power:.3g} W outside doubling model validity "
            f"(< {p.max_avg_input_w:g} W)"
        )
    s = temperature_acceptance(p, temp_c)
    p1 = input.power
    if p.kappa * s * float(np.max(p1, initial=0.0)) > 1.0:
        warnings.warn(
            "conversion factor kappa*P_peak exceeds 1; undepleted-pump model invalid",
            SaturationWarning,
            stacklevel=2,
        )
    p2 = np.minimum(p.kappa * s * p1**2, p1)
    remaining = np.divide(p1 - p2, p1, out=np.zeros_like(p1), where=p1 > 0)
    phase = np.angle(input.amplitude)
    sh = SampledEnvelope(
        input.grid,
        np.sqrt(p2) * np.exp(2j * phase),
        carrier_offset_hz=2.0 * input.carrier_offset_hz,
    )
    depleted = input.replace(amplitude=input.amplitude * np.sqrt(remaining))
    return sh, depleted


class FilterOutput(NamedTuple):
    envelope: SampledEnvelope
    leakage_1560_w: float


def apply_filters(
    p: FilterParams,
    sh: SampledEnvelope,
    fundamental: SampledEnvelope,
    fiber: bool = False,
) -> FilterOutput:
    """Dichroic mirror and band-pass filter, optionally followed by fibre coupling.

    The transmitted 1560 nm average power is returned as a contamination
    figure and is not added to the 780 nm envelope.
    """
    t = p.transmission_780 * (p.fiber_coupling_780 if fiber else 1.0)
    leak = fundamental.average_power * p.leakage_1560
    return FilterOutput(sh.scaled(t), leak)


# -- whole chain -------------------------------------------------------------


@dataclass(frozen=True)
class StageRecord:
    stage: str
    avg_power_w: float
    peak_power_w: float
    fwhm_s: Optional[float]
    spectral_fwhm_hz: Optional[float]

    @classmethod
    def measure(cls, stage: str, env: SampledEnvelope) -> "StageRecord":
        try:
            width = fwhm_of(env.power, env.grid.dt)
        except MetrologyError:
            width = None
        try:
            spectral = power_spectrum(env).fwhm()
        except (MetrologyError, WindowingError):
            spectral = None
        return cls(stage, env.average_power, env.peak_power, width, spectral)


@dataclass
class RunReport:
    stages: list[StageRecord]
    laser_frequency_hz: float
    detuning_780_hz: float
    shg_efficiency: float
    leakage_1560_w: float
    warnings: list[str] = field(default_factory=list)

    def stage(self, name: str) -> StageRecord:
        for rec in self.stages:
            if rec.stage == name:
                return rec
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "stages": [dataclasses.asdict(s) for s in self.stages],
            "laser_frequency_hz": self.laser_frequency_hz,
            "detuning_780_hz": self.detuning_780_hz,
            "shg_efficiency": self.shg_efficiency,
            "leakage_1560_w": self.leakage_1560_w,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def run_chain(cfg: ChainConfig) -> tuple[SampledEnvelope, RunReport]:
    """Propagate the configured pulse train from the diode to the 780 nm fibre output."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")

        nu = laser_frequency(cfg.laser, cfg.laser_temp_c, cfg.laser_current_ma)
        ref_1560 = 0.5 * cfg.f_d2_hz
        env = SampledEnvelope.cw(cfg.grid, cfg.laser.output_power_w, carrier_offset_hz=nu - ref_1560)
        records = [StageRecord.measure("laser", env)]

        # bias servo locks the modulator floor at the measured residual-light level
        floor = cfg.pulse.residual_fraction
        locked = dataclasses.replace(
            cfg.modulator,
            extinction_db=math.inf if floor == 0 else -10.0 * math.log10(floor),
        )
        drive = drive_for_profile(locked, pulse_profile(cfg.pulse, cfg.grid))
        env = modulator_transmit(locked, locked.v_null_v, drive, env)
        records.append(StageRecord.measure("modulator", env))

        if not cfg.bypass_amplifier:
            env = amplify(cfg.amplifier, env)
            records.append(StageRecord.measure("amplifier", env))

        env = env.scaled(cfg.delivery_efficiency)
        records.append(StageRecord.measure("delivery", env))

        fundamental_in = env
        sh, fundamental = shg_convert(cfg.shg, cfg.shg_temp_c, env)
        records.append(StageRecord.measure("shg", sh))
        efficiency = sh.energy / fundamental_in.energy if fundamental_in.energy > 0 else 0.0

        out = apply_filters(cfg.filters, sh, fundamental)
        env = out.envelope
        records.append(StageRecord.measure("filters", env))
        if cfg.fiber_coupled:
            env = env.scaled(cfg.filters.fiber_coupling_780)
            records.append(StageRecord.measure("fiber", env))

    report = RunReport(
        stages=records,
        laser_frequency_hz=nu,
        detuning_780_hz=2.0 * nu - cfg.f_d2_hz,
        shg_efficiency=efficiency,
        leakage_1560_w=out.leakage_1560_w,
        warnings=[str(w.message) for w in caught],
    )
    return env, report
