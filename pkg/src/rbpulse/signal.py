"""Sampled optical envelopes, pulse-train synthesis and pulse metrology.

An envelope is a complex amplitude in sqrt(W) on a uniform time grid, so
``abs(amplitude) ** 2`` is the instantaneous optical power.  The carrier
frequency is carried alongside as an offset from a declared reference
(``f_D2 / 2`` in the 1560 nm part of the chain, ``f_D2`` after doubling).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .constants import PULSE_PERIOD, TBP_GAUSSIAN
from .errors import DomainError, MetrologyError, ResolutionError, WindowingError

PulseShape = Literal["square", "gaussian"]

#: Samples required across the shortest pulse feature.
MIN_SAMPLES_PER_FWHM = 20


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling grid ``t_i = t_start + i * dt``."""

    t_start: float = 0.0
    dt: float = 10e-12
    n_samples: int = 20000

    def __post_init__(self):
        if not self.dt > 0:
            raise ResolutionError(f"dt must be positive, got {self.dt!r}")
        if self.n_samples < 2:
            raise ResolutionError(f"need at least 2 samples, got {self.n_samples}")

    @classmethod
    def covering(cls, span: float, dt: float, t_start: float = 0.0) -> "TimeGrid":
        """Smallest grid with spacing ``dt`` whose span is at least ``span``."""
        n = int(math.ceil(span / dt - 1e-9))
        return cls(t_start=t_start, dt=dt, n_samples=max(n, 2))

    @property
    def span(self) -> float:
        return self.dt * self.n_samples

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_samples)


@dataclass(frozen=True, eq=False)
class SampledEnvelope:
    """Complex field amplitude (sqrt(W)) sampled on a :class:`TimeGrid`."""

    grid: TimeGrid
    amplitude: np.ndarray
    carrier_offset_hz: float = 0.0

    def __post_init__(self):
        amp = np.array(self.amplitude, dtype=np.complex128)
        if amp.shape != (self.grid.n_samples,):
            raise ValueError(
                f"amplitude has shape {amp.shape}, grid expects ({self.grid.n_samples},)"
            )
        amp.setflags(write=False)
        object.__setattr__(self, "amplitude", amp)

    @classmethod
    def from_power(cls, grid: TimeGrid, power, carrier_offset_hz: float = 0.0):
        power = np.asarray(power, dtype=float)
        if np.any(power < 0):
            raise DomainError("optical power cannot be negative")
        return cls(grid, np.sqrt(power).astype(np.complex128), carrier_offset_hz)

    @classmethod
    def cw(cls, grid: TimeGrid, power: float, carrier_offset_hz: float = 0.0):
        return cls.from_power(grid, np.full(grid.n_samples, float(power)), carrier_offset_hz)

    @property
    def power(self) -> np.ndarray:
        return self.amplitude.real**2 + self.amplitude.imag**2

    @property
    def energy(self) -> float:
        return float(np.sum(self.power) * self.grid.dt)

    @property
    def average_power(self) -> float:
        return self.energy / self.grid.span

    @property
    def peak_power(self) -> float:
        return float(np.max(self.power))

    def replace(self, **changes) -> "SampledEnvelope":
        return dataclasses.replace(self, **changes)

    def scaled(self, power_factor: float) -> "SampledEnvelope":
        """Same envelope with every sample's power multiplied by ``power_factor``."""
        return self.replace(amplitude=self.amplitude * math.sqrt(power_factor))


@dataclass(frozen=True)
class PulseSpec:
    """Electrical-pulse description of one slot of the pulse train.

    ``residual_fraction`` is the light floor between pulses as a fraction of
    the peak power.  Durations of 1.3 to 6.1 ns are what the hardware
    produces, but any ``fwhm < period`` is accepted.
    """

    fwhm: float = 4e-9
    period: float = PULSE_PERIOD
    peak_power: float = 1.0
    residual_fraction: float = 0.0
    shape: PulseShape = "square"

    def __post_init__(self):
        if not self.fwhm > 0:
            raise DomainError(f"fwhm must be positive, got {self.fwhm!r}")
        if not self.fwhm < self.period:
            raise DomainError("pulse fwhm must be shorter than the period")
        if self.peak_power < 0:
            raise DomainError("peak power cannot be negative")
        if not 0 <= self.residual_fraction < 1:
            raise DomainError("residual_fraction must lie in [0, 1)")
        if self.shape not in ("square", "gaussian"):
            raise DomainError(f"unknown pulse shape {self.shape!r}")

    @property
    def duty_cycle(self) -> float:
        return self.fwhm / self.period

    def replace(self, **changes) -> "PulseSpec":
        return dataclasses.replace(self, **changes)


def pulse_profile(spec: PulseSpec, grid: TimeGrid, centre: float | None = None) -> np.ndarray:
    """Normalized (peak 1, floor 0) power profile of the pulse train on ``grid``.

    Pulses are centred at ``centre + k*period``, by default
    ``centre = t_start + period/2``; square pulses
    are shifted by half a sample onto a cell boundary so that durations that
    are whole multiples of ``dt`` have no partial edge samples.  Square
    pulses are box-averaged over each sample cell, so the sampled energy is
    exact for any duration.
    """
    t = grid.times
    t0 = grid.t_start + 0.5 * spec.period if centre is None else centre
    if spec.shape == "square":
        t0 -= 0.5 * grid.dt
    k = np.arange(
        math.floor((t[0] - t0) / spec.period) - 1,
        math.ceil((t[-1] - t0) / spec.period) + 2,
    )
    centres = t0 + k * spec.period
    profile = np.zeros(grid.n_samples)
    half = 0.5 * spec.fwhm
    if spec.shape == "square":
        lo = t - 0.5 * grid.dt
        hi = t + 0.5 * grid.dt
        for c in centres:
            overlap = np.minimum(hi, c + half) - np.maximum(lo, c - half)
            profile += np.clip(overlap, 0.0, None) / grid.dt
    else:
        a = 4.0 * math.log(2.0) / spec.fwhm**2
        for c in centres:
            profile += np.exp(-a * (t - c) ** 2)
    return np.minimum(profile, 1.0)


def synthesize_pulse(
    spec: PulseSpec,
    grid: TimeGrid,
    carrier_offset_hz: float = 0.0,
    centre: float | None = None,
) -> SampledEnvelope:
    """Chirp-free intensity-modulated pulse train.

    Inside a pulse the power is ``spec.peak_power``; between pulses it sits at
    ``residual_fraction * peak_power``.  The envelope phase is constant.

    Raises
    ------
    ResolutionError
        If the grid is shorter than one period or ``dt > fwhm / 20``.
    """
    if grid.span < spec.period * (1 - 1e-9):
        raise ResolutionError(
            f"grid span {grid.span:.4g} s shorter than pulse period {spec.period:.4g} s"
        )
    if grid.dt > spec.fwhm / MIN_SAMPLES_PER_FWHM * (1 + 1e-9):
        raise ResolutionError(
            f"dt={grid.dt:.3g} s too coarse for fwhm={spec.fwhm:.3g} s "
            f"(need <= fwhm/{MIN_SAMPLES_PER_FWHM})"
        )
    r = spec.residual_fraction
    power = spec.peak_power * (r + (1.0 - r) * pulse_profile(spec, grid, centre))
    return SampledEnvelope.from_power(grid, power, carrier_offset_hz)


def fwhm_of(trace, dx: float = 1.0) -> float:
    """Full width at half maximum of the lobe containing the global maximum.

    Crossings are located by linear interpolation between the bracketing
    samples.  The half level is measured from zero, not from the trace
    minimum.

    Parameters
    ----------
    trace : array_like
        Real samples on a uniform axis.
    dx : float
        Sample spacing; the result is returned in the same unit.

    Raises
    ------
    MetrologyError
        If the trace has no positive maximum or never drops below half of it
        on one side.
    """
    y = np.asarray(trace, dtype=float)
    if y.ndim != 1 or y.size < 3:
        raise MetrologyError("need a 1-D trace with at least 3 samples")
    imax = int(np.argmax(y))
    ymax = y[imax]
    if not ymax > 0:
        raise MetrologyError("trace has no positive maximum")
    half = 0.5 * ymax

    left = np.flatnonzero(y[:imax] < half)
    right = np.flatnonzero(y[imax:] < half)
    if left.size == 0 or right.size == 0:
        raise MetrologyError("trace does not cross half maximum on both sides")
    j = left[-1]
    x_left = j + (half - y[j]) / (y[j + 1] - y[j])
    k = imax + right[0]
    x_right = (k - 1) + (y[k - 1] - half) / (y[k - 1] - y[k])
    return float((x_right - x_left) * dx)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Energy spectral density ``|A(f)|**2`` (J/Hz) on a uniform frequency axis.

    ``f_hz`` is measured from the envelope's reference frequency, so it
    already includes the carrier offset.
    """

    f_hz: np.ndarray
    density: np.ndarray
    carrier_offset_hz: float = 0.0

    @property
    def df(self) -> float:
        return float(self.f_hz[1] - self.f_hz[0])

    @property
    def energy(self) -> float:
        return float(np.sum(self.density) * self.df)

    def fwhm(self) -> float:
        """Width of the central lobe at half maximum (Hz)."""
        return fwhm_of(self.density, self.df)


def power_spectrum(env: SampledEnvelope, pad_factor: int = 1, edge_tol: float = 0.01) -> Spectrum:
    """Fourier energy spectrum of one isolated pulse.

    The constant inter-pulse floor (the minimum sampled power) is treated as
    incoherent background and removed before transforming, so the returned
    spectrum integrates to the pulse energy above the floor.  With
    ``pad_factor > 1`` the pulse is zero-padded for a finer frequency axis.

    Raises
    ------
    WindowingError
        If the pulse still carries more than ``edge_tol`` of its peak power
        at either end of the window.
    """
    p = env.power
    floor = float(np.min(p))
    pulse_p = np.clip(p - floor, 0.0, None)
    dt = env.grid.dt
    n = env.grid.n_samples * int(pad_factor)
    peak = float(np.max(pulse_p))
    if peak > 0 and max(pulse_p[0], pulse_p[-1]) > edge_tol * peak:
        raise WindowingError("pulse is truncated by the analysis window")

    phase = np.exp(1j * np.angle(env.amplitude))
    a = np.sqrt(pulse_p) * phase
    spec = dt * np.fft.fftshift(np.fft.fft(a, n=n))
    f = np.fft.fftshift(np.fft.fftfreq(n, d=dt)) + env.carrier_offset_hz
    density = spec.real**2 + spec.imag**2
    return Spectrum(f_hz=f, density=density, carrier_offset_hz=env.carrier_offset_hz)


def detector_response(trace, dt: float, impulse_fwhm: float) -> np.ndarray:
    """Convolve ``trace`` with a unit-area gaussian impulse response.

    The convolution is circular, which matches a periodic pulse train sampled
    over whole periods and preserves the trace integral exactly.
    """
    if impulse_fwhm < 0:
        raise DomainError("impulse_fwhm must be non-negative")
    y = np.asarray(trace, dtype=float)
    if impulse_fwhm == 0:
        return y.copy()
    n = y.size
    sigma = impulse_fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    lag = np.arange(n)
    lag = np.where(lag > n // 2, lag - n, lag) * dt
    kernel = np.exp(-0.5 * (lag / sigma) ** 2)
    kernel /= kernel.sum()
    return np.fft.irfft(np.fft.rfft(y) * np.fft.rfft(kernel), n=n)


def min_gaussian_duration(level_splitting: float) -> float:
    """Shortest transform-limited gaussian whose spectral FWHM fits in ``level_splitting``."""
    if not level_splitting > 0:
        raise DomainError("level splitting must be positive")
    return TBP_GAUSSIAN / level_splitting
