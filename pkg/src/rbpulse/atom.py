"""Two-level optical Bloch dynamics of a single atom under the pulse train.

State vector convention: ``u, v`` are the coherences and ``w`` the
inversion, ``rho_ee = (w + 1) / 2``.  The drive enters as the Rabi
frequency ``Omega(t) = coupling * sqrt(P(t))`` and is held constant over
each sample cell ``[t_i, t_i + dt)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np
from scipy.linalg import expm

from .constants import GAMMA_D2
from .errors import CoverageWarning, DomainError, ResolutionError
from .signal import PulseSpec, SampledEnvelope, TimeGrid, pulse_profile, synthesize_pulse

DEFAULT_SEED = 20051


@dataclass(frozen=True)
class AtomParams:
    """Two-level atom constants.

    ``gamma_hz`` is the population decay rate 1/t_sp (in 1/s);
    ``detuning_hz`` is the laser-minus-atom detuning in ordinary Hz;
    ``coupling_sqrtw`` converts sqrt(W) to Rabi frequency in rad/s.
    """

    gamma_hz: float = GAMMA_D2
    detuning_hz: float = 0.0
    coupling_sqrtw: float = 0.0
    collection_efficiency: float = 1.0

    def __post_init__(self):
        if self.gamma_hz < 0:
            raise DomainError("decay rate cannot be negative")
        if self.coupling_sqrtw < 0:
            raise DomainError("coupling cannot be negative")
        if not 0 < self.collection_efficiency <= 1:
            raise DomainError("collection_efficiency must lie in (0, 1]")

    @property
    def delta(self) -> float:
        """Angular detuning (rad/s)."""
        return 2.0 * math.pi * self.detuning_hz


class BlochState(NamedTuple):
    u: float = 0.0
    v: float = 0.0
    w: float = -1.0

    @property
    def rho_ee(self) -> float:
        return 0.5 * (self.w + 1.0)


GROUND = BlochState(0.0, 0.0, -1.0)


@dataclass(frozen=True, eq=False)
class BlochTrajectory:
    """States at ``t_start + i*dt`` for ``i = 0..n_samples`` (one more than the drive)."""

    grid: TimeGrid
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    photons_emitted: np.ndarray
    gamma: float

    @property
    def times(self) -> np.ndarray:
        return self.grid.t_start + self.grid.dt * np.arange(self.u.size)

    @property
    def rho_ee(self) -> np.ndarray:
        return 0.5 * (self.w + 1.0)

    @property
    def emission_rate(self) -> np.ndarray:
        return self.gamma * self.rho_ee

    def state(self, i: int = -1) -> BlochState:
        return BlochState(float(self.u[i]), float(self.v[i]), float(self.w[i]))


def rabi_frequency(drive: SampledEnvelope, p: AtomParams) -> np.ndarray:
    return p.coupling_sqrtw * np.sqrt(drive.power)


def evolve_bloch(drive: SampledEnvelope, p: AtomParams, initial: BlochState = GROUND) -> BlochTrajectory:
    """Integrate the optical Bloch equations with fixed-step RK4 on the drive grid.

    Raises
    ------
    ResolutionError
        If ``dt`` exceeds ``1/(20*Omega_max)`` or ``t_sp/100``.
    """
    omega = rabi_frequency(drive, p)
    dt = drive.grid.dt
    om_max = float(np.max(omega, initial=0.0))
    limit = math.inf
    if om_max > 0:
        limit = 1.0 / (20.0 * om_max)
    if p.gamma_hz > 0:
        limit = min(limit, 0.01 / p.gamma_hz)
    if dt > limit * (1 + 1e-9):
        raise ResolutionError(f"dt={dt:.3g} s exceeds integrator step limit {limit:.3g} s")

    n = omega.size
    D = p.delta
    G = p.gamma_hz
    h = 0.5 * G
    u_out = np.empty(n + 1)
    v_out = np.empty(n + 1)
    w_out = np.empty(n + 1)
    n_out = np.empty(n + 1)
    u, v, w = (float(x) for x in initial)
    ph = 0.0
    u_out[0], v_out[0], w_out[0], n_out[0] = u, v, w, ph
    half = 0.5 * dt
    sixth = dt / 6.0
    om_list = omega.tolist()
    for i in range(n):
        om = om_list[i]
        # k1
        a1 = D * v - h * u
        b1 = -D * u + om * w - h * v
        c1 = -om * v - G * (w + 1.0)
        d1 = h * (w + 1.0)
        # k2
        u2, v2, w2 = u + half * a1, v + half * b1, w + half * c1
        a2 = D * v2 - h * u2
        b2 = -D * u2 + om * w2 - h * v2
        c2 = -om * v2 - G * (w2 + 1.0)
        d2 = h * (w2 + 1.0)
        # k3
        u3, v3, w3 = u + half * a2, v + half * b2, w + half * c2
        a3 = D * v3 - h * u3
        b3 = -D * u3 + om * w3 - h * v3
        c3 = -om * v3 - G * (w3 + 1.0)
        d3 = h * (w3 + 1.0)
        # k4
        u4, v4, w4 = u + dt * a3, v + dt * b3, w + dt * c3
        a4 = D * v4 - h * u4
        b4 = -D * u4 + om * w4 - h * v4
        c4 = -om * v4 - G * (w4 + 1.0)
        d4 = h * (w4 + 1.0)

        u += sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        v += sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        w += sixth * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        ph += sixth * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
        u_out[i + 1], v_out[i + 1], w_out[i + 1], n_out[i + 1] = u, v, w, ph
    return BlochTrajectory(drive.grid, u_out, v_out, w_out, n_out, G)


def photons_per_period(traj: BlochTrajectory) -> float:
    """Expected number of spontaneously emitted photons over the trajectory.

    Warns with :class:`CoverageWarning` if the excited state has not decayed
    (``rho_ee > 1e-3``) by the end.
    """
    end = float(traj.rho_ee[-1])
    if end > 1e-3:
        warnings.warn(
            f"trajectory ends with rho_ee={end:.3g}; emission tail is truncated",
            CoverageWarning,
            stacklevel=2,
        )
    return float(traj.photons_emitted[-1] - traj.photons_emitted[0])


# -- exact propagation for piecewise-constant drives -------------------------


def _generator(omega: np.ndarray, delta: float, gamma: float) -> np.ndarray:
    """Generators of d/dt (u, v, w, photons, 1) for a stack of Rabi frequencies."""
    omega = np.asarray(omega, dtype=float)
    a = np.zeros(omega.shape + (5, 5))
    h = 0.5 * gamma
    a[..., 0, 0] = -h
    a[..., 0, 1] = delta
    a[..., 1, 0] = -delta
    a[..., 1, 1] = -h
    a[..., 1, 2] = omega
    a[..., 2, 1] = -omega
    a[..., 2, 2] = -gamma
    a[..., 2, 4] = -gamma
    a[..., 3, 2] = h
    a[..., 3, 4] = h
    return a


def _runs(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run-length encode ``values``: (run value, run length)."""
    edges = np.flatnonzero(np.diff(values)) + 1
    starts = np.concatenate(([0], edges))
    lengths = np.diff(np.concatenate((starts, [values.size])))
    return values[starts], lengths


def propagate_exact(
    drive: SampledEnvelope,
    p: AtomParams,
    power_scale=1.0,
    initial: BlochState = GROUND,
) -> np.ndarray:
    """Final ``(u, v, w, photons)`` for one or more drive power scalings.

    Exact for the held-sample drive model, via matrix exponentials of each
    run of identical samples.  ``power_scale`` may be an array; the result
    then has shape ``(len(power_scale), 4)``.
    """
    scale = np.sqrt(np.atleast_1d(np.asarray(power_scale, dtype=float)))
    omega_runs, lengths = _runs(rabi_frequency(drive, p))
    x = np.zeros((scale.size, 5))
    x[:, :3] = initial
    x[:, 4] = 1.0
    dt = drive.grid.dt
    for om, length in zip(omega_runs, lengths):
        tau = length * dt
        if om == 0.0:
            m = expm(_generator(np.array(0.0), p.delta, p.gamma_hz) * tau)
            x = x @ m.T
        else:
            m = expm(_generator(om * scale, p.delta, p.gamma_hz) * tau)
            x = np.einsum("kij,kj->ki", m, x)
    out = x[:, :4]
    return out if np.ndim(power_scale) else out[0]


# -- pulse calibration, sweeps and traces -------------------------------------


def default_atom_grid(pulse: PulseSpec, dt: float = 10e-12) -> TimeGrid:
    return TimeGrid.covering(pulse.period, dt)


def pulse_centre(pulse: PulseSpec, grid: TimeGrid) -> float:
    """Centre of the probe pulse: placed early in the window so the decay tail fits."""
    lead = 1e-9 if pulse.shape == "square" else 2.0 * pulse.fwhm
    lead = round(lead / grid.dt) * grid.dt
    return grid.t_start + lead + 0.5 * pulse.fwhm


def pulse_onset(pulse: PulseSpec, grid: TimeGrid) -> float:
    """Time of the rising half-maximum edge of the probe pulse."""
    shift = 0.5 * grid.dt if pulse.shape == "square" else 0.0
    return pulse_centre(pulse, grid) - 0.5 * pulse.fwhm - shift


def probe_drive(pulse: PulseSpec, grid: TimeGrid | None = None) -> SampledEnvelope:
    """Single probe pulse over one period, early in the window."""
    grid = grid or default_atom_grid(pulse)
    return synthesize_pulse(pulse, grid, centre=pulse_centre(pulse, grid))


def _tau_eff(pulse: PulseSpec, grid: TimeGrid) -> float:
    profile = pulse_profile(pulse, grid, pulse_centre(pulse, grid))
    return float(np.sum(np.sqrt(profile))) * grid.dt


def calibrate_pi_pulse(pulse: PulseSpec, p: AtomParams, grid: TimeGrid | None = None) -> float:
    """Coupling (rad/s per sqrt(W)) that makes ``pulse`` a pi-pulse.

    The equivalent square duration is the field-amplitude area of the sampled
    pulse profile divided by its peak, so the round trip through
    :func:`evolve_bloch` is exact up to integrator error.  Any residual floor
    is excluded from the area.
    """
    if not pulse.peak_power > 0:
        raise DomainError("cannot calibrate a pulse with zero peak power")
    grid = grid or default_atom_grid(pulse)
    return math.pi / (math.sqrt(pulse.peak_power) * _tau_eff(pulse, grid))


@dataclass(frozen=True)
class NoiseModel:
    """Shot-to-shot multiplicative fluctuations of the pulse power."""

    relative_sigma: float = 0.10
    distribution: Literal["gaussian", "uniform"] = "gaussian"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.relative_sigma < 0:
            raise DomainError("relative_sigma must be >= 0")
        if self.distribution not in ("gaussian", "uniform"):
            raise DomainError(f"unknown distribution {self.distribution!r}")

    def draw(self, n: int, stream: int) -> np.ndarray:
        """Power factors for ``n`` shots; ``stream`` indexes an independent substream.

        Draws for a sweep point depend only on ``(seed, stream)``, never on
        evaluation order.  Negative factors are redrawn (truncation at zero).
        """
        if self.relative_sigma == 0:
            return np.ones(n)
        rng = np.random.Generator(np.random.Philox(key=self.seed, counter=[stream, 0, 0, 0]))
        out = self._sample(rng, n)
        bad = out < 0
        while np.any(bad):
            out[bad] = self._sample(rng, int(bad.sum()))
            bad = out < 0
        return out

    def _sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        s = self.relative_sigma
        if self.distribution == "gaussian":
            return rng.normal(1.0, s, n)
        half = s * math.sqrt(3.0)
        return rng.uniform(1.0 - half, 1.0 + half, n)


@dataclass(frozen=True, eq=False)
class SweepResult:
    powers: np.ndarray
    count_rate_hz: np.ndarray
    stderr_hz: np.ndarray
    pulse_area: np.ndarray = field(default=None)

    @property
    def sqrt_power(self) -> np.ndarray:
        return np.sqrt(self.powers)


def rabi_sweep(
    powers: Sequence[float],
    pulse: PulseSpec,
    p: AtomParams,
    noise: NoiseModel = NoiseModel(),
    n_shots: int = 1000,
    grid: TimeGrid | None = None,
) -> SweepResult:
    """Detected photon rate versus peak pulse power, averaged over power noise.

    Each shot's power is the nominal power times a factor from ``noise``;
    the expected photon number per period is computed exactly for the held
    sample drive and averaged.  Rates include the repetition rate and the
    collection efficiency; ``stderr_hz`` is the standard error of the mean.
    """
    if n_shots < 1:
        raise DomainError("n_shots must be >= 1")
    grid = grid or default_atom_grid(pulse)
    unit = probe_drive(pulse.replace(peak_power=1.0, residual_fraction=0.0), grid)
    rate_per_photon = p.collection_efficiency / pulse.period
    powers = np.asarray(powers, dtype=float)
    mean = np.empty(powers.size)
    err = np.empty(powers.size)
    for i, power in enumerate(powers):
        if noise.relative_sigma == 0 or power == 0:
            mean[i] = propagate_exact(unit, p, power)[3]
            err[i] = 0.0
            continue
        factors = noise.draw(n_shots, stream=i)
        shots = propagate_exact(unit, p, power * factors)[:, 3]
        mean[i] = shots.mean()
        err[i] = shots.std(ddof=1) / math.sqrt(n_shots) if n_shots > 1 else 0.0
    area = p.coupling_sqrtw * np.sqrt(powers) * float(np.sum(np.sqrt(unit.power))) * grid.dt
    return SweepResult(powers, mean * rate_per_photon, err * rate_per_photon, area)


def powers_for_areas(areas, pulse: PulseSpec, p: AtomParams, grid: TimeGrid | None = None) -> np.ndarray:
    """Peak powers (W) giving the requested pulse areas (rad) at coupling ``p.coupling_sqrtw``."""
    grid = grid or default_atom_grid(pulse)
    return (np.asarray(areas, dtype=float) / (p.coupling_sqrtw * _tau_eff(pulse, grid))) ** 2


class Trace(NamedTuple):
    t_s: np.ndarray
    value: np.ndarray


def fluorescence_trace(
    pulse_area: float,
    pulse: PulseSpec,
    p: AtomParams,
    grid: TimeGrid | None = None,
) -> Trace:
    """Time-resolved emission rate ``Gamma * rho_ee(t)`` over one period.

    The coupling is set so that ``pulse`` has the requested area; the
    pulse's own peak power is kept (1 W if it is zero).  Times are measured
    from the rising edge of the pulse.
    """
    if pulse_area < 0:
        raise DomainError("pulse area must be non-negative")
    grid = grid or default_atom_grid(pulse)
    if pulse.peak_power == 0:
        pulse = pulse.replace(peak_power=1.0)
    k = calibrate_pi_pulse(pulse, p, grid) * pulse_area / math.pi
    drive = probe_drive(pulse, grid)
    traj = evolve_bloch(drive, AtomParams(p.gamma_hz, p.detuning_hz, k, p.collection_efficiency))
    return Trace(traj.times - pulse_onset(pulse, grid), traj.emission_rate)


def fit_decay_lifetime(t, rate, t_from: float, t_to: float | None = None) -> float:
    """Exponential lifetime from a log-linear least-squares fit of ``rate`` on ``[t_from, t_to]``."""
    t = np.asarray(t, dtype=float)
    rate = np.asarray(rate, dtype=float)
    sel = (t >= t_from) & (rate > 0)
    if t_to is not None:
        sel &= t <= t_to
    if sel.sum() < 3:
        raise DomainError("not enough positive samples to fit a decay")
    slope, _ = np.polyfit(t[sel], np.log(rate[sel]), 1)
    return -1.0 / slope
