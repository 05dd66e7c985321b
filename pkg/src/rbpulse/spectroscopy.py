"""Doppler-broadened fluorescence of a rubidium vapour cell under a slow laser scan."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.constants import c, k as k_B

from .chain import LaserParams, laser_frequency
from .constants import DELTA_NU_12, DELTA_NU_23, F_D2
from .errors import DomainError
from .peaks import local_extrema, refine_peak


@dataclass(frozen=True)
class Line:
    isotope: int
    ground_f: int
    center_offset_hz: float
    strength: float
    mass_kg: float


@dataclass(frozen=True)
class LineTable:
    """Line groups of the D2 manifold, offsets relative to ``f_D2``."""

    lines: tuple[Line, ...]
    excited_splitting_hz: float = DELTA_NU_23

    def __post_init__(self):
        object.__setattr__(self, "lines", tuple(self.lines))
        for ln in self.lines:
            if not ln.strength > 0:
                raise DomainError(f"line strength must be positive: {ln}")
            if not ln.mass_kg > 0:
                raise DomainError(f"isotope mass must be positive: {ln}")
        rb87 = {ln.ground_f: ln for ln in self.lines if ln.isotope == 87}
        if 1 in rb87 and 2 in rb87:
            split = rb87[1].center_offset_hz - rb87[2].center_offset_hz
            if abs(split - DELTA_NU_12) > 0.01e9:
                raise DomainError(
                    f"87Rb F=1/F=2 groups {split / 1e9:.4f} GHz apart, expected "
                    f"{DELTA_NU_12 / 1e9:.2f} GHz"
                )

    def __len__(self) -> int:
        return len(self.lines)

    @classmethod
    def read(cls, source) -> "LineTable":
        """Parse a CSV line table (``#`` comment lines allowed) from a path or text stream."""
        if isinstance(source, (str, Path)):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = source.read()
        rows = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        lines = [
            Line(
                isotope=int(r["isotope"]),
                ground_f=int(r["F"]),
                center_offset_hz=float(r["offset_hz"]),
                strength=float(r["strength"]),
                mass_kg=float(r["mass_kg"]),
            )
            for r in csv.DictReader(io.StringIO("\n".join(rows)))
        ]
        return cls(tuple(lines))

    @classmethod
    def default(cls) -> "LineTable":
        with resources.files("rbpulse.data").joinpath("rb_d2_lines.csv").open(encoding="utf-8") as fh:
            return cls.read(fh)


@dataclass(frozen=True)
class VaporParams:
    temperature_k: float = 295.0
    f_reference_hz: float = F_D2

    def __post_init__(self):
        if not self.temperature_k > 0:
            raise DomainError("temperature must be positive")


def doppler_sigma(nu0: float, mass: float, temp: float) -> float:
    """Gaussian standard deviation (Hz) of the Doppler profile; FWHM is 2.3548 times this."""
    if nu0 < 0 or not mass > 0 or not temp > 0:
        raise DomainError("doppler_sigma needs nu0 >= 0 and positive mass and temperature")
    return nu0 * math.sqrt(k_B * temp / (mass * c**2))


def vapor_spectrum(freqs, lines: LineTable, p: VaporParams = VaporParams()) -> np.ndarray:
    """Fluorescence (arbitrary units) at detunings ``freqs`` (Hz from ``p.f_reference_hz``).

    Each line group contributes ``strength * exp(-(nu - nu_i)**2 / (2 sigma_i**2))``.
    """
    f = np.asarray(freqs, dtype=float)
    out = np.zeros_like(f)
    for ln in lines.lines:
        sigma = doppler_sigma(p.f_reference_hz + ln.center_offset_hz, ln.mass_kg, p.temperature_k)
        out += ln.strength * np.exp(-0.5 * ((f - ln.center_offset_hz) / sigma) ** 2)
    return out


def current_scan_to_frequency(current_ma_trace, laser: LaserParams, temp_c: float):
    """780 nm frequency (Hz) seen by the cell while the diode current is scanned."""
    return 2.0 * laser_frequency(laser, temp_c, current_ma_trace)


def find_peaks(freqs, signal, rel_prominence: float = 0.02) -> np.ndarray:
    """Interpolated positions of the resolved maxima of a sampled spectrum."""
    signal = np.asarray(signal, dtype=float)
    maxima, _ = local_extrema(signal, prominence=rel_prominence * float(signal.max()))
    return np.array([refine_peak(freqs, signal, i) for i in maxima])


def resolved_groups(lines: LineTable, p: VaporParams = VaporParams()) -> int:
    """Number of line groups separated from their neighbour by more than twice the Doppler FWHM."""
    ordered = sorted(lines.lines, key=lambda ln: ln.center_offset_hz)
    if not ordered:
        return 0
    fwhm = [
        2.0 * math.sqrt(2.0 * math.log(2.0))
        * doppler_sigma(p.f_reference_hz + ln.center_offset_hz, ln.mass_kg, p.temperature_k)
        for ln in ordered
    ]
    count = 1
    for a, b, wa, wb in zip(ordered, ordered[1:], fwhm, fwhm[1:]):
        if b.center_offset_hz - a.center_offset_hz > 2.0 * max(wa, wb):
            count += 1
    return count
