"""Command-line front end: ``rbpulse <command> [options]``.

Every command reads an optional INI configuration, writes CSV or JSON files
into ``--out`` and prints a short summary.  Outputs depend only on the
configuration and ``--seed``.
"""

from __future__ import annotations

import functools
import json
import math
import sys
import warnings
from pathlib import Path

import click
import numpy as np

from . import io
from .atom import (
    DEFAULT_SEED,
    AtomParams,
    calibrate_pi_pulse,
    default_atom_grid,
    fluorescence_trace,
    powers_for_areas,
    rabi_sweep,
)
from .chain import current_for_frequency, run_chain
from .config import load_config
from .constants import DETECTOR_FWHM, NOMINAL_DURATIONS
from .errors import RbPulseError
from .requirements import check_requirements, requirements_dict
from .signal import (
    PulseSpec,
    TimeGrid,
    detector_response,
    fwhm_of,
    power_spectrum,
    synthesize_pulse,
)
from .spectroscopy import current_scan_to_frequency, find_peaks, vapor_spectrum

DEFAULT_DURATIONS_NS = ",".join(f"{d * 1e9:g}" for d in NOMINAL_DURATIONS)


class FloatList(click.ParamType):
    """Comma-separated floats; an empty string is an empty list."""

    name = "floats"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        try:
            return [float(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            self.fail(f"expected comma-separated numbers, got {value!r}", param, ctx)


class PowerRange(click.ParamType):
    """Either ``start:stop:num`` (inclusive linspace) or a comma-separated list, in W."""

    name = "powers"

    def convert(self, value, param, ctx):
        if value is None or isinstance(value, np.ndarray):
            return value
        text = str(value)
        try:
            if ":" in text:
                start, stop, num = text.split(":")
                return np.linspace(float(start), float(stop), int(num))
            return np.array([float(v) for v in text.split(",") if v.strip()])
        except ValueError:
            self.fail(f"expected start:stop:num or a list, got {value!r}", param, ctx)


def common_options(func):
    @click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                  help="INI configuration file (defaults built in).")
    @click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".",
                  show_default=True, help="Output directory.")
    @click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=DEFAULT_SEED,
                  show_default=True, help="Seed for shot noise.")
    @functools.wraps(func)
    def wrapper(config_path, out_dir, seed, **kwargs):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                cfg = load_config(config_path)
                out = _prepare_out(Path(out_dir))
                status = func(cfg=cfg, out=out, seed=seed, **kwargs)
            except RbPulseError as exc:
                raise click.ClickException(str(exc)) from exc
            except OSError as exc:
                where = exc.filename or out_dir
                raise click.ClickException(f"cannot write output ({where}): {exc.strerror or exc}") from exc
            finally:
                for w in _unique(caught):
                    click.echo(f"warning: {w}", err=True)
        if status:
            sys.exit(status)

    return wrapper


def _unique(caught) -> list[str]:
    seen = []
    for w in caught:
        msg = str(w.message)
        if msg not in seen:
            seen.append(msg)
    return seen


def _prepare_out(out: Path) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".rbpulse-write-test"
    probe.write_bytes(b"")
    probe.unlink()
    return out


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Pulsed 780 nm source and single-atom excitation simulator."""


@main.command("pulse-shapes")
@common_options
@click.option("--durations", type=FloatList(), default=DEFAULT_DURATIONS_NS, show_default=True,
              help="Pulse FWHMs in ns.")
@click.option("--shape", type=click.Choice(["square", "gaussian"]), default=None,
              help="Pulse shape (default from config).")
@click.option("--window-ns", type=float, default=40.0, show_default=True,
              help="Length of the emitted trace around the pulse.")
def pulse_shapes(cfg, out, seed, durations, shape, window_ns):
    """Detected pulse shapes, one CSV per duration (t_s,value)."""
    base = cfg.chain.pulse.replace(peak_power=1.0, **({"shape": shape} if shape else {}))
    grid = cfg.chain.grid
    rows = []
    for d_ns in durations:
        spec = base.replace(fwhm=d_ns * 1e-9)
        env = synthesize_pulse(spec, grid)
        trace = detector_response(env.power, grid.dt, DETECTOR_FWHM)
        trace = trace / trace.max()
        width = fwhm_of(trace, grid.dt)
        t = grid.times - (grid.t_start + 0.5 * grid.span)
        keep = np.abs(t) <= 0.5 * window_ns * 1e-9
        name = f"pulse_shape_{d_ns:g}ns.csv"
        io.write_csv(out / name, ["t_s", "value"], t[keep], trace[keep])
        rows.append((d_ns * 1e-9, width))
        click.echo(f"{name}: nominal {d_ns:g} ns, detected FWHM {width * 1e9:.3f} ns")
    if rows:
        io.write_csv(out / "pulse_shapes_summary.csv", ["nominal_fwhm_s", "detected_fwhm_s"], *zip(*rows))
    return 0


def tbp_points(durations_s, shape: str, grid: TimeGrid):
    """Spectral FWHM (Hz) of ideal pulses of the given durations."""
    out = []
    for d in durations_s:
        spec = PulseSpec(fwhm=d, period=grid.span, shape=shape)
        out.append(power_spectrum(synthesize_pulse(spec, grid)).fwhm())
    return np.array(out)


def through_origin_slope(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.dot(x, y) / np.dot(x, x))


@main.command("tbp")
@common_options
@click.option("--durations", type=FloatList(), default=DEFAULT_DURATIONS_NS, show_default=True,
              help="Pulse FWHMs in ns.")
@click.option("--shape", type=click.Choice(["square", "gaussian"]), default="square", show_default=True)
def tbp(cfg, out, seed, durations, shape):
    """Spectral width versus inverse duration and its through-origin slope."""
    if not durations:
        click.echo("no durations given")
        return 0
    tau = np.array(durations) * 1e-9
    width = tbp_points(tau, shape, cfg.chain.grid)
    slope = through_origin_slope(1.0 / tau, width)
    io.write_csv(out / "tbp.csv", ["inv_fwhm_hz", "spectral_fwhm_hz"], 1.0 / tau, width)
    _write_json(out / "tbp_fit.json", {
        "shape": shape,
        "slope": slope,
        "products": [float(p) for p in width * tau],
    })
    for t, w in zip(tau, width):
        click.echo(f"{t * 1e9:5.2f} ns  {w / 1e6:8.2f} MHz  product {t * w:.4f}")
    click.echo(f"slope {slope:.4f} GHz*ns")
    return 0


@main.command("budget")
@common_options
@click.option("--fwhm-ns", type=float, default=None, help="Override the pulse FWHM.")
def budget(cfg, out, seed, fwhm_ns):
    """Power budget of the chain at the configured operating point (budget.json)."""
    chain = cfg.chain
    if fwhm_ns is not None:
        chain = chain.replace(pulse=chain.pulse.replace(fwhm=fwhm_ns * 1e-9))
    _, report = run_chain(chain)
    (out / "budget.json").write_text(report.to_json() + "\n", encoding="utf-8")
    click.echo(f"{'stage':<10} {'avg [W]':>10} {'peak [W]':>10} {'fwhm [ns]':>10}")
    for s in report.stages:
        fwhm = f"{s.fwhm_s * 1e9:10.3f}" if s.fwhm_s is not None else f"{'-':>10}"
        click.echo(f"{s.stage:<10} {s.avg_power_w:10.4g} {s.peak_power_w:10.4g} {fwhm}")
    click.echo(f"SHG efficiency {report.shg_efficiency:.4f}, 780 nm detuning {report.detuning_780_hz / 1e6:.2f} MHz")
    for msg in report.warnings:
        click.echo(f"warning: {msg}", err=True)
    return 0


@main.command("rb-spectrum")
@common_options
@click.option("--span-ghz", type=click.FloatRange(min=0, min_open=True), default=12.0, show_default=True,
              help="Scan width at 780 nm.")
@click.option("--center-ghz", type=float, default=0.85, show_default=True,
              help="Scan centre relative to the D2 reference.")
@click.option("--points", type=click.IntRange(min=3), default=4001, show_default=True)
def rb_spectrum(cfg, out, seed, span_ghz, center_ghz, points):
    """Vapour-cell fluorescence under a current scan (f_hz,signal)."""
    chain = cfg.chain
    laser = chain.laser
    i_center = current_for_frequency(laser, chain.laser_temp_c, 0.5 * (chain.f_d2_hz + center_ghz * 1e9))
    half = 0.5 * span_ghz * 1e9 / (2.0 * abs(laser.dnu_dI_hz_per_ma))
    current = np.linspace(i_center - half, i_center + half, points)
    freqs = current_scan_to_frequency(current, laser, chain.laser_temp_c) - cfg.vapor.f_reference_hz
    order = np.argsort(freqs)
    freqs = freqs[order]
    signal = vapor_spectrum(freqs, cfg.lines(), cfg.vapor)
    io.write_csv(out / "rb_spectrum.csv", ["f_hz", "signal"], freqs, signal)
    peaks = find_peaks(freqs, signal)
    click.echo(f"{len(peaks)} peaks at " + ", ".join(f"{p / 1e9:+.3f}" for p in peaks) + " GHz")
    return 0


def _atom_for(cfg, pulse, grid) -> AtomParams:
    atom = cfg.atom
    if atom.coupling_sqrtw == 0:
        atom = AtomParams(atom.gamma_hz, atom.detuning_hz, calibrate_pi_pulse(pulse, atom, grid),
                          atom.collection_efficiency)
    return atom


@main.command("rabi-sweep")
@common_options
@click.option("--powers", type=PowerRange(), default=None,
              help="Peak powers in W as start:stop:num or a list (default: areas 0 to 8 pi).")
@click.option("--shots", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--sigma", type=click.FloatRange(min=0), default=None,
              help="Relative power noise (default from config).")
def rabi_sweep_cmd(cfg, out, seed, powers, shots, sigma):
    """Count rate versus sqrt of peak power (sqrt_power_sqrtw,count_rate_hz,stderr_hz)."""
    pulse = cfg.chain.pulse.replace(residual_fraction=0.0)
    if pulse.peak_power == 0:
        pulse = pulse.replace(peak_power=1.0)
    grid = default_atom_grid(pulse, cfg.chain.grid.dt)
    atom = _atom_for(cfg, pulse, grid)
    if powers is None:
        powers = powers_for_areas(np.linspace(0.0, 8.0 * math.pi, 161), pulse, atom, grid)
    noise = cfg.noise.__class__(
        relative_sigma=cfg.noise.relative_sigma if sigma is None else sigma,
        distribution=cfg.noise.distribution,
        seed=seed,
    )
    res = rabi_sweep(powers, pulse, atom, noise, n_shots=shots, grid=grid)
    io.write_csv(out / "rabi_sweep.csv", ["sqrt_power_sqrtw", "count_rate_hz", "stderr_hz"],
                 res.sqrt_power, res.count_rate_hz, res.stderr_hz)
    click.echo(f"{len(powers)} points, {shots} shots, sigma {noise.relative_sigma:g}, seed {seed}")
    return 0


@main.command("fluorescence-trace")
@common_options
@click.option("--area", type=click.FloatRange(min=0), default=3.0, show_default=True,
              help="Pulse area in units of pi.")
def fluorescence_trace_cmd(cfg, out, seed, area):
    """Emission rate versus time after one pulse (t_s,emission_rate_hz)."""
    pulse = cfg.chain.pulse.replace(residual_fraction=0.0)
    grid = default_atom_grid(pulse, cfg.chain.grid.dt)
    trace = fluorescence_trace(area * math.pi, pulse, cfg.atom, grid)
    io.write_csv(out / "fluorescence_trace.csv", ["t_s", "emission_rate_hz"], trace.t_s, trace.value)
    click.echo(f"area {area:g} pi, peak emission rate {trace.value.max():.4g} 1/s")
    return 0


@main.command("check-requirements")
@common_options
@click.option("--fwhm-ns", type=float, default=None, help="Override the pulse FWHM.")
@click.option("--peak-power", type=float, default=None,
              help="Override the delivered 780 nm peak power in W.")
def check_requirements_cmd(cfg, out, seed, fwhm_ns, peak_power):
    """Check the design constraints; exit status 1 if any fails."""
    chain = cfg.chain
    if fwhm_ns is not None:
        chain = chain.replace(pulse=chain.pulse.replace(fwhm=fwhm_ns * 1e-9))
    reqs = check_requirements(chain, peak_power_780_w=peak_power)
    _write_json(out / "requirements.json", requirements_dict(reqs))
    for r in reqs:
        click.echo(r.line())
    return 0 if all(r.passed for r in reqs) else 1


if __name__ == "__main__":
    main()
