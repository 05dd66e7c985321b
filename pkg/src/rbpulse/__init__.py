"""Simulation of a pulsed 780 nm laser source for single-atom excitation.

Modules
-------
signal
    Sampled envelopes, pulse synthesis, spectra and detector response.
chain
    Laser, modulator, amplifier, frequency doubler and filters.
atom
    Optical Bloch equations, Rabi sweeps and fluorescence traces.
spectroscopy
    Doppler-broadened vapour-cell fluorescence.
"""

from .atom import AtomParams, BlochState, NoiseModel, evolve_bloch, fluorescence_trace, rabi_sweep
from .chain import ChainConfig, RunReport, run_chain
from .config import ExperimentConfig, load_config
from .signal import PulseSpec, SampledEnvelope, TimeGrid, power_spectrum, synthesize_pulse
from .spectroscopy import LineTable, VaporParams, vapor_spectrum

__all__ = [
    "AtomParams",
    "BlochState",
    "ChainConfig",
    "ExperimentConfig",
    "LineTable",
    "NoiseModel",
    "PulseSpec",
    "RunReport",
    "SampledEnvelope",
    "TimeGrid",
    "VaporParams",
    "evolve_bloch",
    "fluorescence_trace",
    "load_config",
    "power_spectrum",
    "rabi_sweep",
    "run_chain",
    "synthesize_pulse",
    "vapor_spectrum",
]
