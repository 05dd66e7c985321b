"""Physical constants and reference values for the 87Rb D2 pulsed source."""

import math


#: DWDM grid channel C21 (Hz).
F_DWDM_C21 = 192.10e12
#: 87Rb D2 line (Hz).
F_D2 = 384.2305e12

#: Excited-state lifetime of 87Rb 5P3/2 (s).
T_SPONTANEOUS = 26.2e-9
#: Excited-state decay rate (1/s).
GAMMA_D2 = 1.0 / T_SPONTANEOUS

#: Ground-state hyperfine splitting F=1 <-> F=2 of 87Rb (Hz).
DELTA_NU_12 = 6.83e9
#: Excited-state splitting F'=2 <-> F'=3 of 87Rb (Hz).
DELTA_NU_23 = 267e6

#: Pulse repetition period (s) and rate (Hz).
PULSE_PERIOD = 200e-9
REPETITION_RATE = 1.0 / PULSE_PERIOD

#: FWHM of the photodiode + electronics impulse response (s).
DETECTOR_FWHM = 0.9e-9

#: Pulse durations (FWHM, s) used for the pulse-shape and bandwidth datasets.
NOMINAL_DURATIONS = (1.3e-9, 1.6e-9, 2.6e-9, 3.6e-9, 5.0e-9, 6.1e-9)

#: FWHM of a gaussian in units of its standard deviation.
GAUSS_FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
#: Time-bandwidth products (FWHM x FWHM, intensity) of transform-limited pulses.
TBP_GAUSSIAN = 2.0 * math.log(2.0) / math.pi
TBP_SQUARE = 0.885892941378904
