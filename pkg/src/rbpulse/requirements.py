"""Design constraints a pulse source must meet to excite single rubidium atoms."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .chain import ChainConfig, run_chain
from .constants import DELTA_NU_12, DELTA_NU_23, T_SPONTANEOUS
from .signal import power_spectrum, synthesize_pulse

#: minimum ratio of pulse period to excited-state lifetime
PERIOD_LIFETIME_RATIO = 5.0
#: minimum 780 nm peak power at the fibre output
MIN_PEAK_POWER_W = 1.0


@dataclass(frozen=True)
class Requirement:
    name: str
    value: float
    limit: float
    relation: str
    passed: bool
    unit: str

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict}  {self.name}: {self.value:.4g} {self.unit} {self.relation} {self.limit:.4g} {self.unit}"


def _req(name, value, relation, limit, unit) -> Requirement:
    ok = value < limit if relation == "<" else value >= limit
    return Requirement(name, float(value), float(limit), relation, bool(ok), unit)


def check_requirements(cfg: ChainConfig, peak_power_780_w: float | None = None) -> list[Requirement]:
    """Evaluate the pulse-length, selectivity, period, tunability and power constraints.

    Parameters
    ----------
    cfg
        Chain configuration; its pulse spec defines the duration and period.
    peak_power_780_w
        Override for the delivered 780 nm peak power.  By default the chain
        is simulated and the final stage is used.

    Returns
    -------
    list of Requirement
        One entry per constraint, in a fixed order.
    """
    pulse = cfg.pulse
    env = synthesize_pulse(pulse.replace(residual_fraction=0.0), cfg.grid)
    spectral = power_spectrum(env).fwhm()
    if peak_power_780_w is None:
        out, _ = run_chain(cfg)
        peak_power_780_w = out.peak_power
    tuning_780 = 2.0 * cfg.laser.mode_hop_free_range_hz
    return [
        _req("pulse_duration", pulse.fwhm, "<", T_SPONTANEOUS, "s"),
        _req("spectral_fwhm", spectral, "<", DELTA_NU_23, "Hz"),
        _req("period_over_lifetime", pulse.period / T_SPONTANEOUS, ">=", PERIOD_LIFETIME_RATIO, "x"),
        _req("tuning_range_780", tuning_780, ">=", DELTA_NU_12, "Hz"),
        _req("peak_power_780", peak_power_780_w, ">=", MIN_PEAK_POWER_W, "W"),
    ]


def requirements_dict(reqs: list[Requirement]) -> dict:
    return {"all_passed": all(r.passed for r in reqs), "requirements": [asdict(r) for r in reqs]}
