"""INI configuration files for experiment runs.

Every section maps onto one parameter dataclass and every key onto one of
its fields, in SI units.  Missing sections and keys keep their defaults;
unknown ones are rejected.  Example::

    [pulse]
    fwhm = 4e-9
    residual_fraction = 0.003

    [laser]
    temp_c = 36.5
    current_ma = 165.93
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .atom import AtomParams, NoiseModel
from .chain import (
    AmplifierParams,
    ChainConfig,
    FilterParams,
    LaserParams,
    ModulatorParams,
    ShgParams,
)
from .errors import RbPulseError
from .signal import PulseSpec, TimeGrid
from .spectroscopy import LineTable, VaporParams


class ConfigError(RbPulseError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    chain: ChainConfig = field(default_factory=ChainConfig)
    atom: AtomParams = field(default_factory=AtomParams)
    noise: NoiseModel = field(default_factory=NoiseModel)
    vapor: VaporParams = field(default_factory=VaporParams)
    line_table: str | None = None

    def lines(self) -> LineTable:
        return LineTable.read(self.line_table) if self.line_table else LineTable.default()


# section -> (parameter class, {ini key: ChainConfig field}) for operating-point keys
_CHAIN_SECTIONS = {
    "laser": (LaserParams, {"temp_c": "laser_temp_c", "current_ma": "laser_current_ma"}),
    "modulator": (ModulatorParams, {}),
    "amplifier": (AmplifierParams, {}),
    "shg": (ShgParams, {"temp_c": "shg_temp_c"}),
    "filters": (FilterParams, {}),
    "pulse": (PulseSpec, {}),
    "grid": (TimeGrid, {}),
}
_CHAIN_SCALARS = ("delivery_efficiency", "fiber_coupled", "bypass_amplifier", "f_d2_hz", "f_c_hz")


def _convert(raw: str, like, where: str):
    try:
        if isinstance(like, bool):
            return configparser.ConfigParser.BOOLEAN_STATES[raw.strip().lower()]
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
        return raw.strip()
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r}") from exc


def _apply(obj, items: dict, where: str):
    names = {f.name for f in dataclasses.fields(obj)}
    changes = {}
    for key, raw in items.items():
        if key not in names:
            raise ConfigError(f"{where}: unknown key {key!r}")
        changes[key] = _convert(raw, getattr(obj, key), f"{where}.{key}")
    try:
        return dataclasses.replace(obj, **changes)
    except RbPulseError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    chain = ChainConfig()
    chain_changes = {}
    cfg = ExperimentConfig()
    cfg_changes = {}
    for section in parser.sections():
        items = dict(parser.items(section))
        where = f"{source}[{section}]"
        if section in _CHAIN_SECTIONS:
            cls, extra = _CHAIN_SECTIONS[section]
            for ini_key, chain_field in extra.items():
                if ini_key in items:
                    chain_changes[chain_field] = _convert(
                        items.pop(ini_key), getattr(chain, chain_field), f"{where}.{ini_key}"
                    )
            chain_changes[section] = _apply(getattr(chain, section), items, where)
        elif section == "chain":
            for key, raw in items.items():
                if key not in _CHAIN_SCALARS:
                    raise ConfigError(f"{where}: unknown key {key!r}")
                chain_changes[key] = _convert(raw, getattr(chain, key), f"{where}.{key}")
        elif section in ("atom", "noise", "vapor"):
            items_copy = dict(items)
            if section == "vapor" and "line_table" in items_copy:
                path = Path(items_copy.pop("line_table"))
                if not path.is_absolute() and source != "<config>":
                    path = Path(source).parent / path
                cfg_changes["line_table"] = str(path)
            cfg_changes[section] = _apply(getattr(cfg, section), items_copy, where)
        else:
            raise ConfigError(f"{source}: unknown section [{section}]")
    try:
        chain = dataclasses.replace(chain, **chain_changes)
    except RbPulseError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return dataclasses.replace(cfg, chain=chain, **cfg_changes)


def load_config(path=None) -> ExperimentConfig:
    """Read an INI file; ``None`` gives the built-in defaults."""
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))
