"""Flat simulation config: YAML on disk, strict keys, dBm converted to watts once here."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import yaml


class ConfigError(ValueError):
    pass


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SimConfig:
    area_km2: float = 1.0
    lambda_sc: float = 0.6
    lambda_u: float = 50.0
    p_mbs_dbm: float = 43.0
    p_sbs_dbm: float = 25.0
    p_ue_dbm: float = 23.0
    alpha_e: float = 3.0
    M: int = 128
    sbs_antennas: int = 2
    N_data: int = 8
    gamma_db: float = 10.0
    noise_enabled: bool = True
    noise_psd_dbm_hz: float = -174.0
    bandwidth_hz: float = 10e6
    noise_figure_db: float = 9.0
    frames: int = 20
    drops: int = 50
    seed: int = 0
    M_list: tuple[int, ...] = (32, 64, 128)
    two_cell_draws: int = 1000
    two_cell_ratios_db: tuple[float, ...] = (-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)

    def __post_init__(self):
        _positive = ("area_km2", "bandwidth_hz", "frames", "drops", "M", "sbs_antennas", "N_data", "two_cell_draws")
        for name in _positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name}: must be positive, got {getattr(self, name)!r}")
        for name in ("lambda_sc", "lambda_u"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name}: must be non-negative")
        if not self.alpha_e > 2:
            raise ConfigError(f"alpha_e: pathloss exponent must exceed 2, got {self.alpha_e}")
        if self.gamma_db < 0:
            raise ConfigError("gamma_db: uplink boost must be >= 0 dB")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed: must fit in an unsigned 64-bit integer")
        if not self.M_list or any(m < 1 for m in self.M_list):
            raise ConfigError("M_list: needs positive antenna counts")

    # linear-unit views used by the simulator
    @property
    def p_mbs(self) -> float:
        return dbm_to_watt(self.p_mbs_dbm)

    @property
    def p_sbs(self) -> float:
        return dbm_to_watt(self.p_sbs_dbm)

    @property
    def p_ue(self) -> float:
        return dbm_to_watt(self.p_ue_dbm)

    @property
    def gamma(self) -> float:
        return db_to_linear(self.gamma_db)

    @property
    def noise_power(self) -> float:
        if not self.noise_enabled:
            return 0.0
        return dbm_to_watt(self.noise_psd_dbm_hz + 10 * math.log10(self.bandwidth_hz) + self.noise_figure_db)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_FIELDS = {f.name: f for f in fields(SimConfig)}


def _coerce(key: str, value):
    f = _FIELDS[key]
    default = f.default
    try:
        if isinstance(default, bool):
            if isinstance(value, str):
                low = value.strip().lower()
                if low in ("true", "1", "yes", "on"):
                    return True
                if low in ("false", "0", "no", "off"):
                    return False
                raise ValueError(value)
            if not isinstance(value, bool):
                raise ValueError(value)
            return value
        if isinstance(default, tuple):
            if isinstance(value, str):
                value = yaml.safe_load(value)
            if not isinstance(value, (list, tuple)):
                raise ValueError(value)
            item = type(default[0])
            return tuple(item(v) for v in value)
        if isinstance(default, int):
            if isinstance(value, str):
                value = yaml.safe_load(value)
            if isinstance(value, bool) or not float(value).is_integer():
                raise ValueError(value)
            return int(value)
        if isinstance(value, str):
            value = yaml.safe_load(value)
        if isinstance(value, bool):
            raise ValueError(value)
        return float(value)
    except (TypeError, ValueError, yaml.YAMLError) as exc:
        raise ConfigError(f"{key}: cannot read {value!r} as {type(default).__name__}") from exc


def from_mapping(data: dict, source: str = "<config>") -> SimConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping of keys to values")
    values = {}
    for key, value in data.items():
        if key not in _FIELDS:
            raise ConfigError(f"{source}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    try:
        return SimConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def parse_config(path: str | Path | None) -> SimConfig:
    """Load a YAML config; omitted keys take the defaults."""
    if path is None:
        return SimConfig()
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: malformed YAML ({exc})") from exc
    return from_mapping(data, str(path))


def apply_overrides(cfg: SimConfig, pairs: list[str]) -> SimConfig:
    """Apply ``key=value`` overrides from the command line."""
    changes = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"--set {pair!r}: expected KEY=VALUE")
        if key not in _FIELDS:
            raise ConfigError(f"--set: unknown key {key!r}")
        changes[key] = _coerce(key, value)
    try:
        return cfg.replace(**changes)
    except ConfigError as exc:
        raise ConfigError(f"--set: {exc}") from None


def serialize_config(cfg: SimConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
