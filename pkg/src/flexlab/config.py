"""Config documents: JSON in, validated SimConfig out.

A config document has sections `zones`, `plant`, `baseline`, `weather_path`,
`dt_s`, `initial_temp_c`. Validation is collect-everything: one pass reports
every violation with its field path instead of stopping at the first, so a
bad document is fixable in one round trip.

`weather_path` resolves relative to the config file's directory; a bare
filename additionally falls back to the bundled assets, so the default
document works from anywhere.
"""

from __future__ import annotations

import json
import math
from importlib.resources import files
from pathlib import Path
from typing import Any

from .control import ControlSettings
from .engine import SimConfig, scalar_violations
from .errors import ValidationError
from .plant import (
    HeatPumpKind,
    HeatPumpParams,
    PiParams,
    PlantParams,
    VavParams,
)
from .zones import ZoneParams, load_weather_csv

_MISSING = object()


def asset_path(name: str) -> Path:
    """Path to a bundled asset (weather, default config, scripts)."""
    return Path(str(files("flexlab").joinpath("assets").joinpath(name)))


def default_config_path() -> Path:
    return asset_path("default_config.json")


def _number(obj: dict, key: str, path: str, bad: list[str], *,
            default: Any = _MISSING, integral: bool = False) -> Any:
    if key not in obj:
        if default is _MISSING:
            bad.append(f"{path}.{key}: missing required field")
            return None
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        bad.append(f"{path}.{key}: must be a finite number, got {v!r}")
        return None
    if integral:
        if not float(v).is_integer():
            bad.append(f"{path}.{key}: must be an integer, got {v!r}")
            return None
        return int(v)
    return float(v)


def _string(obj: dict, key: str, path: str, bad: list[str], *,
            default: Any = _MISSING) -> Any:
    if key not in obj:
        if default is _MISSING:
            bad.append(f"{path}.{key}: missing required field")
            return None
        return default
    v = obj[key]
    if not isinstance(v, str) or not v:
        bad.append(f"{path}.{key}: must be a non-empty string, got {v!r}")
        return None
    return v


def _obj(doc: Any, path: str, bad: list[str]) -> dict | None:
    if not isinstance(doc, dict):
        bad.append(f"{path}: must be an object")
        return None
    return doc


def _array(doc: dict, key: str, path: str, bad: list[str]) -> list | None:
    if key not in doc:
        bad.append(f"{path}.{key}: missing required field")
        return None
    v = doc[key]
    if not isinstance(v, list) or not v:
        bad.append(f"{path}.{key}: must be a non-empty array")
        return None
    return v


def _zone(doc: Any, path: str, bad: list[str]) -> ZoneParams | None:
    obj = _obj(doc, path, bad)
    if obj is None:
        return None
    n = len(bad)
    zone = ZoneParams(
        id=_string(obj, "id", path, bad),
        capacitance_j_per_k=_number(obj, "capacitance_j_per_k", path, bad),
        ua_w_per_k=_number(obj, "ua_w_per_k", path, bad),
        internal_gain_w=_number(obj, "internal_gain_w", path, bad),
        internal_gain_unocc_w=_number(obj, "internal_gain_unocc_w", path, bad),
        solar_aperture_m2=_number(obj, "solar_aperture_m2", path, bad),
    )
    return zone if len(bad) == n else None


def _vav(doc: Any, path: str, bad: list[str]) -> VavParams | None:
    obj = _obj(doc, path, bad)
    if obj is None:
        return None
    n = len(bad)
    vav = VavParams(
        zone_id=_string(obj, "zone_id", path, bad),
        airflow_min_kg_s=_number(obj, "airflow_min_kg_s", path, bad),
        airflow_max_kg_s=_number(obj, "airflow_max_kg_s", path, bad),
        supply_cool_c=_number(obj, "supply_cool_c", path, bad),
        supply_heat_c=_number(obj, "supply_heat_c", path, bad),
        cp_j_per_kg_k=_number(obj, "cp_j_per_kg_k", path, bad, default=1006.0),
    )
    return vav if len(bad) == n else None


def _heat_pump(doc: Any, path: str, bad: list[str]) -> HeatPumpParams | None:
    obj = _obj(doc, path, bad)
    if obj is None:
        return None
    n = len(bad)
    kind_raw = _string(obj, "kind", path, bad)
    kind = None
    if kind_raw is not None:
        try:
            kind = HeatPumpKind(kind_raw)
        except ValueError:
            bad.append(f"{path}.kind: must be 'air' or 'ground', got {kind_raw!r}")
    hp = HeatPumpParams(
        id=_string(obj, "id", path, bad),
        kind=kind,
        capacity_w=_number(obj, "capacity_w", path, bad),
        cop_a=_number(obj, "cop_a", path, bad),
        cop_b=_number(obj, "cop_b", path, bad),
        cop_min=_number(obj, "cop_min", path, bad, default=1.5),
        ground_temp_c=_number(obj, "ground_temp_c", path, bad, default=18.0),
    )
    return hp if len(bad) == n else None


def _plant(doc: Any, path: str, bad: list[str]) -> PlantParams | None:
    obj = _obj(doc, path, bad)
    if obj is None:
        return None
    n = len(bad)
    pi_obj = _obj(obj.get("pi"), f"{path}.pi", bad)
    pi = None
    if pi_obj is not None:
        pi = PiParams(
            kp=_number(pi_obj, "kp", f"{path}.pi", bad),
            ki=_number(pi_obj, "ki", f"{path}.pi", bad),
            out_min=_number(pi_obj, "out_min", f"{path}.pi", bad, default=0.0),
            out_max=_number(pi_obj, "out_max", f"{path}.pi", bad, default=1.0),
        )
    vavs = []
    for i, item in enumerate(_array(obj, "vavs", path, bad) or []):
        v = _vav(item, f"{path}.vavs[{i}]", bad)
        if v is not None:
            vavs.append(v)
    heat_pumps = []
    for i, item in enumerate(_array(obj, "heat_pumps", path, bad) or []):
        hp = _heat_pump(item, f"{path}.heat_pumps[{i}]", bad)
        if hp is not None:
            heat_pumps.append(hp)
    aux = _number(obj, "aux_power_w", path, bad, default=2000.0)
    if len(bad) != n or pi is None:
        return None
    return PlantParams(pi=pi, vavs=tuple(vavs), heat_pumps=tuple(heat_pumps),
                       aux_power_w=aux)


def _baseline(doc: Any, path: str, bad: list[str]) -> ControlSettings | None:
    obj = _obj(doc, path, bad)
    if obj is None:
        return None
    n = len(bad)
    settings = ControlSettings(
        cooling_setpoint_c=_number(obj, "cooling_setpoint_c", path, bad),
        heating_setpoint_c=_number(obj, "heating_setpoint_c", path, bad),
        start_min=_number(obj, "start_min", path, bad, integral=True),
        end_min=_number(obj, "end_min", path, bad, integral=True),
    )
    return settings if len(bad) == n else None


def resolve_weather_path(weather_path: str, base_dir: Path) -> Path:
    p = Path(weather_path)
    if p.is_absolute():
        return p
    local = base_dir / p
    if local.is_file():
        return local
    if len(p.parts) == 1:
        bundled = asset_path(weather_path)
        if bundled.is_file():
            return bundled
    return local


def config_from_dict(doc: Any, base_dir: Path | str = ".") -> SimConfig:
    """Build and fully validate a SimConfig from a parsed JSON document."""
    bad: list[str] = []
    top = _obj(doc, "config", bad)
    if top is None:
        raise ValidationError(bad)
    zones = []
    zone_items: list[tuple[int, ZoneParams]] = []
    for i, item in enumerate(_array(top, "zones", "config", bad) or []):
        z = _zone(item, f"zones[{i}]", bad)
        if z is not None:
            zones.append(z)
            zone_items.append((i, z))
    plant = baseline = None
    if "plant" in top:
        plant = _plant(top["plant"], "plant", bad)
    else:
        bad.append("config.plant: missing required field")
    if "baseline" in top:
        baseline = _baseline(top["baseline"], "baseline", bad)
    else:
        bad.append("config.baseline: missing required field")
    weather_path = _string(top, "weather_path", "config", bad)
    dt_s = _number(top, "dt_s", "config", bad, default=60.0)
    initial = _number(top, "initial_temp_c", "config", bad, default=24.5)
    day_length = _number(top, "day_length_min", "config", bad,
                         default=1440, integral=True)

    weather = None
    if weather_path is not None:
        resolved = resolve_weather_path(weather_path, Path(base_dir))
        try:
            weather = load_weather_csv(resolved)
        except ValidationError as exc:
            bad.extend(f"weather_path: {v}" for v in exc.violations)
    if bad:
        # Structural failures shouldn't hide range violations in the parts
        # that did build: report everything fixable in one round trip.
        for i, z in zone_items:
            bad += z.validate(f"zones[{i}]")
        if plant is not None:
            bad += plant.validate("plant")
        if baseline is not None:
            bad += baseline.validate("baseline")
        if dt_s is not None and day_length is not None and initial is not None:
            bad += scalar_violations(dt_s, day_length, initial)
        raise ValidationError(bad)

    config = SimConfig(
        zones=tuple(zones),
        plant=plant,
        baseline=baseline,
        weather=weather,
        initial_temp_c=initial,
        dt_s=dt_s,
        day_length_min=day_length,
    )
    structural = config.validate()
    if structural:
        raise ValidationError(structural)
    return config


def load_config(path: str | Path) -> SimConfig:
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"config: file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"config: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    return config_from_dict(doc, path.parent)


def default_config_document() -> dict[str, Any]:
    return json.loads(default_config_path().read_text(encoding="utf-8"))


def default_config() -> SimConfig:
    return load_config(default_config_path())
