"""Single-node (1R1C) thermal zone model and weather series.

Each zone is a lumped air node with capacitance C coupled to outdoor air
through an envelope conductance UA, plus internal and solar gains and the
HVAC thermal injection:

    C * dT/dt = UA*(T_out - T) + Q_int(occupied) + A_solar*G + Q_hvac

advanced with explicit Euler at a fixed step. With the default parameters
(C ~ 2e7 J/K, UA ~ 800 W/K) the zone time constant is about 7 h, far above
the 60 s default step, so Euler is stable; tests compare against a fine-step
reference integration to bound the discretisation error.

Temperatures are guarded to [-20, 60] degC: a step that leaves the band
raises ModelDivergenceError instead of silently blowing up.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidInputError, ModelDivergenceError, ValidationError

TEMP_GUARD_MIN_C = -20.0
TEMP_GUARD_MAX_C = 60.0


@dataclass(frozen=True)
class ZoneParams:
    id: str
    capacitance_j_per_k: float
    ua_w_per_k: float
    internal_gain_w: float         # occupied hours
    internal_gain_unocc_w: float   # everything else
    solar_aperture_m2: float       # gain = aperture * irradiance

    def validate(self, path: str = "zone") -> list[str]:
        bad = []
        if not (self.capacitance_j_per_k > 0):
            bad.append(f"{path}.capacitance_j_per_k: must be > 0")
        if not (self.ua_w_per_k > 0):
            bad.append(f"{path}.ua_w_per_k: must be > 0")
        if not (self.internal_gain_unocc_w >= 0):
            bad.append(f"{path}.internal_gain_unocc_w: must be >= 0")
        if not (self.internal_gain_w >= self.internal_gain_unocc_w):
            bad.append(f"{path}.internal_gain_w: must be >= internal_gain_unocc_w")
        if not (self.solar_aperture_m2 >= 0):
            bad.append(f"{path}.solar_aperture_m2: must be >= 0")
        return bad


@dataclass(frozen=True)
class ZoneState:
    temp_c: float


@dataclass(frozen=True)
class WeatherSample:
    t_min: float      # minutes after midnight
    t_out_c: float
    solar_w_m2: float


class WeatherSeries:
    """Weather samples strictly increasing in t_min, linearly interpolated.

    Queries before the first or after the last sample clamp to the nearest
    sample.
    """

    def __init__(self, samples: list[WeatherSample]):
        if not samples:
            raise ValidationError("weather: series must contain at least one sample")
        for prev, cur in zip(samples, samples[1:]):
            if not (cur.t_min > prev.t_min):
                raise ValidationError(
                    f"weather: samples must be strictly increasing in t_min "
                    f"({cur.t_min} after {prev.t_min})")
        self.samples = list(samples)
        self._times = [s.t_min for s in samples]

    def at(self, t_min: float) -> WeatherSample:
        samples = self.samples
        if t_min <= samples[0].t_min:
            first = samples[0]
            return WeatherSample(t_min, first.t_out_c, first.solar_w_m2)
        if t_min >= samples[-1].t_min:
            last = samples[-1]
            return WeatherSample(t_min, last.t_out_c, last.solar_w_m2)
        hi = bisect_right(self._times, t_min)
        lo = hi - 1
        a, b = samples[lo], samples[hi]
        w = (t_min - a.t_min) / (b.t_min - a.t_min)
        return WeatherSample(
            t_min,
            a.t_out_c + w * (b.t_out_c - a.t_out_c),
            a.solar_w_m2 + w * (b.solar_w_m2 - a.solar_w_m2),
        )


WEATHER_CSV_HEADER = ["minute", "t_out_c", "solar_w_m2"]


def load_weather_csv(path: str | Path) -> WeatherSeries:
    """Parse the weather CSV (`minute,t_out_c,solar_w_m2`).

    Rejects a wrong header, non-finite values, negative irradiance, minutes
    outside [0, 1440), and duplicate or decreasing minutes.
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"weather_path: file not found: {path}")
    violations: list[str] = []
    samples: list[WeatherSample] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"weather_path: {path}: empty file") from None
        if [h.strip() for h in header] != WEATHER_CSV_HEADER:
            raise ValidationError(
                f"weather_path: {path}: bad header {header!r}, "
                f"expected {','.join(WEATHER_CSV_HEADER)}")
        last_t = None
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                violations.append(f"weather row {lineno}: expected 3 fields, got {len(row)}")
                continue
            try:
                t, tout, solar = (float(v) for v in row)
            except ValueError:
                violations.append(f"weather row {lineno}: non-numeric value in {row!r}")
                continue
            if not all(math.isfinite(v) for v in (t, tout, solar)):
                violations.append(f"weather row {lineno}: non-finite value")
                continue
            if not (0 <= t < 1440):
                violations.append(f"weather row {lineno}: minute {t} outside [0, 1440)")
                continue
            if solar < 0:
                violations.append(f"weather row {lineno}: solar_w_m2 must be >= 0")
                continue
            if last_t is not None and t <= last_t:
                violations.append(
                    f"weather row {lineno}: minute {t} not strictly greater than {last_t}")
                continue
            last_t = t
            samples.append(WeatherSample(t, tout, solar))
    if violations:
        raise ValidationError(violations)
    if not samples:
        raise ValidationError(f"weather_path: {path}: no data rows")
    return WeatherSeries(samples)


def zone_heat_balance(params: ZoneParams, state: ZoneState, weather: WeatherSample,
                      q_hvac_w: float, occupied: bool) -> float:
    """Net heat rate into the zone air in W. Pure function."""
    inputs = (state.temp_c, weather.t_out_c, weather.solar_w_m2, q_hvac_w)
    if not all(math.isfinite(v) for v in inputs):
        raise InvalidInputError(
            f"zone {params.id}: non-finite input to heat balance: {inputs}")
    gains = params.internal_gain_w if occupied else params.internal_gain_unocc_w
    return (params.ua_w_per_k * (weather.t_out_c - state.temp_c)
            + gains
            + params.solar_aperture_m2 * weather.solar_w_m2
            + q_hvac_w)


def step_zone(params: ZoneParams, state: ZoneState, weather: WeatherSample,
              q_hvac_w: float, occupied: bool, dt_s: float) -> ZoneState:
    """Advance the zone one explicit-Euler step of dt_s seconds."""
    if dt_s <= 0:
        raise InvalidInputError(f"dt_s must be > 0, got {dt_s}")
    q_net = zone_heat_balance(params, state, weather, q_hvac_w, occupied)
    temp = state.temp_c + dt_s * q_net / params.capacitance_j_per_k
    if not (TEMP_GUARD_MIN_C <= temp <= TEMP_GUARD_MAX_C):
        raise ModelDivergenceError(params.id, temp)
    return ZoneState(temp)
