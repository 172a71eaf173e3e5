"""Twin-timeline simulation engine.

Advances a baseline timeline (business-as-usual settings, deaf to overrides)
and a controlled timeline (same building, override ledger applied) in
lockstep through a fixed time-stepped loop. Each tick:

  1. pending override commands are applied to the controlled ledger in
     arrival order (invalid ones are rejected and logged, never stored);
  2. effective settings are computed per timeline;
  3. the system mode is selected;
  4. the plant runs (PI -> VAV -> heat-pump dispatch);
  5. every zone integrates one step;
  6. electrical energy accumulates into a DR or non-DR bucket according to
     this tick's dr_active flag;
  7. an immutable TelemetryFrame is emitted.

Everything downstream — live telemetry, CSV export, the energy comparison
panel — is a pure function of the frame sequence, which is what makes runs
deterministic and replayable from the command log.

Pacing (wall-clock throttling, pause/resume, speed changes) lives in Pacer
and never touches computed values; a headless run simply skips it.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from dataclasses import dataclass, replace
from typing import Any, Sequence

from .control import (
    ControlSettings,
    OverrideCommand,
    OverrideLedger,
    apply_override,
    canonical_number,
    dr_active,
    effective_settings,
    schedule_on,
    system_mode,
    zone_error,
)
from .errors import InvalidInputError, ModelDivergenceError, ValidationError
from .plant import Mode, PiState, PlantParams, PlantState, plant_step
from .zones import TEMP_GUARD_MAX_C, TEMP_GUARD_MIN_C, WeatherSeries, ZoneParams, ZoneState, step_zone

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimConfig:
    zones: tuple[ZoneParams, ...]
    plant: PlantParams
    baseline: ControlSettings
    weather: WeatherSeries
    initial_temp_c: float = 24.5
    dt_s: float = 60.0
    day_length_min: int = 1440

    def validate(self) -> list[str]:
        bad = []
        if not self.zones:
            bad.append("zones: at least one zone required")
        ids = [z.id for z in self.zones]
        if len(set(ids)) != len(ids):
            bad.append("zones: ids must be unique")
        for i, z in enumerate(self.zones):
            bad += z.validate(f"zones[{i}]")
        bad += self.plant.validate("plant")
        if len(self.plant.vavs) != len(self.zones):
            bad.append(
                f"plant.vavs: expected one per zone ({len(self.zones)}), got {len(self.plant.vavs)}")
        else:
            for i, (vav, zone) in enumerate(zip(self.plant.vavs, self.zones)):
                if vav.zone_id != zone.id:
                    bad.append(
                        f"plant.vavs[{i}].zone_id: {vav.zone_id!r} does not match zones[{i}].id {zone.id!r}")
        bad += self.baseline.validate("baseline")
        bad += scalar_violations(self.dt_s, self.day_length_min, self.initial_temp_c)
        return bad


def scalar_violations(dt_s: float, day_length_min: int,
                      initial_temp_c: float) -> list[str]:
    """Range checks for the top-level run scalars."""
    bad = []
    if not (dt_s > 0):
        bad.append(f"dt_s: must be > 0, got {dt_s}")
    elif not float((day_length_min * 60) / dt_s).is_integer():
        bad.append(
            f"dt_s: {dt_s} must divide the day length ({day_length_min} min) evenly")
    if not (isinstance(day_length_min, int) and day_length_min > 0):
        bad.append(f"day_length_min: must be a positive integer, got {day_length_min}")
    if not (math.isfinite(initial_temp_c)
            and TEMP_GUARD_MIN_C < initial_temp_c < TEMP_GUARD_MAX_C):
        bad.append(
            f"initial_temp_c: must lie inside ({TEMP_GUARD_MIN_C}, {TEMP_GUARD_MAX_C}), got {initial_temp_c}")
    return bad


@dataclass(frozen=True)
class TimelineState:
    tick: int
    zones: tuple[ZoneState, ...]
    plant: PlantState
    energy_dr_kwh: float = 0.0
    energy_non_dr_kwh: float = 0.0
    ledger: OverrideLedger | None = None   # controlled timeline only

    @property
    def energy_total_kwh(self) -> float:
        return self.energy_dr_kwh + self.energy_non_dr_kwh


@dataclass(frozen=True)
class TelemetryFrame:
    """Snapshot of both timelines after one tick; immutable once emitted.

    Temperatures are post-step; setpoints, mode, power, and the dr_active
    flag are the ones that governed the step; energies are cumulative
    through this tick.
    """

    tick: int
    t_min: float
    zone_ids: tuple[str, ...]
    temps_base_c: tuple[float, ...]
    temps_ctrl_c: tuple[float, ...]
    cool_sp_base_c: float
    cool_sp_ctrl_c: float
    heat_sp_base_c: float
    heat_sp_ctrl_c: float
    mode_base: str
    mode_ctrl: str
    power_base_kw: float
    power_ctrl_kw: float
    energy_base_kwh: float
    energy_ctrl_kwh: float
    energy_base_dr_kwh: float
    energy_base_non_dr_kwh: float
    energy_ctrl_dr_kwh: float
    energy_ctrl_non_dr_kwh: float
    unmet_base_w: float
    unmet_ctrl_w: float
    dr_active: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "tick": self.tick,
            "t_min": canonical_number(self.t_min),
            "zones": [
                {"id": zid, "temp_base_c": tb, "temp_ctrl_c": tc}
                for zid, tb, tc in zip(self.zone_ids, self.temps_base_c, self.temps_ctrl_c)
            ],
            "cool_sp_base_c": self.cool_sp_base_c,
            "cool_sp_ctrl_c": self.cool_sp_ctrl_c,
            "heat_sp_base_c": self.heat_sp_base_c,
            "heat_sp_ctrl_c": self.heat_sp_ctrl_c,
            "mode_base": self.mode_base,
            "mode_ctrl": self.mode_ctrl,
            "power_base_kw": self.power_base_kw,
            "power_ctrl_kw": self.power_ctrl_kw,
            "energy_base_kwh": self.energy_base_kwh,
            "energy_ctrl_kwh": self.energy_ctrl_kwh,
            "energy_base_dr_kwh": self.energy_base_dr_kwh,
            "energy_base_non_dr_kwh": self.energy_base_non_dr_kwh,
            "energy_ctrl_dr_kwh": self.energy_ctrl_dr_kwh,
            "energy_ctrl_non_dr_kwh": self.energy_ctrl_non_dr_kwh,
            "unmet_base_w": self.unmet_base_w,
            "unmet_ctrl_w": self.unmet_ctrl_w,
            "dr_active": self.dr_active,
        }


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

class Engine:
    """One simulated day, tick by tick.

    The caller owns command delivery: whatever list is handed to tick() is
    applied at the start of that tick, so a live service and a scripted
    replay produce identical runs from identical per-tick command lists.
    """

    def __init__(self, config: SimConfig):
        bad = config.validate()
        if bad:
            raise ValidationError(bad)
        self.config = config
        self.dt_min = config.dt_s / 60.0
        self.n_ticks = int(round(config.day_length_min * 60 / config.dt_s))
        zones = tuple(ZoneState(config.initial_temp_c) for _ in config.zones)
        plant = PlantState.initial(len(config.zones))
        self.baseline = TimelineState(0, zones, plant)
        self.controlled = TimelineState(
            0, zones, plant, ledger=OverrideLedger.empty(config.baseline))
        self.frames: list[TelemetryFrame] = []
        self.rejections: list[tuple[int, OverrideCommand, str]] = []
        self._prev_ctrl_setpoints = (config.baseline.cooling_setpoint_c,
                                     config.baseline.heating_setpoint_c)

    @property
    def next_tick(self) -> int:
        return self.baseline.tick

    @property
    def finished(self) -> bool:
        return self.baseline.tick >= self.n_ticks

    def tick(self, pending: Sequence[OverrideCommand] = ()) -> TelemetryFrame:
        if self.finished:
            raise InvalidInputError("run already finished")
        config = self.config
        k = self.baseline.tick
        t_min = k * self.dt_min

        ledger = self.controlled.ledger
        for cmd in pending:
            try:
                ledger = apply_override(ledger, cmd, t_min)
            except ValidationError as exc:
                self.rejections.append((k, cmd, str(exc)))
                log.warning("tick %d: rejected %s: %s", k, cmd.to_dict(), exc)

        base_set = config.baseline
        ctrl_set = effective_settings(config.baseline, ledger)
        # A changed setpoint is a new control target: reinitialize the
        # controlled loop integrals (demand is one-sided; a stale integral
        # would pin airflow at the old regime's level with no error to
        # unwind it). The baseline's settings never change.
        setpoints = (ctrl_set.cooling_setpoint_c, ctrl_set.heating_setpoint_c)
        if setpoints != self._prev_ctrl_setpoints:
            self._prev_ctrl_setpoints = setpoints
            fresh = tuple(PiState() for _ in config.zones)
            self.controlled = replace(
                self.controlled, plant=replace(self.controlled.plant, pi_states=fresh))
        base_on = schedule_on(base_set, t_min)
        ctrl_on = schedule_on(ctrl_set, t_min)
        flag = dr_active(base_set, ctrl_set, base_on, ctrl_on)
        weather = config.weather.at(t_min)
        occupied = base_on   # occupancy follows the business-as-usual schedule

        def advance(tl: TimelineState, settings: ControlSettings) -> TimelineState:
            temps = [z.temp_c for z in tl.zones]
            mode = system_mode(settings, t_min, temps, tl.plant.mode)
            if mode is Mode.OFF:
                errors = [0.0] * len(temps)
            else:
                errors = [zone_error(settings, mode, t) for t in temps]
            plant, q_zones, elec_w = plant_step(
                config.plant, tl.plant, errors, temps, mode,
                weather.t_out_c, config.dt_s)
            try:
                zones = tuple(
                    step_zone(zp, zs, weather, q, occupied, config.dt_s)
                    for zp, zs, q in zip(config.zones, tl.zones, q_zones))
            except ModelDivergenceError as exc:
                raise exc.with_context(k, t_min) from None
            power_kw = elec_w / 1000.0
            inc_kwh = power_kw * config.dt_s / 3600.0
            return replace(
                tl, tick=k + 1, zones=zones, plant=plant,
                energy_dr_kwh=tl.energy_dr_kwh + (inc_kwh if flag else 0.0),
                energy_non_dr_kwh=tl.energy_non_dr_kwh + (0.0 if flag else inc_kwh),
            )

        base = advance(self.baseline, base_set)
        ctrl = replace(advance(self.controlled, ctrl_set), ledger=ledger)

        frame = TelemetryFrame(
            tick=k,
            t_min=t_min,
            zone_ids=tuple(z.id for z in config.zones),
            temps_base_c=tuple(z.temp_c for z in base.zones),
            temps_ctrl_c=tuple(z.temp_c for z in ctrl.zones),
            cool_sp_base_c=base_set.cooling_setpoint_c,
            cool_sp_ctrl_c=ctrl_set.cooling_setpoint_c,
            heat_sp_base_c=base_set.heating_setpoint_c,
            heat_sp_ctrl_c=ctrl_set.heating_setpoint_c,
            mode_base=base.plant.mode.value,
            mode_ctrl=ctrl.plant.mode.value,
            power_base_kw=base.plant.electrical_w / 1000.0,
            power_ctrl_kw=ctrl.plant.electrical_w / 1000.0,
            energy_base_kwh=base.energy_total_kwh,
            energy_ctrl_kwh=ctrl.energy_total_kwh,
            energy_base_dr_kwh=base.energy_dr_kwh,
            energy_base_non_dr_kwh=base.energy_non_dr_kwh,
            energy_ctrl_dr_kwh=ctrl.energy_dr_kwh,
            energy_ctrl_non_dr_kwh=ctrl.energy_non_dr_kwh,
            unmet_base_w=base.plant.unmet_w,
            unmet_ctrl_w=ctrl.plant.unmet_w,
            dr_active=flag,
        )
        self.baseline = base
        self.controlled = ctrl
        self.frames.append(frame)
        return frame

    def command_history(self) -> tuple[tuple[float, OverrideCommand], ...]:
        return self.controlled.ledger.history


def run_day_engine(config: SimConfig,
                   script: "ScenarioScript | None" = None) -> Engine:
    """Run a full day headless and return the finished engine.

    Script events apply at the first tick at or after their timestamp.
    """
    engine = Engine(config)
    by_tick: dict[int, list[OverrideCommand]] = {}
    if script is not None:
        bad = []
        for i, event in enumerate(script.events):
            if not (0 <= event.t_min < config.day_length_min):
                bad.append(
                    f"events[{i}].t_min: must lie in [0, {config.day_length_min}), got {event.t_min}")
        if bad:
            raise ValidationError(bad)
        for event in script.events:
            k = math.ceil(event.t_min / engine.dt_min)
            by_tick.setdefault(k, []).append(event.command)
    while not engine.finished:
        engine.tick(by_tick.get(engine.next_tick, ()))
    return engine


def run_day(config: SimConfig, script: "ScenarioScript | None" = None
            ) -> tuple[list[TelemetryFrame], "RunSummary"]:
    """Headless full-day run, optionally driven by a scenario script."""
    engine = run_day_engine(config, script)
    return engine.frames, summarize(engine.frames)


# ---------------------------------------------------------------------------
# Summary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodEnergy:
    total_kwh: float
    dr_kwh: float
    non_dr_kwh: float

    def to_dict(self) -> dict[str, float]:
        return {"total_kwh": self.total_kwh, "dr_kwh": self.dr_kwh,
                "non_dr_kwh": self.non_dr_kwh}


@dataclass(frozen=True)
class PeriodSaving:
    """Percent saving (baseline minus controlled, relative to baseline).

    None marks an undefined ratio (zero baseline energy in that period).
    """

    total_pct: float | None
    dr_pct: float | None
    non_dr_pct: float | None

    def to_dict(self) -> dict[str, float | None]:
        return {"total_pct": self.total_pct, "dr_pct": self.dr_pct,
                "non_dr_pct": self.non_dr_pct}


@dataclass(frozen=True)
class RunSummary:
    baseline: PeriodEnergy
    controlled: PeriodEnergy
    saving: PeriodSaving
    dr_intervals: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "baseline": self.baseline.to_dict(),
            "controlled": self.controlled.to_dict(),
            "saving": self.saving.to_dict(),
            "dr_intervals": [[canonical_number(a), canonical_number(b)] for a, b in self.dr_intervals],
        }


def _saving_pct(base_kwh: float, ctrl_kwh: float) -> float | None:
    if base_kwh == 0:
        # Two empty periods are identical (0.0%); a nonzero controlled
        # energy against a zero baseline has no meaningful percent.
        return 0.0 if ctrl_kwh == 0 else None
    return (base_kwh - ctrl_kwh) / base_kwh * 100.0


def summarize(frames: Sequence[TelemetryFrame]) -> RunSummary:
    """Energy comparison derived purely from the frames' cumulative counters."""
    if not frames:
        raise InvalidInputError("summarize requires at least one frame")
    dt_min = frames[1].t_min - frames[0].t_min if len(frames) > 1 else 1.0
    intervals: list[tuple[float, float]] = []
    start: float | None = None
    for f in frames:
        if f.dr_active and start is None:
            start = f.t_min
        elif not f.dr_active and start is not None:
            intervals.append((start, f.t_min))
            start = None
    if start is not None:
        intervals.append((start, frames[-1].t_min + dt_min))
    last = frames[-1]
    baseline = PeriodEnergy(last.energy_base_kwh, last.energy_base_dr_kwh,
                            last.energy_base_non_dr_kwh)
    controlled = PeriodEnergy(last.energy_ctrl_kwh, last.energy_ctrl_dr_kwh,
                              last.energy_ctrl_non_dr_kwh)
    saving = PeriodSaving(
        _saving_pct(baseline.total_kwh, controlled.total_kwh),
        _saving_pct(baseline.dr_kwh, controlled.dr_kwh),
        _saving_pct(baseline.non_dr_kwh, controlled.non_dr_kwh),
    )
    return RunSummary(baseline, controlled, saving, tuple(intervals))


# ---------------------------------------------------------------------------
# Pacing
# ---------------------------------------------------------------------------

class Pacer:
    """Wall-clock gate between ticks; never touches simulation values.

    speed is simulated minutes per wall second, so the nominal gap between
    ticks is dt_min/speed seconds. Pausing blocks wait(); resuming restarts
    the cadence from now (no burst of catch-up ticks). stop() releases any
    waiter and makes wait() return False forever.
    """

    def __init__(self, dt_min: float, speed: float = 10.0):
        if not (speed > 0):
            raise ValidationError("speed must be positive")
        self._dt_min = dt_min
        self._speed = speed
        self._cond = threading.Condition()
        self._paused = False
        self._stopped = False
        self._due: float | None = None

    @property
    def speed(self) -> float:
        with self._cond:
            return self._speed

    @property
    def paused(self) -> bool:
        with self._cond:
            return self._paused

    def _interval(self) -> float:
        return self._dt_min / self._speed

    def pause(self) -> None:
        with self._cond:
            self._paused = True
            self._cond.notify_all()

    def resume(self) -> None:
        with self._cond:
            self._paused = False
            self._due = None
            self._cond.notify_all()

    def set_speed(self, speed: float) -> None:
        if not (speed > 0):
            raise ValidationError("speed must be positive")
        with self._cond:
            self._speed = speed
            if self._due is not None:
                self._due = min(self._due, time.monotonic() + self._interval())
            self._cond.notify_all()

    def stop(self) -> None:
        with self._cond:
            self._stopped = True
            self._cond.notify_all()

    def wait(self) -> bool:
        """Block until the next tick is due; False once stopped."""
        with self._cond:
            while True:
                if self._stopped:
                    return False
                if self._paused:
                    self._cond.wait()
                    continue
                now = time.monotonic()
                if self._due is None:
                    self._due = now
                if now >= self._due:
                    self._due += self._interval()
                    if self._due < now:   # fell behind; skip, don't burst
                        self._due = now + self._interval()
                    return True
                self._cond.wait(self._due - now)
