"""Supervisory control: schedule gating, mode selection, override algebra.

One settings object (setpoint pair + operating schedule) governs all zones.
Users steer the controlled timeline through override commands; the ledger
keeps at most one active override per slot (latest wins) plus an append-only
history of accepted commands, so any live run can be replayed from its log.

Cooling overrides come in two flavours that share a slot: a *mode* is a
relative offset from the seven-step set {-2, -1, -0.5, 0, 0.5, 1, 2} K, an
*absolute* pins the setpoint outright. Heating and schedule bounds are
absolute-only. A command is validated against the settings it would produce
at apply time; a rejected command leaves the ledger untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from statistics import fmean
from typing import Any

from .errors import InvalidInputError, ValidationError
from .plant import Mode

MODE_VALUES = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)
DEADBAND_MIN_K = 0.5
HYSTERESIS_K = 0.2


@dataclass(frozen=True)
class ControlSettings:
    cooling_setpoint_c: float
    heating_setpoint_c: float
    start_min: int
    end_min: int

    def validate(self, path: str = "baseline") -> list[str]:
        bad = []
        for name in ("cooling_setpoint_c", "heating_setpoint_c"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and not isinstance(v, bool)
                    and math.isfinite(v)):
                bad.append(f"{path}.{name}: must be a finite number")
        if not bad and not (self.heating_setpoint_c + DEADBAND_MIN_K
                            <= self.cooling_setpoint_c):
            bad.append(
                f"{path}: deadband violation — heating_setpoint_c + {DEADBAND_MIN_K}"
                f" must not exceed cooling_setpoint_c"
                f" (got heating {self.heating_setpoint_c}, cooling {self.cooling_setpoint_c})")
        for name in ("start_min", "end_min"):
            v = getattr(self, name)
            if not (isinstance(v, int) and not isinstance(v, bool)):
                bad.append(f"{path}.{name}: must be an integer minute")
        if not bad and not (0 <= self.start_min < self.end_min <= 1440):
            bad.append(
                f"{path}: schedule requires 0 <= start_min < end_min <= 1440"
                f" (got [{self.start_min}, {self.end_min}))")
        return bad


def schedule_on(settings: ControlSettings, t_min: float) -> bool:
    """True while the HVAC schedule is active; end is exclusive."""
    return settings.start_min <= t_min < settings.end_min


# ---------------------------------------------------------------------------
# Override commands
# ---------------------------------------------------------------------------

class OverrideKind(str, Enum):
    COOLING_MODE = "cooling_mode"
    COOLING_ABSOLUTE = "cooling_absolute"
    HEATING_ABSOLUTE = "heating_absolute"
    SCHEDULE_START = "schedule_start"
    SCHEDULE_END = "schedule_end"
    CLEAR_ALL = "clear_all"


_ABSOLUTE_KINDS = frozenset({
    OverrideKind.COOLING_ABSOLUTE,
    OverrideKind.HEATING_ABSOLUTE,
    OverrideKind.SCHEDULE_START,
    OverrideKind.SCHEDULE_END,
})


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def canonical_number(x: float) -> int | float:
    # JSON form uses ints for integral values so re-encoding is byte-stable.
    return int(x) if float(x).is_integer() else float(x)


@dataclass(frozen=True)
class OverrideCommand:
    kind: OverrideKind
    mode: float | None = None      # cooling_mode only, from MODE_VALUES
    value: float | None = None     # absolute kinds: degC or minutes

    def __post_init__(self) -> None:
        bad = command_violations(self.kind, self.mode, self.value)
        if bad:
            raise ValidationError(bad)

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind.value}
        if self.kind is OverrideKind.COOLING_MODE:
            doc["mode"] = canonical_number(self.mode)
        elif self.kind in _ABSOLUTE_KINDS:
            doc["value"] = canonical_number(self.value)
        return doc

    @classmethod
    def from_dict(cls, doc: Any, path: str = "command") -> "OverrideCommand":
        if not isinstance(doc, dict):
            raise ValidationError(f"{path}: must be an object")
        kind_raw = doc.get("kind")
        try:
            kind = OverrideKind(kind_raw)
        except ValueError:
            raise ValidationError(
                f"{path}.kind: unknown kind {kind_raw!r}") from None
        allowed = {"kind"}
        if kind is OverrideKind.COOLING_MODE:
            allowed.add("mode")
        elif kind in _ABSOLUTE_KINDS:
            allowed.add("value")
        extra = sorted(set(doc) - allowed)
        if extra:
            raise ValidationError(
                f"{path}: unexpected fields for {kind.value}: {', '.join(extra)}")
        mode = doc.get("mode")
        value = doc.get("value")
        bad = command_violations(kind, mode, value, path)
        if bad:
            raise ValidationError(bad)
        return cls(kind, float(mode) if mode is not None else None,
                   float(value) if value is not None else None)


def command_violations(kind: OverrideKind, mode: Any, value: Any,
                       path: str = "command") -> list[str]:
    """Structural checks only; settings invariants are enforced at apply."""
    bad = []
    if kind is OverrideKind.COOLING_MODE:
        if not _is_number(mode) or float(mode) not in MODE_VALUES:
            bad.append(f"{path}.mode: must be one of {list(MODE_VALUES)}, got {mode!r}")
        if value is not None:
            bad.append(f"{path}.value: not allowed for cooling_mode")
    elif kind in _ABSOLUTE_KINDS:
        if not _is_number(value):
            bad.append(f"{path}.value: must be a finite number, got {value!r}")
        elif kind in (OverrideKind.SCHEDULE_START, OverrideKind.SCHEDULE_END) \
                and not float(value).is_integer():
            bad.append(f"{path}.value: schedule minutes must be integral, got {value!r}")
        if mode is not None:
            bad.append(f"{path}.mode: only allowed for cooling_mode")
    else:  # clear_all
        if mode is not None or value is not None:
            bad.append(f"{path}: clear_all takes no mode or value")
    return bad


# ---------------------------------------------------------------------------
# Ledger
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OverrideLedger:
    """Active override per slot plus the accepted-command history.

    The baseline is carried so candidate settings can be validated at apply
    time. Slots: cooling (mode and absolute compete for it), heating,
    schedule start, schedule end.
    """

    baseline: ControlSettings
    cooling: OverrideCommand | None = None
    heating: OverrideCommand | None = None
    start: OverrideCommand | None = None
    end: OverrideCommand | None = None
    history: tuple[tuple[float, OverrideCommand], ...] = field(default_factory=tuple)

    @classmethod
    def empty(cls, baseline: ControlSettings) -> "OverrideLedger":
        bad = baseline.validate()
        if bad:
            raise ValidationError(bad)
        return cls(baseline=baseline)

    @property
    def has_active(self) -> bool:
        return any(s is not None for s in (self.cooling, self.heating,
                                           self.start, self.end))


def effective_settings(baseline: ControlSettings,
                       ledger: OverrideLedger) -> ControlSettings:
    """Baseline with the ledger's active overrides folded in."""
    cooling = baseline.cooling_setpoint_c
    if ledger.cooling is not None:
        if ledger.cooling.kind is OverrideKind.COOLING_MODE:
            cooling = baseline.cooling_setpoint_c + ledger.cooling.mode
        else:
            cooling = ledger.cooling.value
    heating = ledger.heating.value if ledger.heating is not None \
        else baseline.heating_setpoint_c
    start = int(ledger.start.value) if ledger.start is not None \
        else baseline.start_min
    end = int(ledger.end.value) if ledger.end is not None \
        else baseline.end_min
    return ControlSettings(cooling, heating, start, end)


def apply_override(ledger: OverrideLedger, cmd: OverrideCommand,
                   t_min: float) -> OverrideLedger:
    """Accept one command, returning the updated ledger.

    A command whose resulting effective settings would violate the settings
    invariants raises ValidationError and the ledger is unchanged (the
    caller keeps the old value).
    """
    slots: dict[str, OverrideCommand | None] = {}
    if cmd.kind is OverrideKind.CLEAR_ALL:
        slots = {"cooling": None, "heating": None, "start": None, "end": None}
    elif cmd.kind in (OverrideKind.COOLING_MODE, OverrideKind.COOLING_ABSOLUTE):
        slots["cooling"] = cmd
    elif cmd.kind is OverrideKind.HEATING_ABSOLUTE:
        slots["heating"] = cmd
    elif cmd.kind is OverrideKind.SCHEDULE_START:
        slots["start"] = cmd
    else:
        slots["end"] = cmd
    candidate = replace(ledger, **slots)
    bad = effective_settings(ledger.baseline, candidate).validate("effective")
    if bad:
        raise ValidationError(bad)
    return replace(candidate, history=(*ledger.history, (t_min, cmd)))


# ---------------------------------------------------------------------------
# Mode selection and per-zone error
# ---------------------------------------------------------------------------

def system_mode(settings: ControlSettings, t_min: float,
                zone_temps_c: list[float], prev_mode: Mode = Mode.OFF) -> Mode:
    """Schedule-gated heating/cooling selection with hysteresis.

    Outside the schedule window the system is off. Inside it, the mean zone
    temperature picks cooling above (cooling setpoint - band) and heating
    below (heating setpoint + band); in between, the previous mode coasts
    (PI errors are zero there anyway). Entering the window from off, the
    nearer setpoint decides so the plant is never off while scheduled on.
    """
    if not schedule_on(settings, t_min):
        return Mode.OFF
    if not zone_temps_c:
        raise InvalidInputError("zone_temps_c must be non-empty")
    mean = fmean(zone_temps_c)
    if mean > settings.cooling_setpoint_c - HYSTERESIS_K:
        return Mode.COOLING
    if mean < settings.heating_setpoint_c + HYSTERESIS_K:
        return Mode.HEATING
    if prev_mode is not Mode.OFF:
        return prev_mode
    midpoint = (settings.cooling_setpoint_c + settings.heating_setpoint_c) / 2
    return Mode.COOLING if mean >= midpoint else Mode.HEATING


def zone_error(settings: ControlSettings, mode: Mode, zone_temp_c: float) -> float:
    """One-sided setpoint error in K, always >= 0."""
    if mode is Mode.COOLING:
        return max(0.0, zone_temp_c - settings.cooling_setpoint_c)
    if mode is Mode.HEATING:
        return max(0.0, settings.heating_setpoint_c - zone_temp_c)
    raise InvalidInputError("zone_error is undefined with the system off")


def dr_active(baseline: ControlSettings, effective: ControlSettings,
              baseline_on: bool, controlled_on: bool) -> bool:
    """True while the controlled timeline operates differently from baseline.

    Setpoint differences count for as long as they stand. Schedule
    differences count only while they flip the on/off state: once both
    schedules are on, a shifted start time is the same operation.
    """
    return (effective.cooling_setpoint_c != baseline.cooling_setpoint_c
            or effective.heating_setpoint_c != baseline.heating_setpoint_c
            or baseline_on != controlled_on)
