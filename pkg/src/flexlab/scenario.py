"""Scenario scripts: timed override sequences for headless runs.

Canonical form is a JSON document `{"events": [{"t_min": N, "command":
{...}}, ...]}` with events sorted by t_min (duplicates allowed, applied in
array order). The loader also accepts newline-delimited JSON with one event
object per line, which is exactly the command-log format a live session
persists — so a recorded run replays without conversion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .control import OverrideCommand, canonical_number
from .errors import ValidationError


@dataclass(frozen=True)
class ScriptEvent:
    t_min: float
    command: OverrideCommand

    def to_dict(self) -> dict[str, Any]:
        return {"t_min": canonical_number(self.t_min),
                "command": self.command.to_dict()}


@dataclass(frozen=True)
class ScenarioScript:
    events: tuple[ScriptEvent, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"events": [e.to_dict() for e in self.events]}

    @classmethod
    def from_dict(cls, doc: Any) -> "ScenarioScript":
        if not isinstance(doc, dict) or "events" not in doc:
            raise ValidationError('script: expected an object with an "events" array')
        raw = doc["events"]
        if not isinstance(raw, list):
            raise ValidationError("script.events: must be an array")
        bad: list[str] = []
        events: list[ScriptEvent] = []
        for i, item in enumerate(raw):
            path = f"events[{i}]"
            if not isinstance(item, dict):
                bad.append(f"{path}: must be an object")
                continue
            t = item.get("t_min")
            if not (isinstance(t, (int, float)) and not isinstance(t, bool)
                    and math.isfinite(t)):
                bad.append(f"{path}.t_min: must be a finite number, got {t!r}")
                continue
            if not (0 <= t < 1440):
                bad.append(f"{path}.t_min: must lie in [0, 1440), got {t}")
                continue
            try:
                cmd = OverrideCommand.from_dict(item.get("command"), f"{path}.command")
            except ValidationError as exc:
                bad.extend(exc.violations)
                continue
            events.append(ScriptEvent(float(t), cmd))
        for i in range(1, len(events)):
            if events[i].t_min < events[i - 1].t_min:
                bad.append(
                    f"events[{i}].t_min: events must be sorted ascending"
                    f" ({events[i].t_min} after {events[i - 1].t_min})")
        if bad:
            raise ValidationError(bad)
        return cls(tuple(events))

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioScript":
        path = Path(path)
        if not path.is_file():
            raise ValidationError(f"script: file not found: {path}")
        text = path.read_text(encoding="utf-8")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            doc = None
        if isinstance(doc, dict) and "events" in doc:
            return cls.from_dict(doc)
        # newline-delimited event objects (the persisted command-log format)
        items: list[Any] = []
        bad: list[str] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                items.append(json.loads(line))
            except json.JSONDecodeError as exc:
                bad.append(f"script line {lineno}: invalid JSON ({exc.msg})")
        if bad:
            raise ValidationError(bad)
        return cls.from_dict({"events": items})

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n",
                              encoding="utf-8")
