"""Run artifacts: CSV trace, summary JSON, command-log NDJSON.

All three are pure functions of engine outputs, so identical runs export
byte-identical files. Numbers are written in canonical form — integers
without a trailing .0, floats in shortest round-trip notation — and the
command log uses one event object per line in exactly the shape the
scenario loader accepts, so a recorded session replays as-is.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .control import OverrideCommand, canonical_number
from .engine import RunSummary, TelemetryFrame

CSV_HEADER = ("t_min,zone_id,temp_base_c,temp_ctrl_c,cool_sp_base_c,cool_sp_ctrl_c,"
              "power_base_kw,power_ctrl_kw,energy_base_kwh,energy_ctrl_kwh,dr_active")


def _cell(x: float) -> str:
    return str(canonical_number(x))


def csv_lines(frames: Sequence[TelemetryFrame]) -> Iterator[str]:
    """One row per zone per tick, under the fixed header."""
    yield CSV_HEADER
    for f in frames:
        shared = [
            _cell(f.cool_sp_base_c), _cell(f.cool_sp_ctrl_c),
            _cell(f.power_base_kw), _cell(f.power_ctrl_kw),
            _cell(f.energy_base_kwh), _cell(f.energy_ctrl_kwh),
            "true" if f.dr_active else "false",
        ]
        t = _cell(f.t_min)
        for zid, tb, tc in zip(f.zone_ids, f.temps_base_c, f.temps_ctrl_c):
            yield ",".join([t, zid, _cell(tb), _cell(tc), *shared])


def csv_text(frames: Sequence[TelemetryFrame]) -> str:
    return "\n".join(csv_lines(frames)) + "\n"


def write_csv(frames: Sequence[TelemetryFrame], path: str | Path) -> None:
    Path(path).write_text(csv_text(frames), encoding="utf-8")


def summary_text(summary: RunSummary) -> str:
    return json.dumps(summary.to_dict(), indent=2) + "\n"


def write_summary(summary: RunSummary, path: str | Path) -> None:
    Path(path).write_text(summary_text(summary), encoding="utf-8")


def command_log_text(history: Iterable[tuple[float, OverrideCommand]]) -> str:
    lines = [
        json.dumps({"t_min": canonical_number(t), "command": cmd.to_dict()},
                   separators=(",", ":"))
        for t, cmd in history
    ]
    return "".join(line + "\n" for line in lines)


def write_command_log(history: Iterable[tuple[float, OverrideCommand]],
                      path: str | Path) -> None:
    Path(path).write_text(command_log_text(history), encoding="utf-8")
