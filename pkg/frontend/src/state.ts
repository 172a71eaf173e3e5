/**
 * Dashboard state machine: everything the UI renders, with no DOM in sight.
 *
 * Rules the charts depend on:
 *  - frames are kept in tick order; anything at or below the last rendered
 *    tick is discarded, so a reconnect's join snapshot can never duplicate
 *    a point;
 *  - every request gets a fresh id and is tracked until its ack/error comes
 *    back — one reply per request is the server's contract, and pending ids
 *    that never resolve indicate a broken stream;
 *  - the energy panel shows only server-provided numbers: live values come
 *    from the latest frame's cumulative counters, final values from the
 *    summary message, and the UI computes nothing but differences and
 *    percents from them.
 */

import type {
  OverridePayload,
  Phase,
  RunSummary,
  ServerMessage,
  TelemetryFrame,
} from "./protocol.js";

export type Connection = "connecting" | "live" | "closed";

export interface EnergyRow {
  label: "total" | "DR period" | "non-DR period";
  baselineKwh: number;
  controlledKwh: number;
  deltaKwh: number;
  savingPct: number | null;
}

export interface EnergyPanel {
  source: "live" | "summary";
  rows: EnergyRow[];
}

/** A full day at dt=60s is 1440 frames; one extra slot for a snapshot. */
export const RING_CAPACITY = 1441;

function savingPct(base: number, ctrl: number): number | null {
  if (base === 0) return ctrl === 0 ? 0 : null;
  return ((base - ctrl) / base) * 100;
}

function energyRows(
  base: { total_kwh: number; dr_kwh: number; non_dr_kwh: number },
  ctrl: { total_kwh: number; dr_kwh: number; non_dr_kwh: number },
  pct: { total: number | null; dr: number | null; nonDr: number | null },
): EnergyRow[] {
  return [
    {
      label: "total",
      baselineKwh: base.total_kwh,
      controlledKwh: ctrl.total_kwh,
      deltaKwh: base.total_kwh - ctrl.total_kwh,
      savingPct: pct.total,
    },
    {
      label: "DR period",
      baselineKwh: base.dr_kwh,
      controlledKwh: ctrl.dr_kwh,
      deltaKwh: base.dr_kwh - ctrl.dr_kwh,
      savingPct: pct.dr,
    },
    {
      label: "non-DR period",
      baselineKwh: base.non_dr_kwh,
      controlledKwh: ctrl.non_dr_kwh,
      deltaKwh: base.non_dr_kwh - ctrl.non_dr_kwh,
      savingPct: pct.nonDr,
    },
  ];
}

export class DashboardState {
  readonly capacity: number;
  frames: TelemetryFrame[] = [];
  phase: Phase = "configured";
  connection: Connection = "connecting";
  summary: RunSummary | null = null;
  banner: string | null = null;

  private pending = new Map<string, string>(); // req id -> control label
  private seq = 0;

  constructor(capacity: number = RING_CAPACITY) {
    this.capacity = capacity;
  }

  lastTick(): number {
    return this.frames.length
      ? this.frames[this.frames.length - 1].tick
      : -1;
  }

  latest(): TelemetryFrame | null {
    return this.frames.length
      ? this.frames[this.frames.length - 1]
      : null;
  }

  /** Fresh request id, tracked until the server answers it. */
  nextReq(label: string): string {
    const id = `r${++this.seq}`;
    this.pending.set(id, label);
    return id;
  }

  pendingCount(): number {
    return this.pending.size;
  }

  /** Feed one server message in; returns true if visible state changed. */
  handle(msg: ServerMessage): boolean {
    switch (msg.type) {
      case "telemetry": {
        if (msg.frame.tick <= this.lastTick()) return false; // stale/duplicate
        this.frames.push(msg.frame);
        if (this.frames.length > this.capacity) {
          this.frames.splice(0, this.frames.length - this.capacity);
        }
        return true;
      }
      case "phase": {
        this.phase = msg.phase;
        return true;
      }
      case "summary": {
        this.summary = msg.summary;
        return true;
      }
      case "ack": {
        this.pending.delete(msg.req);
        return true;
      }
      case "error": {
        const label = msg.req != null ? this.pending.get(msg.req) : undefined;
        if (msg.req != null) this.pending.delete(msg.req);
        this.banner = label ? `${label}: ${msg.message}` : msg.message;
        return true;
      }
    }
  }

  clearBanner(): void {
    this.banner = null;
  }

  /** Reset per-run display state; the session itself is reset server-side. */
  clearRun(): void {
    this.frames = [];
    this.summary = null;
    this.banner = null;
  }

  /** Overrides are only meaningful against a live engine. */
  canOverride(): boolean {
    return this.phase === "running" || this.phase === "paused";
  }

  /**
   * DR windows [start, end) in minutes, recovered from the frames'
   * dr_active transitions; an interval still open at the buffer edge is
   * closed one tick past the last frame so the shading reaches it.
   */
  drBands(): [number, number][] {
    const bands: [number, number][] = [];
    let start: number | null = null;
    const frames = this.frames;
    for (const f of frames) {
      if (f.dr_active && start === null) start = f.t_min;
      else if (!f.dr_active && start !== null) {
        bands.push([start, f.t_min]);
        start = null;
      }
    }
    if (start !== null && frames.length) {
      const dt =
        frames.length > 1 ? frames[1].t_min - frames[0].t_min : 1;
      bands.push([start, frames[frames.length - 1].t_min + dt]);
    }
    return bands;
  }

  /**
   * Energy comparison card. Before the run finishes the rows track the
   * latest frame's cumulative counters; after the summary arrives they
   * freeze to the server's final numbers (including its percent fields).
   */
  energyPanel(): EnergyPanel | null {
    if (this.summary) {
      const s = this.summary;
      return {
        source: "summary",
        rows: energyRows(s.baseline, s.controlled, {
          total: s.saving.total_pct,
          dr: s.saving.dr_pct,
          nonDr: s.saving.non_dr_pct,
        }),
      };
    }
    const f = this.latest();
    if (!f) return null;
    const base = {
      total_kwh: f.energy_base_kwh,
      dr_kwh: f.energy_base_dr_kwh,
      non_dr_kwh: f.energy_base_non_dr_kwh,
    };
    const ctrl = {
      total_kwh: f.energy_ctrl_kwh,
      dr_kwh: f.energy_ctrl_dr_kwh,
      non_dr_kwh: f.energy_ctrl_non_dr_kwh,
    };
    return {
      source: "live",
      rows: energyRows(base, ctrl, {
        total: savingPct(base.total_kwh, ctrl.total_kwh),
        dr: savingPct(base.dr_kwh, ctrl.dr_kwh),
        nonDr: savingPct(base.non_dr_kwh, ctrl.non_dr_kwh),
      }),
    };
  }
}

// --- command builders: one payload per user interaction -------------------

export function modeCommand(mode: number): OverridePayload {
  return { kind: "cooling_mode", mode };
}

export function coolingAbsolute(value: number): OverridePayload {
  return { kind: "cooling_absolute", value };
}

export function heatingAbsolute(value: number): OverridePayload {
  return { kind: "heating_absolute", value };
}

export function scheduleStart(minutes: number): OverridePayload {
  return { kind: "schedule_start", value: minutes };
}

export function scheduleEnd(minutes: number): OverridePayload {
  return { kind: "schedule_end", value: minutes };
}

export function clearAll(): OverridePayload {
  return { kind: "clear_all" };
}
