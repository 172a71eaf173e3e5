import { describe, expect, it } from "vitest";

import {
  clearAll,
  coolingAbsolute,
  DashboardState,
  modeCommand,
  scheduleStart,
} from "../src/state.js";
import type { RunSummary } from "../src/protocol.js";
import { makeFrame } from "./helpers.js";

function telemetry(tick: number, over = {}) {
  return { type: "telemetry" as const, frame: makeFrame(tick, over) };
}

describe("frame buffer", () => {
  it("appends frames in tick order", () => {
    const s = new DashboardState();
    expect(s.handle(telemetry(0))).toBe(true);
    expect(s.handle(telemetry(1))).toBe(true);
    expect(s.frames.map((f) => f.tick)).toEqual([0, 1]);
  });

  it("discards stale and duplicate ticks (the reconnect dedup rule)", () => {
    const s = new DashboardState();
    s.handle(telemetry(5));
    s.handle(telemetry(6));
    expect(s.handle(telemetry(6))).toBe(false); // duplicate snapshot
    expect(s.handle(telemetry(3))).toBe(false); // stale replay
    expect(s.frames.map((f) => f.tick)).toEqual([5, 6]);
  });

  it("accepts a gap after reconnect without duplicating anything", () => {
    const s = new DashboardState();
    for (let t = 0; t < 10; t++) s.handle(telemetry(t));
    // disconnected for a while; join snapshot arrives at tick 42
    expect(s.handle(telemetry(42))).toBe(true);
    const ticks = s.frames.map((f) => f.tick);
    expect(ticks).toEqual([...Array(10).keys(), 42]);
    expect(new Set(ticks).size).toBe(ticks.length);
  });

  it("caps the buffer at its capacity", () => {
    const s = new DashboardState(100);
    for (let t = 0; t < 250; t++) s.handle(telemetry(t));
    expect(s.frames.length).toBe(100);
    expect(s.frames[0].tick).toBe(150);
    expect(s.lastTick()).toBe(249);
  });
});

describe("request tracking", () => {
  it("issues fresh ids and resolves them on ack", () => {
    const s = new DashboardState();
    const a = s.nextReq("mode 1");
    const b = s.nextReq("pause");
    expect(a).not.toBe(b);
    expect(s.pendingCount()).toBe(2);
    s.handle({ type: "ack", req: a });
    expect(s.pendingCount()).toBe(1);
    s.handle({ type: "ack", req: b });
    expect(s.pendingCount()).toBe(0);
  });

  it("surfaces a server error as a banner naming the control", () => {
    const s = new DashboardState();
    const req = s.nextReq("cooling setpoint");
    s.handle({ type: "error", req, message: "deadband too small" });
    expect(s.banner).toBe("cooling setpoint: deadband too small");
    expect(s.pendingCount()).toBe(0);
  });

  it("shows protocol-level errors (req null) verbatim", () => {
    const s = new DashboardState();
    s.handle({ type: "error", req: null, message: "invalid JSON at line 1 column 2: x" });
    expect(s.banner).toContain("invalid JSON");
  });
});

describe("phase and overrides", () => {
  it("tracks phase and gates override controls on running/paused", () => {
    const s = new DashboardState();
    expect(s.canOverride()).toBe(false);
    s.handle({ type: "phase", phase: "running" });
    expect(s.canOverride()).toBe(true);
    s.handle({ type: "phase", phase: "paused" });
    expect(s.canOverride()).toBe(true);
    s.handle({ type: "phase", phase: "finished" });
    expect(s.canOverride()).toBe(false);
  });

  it("builds the exact command payloads the server codec accepts", () => {
    expect(modeCommand(-0.5)).toEqual({ kind: "cooling_mode", mode: -0.5 });
    expect(coolingAbsolute(26)).toEqual({ kind: "cooling_absolute", value: 26 });
    expect(scheduleStart(360)).toEqual({ kind: "schedule_start", value: 360 });
    expect(clearAll()).toEqual({ kind: "clear_all" });
  });
});

describe("DR bands", () => {
  it("recovers [start, end) windows from dr_active transitions", () => {
    const s = new DashboardState();
    for (let t = 0; t < 10; t++) {
      s.handle(telemetry(t, { dr_active: t >= 3 && t < 7 }));
    }
    expect(s.drBands()).toEqual([[3, 7]]);
  });

  it("closes a still-open window one tick past the buffer edge", () => {
    const s = new DashboardState();
    for (let t = 0; t < 5; t++) s.handle(telemetry(t, { dr_active: t >= 2 }));
    expect(s.drBands()).toEqual([[2, 5]]);
  });
});

describe("energy panel", () => {
  it("is empty before the first frame", () => {
    expect(new DashboardState().energyPanel()).toBeNull();
  });

  it("tracks the latest frame's cumulative counters while live", () => {
    const s = new DashboardState();
    s.handle(
      telemetry(10, {
        energy_base_kwh: 100,
        energy_ctrl_kwh: 80,
        energy_base_dr_kwh: 40,
        energy_ctrl_dr_kwh: 25,
        energy_base_non_dr_kwh: 60,
        energy_ctrl_non_dr_kwh: 55,
      }),
    );
    const panel = s.energyPanel()!;
    expect(panel.source).toBe("live");
    const [total, dr, nonDr] = panel.rows;
    expect(total.baselineKwh).toBe(100);
    expect(total.controlledKwh).toBe(80);
    expect(total.savingPct).toBeCloseTo(20, 10);
    expect(dr.savingPct).toBeCloseTo(37.5, 10);
    expect(nonDr.deltaKwh).toBeCloseTo(5, 10);
  });

  it("reports n/a (null) when baseline energy is zero but controlled isn't", () => {
    const s = new DashboardState();
    s.handle(
      telemetry(1, {
        energy_base_dr_kwh: 0,
        energy_ctrl_dr_kwh: 2,
      }),
    );
    const dr = s.energyPanel()!.rows[1];
    expect(dr.savingPct).toBeNull();
  });

  it("freezes to the server summary, field for field", () => {
    const s = new DashboardState();
    s.handle(telemetry(0));
    const summary: RunSummary = {
      baseline: { total_kwh: 327.55, dr_kwh: 50.1, non_dr_kwh: 277.45 },
      controlled: { total_kwh: 331.19, dr_kwh: 41.4, non_dr_kwh: 289.79 },
      saving: { total_pct: -1.1, dr_pct: 17.4, non_dr_pct: -4.4 },
      dr_intervals: [[720, 840]],
    };
    s.handle({ type: "summary", summary });
    const panel = s.energyPanel()!;
    expect(panel.source).toBe("summary");
    const [total, dr, nonDr] = panel.rows;
    // numbers come from the summary verbatim, including the percent fields
    expect(total.baselineKwh).toBe(327.55);
    expect(total.controlledKwh).toBe(331.19);
    expect(total.savingPct).toBe(-1.1);
    expect(dr.savingPct).toBe(17.4);
    expect(nonDr.baselineKwh).toBe(277.45);
  });

  it("clears run-scoped state for a reset without losing the session", () => {
    const s = new DashboardState();
    s.handle(telemetry(0));
    s.handle({
      type: "summary",
      summary: {
        baseline: { total_kwh: 1, dr_kwh: 0, non_dr_kwh: 1 },
        controlled: { total_kwh: 1, dr_kwh: 0, non_dr_kwh: 1 },
        saving: { total_pct: 0, dr_pct: 0, non_dr_pct: 0 },
        dr_intervals: [],
      },
    });
    s.clearRun();
    expect(s.frames).toEqual([]);
    expect(s.summary).toBeNull();
    expect(s.energyPanel()).toBeNull();
  });
});
