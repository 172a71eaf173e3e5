/**
 * Wire types for the session service.
 *
 * Mirrors the JSON shapes the server emits on /ws/session/{id} and its
 * HTTP endpoints. Nothing here has behavior; the state module owns that.
 */

export type Phase = "configured" | "running" | "paused" | "finished";

export interface ZoneSample {
  id: string;
  temp_base_c: number;
  temp_ctrl_c: number;
}

export interface TelemetryFrame {
  tick: number;
  t_min: number;
  zones: ZoneSample[];
  cool_sp_base_c: number;
  cool_sp_ctrl_c: number;
  heat_sp_base_c: number;
  heat_sp_ctrl_c: number;
  mode_base: string;
  mode_ctrl: string;
  power_base_kw: number;
  power_ctrl_kw: number;
  energy_base_kwh: number;
  energy_ctrl_kwh: number;
  energy_base_dr_kwh: number;
  energy_base_non_dr_kwh: number;
  energy_ctrl_dr_kwh: number;
  energy_ctrl_non_dr_kwh: number;
  unmet_base_w: number;
  unmet_ctrl_w: number;
  dr_active: boolean;
}

export interface PeriodEnergy {
  total_kwh: number;
  dr_kwh: number;
  non_dr_kwh: number;
}

export interface PeriodSaving {
  total_pct: number | null;
  dr_pct: number | null;
  non_dr_pct: number | null;
}

export interface RunSummary {
  baseline: PeriodEnergy;
  controlled: PeriodEnergy;
  saving: PeriodSaving;
  dr_intervals: [number, number][];
}

export type ServerMessage =
  | { type: "ack"; req: string }
  | { type: "error"; req: string | null; message: string }
  | { type: "telemetry"; frame: TelemetryFrame }
  | { type: "phase"; phase: Phase }
  | { type: "summary"; summary: RunSummary };

/** Override payloads, exactly the shapes the command codec accepts. */
export type OverridePayload =
  | { kind: "cooling_mode"; mode: number }
  | { kind: "cooling_absolute"; value: number }
  | { kind: "heating_absolute"; value: number }
  | { kind: "schedule_start"; value: number }
  | { kind: "schedule_end"; value: number }
  | { kind: "clear_all" };

export type ClientMessage =
  | { type: "configure"; req: string; config: unknown }
  | { type: "start"; req: string; speed?: number }
  | { type: "pause"; req: string }
  | { type: "resume"; req: string }
  | { type: "set_speed"; req: string; speed: number }
  | { type: "override"; req: string; command: OverridePayload }
  | { type: "reset"; req: string };

/** The setpoint-mode presets offered as buttons, in display order. */
export const MODE_VALUES = [-2, -1, -0.5, 0, 0.5, 1, 2] as const;
