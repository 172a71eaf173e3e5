import type { TelemetryFrame } from "../src/protocol.js";

/** A plausible frame with every field present; override what matters. */
export function makeFrame(
  tick: number,
  over: Partial<TelemetryFrame> = {},
): TelemetryFrame {
  return {
    tick,
    t_min: tick,
    zones: [
      { id: "z1", temp_base_c: 24.0, temp_ctrl_c: 24.0 },
      { id: "z2", temp_base_c: 24.2, temp_ctrl_c: 24.2 },
    ],
    cool_sp_base_c: 24.0,
    cool_sp_ctrl_c: 24.0,
    heat_sp_base_c: 19.0,
    heat_sp_ctrl_c: 19.0,
    mode_base: "cooling",
    mode_ctrl: "cooling",
    power_base_kw: 10.0,
    power_ctrl_kw: 10.0,
    energy_base_kwh: tick * 0.1,
    energy_ctrl_kwh: tick * 0.1,
    energy_base_dr_kwh: 0.0,
    energy_base_non_dr_kwh: tick * 0.1,
    energy_ctrl_dr_kwh: 0.0,
    energy_ctrl_non_dr_kwh: tick * 0.1,
    unmet_base_w: 0.0,
    unmet_ctrl_w: 0.0,
    dr_active: false,
    ...over,
  };
}
