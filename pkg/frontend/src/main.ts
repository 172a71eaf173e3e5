/**
 * Browser entry point: session bootstrap, socket lifecycle, controls, and
 * the render loop. All simulation truth lives in DashboardState; this file
 * only moves messages and pixels.
 */

import { drawChart, Series } from "./chart.js";
import { fmtKwh, fmtPct, hhmmToMinutes, minutesToHHMM } from "./format.js";
import {
  clearAll,
  coolingAbsolute,
  DashboardState,
  heatingAbsolute,
  modeCommand,
  scheduleEnd,
  scheduleStart,
} from "./state.js";
import {
  ClientMessage,
  MODE_VALUES,
  OverridePayload,
  ServerMessage,
  TelemetryFrame,
} from "./protocol.js";

const ZONE_COLORS = ["#58a6ff", "#00e5a0", "#a78bfa", "#ffc23a", "#ff8fab"];
const CTRL_COLOR = "#58a6ff";
const BASE_COLOR = "#8b949e";
const SETPOINT_COLOR = "#ff6b6b";
const BASELINE_DASH = [5, 4];

const state = new DashboardState();
let ws: WebSocket | null = null;
let sessionId: string | null = null;
let retryMs = 1000;
let closedByUs = false;
let renderQueued = false;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

// --- session + socket ------------------------------------------------------

async function bootstrap(): Promise<void> {
  const params = new URLSearchParams(location.search);
  sessionId = params.get("session");
  if (!sessionId) {
    const res = await fetch("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: "{}",
    });
    if (!res.ok) {
      state.banner = `could not create session (${res.status})`;
      render();
      return;
    }
    sessionId = (await res.json()).session_id as string;
    history.replaceState(null, "", `?session=${sessionId}`);
  }
  connect();
}

function connect(): void {
  if (!sessionId) return;
  state.connection = "connecting";
  render();
  const url = `${location.origin.replace(/^http/, "ws")}/ws/session/${sessionId}`;
  ws = new WebSocket(url);
  ws.onopen = () => {
    retryMs = 1000;
    state.connection = "live";
    state.clearBanner();
    render();
  };
  ws.onmessage = (ev) => {
    const msg = JSON.parse(ev.data) as ServerMessage;
    if (state.handle(msg)) render();
  };
  ws.onclose = () => {
    ws = null;
    state.connection = "closed";
    render();
    // the server closes a finished stream on purpose; anything else gets
    // an auto-reconnect, and the join snapshot dedups on tick
    if (!closedByUs && state.phase !== "finished") {
      state.banner = "connection lost — reconnecting";
      setTimeout(connect, retryMs);
      retryMs = Math.min(retryMs * 2, 8000);
    }
  };
}

function send(msg: ClientMessage): void {
  if (ws && ws.readyState === WebSocket.OPEN) {
    ws.send(JSON.stringify(msg));
  } else {
    state.banner = "not connected";
    render();
  }
}

function sendOverride(label: string, command: OverridePayload): void {
  send({ type: "override", req: state.nextReq(label), command });
}

// --- controls ---------------------------------------------------------------

function wireControls(): void {
  const modeRow = $("modeRow");
  for (const mode of MODE_VALUES) {
    const btn = document.createElement("button");
    btn.className = "mode-btn needs-run";
    btn.textContent = mode > 0 ? `+${mode}` : String(mode);
    btn.title = `cooling setpoint ${mode >= 0 ? "+" : ""}${mode} °C`;
    btn.onclick = () => sendOverride(`mode ${mode}`, modeCommand(mode));
    modeRow.appendChild(btn);
  }

  $("startBtn").onclick = () => {
    const speed = Number((<HTMLSelectElement>$("speedSel")).value);
    send({ type: "start", req: state.nextReq("start"), speed });
  };
  $("pauseBtn").onclick = () => send({ type: "pause", req: state.nextReq("pause") });
  $("resumeBtn").onclick = () => send({ type: "resume", req: state.nextReq("resume") });
  $("resetBtn").onclick = () => {
    send({ type: "reset", req: state.nextReq("reset") });
    state.clearRun();
    render();
  };
  $("speedSel").onchange = () => {
    const speed = Number((<HTMLSelectElement>$("speedSel")).value);
    send({ type: "set_speed", req: state.nextReq("speed"), speed });
  };

  $("coolSetBtn").onclick = () => {
    const v = Number((<HTMLInputElement>$("coolInput")).value);
    if (Number.isFinite(v)) sendOverride("cooling setpoint", coolingAbsolute(v));
  };
  $("heatSetBtn").onclick = () => {
    const v = Number((<HTMLInputElement>$("heatInput")).value);
    if (Number.isFinite(v)) sendOverride("heating setpoint", heatingAbsolute(v));
  };
  $("schedStartBtn").onclick = () => {
    const m = hhmmToMinutes((<HTMLInputElement>$("schedStartInput")).value);
    if (m != null) sendOverride("schedule start", scheduleStart(m));
  };
  $("schedEndBtn").onclick = () => {
    const m = hhmmToMinutes((<HTMLInputElement>$("schedEndInput")).value);
    if (m != null) sendOverride("schedule end", scheduleEnd(m));
  };
  $("clearBtn").onclick = () => sendOverride("clear overrides", clearAll());
  $("banner").onclick = () => {
    state.clearBanner();
    render();
  };
}

// --- rendering ---------------------------------------------------------------

function render(): void {
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    paint();
  });
}

function paint(): void {
  const phaseBadge = $("phaseBadge");
  phaseBadge.textContent = state.phase;
  phaseBadge.className = `badge phase-${state.phase}`;
  const connBadge = $("connBadge");
  connBadge.textContent = state.connection;
  connBadge.className = `badge conn-${state.connection}`;

  const banner = $("banner");
  banner.textContent = state.banner ?? "";
  banner.style.display = state.banner ? "block" : "none";

  const live = state.canOverride();
  document
    .querySelectorAll<HTMLButtonElement>(".needs-run")
    .forEach((b) => (b.disabled = !live));
  (<HTMLButtonElement>$("startBtn")).disabled = state.phase !== "configured";

  const f = state.latest();
  $("clock").textContent = f ? minutesToHHMM(f.t_min) : "--:--";

  const frames = state.frames;
  const bands = state.drBands();
  const xMax = 1440;

  drawChart(<HTMLCanvasElement>$("tempChart"), {
    title: "zone temperature (controlled solid, baseline dashed)",
    unit: "°C",
    series: temperatureSeries(frames),
    bands,
    xMax,
  });
  drawChart(<HTMLCanvasElement>$("powerChart"), {
    title: "HVAC electrical power",
    unit: "kW",
    series: [
      line("baseline", BASE_COLOR, frames, (fr) => fr.power_base_kw, BASELINE_DASH),
      line("controlled", CTRL_COLOR, frames, (fr) => fr.power_ctrl_kw),
    ],
    bands,
    xMax,
    yMin: 0,
  });
  drawChart(<HTMLCanvasElement>$("energyChart"), {
    title: "cumulative energy",
    unit: "kWh",
    series: [
      line("baseline", BASE_COLOR, frames, (fr) => fr.energy_base_kwh, BASELINE_DASH),
      line("controlled", CTRL_COLOR, frames, (fr) => fr.energy_ctrl_kwh),
    ],
    bands,
    xMax,
    yMin: 0,
  });

  paintEnergyPanel();
}

function line(
  label: string,
  color: string,
  frames: TelemetryFrame[],
  pick: (f: TelemetryFrame) => number,
  dash?: number[],
): Series {
  return {
    label,
    color,
    dash,
    points: frames.map((fr) => ({ x: fr.t_min, y: pick(fr) })),
  };
}

function temperatureSeries(frames: TelemetryFrame[]): Series[] {
  const series: Series[] = [];
  const zoneCount = frames.length ? frames[0].zones.length : 0;
  for (let z = 0; z < zoneCount; z++) {
    const color = ZONE_COLORS[z % ZONE_COLORS.length];
    series.push({
      label: `${frames[0].zones[z].id} baseline`,
      color,
      dash: BASELINE_DASH,
      points: frames.map((fr) => ({ x: fr.t_min, y: fr.zones[z].temp_base_c })),
    });
    series.push({
      label: frames[0].zones[z].id,
      color,
      points: frames.map((fr) => ({ x: fr.t_min, y: fr.zones[z].temp_ctrl_c })),
    });
  }
  // effective setpoint trajectory: the server-reported truth, stepped
  series.push({
    label: "cooling setpoint",
    color: SETPOINT_COLOR,
    step: true,
    points: frames.map((fr) => ({ x: fr.t_min, y: fr.cool_sp_ctrl_c })),
  });
  return series;
}

function paintEnergyPanel(): void {
  const panel = state.energyPanel();
  const body = $("energyBody");
  const tag = $("energySource");
  if (!panel) {
    body.innerHTML = `<tr><td colspan="5" class="dim">waiting for telemetry</td></tr>`;
    tag.textContent = "";
    return;
  }
  tag.textContent = panel.source === "summary" ? "final" : "live";
  body.innerHTML = panel.rows
    .map(
      (r) => `<tr>
        <td>${r.label}</td>
        <td>${fmtKwh(r.baselineKwh)}</td>
        <td>${fmtKwh(r.controlledKwh)}</td>
        <td>${fmtKwh(r.deltaKwh)}</td>
        <td>${fmtPct(r.savingPct)}</td>
      </tr>`,
    )
    .join("");
}

// --- go ----------------------------------------------------------------------

window.addEventListener("beforeunload", () => {
  closedByUs = true;
  ws?.close();
});

wireControls();
render();
void bootstrap();
