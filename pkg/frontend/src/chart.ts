/**
 * Hand-rolled canvas line charts: three synchronized panels over a shared
 * minutes-after-midnight x axis, with DR windows shaded behind the traces.
 *
 * No chart library: the panels need dashed-baseline pairing, step-drawn
 * setpoints, and band shading driven by simulation state, which is less
 * code to draw directly than to configure around.
 */

import { axisTicks, minutesToHHMM } from "./format.js";

export interface Point {
  x: number; // minutes after midnight
  y: number;
}

export interface Series {
  label: string;
  color: string;
  points: Point[];
  dash?: number[]; // e.g. [5, 4] for baseline traces
  step?: boolean; // setpoints hold their value until the next sample
}

export interface ChartSpec {
  title: string;
  unit: string;
  series: Series[];
  bands: [number, number][]; // DR windows, minutes
  xMax: number; // day length, minutes
  yMin?: number; // optional pinned floor (power/energy start at 0)
}

const PAD_LEFT = 52;
const PAD_RIGHT = 12;
const PAD_TOP = 26;
const PAD_BOTTOM = 24;

const GRID = "rgba(255,255,255,0.07)";
const AXIS_TEXT = "rgba(255,255,255,0.45)";
const BAND_FILL = "rgba(255,194,58,0.10)";
const BAND_EDGE = "rgba(255,194,58,0.35)";

export interface YDomain {
  min: number;
  max: number;
}

/** Padded y range over every visible point; degenerate data gets a ±1 band. */
export function yDomain(series: Series[], yMin?: number): YDomain {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      if (p.y < lo) lo = p.y;
      if (p.y > hi) hi = p.y;
    }
  }
  if (lo > hi) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * 0.08;
  // a pinned floor wins unless the data actually dips below it
  const min = yMin !== undefined && lo >= yMin ? yMin : lo - pad;
  return { min, max: hi + pad };
}

export function drawChart(canvas: HTMLCanvasElement, spec: ChartSpec): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const w = canvas.width;
  const h = canvas.height;
  const plotW = w - PAD_LEFT - PAD_RIGHT;
  const plotH = h - PAD_TOP - PAD_BOTTOM;
  const dom = yDomain(spec.series, spec.yMin);

  const xPx = (x: number) => PAD_LEFT + (x / spec.xMax) * plotW;
  const yPx = (y: number) =>
    PAD_TOP + plotH - ((y - dom.min) / (dom.max - dom.min)) * plotH;

  ctx.clearRect(0, 0, w, h);

  // DR bands behind everything else
  for (const [a, b] of spec.bands) {
    const x0 = xPx(Math.max(0, a));
    const x1 = xPx(Math.min(spec.xMax, b));
    ctx.fillStyle = BAND_FILL;
    ctx.fillRect(x0, PAD_TOP, x1 - x0, plotH);
    ctx.strokeStyle = BAND_EDGE;
    ctx.beginPath();
    ctx.moveTo(x0, PAD_TOP);
    ctx.lineTo(x0, PAD_TOP + plotH);
    ctx.moveTo(x1, PAD_TOP);
    ctx.lineTo(x1, PAD_TOP + plotH);
    ctx.stroke();
  }

  // grid + axis labels
  ctx.font = "10px system-ui, sans-serif";
  ctx.strokeStyle = GRID;
  ctx.fillStyle = AXIS_TEXT;
  for (const tick of axisTicks(dom.min, dom.max, 5)) {
    const y = yPx(tick);
    ctx.beginPath();
    ctx.moveTo(PAD_LEFT, y);
    ctx.lineTo(w - PAD_RIGHT, y);
    ctx.stroke();
    ctx.textAlign = "right";
    ctx.textBaseline = "middle";
    ctx.fillText(formatTick(tick), PAD_LEFT - 6, y);
  }
  for (let t = 0; t <= spec.xMax; t += 180) {
    const x = xPx(t);
    ctx.beginPath();
    ctx.moveTo(x, PAD_TOP);
    ctx.lineTo(x, PAD_TOP + plotH);
    ctx.stroke();
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    ctx.fillText(minutesToHHMM(t), x, PAD_TOP + plotH + 6);
  }

  // traces
  for (const s of spec.series) {
    if (!s.points.length) continue;
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    let prev = s.points[0];
    ctx.moveTo(xPx(prev.x), yPx(prev.y));
    for (let i = 1; i < s.points.length; i++) {
      const p = s.points[i];
      if (s.step) ctx.lineTo(xPx(p.x), yPx(prev.y)); // hold then jump
      ctx.lineTo(xPx(p.x), yPx(p.y));
      prev = p;
    }
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // title + unit
  ctx.fillStyle = "rgba(255,255,255,0.7)";
  ctx.font = "600 11px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.textBaseline = "alphabetic";
  ctx.fillText(spec.title, PAD_LEFT, 14);
  ctx.fillStyle = AXIS_TEXT;
  ctx.textAlign = "right";
  ctx.fillText(spec.unit, w - PAD_RIGHT, 14);
}

function formatTick(v: number): string {
  if (Math.abs(v) >= 100 || Number.isInteger(v)) return String(Math.round(v));
  return v.toFixed(1);
}
