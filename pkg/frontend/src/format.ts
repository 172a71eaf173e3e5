/** Small display/axis helpers shared by the charts and the energy panel. */

/** 374 -> "06:14"; axis labels and schedule inputs use minutes after midnight. */
export function minutesToHHMM(minutes: number): string {
  const m = Math.max(0, Math.round(minutes));
  const h = Math.floor(m / 60) % 24;
  const mm = m % 60;
  return `${String(h).padStart(2, "0")}:${String(mm).padStart(2, "0")}`;
}

/** "06:14" -> 374; returns null for anything that isn't HH:MM. */
export function hhmmToMinutes(text: string): number | null {
  const match = /^(\d{1,2}):(\d{2})$/.exec(text.trim());
  if (!match) return null;
  const h = Number(match[1]);
  const m = Number(match[2]);
  if (h > 23 || m > 59) return null;
  return h * 60 + m;
}

export function fmtKwh(x: number): string {
  return x.toFixed(2);
}

/** Percent with the server's "undefined ratio" convention surfaced as n/a. */
export function fmtPct(p: number | null): string {
  return p == null ? "n/a" : `${p.toFixed(1)}%`;
}

/**
 * Choose a round step so [min, max] gets roughly `target` gridlines.
 * Steps are 1/2/5 times a power of ten.
 */
export function niceStep(min: number, max: number, target: number): number {
  const span = Math.max(max - min, 1e-9);
  const raw = span / Math.max(target, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= raw) return mag * mult;
  }
  return mag * 10;
}

/** Gridline values covering [min, max] at a nice step. */
export function axisTicks(min: number, max: number, target = 5): number[] {
  const step = niceStep(min, max, target);
  const first = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  // tolerance keeps the last tick when floating-point puts it a hair past max
  for (let v = first; v <= max + step * 1e-6; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}
