import { describe, expect, it } from "vitest";

import { drawChart, Series, yDomain } from "../src/chart.js";

describe("y domain", () => {
  it("pads the data range", () => {
    const s: Series[] = [
      { label: "a", color: "#fff", points: [{ x: 0, y: 20 }, { x: 1, y: 30 }] },
    ];
    const dom = yDomain(s);
    expect(dom.min).toBeLessThan(20);
    expect(dom.max).toBeGreaterThan(30);
  });

  it("pins the floor for power/energy panels", () => {
    const s: Series[] = [
      { label: "a", color: "#fff", points: [{ x: 0, y: 0 }, { x: 1, y: 50 }] },
    ];
    expect(yDomain(s, 0).min).toBe(0);
  });

  it("keeps the floor when data dips below it", () => {
    const s: Series[] = [
      { label: "a", color: "#fff", points: [{ x: 0, y: -5 }, { x: 1, y: 5 }] },
    ];
    expect(yDomain(s, 0).min).toBeLessThan(-5);
  });

  it("gives flat data a visible band", () => {
    const s: Series[] = [
      { label: "a", color: "#fff", points: [{ x: 0, y: 24 }, { x: 1, y: 24 }] },
    ];
    const dom = yDomain(s);
    expect(dom.max - dom.min).toBeGreaterThan(0.5);
  });

  it("handles no data at all", () => {
    const dom = yDomain([]);
    expect(dom.max).toBeGreaterThan(dom.min);
  });
});

/** Minimal 2d-context stand-in that counts the calls the chart makes. */
function fakeCanvas(width: number, height: number) {
  const calls = { fillRect: 0, stroke: 0, fillText: [] as string[] };
  const ctx = {
    clearRect() {},
    beginPath() {},
    moveTo() {},
    lineTo() {},
    stroke() {
      calls.stroke++;
    },
    fillRect() {
      calls.fillRect++;
    },
    fillText(text: string) {
      calls.fillText.push(text);
    },
    setLineDash() {},
    strokeStyle: "",
    fillStyle: "",
    lineWidth: 0,
    font: "",
    textAlign: "left",
    textBaseline: "alphabetic",
  };
  const canvas = {
    width,
    height,
    getContext: () => ctx,
  } as unknown as HTMLCanvasElement;
  return { canvas, calls };
}

describe("drawChart", () => {
  it("shades one region per DR band and labels the x axis in HH:MM", () => {
    const { canvas, calls } = fakeCanvas(800, 200);
    drawChart(canvas, {
      title: "power",
      unit: "kW",
      series: [
        {
          label: "ctrl",
          color: "#58a6ff",
          points: [
            { x: 0, y: 0 },
            { x: 720, y: 40 },
            { x: 1439, y: 10 },
          ],
        },
      ],
      bands: [
        [720, 840],
        [1000, 1100],
      ],
      xMax: 1440,
      yMin: 0,
    });
    expect(calls.fillRect).toBe(2);
    expect(calls.fillText).toContain("12:00");
    expect(calls.fillText).toContain("00:00");
    expect(calls.stroke).toBeGreaterThan(3); // grid + bands + trace
  });

  it("draws nothing but axes for an empty frame buffer", () => {
    const { canvas, calls } = fakeCanvas(800, 200);
    drawChart(canvas, {
      title: "temps",
      unit: "°C",
      series: [{ label: "a", color: "#fff", points: [] }],
      bands: [],
      xMax: 1440,
    });
    expect(calls.fillRect).toBe(0);
    expect(calls.fillText.length).toBeGreaterThan(0);
  });
});
