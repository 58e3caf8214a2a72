/** Figure builders: every function returns a complete SVG document. */

import { el, text, svgDocument, polylinePoints, px } from "./svg";
import { linearScale, ticks, tickStep, tickLabel, extent, padInterval } from "./scale";
import type { LinearScale } from "./scale";
import type { Trajectory } from "./csv";
import type { SensorFrame } from "./jsonl";
import { accelNoise } from "./accel";

export const PALETTE = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#db2777"];
export const TRUTH_COLOR = "#4b5563";
const INK = "#111827";
const MUTED = "#6b7280";
const GRID = "#e5e7eb";

export interface LineSeries {
  name: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
  width?: number;
}

interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

function dashAttr(s: LineSeries): string | undefined {
  return s.dashed ? "6 4" : undefined;
}

function gridAndAxes(
  box: Box,
  xScale: LinearScale,
  yScale: LinearScale,
  opts: { xLabels: boolean; yLabel: string },
): string[] {
  const out: string[] = [];
  const [x0, x1] = xScale.domain;
  const [y0, y1] = yScale.domain;
  const xTicks = ticks(x0, x1, 7);
  const yTicks = ticks(y0, y1, 5);
  const xStep = tickStep(x1 - x0, 7);
  const yStep = tickStep(y1 - y0, 5);

  for (const v of xTicks) {
    const gx = xScale(v);
    out.push(el("line", { x1: px(gx), y1: px(box.y), x2: px(gx), y2: px(box.y + box.h), stroke: GRID }));
    if (opts.xLabels) {
      out.push(
        text(tickLabel(v, xStep), {
          x: px(gx),
          y: px(box.y + box.h + 16),
          "text-anchor": "middle",
          "font-size": 11,
          fill: MUTED,
        }),
      );
    }
  }
  for (const v of yTicks) {
    const gy = yScale(v);
    out.push(el("line", { x1: px(box.x), y1: px(gy), x2: px(box.x + box.w), y2: px(gy), stroke: GRID }));
    out.push(
      text(tickLabel(v, yStep), {
        x: px(box.x - 7),
        y: px(gy + 3.5),
        "text-anchor": "end",
        "font-size": 11,
        fill: MUTED,
      }),
    );
  }
  out.push(
    el("rect", {
      x: px(box.x),
      y: px(box.y),
      width: px(box.w),
      height: px(box.h),
      fill: "none",
      stroke: MUTED,
      "stroke-width": 1,
    }),
  );
  out.push(
    text(opts.yLabel, {
      x: px(box.x - 48),
      y: px(box.y + box.h / 2),
      transform: `rotate(-90 ${px(box.x - 48)} ${px(box.y + box.h / 2)})`,
      "text-anchor": "middle",
      "font-size": 12,
      fill: INK,
    }),
  );
  return out;
}

function seriesPolyline(s: LineSeries, xScale: LinearScale, yScale: LinearScale): string {
  return el("polyline", {
    points: polylinePoints(s.x.map(xScale), s.y.map(yScale)),
    fill: "none",
    stroke: s.color,
    "stroke-width": s.width ?? 1.5,
    "stroke-dasharray": dashAttr(s),
    "stroke-linejoin": "round",
  });
}

function legend(seriesList: LineSeries[], xRight: number, y: number): string[] {
  const out: string[] = [];
  let cursor = xRight;
  for (let i = seriesList.length - 1; i >= 0; i--) {
    const s = seriesList[i];
    const labelWidth = 7 * s.name.length;
    cursor -= labelWidth;
    out.push(
      text(s.name, { x: px(cursor), y: px(y), "font-size": 12, fill: INK }),
      el("line", {
        x1: px(cursor - 26),
        y1: px(y - 4),
        x2: px(cursor - 6),
        y2: px(y - 4),
        stroke: s.color,
        "stroke-width": 2,
        "stroke-dasharray": dashAttr(s),
      }),
    );
    cursor -= 34;
  }
  return out;
}

function title(t: string): string {
  return text(t, { x: 24, y: 28, "font-size": 15, "font-weight": "bold", fill: INK });
}

function background(width: number, height: number): string {
  return el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" });
}

/** Stacked time panels, one per component; x axis (time) is shared. */
function stackedFigure(
  heading: string,
  panels: { yLabel: string; series: LineSeries[] }[],
  xTitle: string,
): string {
  const width = 900;
  const margin = { top: 48, right: 26, bottom: 46, left: 68 };
  const panelH = 148;
  const gap = 20;
  const height = margin.top + panels.length * panelH + (panels.length - 1) * gap + margin.bottom;
  const body: string[] = [background(width, height), title(heading)];

  const allT = panels[0].series.flatMap((s) => s.x);
  const xDomain = padInterval(extent(allT), 0.02);

  panels.forEach((panel, i) => {
    const box: Box = {
      x: margin.left,
      y: margin.top + i * (panelH + gap),
      w: width - margin.left - margin.right,
      h: panelH,
    };
    const last = i === panels.length - 1;
    const xScale = linearScale(xDomain, [box.x, box.x + box.w]);
    const yDomain = padInterval(extent(panel.series.flatMap((s) => s.y)), 0.08);
    const yScale = linearScale(yDomain, [box.y + box.h, box.y]);
    body.push(...gridAndAxes(box, xScale, yScale, { xLabels: last, yLabel: panel.yLabel }));
    for (const s of panel.series) body.push(seriesPolyline(s, xScale, yScale));
    if (last) {
      body.push(
        text(xTitle, {
          x: px(box.x + box.w / 2),
          y: px(box.y + box.h + 36),
          "text-anchor": "middle",
          "font-size": 12,
          fill: INK,
        }),
      );
    }
  });
  body.push(...legend(panels[0].series, width - margin.right, 28));
  return svgDocument(width, height, body);
}

function asSeries(
  truth: Trajectory | null,
  estimates: { name: string; table: Trajectory }[],
  pick: (table: Trajectory) => number[],
): LineSeries[] {
  const out: LineSeries[] = [];
  if (truth) {
    out.push({ name: "truth", x: truth.t, y: pick(truth), color: TRUTH_COLOR, dashed: true });
  }
  estimates.forEach((e, i) => {
    out.push({ name: e.name, x: e.table.t, y: pick(e.table), color: seriesColor(i) });
  });
  return out;
}

export function perAxisPositionFigure(
  truth: Trajectory | null,
  estimates: { name: string; table: Trajectory }[],
): string {
  return stackedFigure(
    "Position by axis",
    [
      { yLabel: "x [m]", series: asSeries(truth, estimates, (tb) => tb.x) },
      { yLabel: "y [m]", series: asSeries(truth, estimates, (tb) => tb.y) },
      { yLabel: "z [m]", series: asSeries(truth, estimates, (tb) => tb.z) },
    ],
    "t [s]",
  );
}

export function velocityFigure(
  truth: Trajectory | null,
  estimates: { name: string; table: Trajectory }[],
): string {
  return stackedFigure(
    "Velocity by axis",
    [
      { yLabel: "vx [m/s]", series: asSeries(truth, estimates, (tb) => tb.vx) },
      { yLabel: "vy [m/s]", series: asSeries(truth, estimates, (tb) => tb.vy) },
      { yLabel: "vz [m/s]", series: asSeries(truth, estimates, (tb) => tb.vz) },
    ],
    "t [s]",
  );
}

/** Top-down path with equal scaling on both axes (meters per pixel match). */
export function xyTrajectoryFigure(
  truth: Trajectory | null,
  estimates: { name: string; table: Trajectory }[],
): string {
  const width = 760;
  const height = 700;
  const margin = { top: 48, right: 26, bottom: 52, left: 68 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const seriesList: LineSeries[] = [];
  if (truth) {
    seriesList.push({ name: "truth", x: truth.x, y: truth.y, color: TRUTH_COLOR, dashed: true });
  }
  estimates.forEach((e, i) => {
    seriesList.push({ name: e.name, x: e.table.x, y: e.table.y, color: seriesColor(i) });
  });

  const [xLo, xHi] = padInterval(extent(seriesList.flatMap((s) => s.x)), 0.06);
  const [yLo, yHi] = padInterval(extent(seriesList.flatMap((s) => s.y)), 0.06);
  const pxPerUnit = Math.min(plotW / (xHi - xLo), plotH / (yHi - yLo));
  const midX = (xLo + xHi) / 2;
  const midY = (yLo + yHi) / 2;
  const xDomain: [number, number] = [midX - plotW / (2 * pxPerUnit), midX + plotW / (2 * pxPerUnit)];
  const yDomain: [number, number] = [midY - plotH / (2 * pxPerUnit), midY + plotH / (2 * pxPerUnit)];

  const box: Box = { x: margin.left, y: margin.top, w: plotW, h: plotH };
  const xScale = linearScale(xDomain, [box.x, box.x + box.w]);
  const yScale = linearScale(yDomain, [box.y + box.h, box.y]);

  const body: string[] = [background(width, height), title("Horizontal trajectory")];
  body.push(...gridAndAxes(box, xScale, yScale, { xLabels: true, yLabel: "y [m]" }));
  for (const s of seriesList) {
    body.push(seriesPolyline(s, xScale, yScale));
    if (s.x.length > 0) {
      body.push(
        el("circle", { cx: px(xScale(s.x[0])), cy: px(yScale(s.y[0])), r: 3, fill: s.color }),
        el("circle", {
          cx: px(xScale(s.x[s.x.length - 1])),
          cy: px(yScale(s.y[s.y.length - 1])),
          r: 4.5,
          fill: "none",
          stroke: s.color,
          "stroke-width": 1.5,
        }),
      );
    }
  }
  body.push(
    text("x [m]", {
      x: px(box.x + box.w / 2),
      y: px(box.y + box.h + 38),
      "text-anchor": "middle",
      "font-size": 12,
      fill: INK,
    }),
  );
  body.push(...legend(seriesList, width - margin.right, 28));
  // stamp the meters-per-pixel factor so equal axis scaling is checkable
  const doc = svgDocument(width, height, body);
  return doc.replace("<svg ", `<svg data-px-per-unit="${pxPerUnit.toFixed(6)}" `);
}

/** |accel| residual over time with the 2-sigma burst threshold marked. */
export function accelNoiseFigure(frames: SensorFrame[]): string {
  const width = 900;
  const height = 430;
  const margin = { top: 48, right: 26, bottom: 46, left: 68 };
  const box: Box = {
    x: margin.left,
    y: margin.top,
    w: width - margin.left - margin.right,
    h: height - margin.top - margin.bottom,
  };
  const noise = accelNoise(frames);
  const threshold = 2 * noise.baselineStd;

  const xDomain = padInterval(extent(noise.t), 0.02);
  const yDomain = padInterval(extent([...noise.residual, threshold, -threshold]), 0.1);
  const xScale = linearScale(xDomain, [box.x, box.x + box.w]);
  const yScale = linearScale(yDomain, [box.y + box.h, box.y]);

  const body: string[] = [background(width, height), title("Accelerometer noise and touchdown impacts")];
  body.push(...gridAndAxes(box, xScale, yScale, { xLabels: true, yLabel: "|accel| - median [m/s^2]" }));

  for (const sign of [1, -1]) {
    const gy = yScale(sign * threshold);
    body.push(
      el("line", {
        x1: px(box.x),
        y1: px(gy),
        x2: px(box.x + box.w),
        y2: px(gy),
        stroke: "#dc2626",
        "stroke-dasharray": "5 4",
        "stroke-width": 1,
        class: "burst-threshold",
      }),
    );
  }
  body.push(
    text("±2× baseline σ", {
      x: px(box.x + box.w - 8),
      y: px(yScale(threshold) - 6),
      "text-anchor": "end",
      "font-size": 11,
      fill: "#dc2626",
    }),
  );

  body.push(
    seriesPolyline(
      { name: "residual", x: noise.t, y: noise.residual, color: "#2563eb", width: 1 },
      xScale,
      yScale,
    ),
  );
  for (const i of noise.burstIndices) {
    body.push(
      el("circle", {
        cx: px(xScale(noise.t[i])),
        cy: px(yScale(noise.residual[i])),
        r: 2.5,
        fill: "#dc2626",
        "fill-opacity": 0.75,
        class: "burst-marker",
      }),
    );
  }

  const ratioLabel = Number.isFinite(noise.peakRatio) ? noise.peakRatio.toFixed(1) : "inf";
  body.push(
    text(`peak = ${ratioLabel}× baseline σ (${noise.burstIndices.length} samples above 2σ)`, {
      x: px(box.x + box.w - 8),
      y: px(box.y + 18),
      "text-anchor": "end",
      "font-size": 12,
      fill: INK,
      class: "burst-summary",
    }),
  );
  body.push(
    text("t [s]", {
      x: px(box.x + box.w / 2),
      y: px(box.y + box.h + 36),
      "text-anchor": "middle",
      "font-size": 12,
      fill: INK,
    }),
  );
  return svgDocument(width, height, body);
}
