import type { Curve } from "./csv.js";

export interface Axes {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
  xLabel: string;
  yLabel: string;
}

const WIDTH = 640;
const HEIGHT = 480;
const MARGIN = { top: 24, right: 24, bottom: 48, left: 56 };

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const plotW = WIDTH - MARGIN.left - MARGIN.right;
const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

function sx(axes: Axes, x: number): number {
  return MARGIN.left + ((x - axes.xMin) / (axes.xMax - axes.xMin)) * plotW;
}

function sy(axes: Axes, y: number): number {
  return MARGIN.top + plotH - ((y - axes.yMin) / (axes.yMax - axes.yMin)) * plotH;
}

function fmtTick(v: number): string {
  return Number(v.toFixed(6)).toString();
}

function ticks(min: number, max: number, count = 5): number[] {
  const out: number[] = [];
  for (let i = 0; i < count; i++) {
    out.push(min + ((max - min) * i) / (count - 1));
  }
  return out;
}

/**
 * Polyline path for one curve, clipped to the axis box: points outside the
 * y-range break the line instead of being drawn (the converse-rate curves
 * diverge inside the x-domain).
 */
export function curvePath(curve: Curve, axes: Axes): string {
  const parts: string[] = [];
  let pen = false;
  for (const p of curve.points) {
    const inside =
      p.x >= axes.xMin - 1e-12 &&
      p.x <= axes.xMax + 1e-12 &&
      p.y >= axes.yMin - 1e-9 &&
      p.y <= axes.yMax + 1e-9;
    if (!inside) {
      pen = false;
      continue;
    }
    const cmd = pen ? "L" : "M";
    parts.push(`${cmd}${sx(axes, p.x).toFixed(2)},${sy(axes, p.y).toFixed(2)}`);
    pen = true;
  }
  return parts.join(" ");
}

function axisLines(axes: Axes): string {
  const pieces: string[] = [];
  const x0 = MARGIN.left;
  const x1 = MARGIN.left + plotW;
  const y0 = MARGIN.top;
  const y1 = MARGIN.top + plotH;
  pieces.push(
    `<rect x="${x0}" y="${y0}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of ticks(axes.xMin, axes.xMax)) {
    const px = sx(axes, t);
    pieces.push(`<line x1="${px}" y1="${y1}" x2="${px}" y2="${y1 + 5}" stroke="#333"/>`);
    pieces.push(
      `<text x="${px}" y="${y1 + 20}" font-size="12" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of ticks(axes.yMin, axes.yMax)) {
    const py = sy(axes, t);
    pieces.push(`<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    pieces.push(
      `<text x="${x0 - 8}" y="${py + 4}" font-size="12" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  pieces.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 8}" font-size="13" text-anchor="middle">${axes.xLabel}</text>`,
  );
  pieces.push(
    `<text x="14" y="${MARGIN.top + plotH / 2}" font-size="13" text-anchor="middle" transform="rotate(-90 14 ${MARGIN.top + plotH / 2})">${axes.yLabel}</text>`,
  );
  return pieces.join("\n");
}

function legend(curves: Curve[]): string {
  const pieces: string[] = [];
  const x = MARGIN.left + 12;
  let y = MARGIN.top + 16;
  for (let i = 0; i < curves.length; i++) {
    const color = PALETTE[i % PALETTE.length];
    pieces.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 24}" y2="${y - 4}" stroke="${color}" stroke-width="2"/>`,
    );
    pieces.push(
      `<text x="${x + 30}" y="${y}" font-size="12" class="legend-label">${curves[i].id}</text>`,
    );
    y += 18;
  }
  return pieces.join("\n");
}

/** Assemble the complete SVG document for a set of curves on fixed axes. */
export function renderSvg(curves: Curve[], axes: Axes): string {
  const paths = curves
    .map((c, i) => {
      const color = PALETTE[i % PALETTE.length];
      return `<path d="${curvePath(c, axes)}" fill="none" stroke="${color}" stroke-width="1.8" data-function="${c.id}"/>`;
    })
    .join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    axisLines(axes),
    paths,
    legend(curves),
    "</svg>",
    "",
  ].join("\n");
}
