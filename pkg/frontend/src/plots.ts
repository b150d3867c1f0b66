// The three figure kinds, each a pure function of parsed CSV rows.

import type { HistRow, ResultsRow } from "./csv.js";
import { estimateThreshold } from "./threshold.js";
import { DEFAULT_BOX, PALETTE, SvgDoc, fmt, linearScale, logScale } from "./svg.js";

export class NoDataError extends Error {}

interface Series {
  label: string;
  color: string;
  rows: ResultsRow[];
}

function seriesByDecoderAndL(rows: ResultsRow[]): Series[] {
  if (rows.length === 0) throw new NoDataError("no data rows in results CSV");
  const groups = new Map<string, ResultsRow[]>();
  for (const r of rows) {
    const key = `${r.decoder} L=${r.L}`;
    const g = groups.get(key);
    if (g) g.push(r);
    else groups.set(key, [r]);
  }
  return [...groups.entries()]
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([label, g], i) => ({
      label,
      color: PALETTE[i % PALETTE.length]!,
      rows: g.slice().sort((x, y) => x.p - y.p),
    }));
}

// floor zero LERs at the half-count convention so log axes stay finite
function floored(r: ResultsRow): number {
  return r.ler > 0 ? r.ler : 0.5 / r.shots;
}

export interface PlotOptions {
  logY?: boolean;
}

export function plotLer(rows: ResultsRow[], opts: PlotOptions = {}): string {
  const logY = opts.logY !== false;
  const series = seriesByDecoderAndL(rows);
  const allP = rows.map((r) => r.p);
  const positives = rows.flatMap((r) => [
    floored(r),
    Math.max(r.ciHi, floored(r)),
    ...(r.ciLo > 0 ? [r.ciLo] : []),
  ]);
  const yMin = Math.min(...positives);
  const doc = new SvgDoc(DEFAULT_BOX, "Logical error rate vs physical error rate");
  const a = doc.plotArea();
  const x = linearScale(Math.min(...allP), Math.max(...allP), a.x0, a.x1);
  const y = logY
    ? logScale(yMin, Math.max(...positives), a.y0, a.y1)
    : linearScale(0, Math.max(...positives), a.y0, a.y1);
  doc.axes(x, y, "physical error rate p", "logical error rate",
    logY ? (v) => v.toExponential(0) : fmt);
  for (const s of series) {
    // Wilson band first so curves draw on top of it; a zero ci_lo is
    // clipped to the axis floor (log scale)
    const band: Array<[number, number]> = [
      ...s.rows.map((r): [number, number] => [x(r.p), y(Math.max(r.ciLo, yMin))]),
      ...s.rows.slice().reverse().map((r): [number, number] => [x(r.p), y(Math.max(r.ciHi, floored(r)))]),
    ];
    doc.polygon(band, s.color, 0.15);
    doc.polyline(s.rows.map((r) => [x(r.p), y(floored(r))]), s.color);
    for (const r of s.rows) doc.circle(x(r.p), y(floored(r)), 2.5, s.color);
  }
  doc.legend(series.map(({ label, color }) => ({ label, color })));
  return doc.render();
}

export function plotThreshold(rows: ResultsRow[], opts: PlotOptions = {}): string {
  if (rows.length === 0) throw new NoDataError("no data rows in results CSV");
  const logY = opts.logY !== false;
  const estimate = estimateThreshold(rows);
  const series = seriesByDecoderAndL(rows);
  const allP = rows.map((r) => r.p);
  const allLer = rows.map(floored);
  const doc = new SvgDoc(DEFAULT_BOX, "Threshold crossing");
  const a = doc.plotArea();
  const x = linearScale(Math.min(...allP), Math.max(...allP), a.x0, a.x1);
  const y = logY
    ? logScale(Math.min(...allLer), Math.max(...allLer), a.y0, a.y1)
    : linearScale(0, Math.max(...allLer), a.y0, a.y1);
  doc.axes(x, y, "physical error rate p", "logical error rate",
    logY ? (v) => v.toExponential(0) : fmt);
  for (const s of series) {
    doc.polyline(s.rows.map((r) => [x(r.p), y(floored(r))]), s.color);
    for (const r of s.rows) doc.circle(x(r.p), y(floored(r)), 2.5, s.color);
  }
  const px = x(estimate.pTh);
  doc.line(px, a.y0, px, a.y1, "#444", "4 3");
  // the marker label carries the crossing to 4 decimals; tests compare it
  // against the CLI's threshold report
  doc.text(px + 4, a.y1 + 12, `p_th = ${estimate.pTh.toFixed(4)}`);
  // the decoder is homogeneous here (the estimator enforces it), so label
  // the curve family by distance alone
  doc.legend(series.map(({ label, color }) => ({ label: label.replace(/^\S+ /, ""), color })));
  return doc.render();
}

export function plotHist(rows: HistRow[]): string {
  if (rows.length === 0) throw new NoDataError("no data rows in histogram CSV");
  const doc = new SvgDoc(DEFAULT_BOX, "Predicted edge probability distribution");
  const a = doc.plotArea();
  const x = linearScale(0, 1, a.x0, a.x1);
  const maxD = Math.max(...rows.map((r) => r.density), 1e-12);
  const y = linearScale(0, maxD, a.y0, a.y1);
  doc.axes(x, y, "predicted probability", "density");
  for (const r of rows) {
    if (r.density <= 0) continue;
    doc.rect(x(r.binLo), y(r.density), x(r.binHi) - x(r.binLo), a.y0 - y(r.density), "#1f77b4", "hist-bar");
  }
  return doc.render();
}

export { estimateThreshold, fmt };
