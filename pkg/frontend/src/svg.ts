// Minimal deterministic SVG output. No DOM, no timestamps, no randomness:
// the same inputs always serialize to the same bytes.

export interface Box {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export const DEFAULT_BOX: Box = {
  width: 640,
  height: 440,
  margin: { top: 28, right: 24, bottom: 52, left: 64 },
};

export type Scale = { (v: number): number; ticks: number[] };

export function fmt(v: number): string {
  // fixed, locale-free formatting so output bytes are stable
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return String(Math.round(v * 1e4) / 1e4);
  }
  return v.toExponential(2);
}

function ticksLinear(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / (n - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= n - 1) ?? 10 * mag;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += step) {
    out.push(Math.round(v / step) * step);
  }
  return out;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const s = ((v: number) => outLo + ((v - lo) / span) * (outHi - outLo)) as Scale;
  s.ticks = ticksLinear(lo, hi);
  return s;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (!(lo > 0) || !(hi > 0)) throw new Error("log scale needs positive bounds");
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const s = ((v: number) => outLo + ((Math.log10(v) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi + 1e-9); e++) ticks.push(Math.pow(10, e));
  s.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  return s;
}

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly box: Box, title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${box.width}" ` +
        `height="${box.height}" viewBox="0 0 ${box.width} ${box.height}" ` +
        `font-family="sans-serif" font-size="12">`,
      `<rect width="${box.width}" height="${box.height}" fill="white"/>`,
      `<text x="${box.width / 2}" y="18" text-anchor="middle" font-size="14">${esc(title)}</text>`,
    );
  }

  plotArea(): { x0: number; x1: number; y0: number; y1: number } {
    const { width, height, margin } = this.box;
    // y0 is the bottom of the plot (SVG y grows downward)
    return { x0: margin.left, x1: width - margin.right, y0: height - margin.bottom, y1: margin.top };
  }

  axes(x: Scale, y: Scale, xLabel: string, yLabel: string, fmtY: (v: number) => string = fmt): void {
    const a = this.plotArea();
    this.parts.push(
      `<line x1="${a.x0}" y1="${a.y0}" x2="${a.x1}" y2="${a.y0}" stroke="black"/>`,
      `<line x1="${a.x0}" y1="${a.y0}" x2="${a.x0}" y2="${a.y1}" stroke="black"/>`,
    );
    for (const t of x.ticks) {
      const px = x(t);
      if (px < a.x0 - 0.5 || px > a.x1 + 0.5) continue;
      this.parts.push(
        `<line x1="${r2(px)}" y1="${a.y0}" x2="${r2(px)}" y2="${a.y0 + 5}" stroke="black"/>`,
        `<text x="${r2(px)}" y="${a.y0 + 18}" text-anchor="middle">${fmt(t)}</text>`,
      );
    }
    for (const t of y.ticks) {
      const py = y(t);
      if (py > a.y0 + 0.5 || py < a.y1 - 0.5) continue;
      this.parts.push(
        `<line x1="${a.x0 - 5}" y1="${r2(py)}" x2="${a.x0}" y2="${r2(py)}" stroke="black"/>`,
        `<text x="${a.x0 - 8}" y="${r2(py + 4)}" text-anchor="end">${fmtY(t)}</text>`,
      );
    }
    const cx = (a.x0 + a.x1) / 2;
    const cy = (a.y0 + a.y1) / 2;
    this.parts.push(
      `<text x="${cx}" y="${this.box.height - 12}" text-anchor="middle">${esc(xLabel)}</text>`,
      `<text x="16" y="${cy}" text-anchor="middle" transform="rotate(-90 16 ${cy})">${esc(yLabel)}</text>`,
    );
  }

  polyline(points: Array<[number, number]>, color: string, dash = ""): void {
    const d = points.map(([px, py]) => `${r2(px)},${r2(py)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.5"${dashAttr}/>`,
    );
  }

  polygon(points: Array<[number, number]>, fill: string, opacity: number): void {
    const d = points.map(([px, py]) => `${r2(px)},${r2(py)}`).join(" ");
    this.parts.push(`<polygon points="${d}" fill="${fill}" fill-opacity="${opacity}"/>`);
  }

  circle(px: number, py: number, rad: number, color: string): void {
    this.parts.push(`<circle cx="${r2(px)}" cy="${r2(py)}" r="${rad}" fill="${color}"/>`);
  }

  rect(px: number, py: number, w: number, h: number, fill: string, cls = ""): void {
    const clsAttr = cls ? ` class="${cls}"` : "";
    this.parts.push(
      `<rect x="${r2(px)}" y="${r2(py)}" width="${r2(w)}" height="${r2(h)}" fill="${fill}" stroke="black" stroke-width="0.5"${clsAttr}/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, color: string, dash = ""): void {
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" stroke="${color}"${dashAttr}/>`,
    );
  }

  text(px: number, py: number, s: string, anchor = "start"): void {
    this.parts.push(`<text x="${r2(px)}" y="${r2(py)}" text-anchor="${anchor}">${esc(s)}</text>`);
  }

  legend(entries: Array<{ label: string; color: string }>): void {
    const a = this.plotArea();
    entries.forEach((e, i) => {
      const y = a.y1 + 14 + 16 * i;
      this.parts.push(
        `<line x1="${a.x1 - 150}" y1="${y - 4}" x2="${a.x1 - 126}" y2="${y - 4}" stroke="${e.color}" stroke-width="2" class="legend-line"/>`,
        `<text x="${a.x1 - 120}" y="${y}" class="legend-label">${esc(e.label)}</text>`,
      );
    });
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function r2(v: number): number {
  return Math.round(v * 100) / 100;
}
