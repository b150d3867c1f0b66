// Threshold crossing from a results CSV: adjacent code distances compared
// pairwise on log(LER), linear interpolation at the sign change. This is
// the same estimate the CLI's threshold command reports, recomputed from
// the file alone so figures stay decoupled from the primary build.

import type { ResultsRow } from "./csv.js";

export class NoCrossingError extends Error {}

export interface ThresholdEstimate {
  pTh: number;
  spread: number;
  crossings: number[];
  degeneratePairs: number;
}

function groupCurves(rows: ResultsRow[]): { ps: number[]; byL: Map<number, Map<number, ResultsRow>> } {
  if (rows.length === 0) throw new NoCrossingError("no data");
  const tag = (r: ResultsRow) => `${r.decoder}/${r.code}/${r.noise}`;
  const first = tag(rows[0]!);
  const byL = new Map<number, Map<number, ResultsRow>>();
  for (const r of rows) {
    if (tag(r) !== first) {
      throw new Error(`mixed curves: ${tag(r)} vs ${first}`);
    }
    let curve = byL.get(r.L);
    if (!curve) byL.set(r.L, (curve = new Map()));
    if (curve.has(r.p)) throw new Error(`duplicate grid cell L=${r.L} p=${r.p}`);
    curve.set(r.p, r);
  }
  if (byL.size < 2) throw new Error("need at least 2 code distances");
  let shared: number[] | null = null;
  for (const curve of byL.values()) {
    if (shared === null) shared = [...curve.keys()];
    else shared = shared.filter((p) => curve.has(p));
  }
  const ps = (shared ?? []).slice().sort((a, b) => a - b);
  if (ps.length < 4) throw new Error("need at least 4 shared p-points");
  return { ps, byL };
}

function logCurve(curve: Map<number, ResultsRow>, ps: number[]): number[] {
  return ps.map((p) => {
    const r = curve.get(p)!;
    // zero-failure points get the standard half-count floor for the log
    const ler = r.ler > 0 ? r.ler : 0.5 / r.shots;
    return Math.log(ler);
  });
}

function pairCrossing(ps: number[], lo: number[], hi: number[]): number | null {
  const d = ps.map((_, k) => hi[k]! - lo[k]!);
  for (let k = 0; k < ps.length - 1; k++) {
    if (d[k] === 0) return ps[k]!;
    if (d[k]! * d[k + 1]! < 0) {
      return ps[k]! + (d[k]! / (d[k]! - d[k + 1]!)) * (ps[k + 1]! - ps[k]!);
    }
  }
  if (d[ps.length - 1] === 0) return ps[ps.length - 1]!;
  return null;
}

export function estimateThreshold(rows: ResultsRow[]): ThresholdEstimate {
  const { ps, byL } = groupCurves(rows);
  const Ls = [...byL.keys()].sort((a, b) => a - b);
  const crossings: number[] = [];
  let degenerate = 0;
  for (let i = 0; i < Ls.length - 1; i++) {
    const lo = logCurve(byL.get(Ls[i]!)!, ps);
    const hi = logCurve(byL.get(Ls[i + 1]!)!, ps);
    if (lo.every((v, k) => v === hi[k])) {
      degenerate += 1;
      continue;
    }
    const c = pairCrossing(ps, lo, hi);
    if (c !== null) crossings.push(c);
  }
  if (crossings.length === 0) {
    if (degenerate > 0) {
      throw new NoCrossingError("distance curves coincide; crossing is ill-defined");
    }
    throw new NoCrossingError(
      `no crossing inside [${ps[0]}, ${ps[ps.length - 1]}]`,
    );
  }
  const pTh = crossings.reduce((a, b) => a + b, 0) / crossings.length;
  const spread = (Math.max(...crossings) - Math.min(...crossings)) / 2;
  return { pTh, spread, crossings, degeneratePairs: degenerate };
}
