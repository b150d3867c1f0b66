import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { CsvError, parseHistCsv, parseResultsCsv } from "../src/csv.js";
import { main, parseArgs, render } from "../src/cli.js";
import { NoDataError, plotHist, plotLer, plotThreshold } from "../src/plots.js";
import { NoCrossingError, estimateThreshold } from "../src/threshold.js";

const FIXTURES = fileURLToPath(new URL("fixtures", import.meta.url));
const read = (name: string) => readFileSync(join(FIXTURES, name), "utf8");

function legendLabels(svg: string): string[] {
  const out: string[] = [];
  const re = /class="legend-label"[^>]*>([^<]*)</g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(svg)) !== null) out.push(m[1]!);
  return out;
}

describe("results csv", () => {
  it("parses the evaluator output", () => {
    const rows = parseResultsCsv(read("threshold_results.csv"));
    expect(rows).toHaveLength(8);
    expect(rows[0]).toMatchObject({ decoder: "mwpm_manhattan", code: "toric", L: 4, p: 0.08, shots: 400 });
    expect(rows[0]!.ler).toBeCloseTo(0.355, 12);
  });

  it("rejects a wrong header with row 1", () => {
    expect(() => parseResultsCsv("decoder,code,L\nx,y,2\n")).toThrowError(/row 1/);
  });

  it("rejects a short row by number", () => {
    const text = read("threshold_results.csv").trimEnd() + "\nmwpm_manhattan,toric,4\n";
    expect(() => parseResultsCsv(text)).toThrowError(/row 10/);
  });

  it("rejects non-numeric fields by row", () => {
    const bad = "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\na,toric,four,independent,0.1,10,1,0.1,0.0,0.2\n";
    try {
      parseResultsCsv(bad);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(CsvError);
      expect((err as CsvError).message).toMatch(/row 2/);
    }
  });

  it("rejects out-of-range ler", () => {
    const bad = "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\na,toric,4,independent,0.1,10,1,1.5,0.0,0.2\n";
    expect(() => parseResultsCsv(bad)).toThrowError(/row 2/);
  });
});

describe("histogram csv", () => {
  it("parses bins", () => {
    const rows = parseHistCsv(read("histogram.csv"));
    expect(rows).toHaveLength(20);
    const mass = rows.reduce((s, r) => s + r.density * (r.binHi - r.binLo), 0);
    expect(mass).toBeCloseTo(1.0, 9);
  });

  it("rejects inverted bins by row", () => {
    expect(() => parseHistCsv("bin_lo,bin_hi,density\n0.1,0.05,1.0\n")).toThrowError(/row 2/);
  });
});

describe("plot_ler", () => {
  it("errors explicitly on an empty results csv", () => {
    const rows = parseResultsCsv(read("empty_results.csv"));
    expect(rows).toHaveLength(0);
    expect(() => plotLer(rows)).toThrowError(NoDataError);
    expect(() => plotLer(rows)).toThrowError(/no data/);
  });

  it("draws one legend entry per (decoder, L) pair", () => {
    const svg = plotLer(parseResultsCsv(read("two_decoder_results.csv")));
    // two decoders x two distances
    expect(legendLabels(svg)).toEqual([
      "mwpm_manhattan L=4",
      "mwpm_manhattan L=6",
      "nmwpm L=4",
      "nmwpm L=6",
    ]);
  });

  it("survives ler=0 rows via the 0.5/shots floor", () => {
    const text =
      "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\n" +
      "mwpm_manhattan,toric,4,independent,0.01,1000,0,0.0,0.0,0.003682083896865672\n" +
      "mwpm_manhattan,toric,4,independent,0.05,1000,12,0.012,0.0069,0.0208\n";
    const svg = plotLer(parseResultsCsv(text));
    expect(svg).toContain("<circle");
    expect(svg).not.toContain("NaN");
    expect(svg).not.toContain("Infinity");
  });

  it("renders identical bytes on rerun", () => {
    const rows = parseResultsCsv(read("two_decoder_results.csv"));
    expect(plotLer(rows)).toBe(plotLer(rows));
  });
});

describe("threshold estimate", () => {
  it("matches the evaluator report to 3 decimal places", () => {
    const report = Object.fromEntries(
      read("threshold_report.txt")
        .trim()
        .split("\n")
        .map((line) => line.split("=", 2) as [string, string]),
    );
    const want = Number(report["p_th"]);
    const est = estimateThreshold(parseResultsCsv(read("threshold_results.csv")));
    expect(est.pTh.toFixed(3)).toBe(want.toFixed(3));
    // the port mirrors the evaluator's arithmetic, so agreement is far tighter
    expect(Math.abs(est.pTh - want)).toBeLessThan(1e-12);
  });

  it("recovers the crossing of synthetic log-linear curves", () => {
    const est = estimateThreshold(parseResultsCsv(read("synthetic_threshold.csv")));
    expect(est.pTh).toBeCloseTo(0.103, 9);
    expect(est.crossings).toHaveLength(2); // adjacent pairs (4,6) and (6,8)
    expect(est.degeneratePairs).toBe(0);
  });

  it("needs at least two distances", () => {
    const rows = parseResultsCsv(read("synthetic_threshold.csv")).filter((r) => r.L === 4);
    expect(() => estimateThreshold(rows)).toThrowError(/2 code distances/);
  });

  it("rejects mixed decoders", () => {
    const rows = parseResultsCsv(read("two_decoder_results.csv"));
    expect(() => estimateThreshold(rows)).toThrowError(/mixed curves/);
  });

  it("reports curves that never cross", () => {
    // parallel curves: same slope, different intercepts
    let text = "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\n";
    for (const [L, a] of [
      [4, 0.02],
      [6, 0.01],
    ] as const) {
      for (const p of [0.08, 0.09, 0.1, 0.11]) {
        const ler = a * Math.exp(20 * (p - 0.08));
        text += `mwpm_manhattan,toric,${L},independent,${p},100000,${Math.round(ler * 1e5)},${ler},${ler * 0.97},${ler * 1.03}\n`;
      }
    }
    expect(() => estimateThreshold(parseResultsCsv(text))).toThrowError(NoCrossingError);
  });
});

describe("plot_threshold", () => {
  it("marks the crossing with the reported value", () => {
    const rows = parseResultsCsv(read("threshold_results.csv"));
    const est = estimateThreshold(rows);
    const svg = plotThreshold(rows);
    expect(svg).toContain(`p_th = ${est.pTh.toFixed(4)}`);
    expect(legendLabels(svg)).toEqual(["L=4", "L=6"]);
  });

  it("marks the synthetic crossing near 0.103", () => {
    const svg = plotThreshold(parseResultsCsv(read("synthetic_threshold.csv")));
    expect(svg).toContain("p_th = 0.1030");
  });
});

describe("plot_hist", () => {
  it("draws one bar per non-empty bin", () => {
    const rows = parseHistCsv(read("histogram.csv"));
    const svg = plotHist(rows);
    const bars = svg.match(/class="hist-bar"/g) ?? [];
    expect(bars.length).toBe(rows.filter((r) => r.density > 0).length);
  });

  it("errors on an empty histogram", () => {
    expect(() => plotHist([])).toThrowError(/no data/);
  });
});

describe("cli", () => {
  it("parses flags", () => {
    const args = parseArgs(["threshold", "--in", "a.csv", "--in", "b.csv", "--out", "fig.svg"]);
    expect(args).toEqual({ kind: "threshold", inputs: ["a.csv", "b.csv"], out: "fig.svg", logY: true });
    expect(parseArgs(["ler_curves", "--in", "a.csv", "--out", "f.svg", "--linear-y"]).logY).toBe(false);
  });

  it("rejects missing --out and unknown flags", () => {
    expect(() => parseArgs(["ler_curves", "--in", "a.csv"])).toThrowError(/--out/);
    expect(() => parseArgs(["ler_curves", "--frames", "3"])).toThrowError(/unknown flag/);
    expect(() => parseArgs([])).toThrowError(/usage/);
  });

  it("rejects unknown kinds", () => {
    expect(() => render({ kind: "scatter", logY: true }, ["x"])).toThrowError(/unknown figure kind/);
  });

  it("renders a linear-y variant deterministically", () => {
    const rows = read("two_decoder_results.csv");
    const svg = render({ kind: "ler_curves", logY: false }, [rows]);
    expect(svg).toContain("<svg");
    expect(svg).toBe(render({ kind: "ler_curves", logY: false }, [rows]));
  });

  it("writes an svg and exits 0 on success", () => {
    const dir = mkdtempSync(join(tmpdir(), "nmwpm-plot-"));
    const out = join(dir, "fig.svg");
    const rc = main(["threshold", "--in", join(FIXTURES, "threshold_results.csv"), "--out", out]);
    expect(rc).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("p_th = 0.1261");
    // rerun overwrites with identical bytes
    expect(main(["threshold", "--in", join(FIXTURES, "threshold_results.csv"), "--out", out])).toBe(0);
    expect(readFileSync(out, "utf8")).toBe(svg);
  });

  it("exits nonzero with the row number on malformed input", () => {
    const dir = mkdtempSync(join(tmpdir(), "nmwpm-plot-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi\noops\n");
    expect(main(["ler_curves", "--in", bad, "--out", join(dir, "fig.svg")])).toBe(1);
  });

  it("exits nonzero on an empty results csv", () => {
    const dir = mkdtempSync(join(tmpdir(), "nmwpm-plot-"));
    const rc = main(["ler_curves", "--in", join(FIXTURES, "empty_results.csv"), "--out", join(dir, "fig.svg")]);
    expect(rc).toBe(1);
  });
});
