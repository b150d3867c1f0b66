// Strict reader for the evaluator's CSV contracts. The files are plain
// comma-separated text without quoting, so a real CSV dependency would buy
// nothing; what matters here is precise errors that name the offending row.

export class CsvError extends Error {
  constructor(message: string, readonly row: number) {
    super(`row ${row}: ${message}`);
    this.name = "CsvError";
  }
}

export interface ResultsRow {
  decoder: string;
  code: string;
  L: number;
  noise: string;
  p: number;
  shots: number;
  failures: number;
  ler: number;
  ciLo: number;
  ciHi: number;
}

export interface HistRow {
  binLo: number;
  binHi: number;
  density: number;
}

export const RESULTS_HEADER =
  "decoder,code,L,noise,p,shots,failures,ler,ci_lo,ci_hi";
export const HIST_HEADER = "bin_lo,bin_hi,density";

function splitRows(text: string): string[] {
  // both \n and \r\n endings; a trailing newline is not an empty row
  const rows = text.split(/\r?\n/);
  while (rows.length > 0 && rows[rows.length - 1] === "") rows.pop();
  return rows;
}

function num(field: string, name: string, row: number): number {
  if (field.trim() === "") throw new CsvError(`empty ${name}`, row);
  const v = Number(field);
  if (!Number.isFinite(v)) {
    throw new CsvError(`${name} is not a finite number: ${field}`, row);
  }
  return v;
}

function int(field: string, name: string, row: number): number {
  const v = num(field, name, row);
  if (!Number.isInteger(v)) throw new CsvError(`${name} must be an integer: ${field}`, row);
  return v;
}

export function parseResultsCsv(text: string): ResultsRow[] {
  const rows = splitRows(text);
  if (rows.length === 0 || rows[0] !== RESULTS_HEADER) {
    throw new CsvError(`expected header "${RESULTS_HEADER}"`, 1);
  }
  const out: ResultsRow[] = [];
  for (let i = 1; i < rows.length; i++) {
    const rowNo = i + 1;
    const f = rows[i]!.split(",");
    if (f.length !== 10) {
      throw new CsvError(`expected 10 fields, got ${f.length}`, rowNo);
    }
    const r: ResultsRow = {
      decoder: f[0]!,
      code: f[1]!,
      L: int(f[2]!, "L", rowNo),
      noise: f[3]!,
      p: num(f[4]!, "p", rowNo),
      shots: int(f[5]!, "shots", rowNo),
      failures: int(f[6]!, "failures", rowNo),
      ler: num(f[7]!, "ler", rowNo),
      ciLo: num(f[8]!, "ci_lo", rowNo),
      ciHi: num(f[9]!, "ci_hi", rowNo),
    };
    if (r.shots < 1) throw new CsvError(`shots must be >= 1`, rowNo);
    if (r.ler < 0 || r.ler > 1) throw new CsvError(`ler out of [0,1]`, rowNo);
    out.push(r);
  }
  return out;
}

export function parseHistCsv(text: string): HistRow[] {
  const rows = splitRows(text);
  if (rows.length === 0 || rows[0] !== HIST_HEADER) {
    throw new CsvError(`expected header "${HIST_HEADER}"`, 1);
  }
  const out: HistRow[] = [];
  for (let i = 1; i < rows.length; i++) {
    const rowNo = i + 1;
    const f = rows[i]!.split(",");
    if (f.length !== 3) {
      throw new CsvError(`expected 3 fields, got ${f.length}`, rowNo);
    }
    const r: HistRow = {
      binLo: num(f[0]!, "bin_lo", rowNo),
      binHi: num(f[1]!, "bin_hi", rowNo),
      density: num(f[2]!, "density", rowNo),
    };
    if (r.binHi <= r.binLo) throw new CsvError("bin_hi <= bin_lo", rowNo);
    if (r.density < 0) throw new CsvError("negative density", rowNo);
    out.push(r);
  }
  return out;
}
