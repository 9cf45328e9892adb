import { ErrorSample, SchemaError } from "./types.js";

const HEADER = "n,t,a,ell,error";

/** Strict parser for the sweep CSV: exact header, five numeric columns. */
export function parseSamplesCsv(text: string): ErrorSample[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) throw new SchemaError("empty CSV");
  if (lines[0] !== HEADER) {
    throw new SchemaError(`CSV header must be "${HEADER}", got "${lines[0]}"`);
  }
  const out: ErrorSample[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== 5) throw new SchemaError(`expected 5 columns, got "${line}"`);
    const nums = cells.map((c) => Number(c));
    if (nums.some((v) => !Number.isFinite(v))) throw new SchemaError(`non-numeric cell in "${line}"`);
    const [n, t, a, ell, error] = nums;
    if (!Number.isInteger(n) || !Number.isInteger(a) || !Number.isInteger(ell)) {
      throw new SchemaError(`n, a, ell must be integers in "${line}"`);
    }
    if (error < 0) throw new SchemaError(`negative error in "${line}"`);
    out.push({ n, t, a, ell, error });
  }
  if (out.length === 0) throw new SchemaError("CSV has a header but no rows");
  return out;
}
