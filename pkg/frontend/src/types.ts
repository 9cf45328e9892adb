/** Wire formats shared with the lrsim CLI, with strict validation. */

export interface ErrorSample {
  n: number;
  t: number;
  a: number;
  ell: number;
  error: number;
}

export interface FitModel {
  ampl: number;
  vel: number;
  offset: number;
  r2_log: number;
}

export interface ResourceReport {
  n: number;
  T: number;
  epsilon: number;
  ell: number;
  t_block: number;
  m_blocks: number;
  q_per_block: number;
  queries_total: number;
  gate_estimate: number;
  reference_full_qsp: number;
  error_budget: {
    eps_lr_total: number;
    eps_box_total: number;
    headroom: number;
  };
}

export class SchemaError extends Error {}

function requireFinite(value: unknown, label: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new SchemaError(`${label} must be a finite number, got ${JSON.stringify(value)}`);
  }
  return value;
}

function requireExactKeys(doc: object, keys: string[], label: string): void {
  const got = Object.keys(doc).sort();
  const want = [...keys].sort();
  if (got.length !== want.length || got.some((k, i) => k !== want[i])) {
    throw new SchemaError(`${label} must have keys {${want.join(",")}}, got {${got.join(",")}}`);
  }
}

export function parseFitModel(doc: unknown): FitModel {
  if (typeof doc !== "object" || doc === null) throw new SchemaError("fit document must be an object");
  requireExactKeys(doc, ["ampl", "vel", "offset", "r2_log"], "fit document");
  const d = doc as Record<string, unknown>;
  const model = {
    ampl: requireFinite(d.ampl, "ampl"),
    vel: requireFinite(d.vel, "vel"),
    offset: requireFinite(d.offset, "offset"),
    r2_log: requireFinite(d.r2_log, "r2_log"),
  };
  if (model.ampl <= 0 || model.vel <= 0) throw new SchemaError("ampl and vel must be positive");
  return model;
}

export function parseResourceReport(doc: unknown): ResourceReport {
  if (typeof doc !== "object" || doc === null) throw new SchemaError("report must be an object");
  requireExactKeys(
    doc,
    [
      "n",
      "T",
      "epsilon",
      "ell",
      "t_block",
      "m_blocks",
      "q_per_block",
      "queries_total",
      "gate_estimate",
      "reference_full_qsp",
      "error_budget",
    ],
    "report",
  );
  const d = doc as Record<string, unknown>;
  const budget = d.error_budget;
  if (typeof budget !== "object" || budget === null) throw new SchemaError("error_budget must be an object");
  requireExactKeys(budget, ["eps_lr_total", "eps_box_total", "headroom"], "error_budget");
  const b = budget as Record<string, unknown>;
  return {
    n: requireFinite(d.n, "n"),
    T: requireFinite(d.T, "T"),
    epsilon: requireFinite(d.epsilon, "epsilon"),
    ell: requireFinite(d.ell, "ell"),
    t_block: requireFinite(d.t_block, "t_block"),
    m_blocks: requireFinite(d.m_blocks, "m_blocks"),
    q_per_block: requireFinite(d.q_per_block, "q_per_block"),
    queries_total: requireFinite(d.queries_total, "queries_total"),
    gate_estimate: requireFinite(d.gate_estimate, "gate_estimate"),
    reference_full_qsp: requireFinite(d.reference_full_qsp, "reference_full_qsp"),
    error_budget: {
      eps_lr_total: requireFinite(b.eps_lr_total, "eps_lr_total"),
      eps_box_total: requireFinite(b.eps_box_total, "eps_box_total"),
      headroom: requireFinite(b.headroom, "headroom"),
    },
  };
}

/** Single-cut error law used for the fit overlay. */
export function fitPredict(model: FitModel, t: number, ell: number): number {
  const x = ell + model.offset;
  if (x <= 0) throw new SchemaError(`fit model invalid at ell=${ell}`);
  return model.ampl * Math.pow((t * model.vel) / x, x);
}
