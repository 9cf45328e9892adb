import { ErrorSample, FitModel, SchemaError, fitPredict } from "./types.js";
import { DEFAULT_FRAME, SERIES_COLORS, SvgBuilder, fmt, linearScale, logScale, polyline } from "./svg.js";

/** Error-vs-overlap figure: per-t sample points on a log axis plus the
 * fitted single-cut law overlaid as a line per t value. */
export function renderFig2(samples: ErrorSample[], fit: FitModel): string {
  if (samples.length === 0) throw new SchemaError("no samples to plot");
  const positives = samples.filter((s) => s.error > 0);
  if (positives.length === 0) throw new SchemaError("all sample errors are zero; nothing to plot on a log axis");

  const ts = [...new Set(positives.map((s) => s.t))].sort((a, b) => a - b);
  const ells = [...new Set(positives.map((s) => s.ell))].sort((a, b) => a - b);
  const ellLo = ells[0];
  const ellHi = ells[ells.length - 1];
  let errLo = Infinity;
  let errHi = 0;
  for (const s of positives) {
    errLo = Math.min(errLo, s.error);
    errHi = Math.max(errHi, s.error);
  }
  for (const t of ts) {
    for (let ell = ellLo; ell <= ellHi; ell += 1) {
      const v = fitPredict(fit, t, ell);
      errLo = Math.min(errLo, v);
      errHi = Math.max(errHi, v);
    }
  }

  const n = positives[0].n;
  const svg = new SvgBuilder(
    DEFAULT_FRAME,
    `Single-cut decomposition error, ${n}-site chain (fit R2=${fit.r2_log.toFixed(4)})`,
  );
  const { x0, x1, y0, y1 } = svg.plotArea();
  const xScale = linearScale(ellLo - 0.5, ellHi + 0.5, x0, x1);
  const yScale = logScale(errLo / 2, errHi * 2, y0, y1);
  svg.axes(xScale, yScale, "overlap size", "spectral-norm error", true);

  const legend: Array<{ label: string; color: string; dashed?: boolean; marker?: boolean }> = [];
  ts.forEach((t, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    for (const s of positives.filter((p) => p.t === t)) {
      svg.raw(`<circle cx="${fmt(xScale(s.ell))}" cy="${fmt(yScale(s.error))}" r="2.6" fill="${color}" fill-opacity="0.75"/>`);
    }
    const curve: Array<[number, number]> = [];
    const steps = 120;
    for (let i = 0; i <= steps; i += 1) {
      const ell = ellLo + ((ellHi - ellLo) * i) / steps;
      const v = fitPredict(fit, t, ell);
      if (v > 0) curve.push([xScale(ell), yScale(v)]);
    }
    svg.raw(`<path d="${polyline(curve)}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    legend.push({ label: `t = ${t} (samples)`, color, marker: true });
    legend.push({ label: `t = ${t} (fit)`, color });
  });
  svg.legend(legend);
  return svg.render();
}
