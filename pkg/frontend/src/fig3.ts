import { ResourceReport, SchemaError } from "./types.js";
import { DEFAULT_FRAME, SERIES_COLORS, SvgBuilder, fmt, logScale, polyline } from "./svg.js";

/** Gate-cost-vs-size figure: block-decomposed estimates against the
 * whole-system reference, log-log, with a cubic guide anchored at the
 * first reference point. */
export function renderFig3(reports: ResourceReport[]): string {
  if (reports.length === 0) throw new SchemaError("no reports to plot");
  const sorted = [...reports].sort((a, b) => a.n - b.n);
  const ns = sorted.map((r) => r.n);
  if (new Set(ns).size !== ns.length) throw new SchemaError("duplicate chain sizes in reports");

  const values = sorted.flatMap((r) => [r.gate_estimate, r.reference_full_qsp]);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const ell = sorted[0].ell;
  const eps = sorted[0].epsilon;

  const svg = new SvgBuilder(
    DEFAULT_FRAME,
    `Gate-cost scaling at overlap ${ell}, accuracy ${eps} (T = n)`,
  );
  const { x0, x1, y0, y1 } = svg.plotArea();
  const xScale = logScale(ns[0] / 1.2, ns[ns.length - 1] * 1.2, x0, x1);
  const yScale = logScale(lo / 3, hi * 3, y0, y1);
  svg.axes(xScale, yScale, "chain length n", "logical gate units", true);

  const cubic: Array<[number, number]> = [];
  const anchor = sorted[0].reference_full_qsp;
  for (let i = 0; i <= 100; i += 1) {
    const n = ns[0] * Math.pow(ns[ns.length - 1] / ns[0], i / 100);
    cubic.push([xScale(n), yScale(anchor * Math.pow(n / ns[0], 3))]);
  }
  svg.raw(`<path d="${polyline(cubic)}" fill="none" stroke="#888888" stroke-width="1.2" stroke-dasharray="5 3"/>`);

  const blockColor = SERIES_COLORS[0];
  const refColor = SERIES_COLORS[1];
  svg.raw(
    `<path d="${polyline(sorted.map((r) => [xScale(r.n), yScale(r.gate_estimate)]))}" fill="none" stroke="${blockColor}" stroke-width="1.5"/>`,
  );
  svg.raw(
    `<path d="${polyline(sorted.map((r) => [xScale(r.n), yScale(r.reference_full_qsp)]))}" fill="none" stroke="${refColor}" stroke-width="1.5"/>`,
  );
  for (const r of sorted) {
    svg.raw(`<circle cx="${fmt(xScale(r.n))}" cy="${fmt(yScale(r.gate_estimate))}" r="3" fill="${blockColor}"/>`);
    svg.raw(`<rect x="${fmt(xScale(r.n) - 3)}" y="${fmt(yScale(r.reference_full_qsp) - 3)}" width="6" height="6" fill="${refColor}"/>`);
  }
  svg.legend([
    { label: "block decomposition", color: blockColor, marker: true },
    { label: "whole-system QSP", color: refColor, marker: true },
    { label: "cubic guide", color: "#888888", dashed: true },
  ]);
  return svg.render();
}
