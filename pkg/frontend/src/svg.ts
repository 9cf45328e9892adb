/** Minimal deterministic SVG plotting: scales, axes, paths, markers.
 *
 * Coordinates are formatted with fixed precision so byte-identical output
 * follows from identical input (no timestamps, no randomness).
 */

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = { width: 640, height: 440, left: 64, right: 200, top: 36, bottom: 52 };

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function fmt(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  (value: number): number;
  ticks: number[];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const f = ((value: number) => outLo + ((value - lo) / span) * (outHi - outLo)) as Scale;
  const step = tickStep(lo, hi);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9; v += step) ticks.push(Number(v.toFixed(9)));
  f.ticks = ticks;
  return f;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (lo <= 0 || hi <= 0) throw new Error("log scale requires positive bounds");
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const f = ((value: number) => outLo + ((Math.log10(value) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let d = Math.ceil(llo - 1e-9); d <= Math.floor(lhi + 1e-9); d += 1) ticks.push(Math.pow(10, d));
  f.ticks = ticks;
  return f;
}

function tickStep(lo: number, hi: number): number {
  const raw = (hi - lo) / 6 || 1;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const nice = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return nice * mag;
}

export function polyline(points: Array<[number, number]>): string {
  return points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`).join(" ");
}

export function expTickLabel(value: number): string {
  const d = Math.round(Math.log10(value));
  if (d >= -2 && d <= 3) {
    return Number(value.toPrecision(3)).toString();
  }
  return `1e${d}`;
}

export class SvgBuilder {
  private parts: string[] = [];

  constructor(readonly frame: Frame, title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${frame.width}" height="${frame.height}" fill="#ffffff"/>`,
      `<text x="${fmt(frame.width / 2)}" y="22" text-anchor="middle" font-size="14">${escapeXml(title)}</text>`,
    );
  }

  plotArea(): { x0: number; x1: number; y0: number; y1: number } {
    const { width, height, left, right, top, bottom } = this.frame;
    return { x0: left, x1: width - right, y0: height - bottom, y1: top };
  }

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  axes(xScale: Scale, yScale: Scale, xLabel: string, yLabel: string, yLog: boolean): void {
    const { x0, x1, y0, y1 } = this.plotArea();
    this.parts.push(`<rect x="${fmt(x0)}" y="${fmt(y1)}" width="${fmt(x1 - x0)}" height="${fmt(y0 - y1)}" fill="none" stroke="#000000" stroke-width="1"/>`);
    for (const tick of xScale.ticks) {
      const x = xScale(tick);
      if (x < x0 - 0.5 || x > x1 + 0.5) continue;
      this.parts.push(
        `<line x1="${fmt(x)}" y1="${fmt(y0)}" x2="${fmt(x)}" y2="${fmt(y0 + 5)}" stroke="#000000"/>`,
        `<text x="${fmt(x)}" y="${fmt(y0 + 18)}" text-anchor="middle" font-size="11">${Number(tick.toPrecision(6))}</text>`,
      );
    }
    for (const tick of yScale.ticks) {
      const y = yScale(tick);
      if (y > y0 + 0.5 || y < y1 - 0.5) continue;
      const label = yLog ? expTickLabel(tick) : Number(tick.toPrecision(6)).toString();
      this.parts.push(
        `<line x1="${fmt(x0 - 5)}" y1="${fmt(y)}" x2="${fmt(x0)}" y2="${fmt(y)}" stroke="#000000"/>`,
        `<line x1="${fmt(x0)}" y1="${fmt(y)}" x2="${fmt(x1)}" y2="${fmt(y)}" stroke="#dddddd" stroke-width="0.5"/>`,
        `<text x="${fmt(x0 - 8)}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${label}</text>`,
      );
    }
    this.parts.push(
      `<text x="${fmt((x0 + x1) / 2)}" y="${fmt(this.frame.height - 14)}" text-anchor="middle" font-size="12">${escapeXml(xLabel)}</text>`,
      `<text x="18" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${fmt((y0 + y1) / 2)})">${escapeXml(yLabel)}</text>`,
    );
  }

  legend(entries: Array<{ label: string; color: string; dashed?: boolean; marker?: boolean }>): void {
    const { x1, y1 } = this.plotArea();
    const lx = x1 + 14;
    entries.forEach((entry, i) => {
      const y = y1 + 12 + i * 18;
      if (entry.marker) {
        this.parts.push(`<circle cx="${fmt(lx + 9)}" cy="${fmt(y)}" r="3" fill="${entry.color}"/>`);
      } else {
        this.parts.push(
          `<line x1="${fmt(lx)}" y1="${fmt(y)}" x2="${fmt(lx + 18)}" y2="${fmt(y)}" stroke="${entry.color}" stroke-width="1.5"${entry.dashed ? ' stroke-dasharray="5 3"' : ""}/>`,
        );
      }
      this.parts.push(
        `<text x="${fmt(lx + 24)}" y="${fmt(y + 4)}" font-size="11">${escapeXml(entry.label)}</text>`,
      );
    });
  }

  render(): string {
    return [...this.parts, "</svg>", ""].join("\n");
  }
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
