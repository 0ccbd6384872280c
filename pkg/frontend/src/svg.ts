/** String-built SVG primitives; all numeric output uses fixed formatting so
 * identical inputs always render byte-identical files. */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 70, right: 30, top: 40, bottom: 55 };

export function fmt(x: number): string {
  if (Number.isInteger(x) && Math.abs(x) < 1e15) {
    return String(x);
  }
  return x.toPrecision(6);
}

export interface Scale {
  (value: number): number;
  min: number;
  max: number;
}

/** Linear map from [min, max] to pixel range, with a degenerate-span guard. */
export function linearScale(min: number, max: number, pxMin: number, pxMax: number): Scale {
  const span = max > min ? max - min : 1;
  const scale = ((value: number) =>
    pxMin + ((value - min) / span) * (pxMax - pxMin)) as Scale;
  scale.min = min;
  scale.max = max;
  return scale;
}

export function openSvg(title: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="monospace">\n` +
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
    text(WIDTH / 2, MARGIN.top / 2 + 6, title, { anchor: "middle", size: 16 })
  );
}

export function closeSvg(): string {
  return "</svg>\n";
}

export function text(
  x: number,
  y: number,
  content: string,
  opts: { anchor?: string; size?: number; fill?: string } = {},
): string {
  const anchor = opts.anchor ?? "start";
  const size = opts.size ?? 12;
  const fill = opts.fill ?? "black";
  return (
    `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
    `font-size="${size}" fill="${fill}">${escapeXml(content)}</text>\n`
  );
}

export function line(x1: number, y1: number, x2: number, y2: number, stroke = "black", width = 1): string {
  return (
    `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
    `stroke="${stroke}" stroke-width="${width}"/>\n`
  );
}

export function polyline(points: Array<[number, number]>, stroke: string, width = 1.5): string {
  const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline points="${path}" fill="none" stroke="${stroke}" stroke-width="${width}"/>\n`;
}

export function circle(x: number, y: number, r: number, fill: string): string {
  return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>\n`;
}

export function rect(x: number, y: number, w: number, h: number, fill: string): string {
  return (
    `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(Math.max(w, 0))}" ` +
    `height="${fmt(Math.max(h, 0))}" fill="${fill}"/>\n`
  );
}

/** Horizontal and vertical axis lines with min/max tick labels. */
export function axes(xLabel: string, yLabel: string, x: Scale, y: Scale): string {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  let out = "";
  out += line(x0, y0, x1, y0);
  out += line(x0, y0, x0, y1);
  out += text((x0 + x1) / 2, HEIGHT - 12, xLabel, { anchor: "middle" });
  out += text(x0, y0 + 18, fmt(x.min), { anchor: "middle", size: 10 });
  out += text(x1, y0 + 18, fmt(x.max), { anchor: "middle", size: 10 });
  out += text(x0 - 8, y0 + 4, fmt(y.min), { anchor: "end", size: 10 });
  out += text(x0 - 8, y1 + 4, fmt(y.max), { anchor: "end", size: 10 });
  out += text(14, (y0 + y1) / 2, yLabel, { anchor: "middle", size: 12 });
  return out;
}

export const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
