/** Minimal SVG scaffolding: scales, ticks, and element builders. */

export type Scale = (value: number) => number;

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export const DEFAULT_FRAME: Frame = {
  width: 760,
  height: 480,
  left: 80,
  right: 180,
  top: 40,
  bottom: 56,
};

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

export function linearTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo || 1;
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count) ?? mag * 10;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-9 * span; v += step) ticks.push(v);
  return ticks;
}

/** Decade ticks covering [lo, hi], thinned to at most ~10 labels. */
export function logTicks(lo: number, hi: number): number[] {
  const e0 = Math.floor(Math.log10(lo));
  const e1 = Math.ceil(Math.log10(hi));
  const every = Math.max(1, Math.ceil((e1 - e0) / 10));
  const ticks: number[] = [];
  for (let e = e0; e <= e1; e += every) ticks.push(Math.pow(10, e));
  return ticks;
}

export function formatLog(v: number): string {
  return `1e${Math.round(Math.log10(v))}`;
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body = "",
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(" ");
  const open = parts.length > 0 ? `${tag} ${parts}` : tag;
  return body === "" && tag !== "text"
    ? `<${open}/>`
    : `<${open}>${body}</${tag}>`;
}

export function polyline(
  points: Array<[number, number]>,
  color: string,
  width = 2,
  dash = "",
): string {
  const d = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
  const attrs: Record<string, string | number> = {
    points: d,
    fill: "none",
    stroke: color,
    "stroke-width": width,
  };
  if (dash) attrs["stroke-dasharray"] = dash;
  return el("polyline", attrs);
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export function document(frame: Frame, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" ` +
      `height="${frame.height}" viewBox="0 0 ${frame.width} ${frame.height}" ` +
      `font-family="sans-serif" font-size="12">`,
    el("rect", { x: 0, y: 0, width: frame.width, height: frame.height, fill: "white" }),
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
