/** Figure assembly for the three supported kinds.
 *
 * decay      -- one mean-square-norm curve per input CSV, log y default
 * components -- recorded state-component means, optional +/- std shading
 * sensors    -- active-sensor counts per step as a scatter
 *
 * The renderer only transforms values for plotting; every statistic is
 * taken verbatim from the CSVs.
 */

import {
  column,
  columnsMatching,
  requireColumns,
  SchemaError,
  Table,
  tableLabel,
} from "./csv";
import {
  DEFAULT_FRAME,
  document as svgDocument,
  el,
  esc,
  formatLog,
  Frame,
  linearScale,
  linearTicks,
  logScale,
  logTicks,
  PALETTE,
  polyline,
  Scale,
} from "./svg";

export type FigureKind = "decay" | "components" | "sensors";

export interface FigureRequest {
  kind: FigureKind;
  inputs: string[];
  output: string;
  logScale: boolean;
}

interface Series {
  label: string;
  color: string;
  points: Array<[number, number]>;
  band?: Array<[number, number, number]>; // k, lo, hi
  scatter?: boolean;
}

function axes(
  frame: Frame,
  x: Scale,
  y: Scale,
  xTicks: number[],
  yTicks: number[],
  yFormat: (v: number) => string,
  xLabel: string,
  yLabel: string,
): string[] {
  const parts: string[] = [];
  const x0 = frame.left;
  const x1 = frame.width - frame.right;
  const y0 = frame.height - frame.bottom;
  const y1 = frame.top;
  for (const t of yTicks) {
    const yy = y(t);
    parts.push(polyline([[x0, yy], [x1, yy]], "#dddddd", 1));
    parts.push(
      el(
        "text",
        { x: x0 - 8, y: yy + 4, "text-anchor": "end", class: "ytick" },
        esc(yFormat(t)),
      ),
    );
  }
  for (const t of xTicks) {
    const xx = x(t);
    parts.push(polyline([[xx, y0], [xx, y0 + 5]], "#333333", 1));
    parts.push(
      el("text", { x: xx, y: y0 + 20, "text-anchor": "middle" }, esc(String(t))),
    );
  }
  parts.push(polyline([[x0, y0], [x1, y0]], "#333333", 1.5));
  parts.push(polyline([[x0, y0], [x0, y1]], "#333333", 1.5));
  parts.push(
    el(
      "text",
      { x: (x0 + x1) / 2, y: frame.height - 12, "text-anchor": "middle" },
      esc(xLabel),
    ),
  );
  parts.push(
    el(
      "text",
      {
        x: 18,
        y: (y0 + y1) / 2,
        "text-anchor": "middle",
        transform: `rotate(-90 18 ${(y0 + y1) / 2})`,
      },
      esc(yLabel),
    ),
  );
  return parts;
}

function legend(frame: Frame, series: Series[]): string[] {
  const parts: string[] = [];
  const x = frame.width - frame.right + 16;
  series.forEach((s, i) => {
    const y = frame.top + 14 + i * 20;
    parts.push(polyline([[x, y], [x + 22, y]], s.color, 3));
    parts.push(el("text", { x: x + 28, y: y + 4 }, esc(s.label)));
  });
  return parts;
}

function drawSeries(series: Series[], x: Scale, y: Scale): string[] {
  const parts: string[] = [];
  for (const s of series) {
    const marks: string[] = [];
    if (s.band) {
      const upper = s.band.map(([k, , hi]) => [x(k), y(hi)] as [number, number]);
      const lower = s.band
        .slice()
        .reverse()
        .map(([k, lo]) => [x(k), y(lo)] as [number, number]);
      const pts = [...upper, ...lower]
        .map(([px, py]) => `${px.toFixed(2)},${py.toFixed(2)}`)
        .join(" ");
      marks.push(
        el("polygon", { points: pts, fill: s.color, "fill-opacity": 0.15, stroke: "none" }),
      );
    }
    const mapped = s.points.map(([k, v]) => [x(k), y(v)] as [number, number]);
    if (s.scatter) {
      for (const [px, py] of mapped) {
        marks.push(
          el("circle", { cx: px.toFixed(2), cy: py.toFixed(2), r: 2.5, fill: s.color }),
        );
      }
    } else {
      marks.push(polyline(mapped, s.color));
    }
    parts.push(el("g", { class: "series", "data-label": esc(s.label) }, marks.join("")));
  }
  return parts;
}

function assemble(
  title: string,
  series: Series[],
  useLog: boolean,
  yLabel: string,
): string {
  const frame = DEFAULT_FRAME;
  if (series.every((s) => s.points.length === 0)) {
    throw new SchemaError("nothing to plot: all series are empty");
  }
  const ks = series.flatMap((s) => s.points.map((p) => p[0]));
  const vsAll = series.flatMap((s) =>
    s.points.map((p) => p[1]).concat((s.band ?? []).flatMap(([, lo, hi]) => [lo, hi])),
  );
  const vs = useLog ? vsAll.filter((v) => v > 0) : vsAll;
  if (useLog && vs.length === 0) {
    throw new SchemaError("log axis requested but no positive values present");
  }
  const kMin = Math.min(...ks);
  const kMax = Math.max(...ks);
  let vMin = Math.min(...vs);
  let vMax = Math.max(...vs);
  if (vMin === vMax) {
    vMin = useLog ? vMin / 10 : vMin - 1;
    vMax = useLog ? vMax * 10 : vMax + 1;
  }
  const x = linearScale(kMin, kMax, frame.left, frame.width - frame.right);
  const y = useLog
    ? logScale(vMin, vMax, frame.height - frame.bottom, frame.top)
    : linearScale(vMin, vMax, frame.height - frame.bottom, frame.top);
  const plotSeries = useLog
    ? series.map((s) => ({ ...s, points: s.points.filter((p) => p[1] > 0) }))
    : series;
  const yTicks = useLog ? logTicks(vMin, vMax) : linearTicks(vMin, vMax);
  const yFormat = useLog ? formatLog : (v: number) => String(Number(v.toPrecision(4)));
  const body = [
    el(
      "text",
      { x: frame.width / 2, y: 22, "text-anchor": "middle", "font-size": 15 },
      esc(title),
    ),
    ...axes(frame, x, y, linearTicks(kMin, kMax), yTicks, yFormat, "step k", yLabel),
    ...drawSeries(plotSeries, x, y),
    ...legend(frame, series),
  ];
  const meta = el("desc", {}, useLog ? "y-axis: log10" : "y-axis: linear");
  return svgDocument(frame, [meta, ...body]);
}

export function renderDecay(tables: Table[], useLog: boolean): string {
  const series: Series[] = tables.map((t, i) => {
    requireColumns(t, ["k", "mean_sq_norm"]);
    const k = column(t, "k");
    const v = column(t, "mean_sq_norm");
    return {
      label: tableLabel(t),
      color: PALETTE[i % PALETTE.length],
      points: k.map((kk, j) => [kk, v[j]] as [number, number]),
    };
  });
  return assemble("mean squared state norm", series, useLog, "E||x(k)||^2");
}

export function renderComponents(tables: Table[], useLog: boolean): string {
  const series: Series[] = [];
  let colorIdx = 0;
  for (const t of tables) {
    requireColumns(t, ["k"]);
    const names = columnsMatching(t, "x_mean_");
    if (names.length === 0) {
      throw new SchemaError(
        `${t.path}: missing required column 'x_mean_<i>' ` +
          "(re-run the simulation with --record)",
      );
    }
    const k = column(t, "k");
    for (const name of names) {
      const v = column(t, name);
      const stdName = name.replace("x_mean_", "x_std_");
      const entry: Series = {
        label: tables.length > 1 ? `${tableLabel(t)} ${name}` : name,
        color: PALETTE[colorIdx++ % PALETTE.length],
        points: k.map((kk, j) => [kk, v[j]] as [number, number]),
      };
      if (t.header.includes(stdName)) {
        const sd = column(t, stdName);
        entry.band = k.map(
          (kk, j) => [kk, v[j] - sd[j], v[j] + sd[j]] as [number, number, number],
        );
      }
      series.push(entry);
    }
  }
  return assemble("expected state components", series, useLog, "E[x_i(k)]");
}

export function renderSensors(tables: Table[], useLog: boolean): string {
  const series: Series[] = tables.map((t, i) => {
    requireColumns(t, ["k", "active_sensors_mean"]);
    const k = column(t, "k");
    const v = column(t, "active_sensors_mean");
    return {
      label: tableLabel(t),
      color: PALETTE[i % PALETTE.length],
      points: k.map((kk, j) => [kk, v[j]] as [number, number]),
      scatter: true,
    };
  });
  return assemble("active sensors per step", series, useLog, "mean active sensors");
}

export function renderFigure(tables: Table[], request: FigureRequest): string {
  if (tables.length === 0) {
    throw new SchemaError("at least one input CSV is required");
  }
  switch (request.kind) {
    case "decay":
      // geometric decay reads as a line on a log axis
      return renderDecay(tables, true);
    case "components":
      return renderComponents(tables, request.logScale);
    case "sensors":
      return renderSensors(tables, request.logScale);
  }
}
