import { describe, expect, it } from "vitest";

import { parseCsv, readTable } from "../src/csv";
import { renderComponents, renderDecay, renderFigure, renderSensors } from "../src/render";

const SWEEP_FIXTURES = [
  "test/fixtures/p_0.7624.csv",
  "test/fixtures/p_0.85.csv",
  "test/fixtures/p_1.csv",
];

function seriesCount(svg: string): number {
  return (svg.match(/class="series"/g) ?? []).length;
}

describe("renderDecay", () => {
  const tables = SWEEP_FIXTURES.map(readTable);
  const svg = renderDecay(tables, true);

  it("draws one labeled curve per input", () => {
    expect(seriesCount(svg)).toBe(3);
    expect(svg).toContain("p = 0.7624");
    expect(svg).toContain("p = 0.85");
    expect(svg).toContain("p = 1");
  });

  it("uses a log axis with decade tick labels", () => {
    expect(svg).toContain("y-axis: log10");
    expect(svg).toMatch(/1e-?\d+/);
  });

  it("errors with the missing column name on foreign CSVs", () => {
    const t = parseCsv("k,loss\n0,1\n1,0.5\n", "foreign.csv");
    expect(() => renderDecay([t], true)).toThrow(
      /missing required column 'mean_sq_norm'/,
    );
  });
});

describe("renderComponents", () => {
  it("plots every recorded component", () => {
    const svg = renderComponents([readTable("test/fixtures/grid_run.csv")], false);
    expect(seriesCount(svg)).toBe(4);
    expect(svg).toContain("x_mean_0");
    expect(svg).toContain("x_mean_3");
  });

  it("shades a band when std columns are present", () => {
    const t = parseCsv(
      ["k,x_mean_0,x_std_0", "0,1.0,0.2", "1,0.5,0.1", "2,0.25,0.05"].join("\n"),
      "with_std.csv",
    );
    const svg = renderComponents([t], false);
    expect(svg).toContain("polygon");
    expect(svg).toContain('fill-opacity="0.15"');
  });

  it("asks for --record when no component columns exist", () => {
    const t = readTable("test/fixtures/p_1.csv");
    expect(() => renderComponents([t], false)).toThrow(/x_mean_<i>/);
  });
});

describe("renderSensors", () => {
  it("scatters active-sensor counts around the expected level", () => {
    const table = readTable("test/fixtures/grid_run.csv");
    const svg = renderSensors([table], false);
    expect(seriesCount(svg)).toBe(1);
    expect((svg.match(/<circle /g) ?? []).length).toBe(121);
    const idx = table.header.indexOf("active_sensors_mean");
    const values = table.rows.map((r) => r[idx]);
    const mean = values.reduce((a, b) => a + b, 0) / values.length;
    expect(mean).toBeGreaterThan(3.0);
    expect(mean).toBeLessThan(8.0);
  });
});

describe("renderFigure", () => {
  it("decay defaults to the log axis even without --log", () => {
    const tables = SWEEP_FIXTURES.map(readTable);
    const svg = renderFigure(tables, {
      kind: "decay",
      inputs: SWEEP_FIXTURES,
      output: "out.svg",
      logScale: false,
    });
    expect(svg).toContain("y-axis: log10");
  });

  it("rejects an empty input list", () => {
    expect(() =>
      renderFigure([], {
        kind: "decay",
        inputs: [],
        output: "out.svg",
        logScale: false,
      }),
    ).toThrow(/at least one input/);
  });
});
