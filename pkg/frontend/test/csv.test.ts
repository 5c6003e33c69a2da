import { describe, expect, it } from "vitest";

import {
  column,
  columnsMatching,
  parseCsv,
  readTable,
  requireColumns,
  SchemaError,
  tableLabel,
} from "../src/csv";

const SAMPLE = [
  "k,mean_sq_norm,std_sq_norm,active_sensors_mean",
  "0,100,10,2.5",
  "1,50,5,2.4",
].join("\n");

describe("parseCsv", () => {
  it("parses header and numeric rows", () => {
    const t = parseCsv(SAMPLE, "sample.csv");
    expect(t.header).toEqual([
      "k",
      "mean_sq_norm",
      "std_sq_norm",
      "active_sensors_mean",
    ]);
    expect(t.rows).toHaveLength(2);
    expect(column(t, "mean_sq_norm")).toEqual([100, 50]);
  });

  it("round-trips 17-digit floats", () => {
    const t = parseCsv("k,v\n0,27903.489522450716\n", "x.csv");
    expect(t.rows[0][1]).toBe(27903.489522450716);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n", "x.csv")).toThrow(SchemaError);
  });

  it("names the non-numeric column", () => {
    expect(() => parseCsv("a,b\n1,oops\n", "x.csv")).toThrow(/column 'b'/);
  });
});

describe("requireColumns", () => {
  it("passes when columns exist", () => {
    const t = parseCsv(SAMPLE, "sample.csv");
    expect(() => requireColumns(t, ["k", "mean_sq_norm"])).not.toThrow();
  });

  it("names the missing column", () => {
    const t = parseCsv(SAMPLE, "sample.csv");
    expect(() => requireColumns(t, ["x_mean_0"])).toThrow(
      /missing required column 'x_mean_0'/,
    );
  });
});

describe("fixtures", () => {
  it("reads a real simulation CSV with recorded components", () => {
    const t = readTable("test/fixtures/grid_run.csv");
    requireColumns(t, ["k", "mean_sq_norm", "std_sq_norm", "active_sensors_mean"]);
    expect(columnsMatching(t, "x_mean_")).toEqual([
      "x_mean_0",
      "x_mean_1",
      "x_mean_2",
      "x_mean_3",
    ]);
    expect(t.rows.length).toBe(121);
  });
});

describe("tableLabel", () => {
  it("extracts the probability from sweep file names", () => {
    const t = parseCsv(SAMPLE, "/tmp/sweep/p_0.85.csv");
    expect(tableLabel(t)).toBe("p = 0.85");
  });

  it("falls back to the basename", () => {
    const t = parseCsv(SAMPLE, "/tmp/grid_run.csv");
    expect(tableLabel(t)).toBe("grid_run");
  });
});
