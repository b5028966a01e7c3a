import { describe, expect, it } from "vitest";

import { parseCsv } from "../src/csv.js";

describe("parseCsv", () => {
  it("parses CRLF tables into raw string cells", () => {
    const table = parseCsv("a,b\r\n1,2.50\r\n3,0.434916589742809\r\n");
    expect(table.columns).toEqual(["a", "b"]);
    expect(table.rows).toEqual([
      ["1", "2.50"],
      ["3", "0.434916589742809"],
    ]);
  });

  it("keeps empty cells empty", () => {
    const table = parseCsv("a,b,c\r\n1,,3\r\n");
    expect(table.rows).toEqual([["1", "", "3"]]);
  });

  it("handles quoted fields with commas and escaped quotes", () => {
    const table = parseCsv('name,note\r\n"x, y","said ""hi"""\r\n');
    expect(table.rows).toEqual([["x, y", 'said "hi"']]);
  });

  it("accepts bare-LF input", () => {
    const table = parseCsv("a\n1\n2\n");
    expect(table.rows).toEqual([["1"], ["2"]]);
  });

  it("returns an empty table for empty input", () => {
    expect(parseCsv("")).toEqual({ columns: [], rows: [] });
  });
});
