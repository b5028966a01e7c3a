/**
 * Pure view-model builders: everything the DOM layer renders is prepared
 * here from server payloads, so the interesting logic is testable without a
 * browser.  Cells stay raw strings; no number ever gets reformatted.
 */

import { CsvTable, parseCsv } from "./csv.js";

export interface GridView {
  columns: string[];
  rows: string[][];
  page: number;
  pageCount: number;
  total: number;
}

export function gridView(table: CsvTable, page: number, pageSize = 25): GridView {
  const pageCount = Math.max(1, Math.ceil(table.rows.length / pageSize));
  const clamped = Math.min(Math.max(page, 0), pageCount - 1);
  return {
    columns: table.columns,
    rows: table.rows.slice(clamped * pageSize, (clamped + 1) * pageSize),
    page: clamped,
    pageCount,
    total: table.rows.length,
  };
}

export interface RankView {
  columns: string[];
  rows: string[][];
  /** index of the highlighted best-explanation row, -1 when empty */
  bestRow: number;
  conditioned: boolean;
}

export function rankView(csvText: string): RankView {
  const table = parseCsv(csvText);
  const postIdx = table.columns.indexOf("posterior");
  const conditioned = table.rows.some((r) => r[postIdx] !== "");
  // rows arrive ranked; the first row is the best explanation
  return {
    columns: table.columns,
    rows: table.rows,
    bestRow: table.rows.length > 0 ? 0 : -1,
    conditioned,
  };
}

export interface HypothesisDocEcho {
  doc: Record<string, unknown>;
  text: string;
}

/**
 * Parse the structure-document textarea for upload.  The submitted payload
 * is exactly the parsed document: the round trip through the form must not
 * alter it.
 */
export function parseHypothesisDoc(text: string): HypothesisDocEcho {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new Error(`structure document is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new Error("structure document must be a JSON object");
  }
  const record = doc as Record<string, unknown>;
  if (!("hypothesis_id" in record)) {
    throw new Error("structure document requires hypothesis_id");
  }
  return { doc: record, text };
}

export interface SigmaEcho {
  hypothesisId: number;
  lines: string[];
}

export function sigmaEcho(response: { hypothesis_id: number; sigma: string }): SigmaEcho {
  return {
    hypothesisId: response.hypothesis_id,
    lines: response.sigma.split("\n").filter((l) => l.length > 0),
  };
}

export interface ObservationPick {
  coordinates: string[];
  from: string;
  to: string;
  selected: string[];
}

/** Inclusive numeric range filter over observation coordinates. */
export function pickObservations(coordinates: string[], from: string, to: string): ObservationPick {
  const lo = from.trim() === "" ? -Infinity : Number(from);
  const hi = to.trim() === "" ? Infinity : Number(to);
  return {
    coordinates,
    from,
    to,
    selected: coordinates.filter((c) => {
      const v = Number(c);
      return v >= lo && v <= hi;
    }),
  };
}

export function describeError(payload: { code: string; message: string; detail?: Record<string, unknown> }): string {
  const detail = payload.detail && Object.keys(payload.detail).length > 0
    ? ` (${Object.entries(payload.detail).map(([k, v]) => `${k}: ${v}`).join(", ")})`
    : "";
  return `${payload.code}: ${payload.message}${detail}`;
}
