/** App shell: tabs, forms and the job polling loop. */

import { ApiFailure, Client } from "./api.js";
import { parseCsv } from "./csv.js";
import { el, notice, renderGrid, renderRank, renderSigma, renderTable } from "./dom.js";
import { Action, StateLog, Tab } from "./state.js";
import {
  describeError,
  gridView,
  parseHypothesisDoc,
  pickObservations,
  rankView,
  sigmaEcho,
} from "./views.js";

const api = new Client((window as any).HYPODB_API_BASE ?? "");
const log = new StateLog();

const tabs: Tab[] = ["etl", "management", "analytics-observations", "analytics-predictions"];

function q<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function dispatch(action: Action): void {
  log.dispatch(action);
  syncTabs();
}

function syncTabs(): void {
  for (const tab of tabs) {
    q(`tab-${tab}`).classList.toggle("active", log.state.tab === tab);
    q(`panel-${tab}`).style.display = log.state.tab === tab ? "block" : "none";
  }
  const jobs = log.state.pendingJobs;
  q("jobs").textContent = jobs.length ? `running jobs: ${jobs.join(", ")}` : "";
  if (log.state.notice) {
    notice(q("messages"), log.state.notice);
  }
}

async function refreshRegistry(): Promise<void> {
  const [phenomena, hypotheses] = await Promise.all([
    api.listPhenomena(),
    api.listHypotheses(),
  ]);
  const phenSelects = [q<HTMLSelectElement>("obs-phen"), q<HTMLSelectElement>("cond-phen")];
  for (const select of phenSelects) {
    select.replaceChildren(
      ...phenomena.map((p) =>
        el("option", { value: String(p.phenomenon_id) }, [
          `${p.phenomenon_id}: ${p.description || "(no description)"}`,
        ]),
      ),
    );
  }
  q("hyp-list").replaceChildren(
    ...hypotheses.map((h) =>
      el("li", {}, [
        `${h.hypothesis_id} ${h.name || ""} ${h.synthesized ? "[synthesized]" : ""} `,
        synthesizeButton(h.hypothesis_id),
      ]),
    ),
  );
  const status = await api.status();
  q<HTMLSelectElement>("query-projection").replaceChildren(
    ...status.store.relations.map((r) => el("option", { value: r }, [r])),
  );
}

function synthesizeButton(hypothesisId: number): HTMLElement {
  const button = el("button", {}, ["synthesize"]) as HTMLButtonElement;
  button.addEventListener("click", async () => {
    try {
      const { job_id } = await api.synthesize(hypothesisId);
      dispatch({ kind: "job-started", id: job_id });
      pollJobs();
    } catch (err) {
      showError(err);
    }
  });
  return button;
}

let polling = false;
async function pollJobs(): Promise<void> {
  if (polling) return;
  polling = true;
  try {
    while (log.state.pendingJobs.length > 0) {
      await new Promise((resolve) => setTimeout(resolve, 400));
      const status = await api.status();
      for (const job of status.jobs) {
        if (!log.state.pendingJobs.includes(job.id)) continue;
        if (job.status === "done" || job.status === "failed") {
          dispatch({ kind: "job-finished", id: job.id, ok: job.status === "done", op: job.op });
          if (job.status === "failed" && job.error) {
            dispatch({ kind: "notice", text: describeError(job.error) });
          } else if (job.op === "condition") {
            await showRank();
          }
        }
      }
    }
    await refreshRegistry();
  } finally {
    polling = false;
  }
}

function showError(err: unknown): void {
  const text =
    err instanceof ApiFailure ? describeError(err.payload) : String(err);
  notice(q("messages"), text, true);
}

// ------------------------------------------------------------------- ETL

function wireEtl(): void {
  q("phen-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    try {
      await api.addPhenomenon(
        Number(q<HTMLInputElement>("phen-id").value),
        q<HTMLInputElement>("phen-desc").value,
      );
      dispatch({ kind: "notice", text: "phenomenon recorded" });
      await refreshRegistry();
    } catch (err) {
      showError(err);
    }
  });
  q("hyp-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    try {
      const echo = parseHypothesisDoc(q<HTMLTextAreaElement>("hyp-doc").value);
      const response = await api.addHypothesis(echo.doc);
      renderSigma(q("sigma-echo"), sigmaEcho(response));
      await refreshRegistry();
    } catch (err) {
      showError(err);
    }
  });
  q("trial-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    try {
      const mappings: Record<string, string> = {};
      for (const pair of q<HTMLInputElement>("trial-mappings").value.split(",")) {
        const [from, to] = pair.split("=").map((s) => s.trim());
        if (from && to) mappings[from] = to;
      }
      await api.addTrial(Number(q<HTMLInputElement>("trial-hyp").value), {
        phenomenon_id: Number(q<HTMLInputElement>("trial-phen").value),
        trial_id: Number(q<HTMLInputElement>("trial-id").value),
        mappings,
        csv: q<HTMLTextAreaElement>("trial-csv").value,
      });
      dispatch({ kind: "notice", text: "trial loaded" });
    } catch (err) {
      showError(err);
    }
  });
  q("obs-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    try {
      await api.addObservations(
        Number(q<HTMLSelectElement>("obs-phen").value),
        q<HTMLTextAreaElement>("obs-csv").value,
      );
      dispatch({ kind: "notice", text: "observations loaded" });
    } catch (err) {
      showError(err);
    }
  });
}

// ------------------------------------------------------------ management

let lastQueryCsv = "";
function wireManagement(): void {
  const run = async (page: number) => {
    try {
      const filters = q<HTMLInputElement>("query-filters")
        .value.split(",")
        .map((s) => s.trim())
        .filter((s) => s.length > 0);
      lastQueryCsv = await api.queryCsv({
        projection: q<HTMLSelectElement>("query-projection").value,
        filters,
        order: q<HTMLInputElement>("query-order").value,
        columns: q<HTMLInputElement>("query-columns").value,
      });
      renderGrid(q("query-grid"), gridView(parseCsv(lastQueryCsv), page), run);
    } catch (err) {
      showError(err);
    }
  };
  q("query-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    void run(0);
  });
}

// ------------------------------------------------------------- analytics

async function showObservations(): Promise<void> {
  try {
    const phi = Number(q<HTMLSelectElement>("cond-phen").value);
    const csv = await api.getCsv(`/phenomena/${phi}/observations`);
    const table = parseCsv(csv);
    const pick = pickObservations(
      table.rows.map((r) => r[0]),
      log.state.obsFrom,
      log.state.obsTo,
    );
    const selected = new Set(pick.selected);
    const filtered = {
      columns: table.columns,
      rows: table.rows.filter((r) => selected.has(r[0])),
    };
    q("obs-view").replaceChildren(renderTable(filtered));
    q("obs-count").textContent =
      `${filtered.rows.length} of ${table.rows.length} points selected`;
  } catch (err) {
    showError(err);
  }
}

async function recondition(): Promise<void> {
  try {
    const phi = Number(q<HTMLSelectElement>("cond-phen").value);
    const symbol = q<HTMLInputElement>("cond-symbol").value;
    const sigma = Number(q<HTMLInputElement>("cond-sigma").value);
    dispatch({ kind: "set-sigma", value: String(sigma) });
    dispatch({ kind: "set-symbol", value: symbol });
    const from = q<HTMLInputElement>("obs-from").value;
    const to = q<HTMLInputElement>("obs-to").value;
    dispatch({ kind: "set-obs-range", from, to });
    if (from.trim() !== "" || to.trim() !== "") {
      // subset feedback loop: replace the stored series, then condition
      const csv = await api.getCsv(`/phenomena/${phi}/observations`);
      const table = parseCsv(csv);
      const pick = pickObservations(table.rows.map((r) => r[0]), from, to);
      const keep = new Set(pick.selected);
      const lines = [table.columns.join(",")];
      for (const row of table.rows) {
        if (keep.has(row[0])) lines.push(row.join(","));
      }
      await api.addObservations(phi, lines.join("\r\n") + "\r\n");
    }
    const { job_id } = await api.condition(phi, symbol, sigma, true);
    dispatch({ kind: "job-started", id: job_id });
    void pollJobs();
  } catch (err) {
    showError(err);
  }
}

async function showRank(): Promise<void> {
  try {
    const phi = Number(q<HTMLSelectElement>("cond-phen").value);
    const at = q<HTMLInputElement>("rank-at").value;
    const csv = await api.rankCsv(phi, at || undefined);
    renderRank(q("rank-view"), rankView(csv));
  } catch (err) {
    showError(err);
  }
}

function wireAnalytics(): void {
  q("obs-show").addEventListener("click", () => void showObservations());
  q("cond-run").addEventListener("click", () => void recondition());
  q("rank-refresh").addEventListener("click", () => void showRank());
}

// -------------------------------------------------------------- bootstrap

export function boot(): void {
  for (const tab of tabs) {
    q(`tab-${tab}`).addEventListener("click", () =>
      dispatch({ kind: "select-tab", tab }),
    );
  }
  wireEtl();
  wireManagement();
  wireAnalytics();
  syncTabs();
  void refreshRegistry().catch(showError);
}

boot();
