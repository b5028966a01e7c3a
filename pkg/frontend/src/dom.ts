/** DOM glue: renders view models and wires events. No probability math and
 * no number formatting happens here; cells are inserted verbatim. */

import { GridView, RankView, SigmaEcho } from "./views.js";

export function el(tag: string, attrs: Record<string, string> = {}, children: (Node | string)[] = []): HTMLElement {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function renderTable(view: { columns: string[]; rows: string[][] }, highlight = -1): HTMLElement {
  const thead = el("thead", {}, [
    el("tr", {}, view.columns.map((c) => el("th", {}, [c]))),
  ]);
  const tbody = el(
    "tbody",
    {},
    view.rows.map((row, i) =>
      el(
        "tr",
        i === highlight ? { class: "best" } : {},
        row.map((cell) => el("td", {}, [cell])),
      ),
    ),
  );
  return el("table", { class: "grid" }, [thead, tbody]);
}

export function renderGrid(container: HTMLElement, view: GridView, onPage: (page: number) => void): void {
  container.replaceChildren();
  container.append(renderTable(view));
  const pager = el("div", { class: "pager" });
  const prev = el("button", {}, ["prev"]) as HTMLButtonElement;
  const next = el("button", {}, ["next"]) as HTMLButtonElement;
  prev.disabled = view.page === 0;
  next.disabled = view.page >= view.pageCount - 1;
  prev.addEventListener("click", () => onPage(view.page - 1));
  next.addEventListener("click", () => onPage(view.page + 1));
  pager.append(prev, ` page ${view.page + 1}/${view.pageCount} (${view.total} rows) `, next);
  container.append(pager);
}

export function renderRank(container: HTMLElement, view: RankView): void {
  container.replaceChildren();
  if (!view.conditioned) {
    container.append(el("p", { class: "hint" }, [
      "Not conditioned yet: rows are ordered by prior probability.",
    ]));
  }
  container.append(renderTable(view, view.bestRow));
}

export function renderSigma(container: HTMLElement, echo: SigmaEcho): void {
  container.replaceChildren(
    el("p", {}, [`hypothesis ${echo.hypothesisId} encoded:`]),
    el("pre", { class: "sigma" }, [echo.lines.join("\n")]),
  );
}

export function notice(container: HTMLElement, text: string, isError = false): void {
  container.replaceChildren(
    el("p", { class: isError ? "error" : "notice" }, [text]),
  );
}
