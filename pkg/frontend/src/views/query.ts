// Query editor: SQL in, destination table out, results paged from
// storage.  Running writes the destination table once; page moves only
// fetch rows.

import { ApiClient } from "../api.js";
import { el, clear } from "../dom.js";
import { pagedTable, metaLine } from "./tables.js";

export function queryView(api: ApiClient): HTMLElement {
  const root = el("section", { class: "view query-view" });
  const storageInput = el("input", { placeholder: "storage id", value: "" });
  const destInput = el("input", { placeholder: "destination table", value: "q_out" });
  const workersInput = el("input", { type: "number", value: "1", min: "1" });
  const sql = el("textarea", { rows: "5", placeholder: "SELECT V1 AS V1 FROM ..." });
  const status = el("p", { class: "meta" });
  const results = el("div", { class: "detail" });

  const run = () => {
    const storage = storageInput.value.trim();
    const dest = destInput.value.trim();
    const text = sql.value.trim();
    if (!storage || !dest || !text) {
      status.textContent = "storage, destination and query are all required";
      status.className = "error";
      return;
    }
    status.className = "meta";
    status.textContent = "running...";
    clear(results);
    api
      .runQuery(storage, text, dest, Number(workersInput.value) || 1)
      .then((meta) => {
        status.textContent = `wrote ${meta.row_count} rows to ${meta.name}`;
        results.append(metaLine(meta), pagedTable(api, storage, meta.name));
      })
      .catch((err) => {
        status.className = "error";
        status.textContent = String(err);
      });
  };

  root.append(
    el("h2", {}, "Query"),
    el("div", { class: "form-row" }, el("label", {}, "storage", storageInput), el("label", {}, "dest", destInput), el("label", {}, "workers", workersInput)),
    sql,
    el("div", {}, el("button", { class: "primary", onclick: run }, "Run query")),
    status,
    results,
  );
  return root;
}
