// Shared table widgets: meta header, paged row grid, pager buttons.

import { ApiClient } from "../api.js";
import { el, clear } from "../dom.js";
import {
  Pane,
  PageCursor,
  beginRequest,
  failRequest,
  nextPage,
  nextRequestId,
  pageLabel,
  prevPage,
  resolveRequest,
} from "../session.js";
import { TableMetaDoc, TablePageDoc } from "../types.js";

export function metaLine(meta: TableMetaDoc): HTMLElement {
  const cols = meta.columns.map((c) => `${c.name}:${c.dtype}`).join(", ");
  return el("p", { class: "meta" }, `${meta.name}  [${cols}]  ${meta.row_count} rows (${meta.origin})`);
}

export function rowGrid(page: TablePageDoc): HTMLElement {
  const head = el("tr", {}, ...page.meta.columns.map((c) => el("th", {}, c.name)));
  const body = page.rows.map((r) =>
    el("tr", {}, ...r.map((cell) => el("td", {}, cell === null ? "" : String(cell)))),
  );
  return el("table", { class: "rows" }, el("thead", {}, head), el("tbody", {}, ...body));
}

/**
 * A paged view over one stored table.  Page moves are plain GETs with
 * offset/limit; nothing is recomputed when the user walks pages.
 */
export function pagedTable(api: ApiClient, storage: string, table: string, limit = 25): HTMLElement {
  const root = el("div", { class: "paged-table" });
  const grid = el("div");
  const label = el("span", { class: "page-label" });
  const resultPane: Pane<TablePageDoc> = { requestId: 0, status: "idle" };
  let cursor: PageCursor = { offset: 0, limit, total: 0 };

  const load = () => {
    const rid = nextRequestId();
    beginRequest(resultPane, rid);
    api
      .tablePage(storage, table, cursor.offset, cursor.limit)
      .then((page) => {
        if (!resolveRequest(resultPane, rid, page)) return;
        cursor = { ...cursor, total: page.total_rows };
        clear(grid);
        grid.append(metaLine(page.meta), rowGrid(page));
        label.textContent = pageLabel(cursor);
      })
      .catch((err) => {
        if (!failRequest(resultPane, rid, String(err))) return;
        clear(grid);
        grid.append(el("p", { class: "error" }, String(err)));
      });
  };

  const prev = el("button", { onclick: () => { cursor = prevPage(cursor); load(); } }, "prev");
  const next = el("button", { onclick: () => { cursor = nextPage(cursor); load(); } }, "next");
  root.append(el("div", { class: "pager" }, prev, next, label), grid);
  load();
  return root;
}
