// Storage browser: storages on the left, tables of the selected one,
// row pages of the selected table.

import { ApiClient } from "../api.js";
import { el, clear } from "../dom.js";
import { pagedTable } from "./tables.js";

export function storageView(api: ApiClient): HTMLElement {
  const root = el("section", { class: "view storage-view" });
  const storageList = el("ul", { class: "picker" });
  const tableList = el("ul", { class: "picker" });
  const detail = el("div", { class: "detail" });

  const showTable = (sid: string, table: string) => {
    clear(detail);
    detail.append(pagedTable(api, sid, table));
  };

  const showStorage = (sid: string) => {
    clear(tableList);
    clear(detail);
    api
      .listTables(sid)
      .then((tables) => {
        for (const t of tables) {
          tableList.append(
            el("li", {}, el("button", { onclick: () => showTable(sid, t.name) }, `${t.name} (${t.row_count})`)),
          );
        }
        if (tables.length === 0) tableList.append(el("li", { class: "meta" }, "no tables"));
      })
      .catch((err) => tableList.append(el("li", { class: "error" }, String(err))));
  };

  api
    .listStorages()
    .then((storages) => {
      for (const s of storages) {
        storageList.append(
          el("li", {}, el("button", { onclick: () => showStorage(s.id) }, `${s.id} [${s.kind}]`)),
        );
      }
      if (storages.length === 0) storageList.append(el("li", { class: "meta" }, "no storages yet"));
    })
    .catch((err) => storageList.append(el("li", { class: "error" }, String(err))));

  root.append(
    el("h2", {}, "Storages"),
    el("div", { class: "columns" }, storageList, tableList, detail),
  );
  return root;
}
