// Command palette: specs fetched from the service, one labeled input
// per parameter, a script buffer that mirrors the rendered template
// until the user edits it, at which point the edited script is sent as
// the override.

import { ApiClient } from "../api.js";
import { el, clear, setSvg } from "../dom.js";
import {
  FormModel,
  editBuffer,
  formModel,
  refreshBuffer,
  runPayload,
  setField,
  validate,
} from "../palette.js";
import { renderPlot, PlotError } from "../plot.js";
import {
  Pane,
  beginRequest,
  failRequest,
  nextRequestId,
  resolveRequest,
} from "../session.js";
import { CommandDoc, CommandRunDoc } from "../types.js";
import { rowGrid } from "./tables.js";

export function commandsView(api: ApiClient): HTMLElement {
  const root = el("section", { class: "view commands-view" });
  const list = el("ul", { class: "picker" });
  const formHost = el("div", { class: "command-form" });
  const output = el("div", { class: "detail" });
  const storageInput = el("input", { placeholder: "storage id" });
  const tableInput = el("input", { placeholder: "table" });
  const runPane: Pane<CommandRunDoc> = { requestId: 0, status: "idle" };

  let model: FormModel | null = null;

  const drawForm = () => {
    clear(formHost);
    if (model === null) return;
    const m = model;
    formHost.append(el("h3", {}, m.command.name));
    m.fields.forEach((field, i) => {
      const input = el("input", {
        value: field.value,
        "data-param": String(i + 1),
        oninput: (ev: Event) => {
          model = setField(m, i, (ev.target as HTMLInputElement).value);
          syncBuffer();
        },
      });
      formHost.append(el("label", { class: "param" }, field.label, input));
    });
    const buffer = el("textarea", {
      rows: "4",
      class: "script-buffer",
      oninput: (ev: Event) => {
        model = editBuffer(model!, (ev.target as HTMLTextAreaElement).value);
      },
    });
    buffer.value = m.buffer;
    const problems = el("p", { class: "error" });
    const runBtn = el("button", {
      class: "primary",
      onclick: () => {
        if (model === null) return;
        const errors = validate(model);
        if (errors.length > 0) {
          problems.textContent = errors.join("; ");
          return;
        }
        problems.textContent = "";
        run(model);
      },
    }, "Run");
    const syncBuffer = () => {
      if (model !== null && !model.edited) buffer.value = model.buffer;
    };
    formHost.append(el("label", { class: "param" }, "script", buffer), runBtn, problems);
  };

  const run = (m: FormModel) => {
    const payload = runPayload(m);
    const rid = nextRequestId();
    beginRequest(runPane, rid);
    clear(output);
    output.append(el("p", { class: "meta" }, "running..."));
    api
      .runCommand({
        storage: storageInput.value.trim(),
        table: tableInput.value.trim(),
        name: payload.name,
        args: payload.args,
        scriptOverride: payload.scriptOverride,
      })
      .then(async (doc) => {
        if (!resolveRequest(runPane, rid, doc)) return;
        clear(output);
        output.append(el("pre", { class: "script-echo" }, doc.script));
        if (doc.result.kind === "table" && doc.result.columns && doc.result.rows) {
          output.append(
            rowGrid({
              meta: { name: "result", columns: doc.result.columns, row_count: doc.result.rows.length, origin: "command" },
              offset: 0,
              limit: doc.result.rows.length,
              total_rows: doc.result.rows.length,
              rows: doc.result.rows,
            }),
          );
        } else if (doc.result.fit) {
          output.append(el("pre", {}, JSON.stringify(doc.result.fit, null, 2)));
        }
        for (const pid of doc.plot_ids) {
          const spec = await api.plot(pid);
          const host = el("div", { class: "plot-host" });
          try {
            setSvg(host, renderPlot(spec));
          } catch (err) {
            const note = err instanceof PlotError ? err.message : String(err);
            host.append(el("p", { class: "banner" }, note));
          }
          output.append(host);
        }
      })
      .catch((err) => {
        if (!failRequest(runPane, rid, String(err))) return;
        clear(output);
        output.append(el("p", { class: "error" }, String(err)));
      });
  };

  api
    .listCommands()
    .then((commands: CommandDoc[]) => {
      for (const cmd of commands) {
        list.append(
          el(
            "li",
            {},
            el("button", {
              onclick: () => {
                model = refreshBuffer(formModel(cmd));
                drawForm();
              },
            }, `${cmd.name}/${cmd.param_count}`),
          ),
        );
      }
    })
    .catch((err) => list.append(el("li", { class: "error" }, String(err))));

  root.append(
    el("h2", {}, "Commands"),
    el("div", { class: "form-row" }, el("label", {}, "storage", storageInput), el("label", {}, "table", tableInput)),
    el("div", { class: "columns" }, list, formHost, output),
  );
  return root;
}
