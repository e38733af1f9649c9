// Plot lookup: fetch a registered PlotSpec by id and render it.

import { ApiClient, VersionMismatchError } from "../api.js";
import { el, clear, setSvg } from "../dom.js";
import { renderPlot, PlotError } from "../plot.js";

export function plotsView(api: ApiClient): HTMLElement {
  const root = el("section", { class: "view plots-view" });
  const idInput = el("input", { placeholder: "plot id, e.g. p1" });
  const host = el("div", { class: "plot-host" });

  const show = () => {
    clear(host);
    api
      .plot(idInput.value.trim())
      .then((spec) => setSvg(host, renderPlot(spec)))
      .catch((err) => {
        const cls = err instanceof PlotError || err instanceof VersionMismatchError ? "banner" : "error";
        host.append(el("p", { class: cls }, String(err)));
      });
  };

  root.append(
    el("h2", {}, "Plots"),
    el("div", { class: "form-row" }, idInput, el("button", { class: "primary", onclick: show }, "Fetch")),
    host,
  );
  return root;
}
