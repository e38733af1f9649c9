// Entry point: hash router over the five views, plus a banner that
// latches when the service speaks a different schema version.

import { ApiClient, VersionMismatchError } from "./api.js";
import { el, clear } from "./dom.js";
import { storageView } from "./views/storage.js";
import { queryView } from "./views/query.js";
import { commandsView } from "./views/commands.js";
import { simulationsView } from "./views/simulations.js";
import { plotsView } from "./views/plots.js";

const api = new ApiClient("");

const routes: Record<string, (api: ApiClient) => HTMLElement> = {
  "#/storages": storageView,
  "#/query": queryView,
  "#/commands": commandsView,
  "#/simulations": simulationsView,
  "#/plots": plotsView,
};

function showBanner(text: string): void {
  const banner = document.getElementById("banner");
  if (banner) {
    banner.textContent = text;
    banner.classList.add("visible");
  }
}

window.addEventListener("unhandledrejection", (ev) => {
  if (ev.reason instanceof VersionMismatchError) showBanner(ev.reason.message);
});

function route(): void {
  const hash = window.location.hash || "#/storages";
  const view = routes[hash] ?? storageView;
  const main = document.getElementById("view");
  if (!main) return;
  clear(main);
  try {
    main.append(view(api));
  } catch (err) {
    if (err instanceof VersionMismatchError) showBanner(err.message);
    else main.append(el("p", { class: "error" }, String(err)));
  }
  for (const link of document.querySelectorAll("nav a")) {
    link.classList.toggle("active", link.getAttribute("href") === hash);
  }
}

window.addEventListener("hashchange", route);
route();
