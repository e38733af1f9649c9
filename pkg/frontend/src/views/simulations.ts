// Simulations: submit a config, watch job status, pull metric series,
// and overlay a finished run against its trace-driven replay.

import { ApiClient } from "../api.js";
import { el, clear, setSvg } from "../dom.js";
import { renderPlot, timeseriesSpec } from "../plot.js";
import { SimJobDoc } from "../types.js";

const EXAMPLE_CONFIG = {
  mode: "synthetic",
  horizon: 2000.0,
  seed: 7,
  dt: 100.0,
  initial_machines: 3,
  workload: {
    schema_version: 1,
    seed: 3,
    memory_cap_fraction: 0.5,
    kill_fraction: 0.0,
    distributions: {
      job_interarrival: { family: "exponential", rate: 0.02 },
      machine_failure_interarrival: { family: "exponential", rate: 1e-7 },
      machine_cpu: { family: "lognormal", mu: 1.0, sigma: 0.1 },
      machine_ram: { family: "lognormal", mu: 1.5, sigma: 0.1 },
      cpu_per_task: { family: "lognormal", mu: -2.0, sigma: 0.3 },
      ram_per_task: { family: "lognormal", mu: -2.0, sigma: 0.3 },
      task_priority: { family: "lognormal", mu: 1.0, sigma: 0.5 },
      duration_normal_end: { family: "exponential", rate: 0.002 },
      duration_killed: { family: "exponential", rate: 0.001 },
      tasks_per_job: { family: "lognormal", mu: 1.0, sigma: 0.5 },
    },
  },
};

export function simulationsView(api: ApiClient): HTMLElement {
  const root = el("section", { class: "view simulations-view" });
  const configBox = el("textarea", { rows: "10", class: "config" });
  configBox.value = JSON.stringify(EXAMPLE_CONFIG, null, 2);
  const status = el("p", { class: "meta" });
  const jobList = el("ul", { class: "picker jobs" });
  const detail = el("div", { class: "detail" });

  const refresh = () => {
    api
      .listSimulations()
      .then((jobs) => {
        clear(jobList);
        for (const job of jobs) jobList.append(jobRow(job));
        if (jobs.length === 0) jobList.append(el("li", { class: "meta" }, "no simulations yet"));
      })
      .catch((err) => {
        status.className = "error";
        status.textContent = String(err);
      });
  };

  const showMetric = (job: SimJobDoc, metric: string) => {
    clear(detail);
    api
      .metrics(job.id, metric)
      .then((series) => {
        const spec = timeseriesSpec(metric, [{ label: metric, t: series.t, v: series.v }]);
        const host = el("div", { class: "plot-host" });
        setSvg(host, renderPlot(spec));
        detail.append(host);
      })
      .catch((err) => detail.append(el("p", { class: "error" }, String(err))));
  };

  const replayOverlay = (job: SimJobDoc, metric: string) => {
    clear(detail);
    detail.append(el("p", { class: "meta" }, "replaying..."));
    api
      .submitSimulation({ mode: "trace_driven", horizon: job.horizon, dt: job.dt }, job.id)
      .then(async (replay) => {
        let snap = replay;
        while (snap.status === "queued" || snap.status === "running") {
          await new Promise((resolve) => setTimeout(resolve, 300));
          snap = await api.simulation(replay.id);
        }
        if (snap.status !== "done") throw new Error(`replay ${snap.status}: ${snap.error ?? ""}`);
        const real = await api.metrics(job.id, metric);
        const replayed = await api.metrics(replay.id, metric);
        const spec = timeseriesSpec(metric, [
          { label: "real", t: real.t, v: real.v },
          { label: "simulated", t: replayed.t, v: replayed.v },
        ]);
        clear(detail);
        const host = el("div", { class: "plot-host" });
        setSvg(host, renderPlot(spec));
        detail.append(host);
        refresh();
      })
      .catch((err) => {
        clear(detail);
        detail.append(el("p", { class: "error" }, String(err)));
      });
  };

  const jobRow = (job: SimJobDoc): HTMLElement => {
    const line = el("li", { class: `job job-${job.status}` }, `${job.id}  ${job.status}  (${job.mode})`);
    if (job.status === "done") {
      line.append(
        el("button", { onclick: () => showMetric(job, "running") }, "running"),
        el("button", { onclick: () => replayOverlay(job, "running") }, "replay overlay"),
      );
    } else if (job.status === "queued" || job.status === "running") {
      line.append(
        el("button", {
          onclick: () => api.cancelSimulation(job.id).then(refresh, refresh),
        }, "cancel"),
      );
    }
    return line;
  };

  const submit = () => {
    let config: Record<string, unknown>;
    try {
      config = JSON.parse(configBox.value);
    } catch (err) {
      status.className = "error";
      status.textContent = `config is not valid JSON: ${String(err)}`;
      return;
    }
    status.className = "meta";
    status.textContent = "submitting...";
    api
      .submitSimulation(config)
      .then((job) => {
        status.textContent = `submitted ${job.id} (${job.status})`;
        refresh();
      })
      .catch((err) => {
        status.className = "error";
        status.textContent = String(err);
      });
  };

  root.append(
    el("h2", {}, "Simulations"),
    configBox,
    el("div", {}, el("button", { class: "primary", onclick: submit }, "Submit"), el("button", { onclick: refresh }, "Refresh")),
    status,
    el("div", { class: "columns" }, jobList, detail),
  );
  refresh();
  return root;
}
