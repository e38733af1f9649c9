"""HTTP service backing the web console.

Thin JSON layer over the library: storage browsing, imports, queries,
canned commands, fitting, simulations and series comparison.  Plots are
registered server-side and fetched by id as PlotSpec JSON; rendering is
the client's job.  Simulations run on a bounded worker pool with FIFO
admission; a finished job's results never change.

Every payload carries schema_version; requests with a different version
are rejected with 400.
"""

from __future__ import annotations

import itertools
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .commands.registry import CommandRegistry, default_command_file, instantiate
from .commands.runner import CommandRunner
from .errors import (
    CommandError,
    EvalError,
    FitError,
    ParseError,
    SchemaError,
    SimError,
    StorageError,
    TracebenchError,
)
from .sim.engine import run_simulation
from .sim.entities import config_from_doc
from .stats import analysis
from .storage import core as storage_core
from .validation import SmoothingParams, compare_series, exp_smooth

SCHEMA_VERSION = 1

JOB_QUEUED = "queued"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"
JOB_CANCELLED = "cancelled"


class _CancelledRun(Exception):
    pass


class SimJob:
    """One simulation run; results are set exactly once, on completion."""

    def __init__(self, job_id: str, config):
        self.id = job_id
        self.config = config
        self.status = JOB_QUEUED
        self.error: str | None = None
        self.log = None
        self.metrics = None
        self.cancel_flag = threading.Event()
        self.future = None

    def snapshot(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "status": self.status,
            "mode": self.config.mode,
            "horizon": self.config.horizon,
            "seed": self.config.seed,
            "dt": self.config.dt,
        }
        if self.error is not None:
            doc["error"] = self.error
        if self.log is not None:
            doc["n_events"] = len(self.log.records)
        return doc


class AppState:
    def __init__(self, home: Path, registry_path=None, sim_workers: int | None = None):
        self.home = Path(home)
        self.registry = CommandRegistry.from_file(registry_path or default_command_file())
        self.runner = CommandRunner(self.registry)
        self.handles: dict[str, storage_core.StorageHandle] = {}
        self.plots: dict[str, object] = {}
        self.jobs: dict[str, SimJob] = {}
        self.lock = threading.Lock()
        self._plot_seq = itertools.count(1)
        self._job_seq = itertools.count(1)
        self.pool = ThreadPoolExecutor(max_workers=sim_workers or os.cpu_count() or 2)

    # --- storages --------------------------------------------------------

    def storage(self, sid: str) -> storage_core.StorageHandle:
        with self.lock:
            if sid in self.handles:
                return self.handles[sid]
        path = self.home / sid
        try:
            handle = storage_core.open_storage(path)
        except StorageError:
            raise HTTPException(404, f"no storage named {sid!r}")
        with self.lock:
            return self.handles.setdefault(sid, handle)

    def list_storages(self) -> list[dict]:
        found = {}
        if self.home.is_dir():
            for entry in sorted(self.home.iterdir()):
                try:
                    handle = self.storage(entry.name)
                except HTTPException:
                    continue
                found[handle.id] = {"id": handle.id, "kind": handle.kind}
        with self.lock:
            for sid, handle in self.handles.items():
                found.setdefault(sid, {"id": sid, "kind": handle.kind})
        return [found[k] for k in sorted(found)]

    # --- plots -----------------------------------------------------------

    def register_plots(self, plots) -> list[str]:
        ids = []
        with self.lock:
            for spec in plots:
                pid = f"plot-{next(self._plot_seq)}"
                self.plots[pid] = spec
                ids.append(pid)
        return ids

    # --- simulations -----------------------------------------------------

    def submit_job(self, config) -> SimJob:
        with self.lock:
            job = SimJob(f"sim-{next(self._job_seq)}", config)
            self.jobs[job.id] = job
        job.future = self.pool.submit(self._run_job, job)
        return job

    def _run_job(self, job: SimJob) -> None:
        if job.cancel_flag.is_set():
            job.status = JOB_CANCELLED
            return
        job.status = JOB_RUNNING

        def probe(sim, kind):
            if job.cancel_flag.is_set():
                raise _CancelledRun()

        try:
            log, metrics = run_simulation(job.config, probe=probe)
        except _CancelledRun:
            job.status = JOB_CANCELLED
            return
        except TracebenchError as err:
            job.error = str(err)
            job.status = JOB_FAILED
            return
        job.log = log
        job.metrics = metrics
        job.status = JOB_DONE

    def job(self, job_id: str) -> SimJob:
        with self.lock:
            if job_id not in self.jobs:
                raise HTTPException(404, f"no simulation named {job_id!r}")
            return self.jobs[job_id]


# --- request bodies -------------------------------------------------------


class VersionedRequest(BaseModel):
    schema_version: int = SCHEMA_VERSION


class CreateStorageRequest(VersionedRequest):
    name: str
    kind: str


class ImportRequest(VersionedRequest):
    file: str
    dest: str
    has_header: bool = False


class QueryRequest(VersionedRequest):
    storage: str
    sql: str
    dest: str
    workers: int = 1


class CommandRunRequest(VersionedRequest):
    storage: str
    table: str
    name: str
    args: list[str] = []
    script_override: str | None = None


class FitRequest(VersionedRequest):
    storage: str
    table: str
    column: int
    dist: str
    intervals: int = 20


class SimulationRequest(VersionedRequest):
    config: dict
    trace_of: str | None = None


class CompareRequest(VersionedRequest):
    a: str
    b: str
    metric: str = "running"
    alpha: float | None = None


def _http_error(err: TracebenchError) -> HTTPException:
    if isinstance(err, StorageError):
        text = str(err)
        if "not found" in text or "no storage" in text:
            return HTTPException(404, text)
        if "already exists" in text:
            return HTTPException(409, text)
        return HTTPException(400, text)
    if isinstance(
        err, (ParseError, SchemaError, EvalError, CommandError, FitError, SimError)
    ):
        detail = str(err)
        if isinstance(err, ParseError):
            return HTTPException(400, {"message": detail, **err.diagnostic()})
        return HTTPException(400, detail)
    return HTTPException(500, str(err))


def make_app(
    home: str | Path,
    registry_path=None,
    sim_workers: int | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    state = AppState(Path(home), registry_path, sim_workers)
    app = FastAPI(title="tracebench", version="1")
    app.state.bench = state

    @app.exception_handler(TracebenchError)
    async def _tb_error(request, err):
        http = _http_error(err)
        return JSONResponse(status_code=http.status_code, content={"detail": http.detail})

    def check_version(req: VersionedRequest) -> None:
        if req.schema_version != SCHEMA_VERSION:
            raise HTTPException(
                400,
                f"schema_version {req.schema_version} not supported "
                f"(this service speaks {SCHEMA_VERSION})",
            )

    # --- storages --------------------------------------------------------

    @app.get("/storages")
    def get_storages():
        return {"schema_version": SCHEMA_VERSION, "storages": state.list_storages()}

    @app.post("/storages", status_code=201)
    def post_storage(req: CreateStorageRequest):
        check_version(req)
        if "/" in req.name or req.name.startswith("."):
            raise HTTPException(400, "storage names must be plain directory names")
        path = state.home / req.name
        state.home.mkdir(parents=True, exist_ok=True)
        if path.exists():
            raise HTTPException(409, f"storage {req.name!r} already exists")
        handle = storage_core.create_storage(req.kind, path)
        with state.lock:
            state.handles[handle.id] = handle
        return {"schema_version": SCHEMA_VERSION, "id": handle.id, "kind": handle.kind}

    @app.get("/storages/{sid}/tables")
    def get_tables(sid: str):
        handle = state.storage(sid)
        return {
            "schema_version": SCHEMA_VERSION,
            "storage": sid,
            "tables": [m.to_json() for m in handle.list_tables()],
        }

    @app.get("/storages/{sid}/tables/{table}")
    def get_table_rows(sid: str, table: str, offset: int = 0, limit: int = 100):
        handle = state.storage(sid)
        if offset < 0 or limit < 1:
            raise HTTPException(400, "offset must be >= 0 and limit >= 1")
        meta = handle.table_meta(table)
        data = handle.read_table(table)
        page = data.rows[offset : offset + limit]
        return {
            "schema_version": SCHEMA_VERSION,
            "meta": meta.to_json(),
            "offset": offset,
            "limit": limit,
            "total_rows": len(data.rows),
            "rows": [list(r) for r in page],
        }

    @app.post("/storages/{sid}/import", status_code=201)
    def post_import(sid: str, req: ImportRequest):
        check_version(req)
        handle = state.storage(sid)
        meta = storage_core.import_csv(handle, req.file, req.dest, req.has_header)
        return {"schema_version": SCHEMA_VERSION, "meta": meta.to_json()}

    # --- queries ---------------------------------------------------------

    @app.post("/query", status_code=201)
    def post_query(req: QueryRequest):
        from .query.execute import execute_query

        check_version(req)
        handle = state.storage(req.storage)
        meta = execute_query(req.sql, handle, req.dest, workers=req.workers)
        return {"schema_version": SCHEMA_VERSION, "meta": meta.to_json()}

    # --- commands --------------------------------------------------------

    @app.get("/commands")
    def get_commands():
        return {
            "schema_version": SCHEMA_VERSION,
            "commands": [state.registry.get(n).to_json() for n in state.registry.names()],
        }

    @app.post("/commands/run")
    def post_command_run(req: CommandRunRequest):
        check_version(req)
        handle = state.storage(req.storage)
        spec = state.registry.get(req.name)
        script = req.script_override or instantiate(spec, req.args).rendered
        result = state.runner.run(
            handle, req.table, req.name, req.args, script_override=req.script_override
        )
        doc = result.to_json()
        doc.pop("plots", None)
        return {
            "schema_version": SCHEMA_VERSION,
            "script": script,
            "result": doc,
            "plot_ids": state.register_plots(result.plots),
        }

    # --- fitting ---------------------------------------------------------

    @app.post("/fit")
    def post_fit(req: FitRequest):
        check_version(req)
        handle = state.storage(req.storage)
        table = handle.read_table(req.table)
        vec = analysis.get_column(table, req.column)
        if req.dist == "exponential":
            dist, plots = analysis.fit_exponential(vec)
        elif req.dist == "lognormal":
            dist, plots = analysis.fit_lognormal(vec)
        elif req.dist == "spline":
            dist, plot = analysis.fit_spline_cdf(vec, req.intervals)
            plots = [plot]
        elif req.dist == "ecdf":
            dist, plot = analysis.compute_ecdf(vec)
            plots = [plot]
        else:
            raise HTTPException(400, f"unknown distribution {req.dist!r}")
        return {
            "schema_version": SCHEMA_VERSION,
            "fit": dist.to_json(),
            "plot_ids": state.register_plots(plots),
        }

    # --- plots -----------------------------------------------------------

    @app.get("/plots/{pid}")
    def get_plot(pid: str):
        with state.lock:
            spec = state.plots.get(pid)
        if spec is None:
            raise HTTPException(404, f"no plot named {pid!r}")
        return spec.to_json()

    # --- simulations -----------------------------------------------------

    @app.post("/simulations", status_code=202)
    def post_simulation(req: SimulationRequest):
        check_version(req)
        trace = None
        if req.trace_of is not None:
            src = state.job(req.trace_of)
            if src.status != JOB_DONE:
                raise HTTPException(409, f"simulation {req.trace_of!r} has no results yet")
            trace = src.log
        config = config_from_doc(req.config, trace=trace)
        job = state.submit_job(config)
        return job.snapshot()

    @app.get("/simulations")
    def get_simulations():
        with state.lock:
            jobs = [state.jobs[k] for k in sorted(state.jobs)]
        return {
            "schema_version": SCHEMA_VERSION,
            "simulations": [j.snapshot() for j in jobs],
        }

    @app.get("/simulations/{job_id}")
    def get_simulation(job_id: str):
        return state.job(job_id).snapshot()

    @app.delete("/simulations/{job_id}")
    def delete_simulation(job_id: str):
        job = state.job(job_id)
        job.cancel_flag.set()
        if job.future is not None and job.future.cancel():
            job.status = JOB_CANCELLED
        elif job.status in (JOB_QUEUED, JOB_RUNNING):
            # the worker notices the flag at its next event
            job.future.result()
        return job.snapshot()

    @app.get("/simulations/{job_id}/metrics")
    def get_simulation_metrics(job_id: str, metric: str = "running"):
        job = state.job(job_id)
        if job.status != JOB_DONE:
            raise HTTPException(409, f"simulation {job_id!r} is {job.status}, not done")
        if metric not in job.metrics.series:
            known = ", ".join(sorted(job.metrics.series))
            raise HTTPException(400, f"unknown metric {metric!r}; have: {known}")
        ts = job.metrics.series[metric]
        return {
            "schema_version": SCHEMA_VERSION,
            "id": job_id,
            "metric": metric,
            "t": ts.t.tolist(),
            "v": ts.v.tolist(),
            "dt": ts.dt,
        }

    # --- comparison ------------------------------------------------------

    @app.post("/compare")
    def post_compare(req: CompareRequest):
        check_version(req)
        series = []
        for job_id in (req.a, req.b):
            job = state.job(job_id)
            if job.status != JOB_DONE:
                raise HTTPException(409, f"simulation {job_id!r} is {job.status}, not done")
            if req.metric not in job.metrics.series:
                raise HTTPException(400, f"unknown metric {req.metric!r}")
            series.append(job.metrics.series[req.metric])
        a, b = series
        if req.alpha is not None:
            params = SmoothingParams(alpha=req.alpha)
            a = exp_smooth(a, params)
            b = exp_smooth(b, params)
        report = compare_series(a, b)
        return {
            "schema_version": SCHEMA_VERSION,
            "metric": req.metric,
            "rmse": report.rmse,
            "pearson_r": report.pearson_r,
            "max_abs_diff": report.max_abs_diff,
            "n_samples": report.n_samples,
        }

    # --- console bundle --------------------------------------------------

    if static_dir is not None:
        static_dir = Path(static_dir)
        if not (static_dir / "index.html").is_file():
            raise TracebenchError(f"no index.html under static directory {static_dir}")
        from fastapi.staticfiles import StaticFiles

        # mounted last so the API routes above keep precedence
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app
