"""Command-line entry point.

Subcommands cover the whole toolkit: storage management, CSV import,
queries, canned commands, distribution fitting, simulation, series
comparison, plot rendering, and the HTTP service.  Everything the CLI
can do the service can do too (and vice versa); the parity test drives
both through the same scenario.

Exit codes: 0 success, 1 operational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import ParseError, TracebenchError
from .storage import core as storage_core

PROG = "tracebench"

# category tag shown in stderr diagnostics, keyed by exception class name
_CATEGORIES = {
    "ParseError": "parse",
    "UnsupportedConstructError": "parse",
    "SchemaError": "schema",
    "StorageError": "storage",
    "EvalError": "eval",
    "CommandError": "command",
    "FitError": "fit",
    "SimError": "sim",
}


def default_home() -> Path:
    env = os.environ.get("TRACEBENCH_HOME")
    if env:
        return Path(env)
    return Path.home() / ".tracebench"


def resolve_storage_path(name: str, home: Path | None = None) -> Path:
    """Bare names live under TRACEBENCH_HOME; anything path-like is used as is."""
    if os.sep in name or name.startswith(".") or Path(name).exists():
        return Path(name)
    return (home or default_home()) / name


def _fail(err: TracebenchError) -> int:
    tag = _CATEGORIES.get(type(err).__name__, "error")
    print(f"{PROG}: error [{tag}]: {err}", file=sys.stderr)
    if isinstance(err, ParseError):
        print(json.dumps(err.diagnostic()), file=sys.stderr)
    return 1


def _emit(doc, out: str | None = None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


# --- subcommand bodies ----------------------------------------------------


def _cmd_storage(args) -> int:
    if args.action == "create":
        path = resolve_storage_path(args.name)
        path.parent.mkdir(parents=True, exist_ok=True)
        handle = storage_core.create_storage(args.kind, path)
        _emit({"id": handle.id, "kind": handle.kind, "path": str(handle.root)})
        return 0
    if args.action == "open":
        handle = storage_core.open_storage(resolve_storage_path(args.name))
        _emit(
            {
                "id": handle.id,
                "kind": handle.kind,
                "path": str(handle.root),
                "tables": [m.to_json() for m in handle.list_tables()],
            }
        )
        return 0
    # list: scan the home directory for openable storages
    home = default_home()
    found = []
    if home.is_dir():
        for entry in sorted(home.iterdir()):
            try:
                handle = storage_core.open_storage(entry)
            except TracebenchError:
                continue
            found.append({"id": handle.id, "kind": handle.kind, "path": str(entry)})
    _emit(found)
    return 0


def _cmd_import(args) -> int:
    handle = storage_core.open_storage(resolve_storage_path(args.storage))
    meta = storage_core.import_csv(handle, args.file, args.dest, has_header=args.header)
    _emit(meta.to_json())
    return 0


def _cmd_query(args) -> int:
    from .query.execute import execute_query

    handle = storage_core.open_storage(resolve_storage_path(args.storage))
    meta = execute_query(args.sql, handle, args.dest, workers=args.workers)
    _emit(meta.to_json())
    return 0


def _load_registry(path: str | None):
    from .commands.registry import CommandRegistry, default_command_file

    return CommandRegistry.from_file(path or default_command_file())


def _write_plots(plots, out_dir: str | None) -> list[str]:
    written = []
    if not out_dir:
        return written
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    for i, spec in enumerate(plots):
        path = base / f"{i:02d}_{spec.kind}.json"
        path.write_text(json.dumps(spec.to_json()) + "\n", encoding="utf-8")
        written.append(str(path))
    return written


def _cmd_command(args) -> int:
    from .commands.runner import CommandRunner

    registry = _load_registry(args.commands)
    if args.action == "list":
        _emit([registry.get(n).to_json() for n in registry.names()])
        return 0
    handle = storage_core.open_storage(resolve_storage_path(args.storage))
    runner = CommandRunner(registry)
    result = runner.run(
        handle, args.table, args.name, args.args, script_override=args.script
    )
    doc = result.to_json()
    doc["plot_files"] = _write_plots(result.plots, args.plots)
    _emit(doc, args.out)
    return 0


def _cmd_fit(args) -> int:
    from .stats import analysis

    handle = storage_core.open_storage(resolve_storage_path(args.storage))
    table = handle.read_table(args.table)
    vec = analysis.get_column(table, args.column)
    if args.dist == "exponential":
        dist, plots = analysis.fit_exponential(vec)
    elif args.dist == "lognormal":
        dist, plots = analysis.fit_lognormal(vec)
    elif args.dist == "spline":
        dist, plot = analysis.fit_spline_cdf(vec, args.intervals)
        plots = [plot]
    else:  # ecdf
        dist, plot = analysis.compute_ecdf(vec)
        plots = [plot]
    doc = {"schema_version": 1, "fit": dist.to_json()}
    doc["plot_files"] = _write_plots(plots, args.plots)
    _emit(doc, args.out)
    return 0


def _load_sim_config(args):
    from .sim.entities import EventLog, config_from_doc

    doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    trace = EventLog.from_csv(args.trace) if args.trace else None
    return config_from_doc(
        doc,
        trace=trace,
        horizon=args.horizon,
        seed=args.seed,
        dt=args.dt,
        initial_machines=args.machines,
    )


def _cmd_simulate(args) -> int:
    from .sim.engine import run_simulation

    config = _load_sim_config(args)
    log, metrics = run_simulation(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log_path = log.to_csv(out / "events.csv")
    paths = metrics.export_csv(out)
    _emit(
        {
            "events": str(log_path),
            "n_events": len(log.records),
            "metrics": {k: str(v) for k, v in sorted(paths.items())},
        }
    )
    return 0


def _read_metric_csv(path: Path, metric: str | None):
    import numpy as np

    from .errors import SimError
    from .validation import TimeSeries

    if path.is_dir():
        if not metric:
            raise SimError(f"{path} is a directory; pass --metric to pick a series")
        path = path / f"metric_{metric}.csv"
    if not path.exists():
        raise SimError(f"metric file not found: {path}")
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if not lines or lines[0] != "t,value":
        raise SimError(f"{path} is not a metric CSV (want header 't,value')")
    t, v = [], []
    for line in lines[1:]:
        a, b = line.split(",")
        t.append(float(a))
        v.append(float(b))
    ts = np.asarray(t)
    dt = float(ts[1] - ts[0]) if len(ts) > 1 else 1.0
    return TimeSeries(ts, np.asarray(v), dt)


def _cmd_compare(args) -> int:
    from .validation import SmoothingParams, compare_series, exp_smooth

    a = _read_metric_csv(Path(args.a), args.metric)
    b = _read_metric_csv(Path(args.b), args.metric)
    if args.alpha is not None:
        params = SmoothingParams(alpha=args.alpha)
        a = exp_smooth(a, params)
        b = exp_smooth(b, params)
    report = compare_series(a, b)
    _emit(
        {
            "schema_version": 1,
            "rmse": report.rmse,
            "pearson_r": report.pearson_r,
            "max_abs_diff": report.max_abs_diff,
            "n_samples": report.n_samples,
        },
        args.out,
    )
    return 0


def _cmd_render(args) -> int:
    from .stats.plots import PlotSpec
    from .stats.render import render_plotspec

    doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    spec = PlotSpec.from_json(doc)
    render_plotspec(spec, args.out)
    print(args.out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import make_app

    host, _, port = args.bind.rpartition(":")
    app = make_app(home=default_home(), static_dir=args.static)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Cluster-trace analysis workbench: storage, queries, "
        "commands, fitting, simulation, comparison.",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    p = sub.add_parser("storage", help="create, inspect, or enumerate storages")
    ssub = p.add_subparsers(dest="action", metavar="ACTION")
    c = ssub.add_parser("create", help="create an empty storage")
    c.add_argument("name", help="storage name (under TRACEBENCH_HOME) or path")
    c.add_argument(
        "--kind", required=True, choices=["relational", "partitioned"],
        help="backend kind",
    )
    o = ssub.add_parser("open", help="show a storage's catalog")
    o.add_argument("name")
    ssub.add_parser("list", help="list storages under TRACEBENCH_HOME")
    p.set_defaults(func=_cmd_storage)

    p = sub.add_parser("import", help="import a CSV file as a table")
    p.add_argument("file", help="CSV file to import")
    p.add_argument("--storage", required=True)
    p.add_argument("--dest", required=True, help="name for the new table")
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.set_defaults(func=_cmd_import)

    p = sub.add_parser("query", help="run a SQL query into a new table")
    p.add_argument("--storage", required=True)
    p.add_argument("--sql", required=True)
    p.add_argument("--dest", required=True, help="name for the result table")
    p.add_argument("--workers", type=int, default=1, help="map-reduce workers")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("command", help="run or list canned analysis commands")
    csub = p.add_subparsers(dest="action", metavar="ACTION")
    r = csub.add_parser("run", help="instantiate and run one command")
    r.add_argument("name", help="command name from the command file")
    r.add_argument("args", nargs="*", help="parameter values, in order")
    r.add_argument("--storage", required=True)
    r.add_argument("--table", required=True, help="input table")
    r.add_argument("--script", help="override the rendered script before running")
    r.add_argument("--commands", help="command file (default: bundled set)")
    r.add_argument("--plots", help="directory for PlotSpec JSON output")
    r.add_argument("--out", help="write the result JSON here instead of stdout")
    lst = csub.add_parser("list", help="list available commands")
    lst.add_argument("--commands", help="command file (default: bundled set)")
    p.set_defaults(func=_cmd_command)

    p = sub.add_parser("fit", help="fit a distribution to a table column")
    p.add_argument("--storage", required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--column", type=int, required=True, help="1-based column number")
    p.add_argument(
        "--dist", required=True,
        choices=["exponential", "lognormal", "spline", "ecdf"],
    )
    p.add_argument("--intervals", type=int, default=20, help="spline knot intervals")
    p.add_argument("--plots", help="directory for PlotSpec JSON output")
    p.add_argument("--out", help="write the fit JSON here instead of stdout")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="run the cluster simulator")
    p.add_argument("--config", required=True, help="simulation or workload JSON")
    p.add_argument("--horizon", type=float, help="override horizon (seconds)")
    p.add_argument("--seed", type=int, help="override RNG seed")
    p.add_argument("--dt", type=float, help="override metric sampling step")
    p.add_argument("--machines", type=int, help="override initial machine count")
    p.add_argument("--trace", help="event-log CSV for trace_driven mode")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("compare", help="compare two metric series")
    p.add_argument("a", help="metric CSV or simulate output directory")
    p.add_argument("b", help="metric CSV or simulate output directory")
    p.add_argument("--metric", help="series name when a/b are directories")
    p.add_argument("--alpha", type=float, help="smooth both series first")
    p.add_argument("--dt", type=float, help="unused; kept for symmetry")
    p.add_argument("--out", help="write the report JSON here instead of stdout")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("render", help="render a PlotSpec JSON to SVG")
    p.add_argument("spec", help="PlotSpec JSON file")
    p.add_argument("out", help="output SVG path")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8000", help="host:port")
    p.add_argument(
        "--static",
        default=None,
        metavar="DIR",
        help="also serve a built console bundle from DIR at /",
    )
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 2
    if getattr(args, "subcommand", None) in ("storage", "command") and not args.action:
        print(f"{PROG} {args.subcommand}: missing ACTION (see --help)", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except TracebenchError as err:
        return _fail(err)


if __name__ == "__main__":
    sys.exit(main())
