"""HTTP service: status codes, payload shapes, job lifecycle."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from conftest import workload_doc, write_csv
from tracebench.service import make_app


@pytest.fixture
def client(tmp_path):
    app = make_app(home=tmp_path / "home", sim_workers=2)
    with TestClient(app) as c:
        yield c


@pytest.fixture
def seeded(client, tmp_path):
    """Storage 's1' holding table 'ev' (60 rows, int/int/text)."""
    rows = [(i, (i * 37) % 7 + 1, f"u{i % 3}") for i in range(60)]
    csv_file = write_csv(tmp_path / "ev.csv", rows)
    assert client.post(
        "/storages", json={"name": "s1", "kind": "relational"}
    ).status_code == 201
    r = client.post(
        "/storages/s1/import", json={"file": str(csv_file), "dest": "ev"}
    )
    assert r.status_code == 201, r.text
    return "s1"


def sim_doc(horizon=2000.0, seed=7, **wl):
    wl.setdefault("arrival_rate", 0.02)
    return {
        "mode": "synthetic",
        "horizon": horizon,
        "seed": seed,
        "dt": 100.0,
        "initial_machines": 3,
        "workload": workload_doc(**wl),
    }


def wait_done(client, sim_id, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        doc = client.get(f"/simulations/{sim_id}").json()
        if doc["status"] in ("done", "failed", "cancelled"):
            return doc
        time.sleep(0.02)
    raise AssertionError(f"simulation {sim_id} still {doc['status']}")


# --- storages ---


def test_storage_lifecycle(client):
    assert client.get("/storages").json()["storages"] == []
    r = client.post("/storages", json={"name": "a", "kind": "partitioned"})
    assert r.status_code == 201
    assert r.json() == {"schema_version": 1, "id": "a", "kind": "partitioned"}
    assert client.post(
        "/storages", json={"name": "a", "kind": "partitioned"}
    ).status_code == 409
    listed = client.get("/storages").json()["storages"]
    assert listed == [{"id": "a", "kind": "partitioned"}]


def test_storage_name_must_be_plain(client):
    r = client.post("/storages", json={"name": "../evil", "kind": "relational"})
    assert r.status_code == 400
    assert client.post(
        "/storages", json={"name": ".hidden", "kind": "relational"}
    ).status_code == 400


def test_unknown_storage_404(client):
    assert client.get("/storages/nope/tables").status_code == 404


def test_schema_version_mismatch_rejected(client):
    r = client.post(
        "/storages", json={"schema_version": 2, "name": "x", "kind": "relational"}
    )
    assert r.status_code == 400
    assert "schema_version" in r.json()["detail"]


# --- tables and pagination ---


def test_tables_listing(client, seeded):
    doc = client.get(f"/storages/{seeded}/tables").json()
    assert doc["storage"] == seeded
    (meta,) = doc["tables"]
    assert meta["name"] == "ev"
    assert meta["row_count"] == 60
    assert [c["dtype"] for c in meta["columns"]] == ["int64", "int64", "text"]


def test_row_pagination(client, seeded):
    first = client.get(f"/storages/{seeded}/tables/ev?offset=0&limit=25").json()
    assert first["total_rows"] == 60
    assert len(first["rows"]) == 25
    second = client.get(f"/storages/{seeded}/tables/ev?offset=25&limit=25").json()
    assert second["rows"][0] == [25, (25 * 37) % 7 + 1, "u1"]
    tail = client.get(f"/storages/{seeded}/tables/ev?offset=55&limit=25").json()
    assert len(tail["rows"]) == 5
    beyond = client.get(f"/storages/{seeded}/tables/ev?offset=100&limit=5").json()
    assert beyond["rows"] == [] and beyond["total_rows"] == 60


def test_pagination_bounds(client, seeded):
    assert client.get(f"/storages/{seeded}/tables/ev?offset=-1").status_code == 400
    assert client.get(f"/storages/{seeded}/tables/ev?limit=0").status_code == 400


def test_missing_table_404(client, seeded):
    assert client.get(f"/storages/{seeded}/tables/ghost").status_code == 404


def test_import_missing_file_404(client, seeded):
    r = client.post(
        f"/storages/{seeded}/import", json={"file": "/nonexistent.csv", "dest": "x"}
    )
    assert r.status_code == 404


# --- query ---


def test_query_creates_table(client, seeded):
    r = client.post(
        "/query",
        json={
            "storage": seeded,
            "sql": "SELECT DISTINCT V3 AS V1 FROM ev",
            "dest": "users",
        },
    )
    assert r.status_code == 201
    assert r.json()["meta"]["row_count"] == 3
    rows = client.get(f"/storages/{seeded}/tables/users").json()["rows"]
    assert rows == [["u0"], ["u1"], ["u2"]]


def test_query_parse_error_includes_position(client, seeded):
    r = client.post(
        "/query", json={"storage": seeded, "sql": "SELEC V1 FROM ev", "dest": "x"}
    )
    assert r.status_code == 400
    detail = r.json()["detail"]
    assert {"line", "column", "message"} <= set(detail)


def test_query_dest_collision_409(client, seeded):
    body = {"storage": seeded, "sql": "SELECT V1 FROM ev", "dest": "dup"}
    assert client.post("/query", json=body).status_code == 201
    assert client.post("/query", json=body).status_code == 409


# --- commands ---


def test_commands_catalog(client):
    doc = client.get("/commands").json()
    by_name = {c["name"]: c for c in doc["commands"]}
    assert "log_histogram" in by_name
    spec = by_name["log_histogram"]
    assert spec["param_count"] == 3
    assert len(spec["param_descriptions"]) == 3
    assert "$PAR1$" in spec["template"]


def test_command_run_echoes_script_and_registers_plots(client, seeded):
    r = client.post(
        "/commands/run",
        json={
            "storage": seeded,
            "table": "ev",
            "name": "log_histogram",
            "args": ["2", "0.5", "xy"],
        },
    )
    assert r.status_code == 200, r.text
    doc = r.json()
    assert doc["script"] == "log_histogram(t, 2, 0.5, xy)"
    (pid,) = doc["plot_ids"]
    spec = client.get(f"/plots/{pid}").json()
    assert spec["kind"] == "log_histogram"
    assert spec["x_scale"] == "log" and spec["y_scale"] == "log"
    assert "plots" not in doc["result"]


def test_command_script_override_wins(client, seeded):
    r = client.post(
        "/commands/run",
        json={
            "storage": seeded,
            "table": "ev",
            "name": "get_column",
            "args": ["1"],
            "script_override": "filter(t, t[[1]] < 3)",
        },
    )
    doc = r.json()
    assert doc["script"] == "filter(t, t[[1]] < 3)"
    assert len(doc["result"]["rows"]) == 3


def test_command_unknown_name_400(client, seeded):
    r = client.post(
        "/commands/run",
        json={"storage": seeded, "table": "ev", "name": "nope", "args": []},
    )
    assert r.status_code == 400
    assert "unknown command" in r.json()["detail"]


def test_command_bad_arity_400(client, seeded):
    r = client.post(
        "/commands/run",
        json={"storage": seeded, "table": "ev", "name": "get_column", "args": []},
    )
    assert r.status_code == 400


# --- fit and plots ---


def test_fit_exponential_with_plots(client, seeded):
    r = client.post(
        "/fit",
        json={"storage": seeded, "table": "ev", "column": 2, "dist": "exponential"},
    )
    assert r.status_code == 200
    doc = r.json()
    assert doc["fit"]["family"] == "exponential"
    assert len(doc["plot_ids"]) == 4
    kinds = [client.get(f"/plots/{p}").json()["kind"] for p in doc["plot_ids"]]
    assert kinds == ["density_fit", "cdf_fit", "qq", "pp"]


def test_fit_text_column_400(client, seeded):
    r = client.post(
        "/fit",
        json={"storage": seeded, "table": "ev", "column": 3, "dist": "exponential"},
    )
    assert r.status_code == 400
    assert "numeric" in r.json()["detail"]


def test_fit_unknown_dist_400(client, seeded):
    r = client.post(
        "/fit", json={"storage": seeded, "table": "ev", "column": 2, "dist": "beta"}
    )
    assert r.status_code == 400


def test_unknown_plot_404(client):
    assert client.get("/plots/plot-999").status_code == 404


# --- simulations ---


def test_simulation_lifecycle(client):
    r = client.post("/simulations", json={"config": sim_doc()})
    assert r.status_code == 202
    sim_id = r.json()["id"]
    assert r.json()["status"] in ("queued", "running")
    done = wait_done(client, sim_id)
    assert done["status"] == "done", done
    assert done["n_events"] > 0
    listed = client.get("/simulations").json()["simulations"]
    assert [s["id"] for s in listed] == [sim_id]


def test_simulation_metrics_series(client):
    sim_id = client.post("/simulations", json={"config": sim_doc()}).json()["id"]
    wait_done(client, sim_id)
    m = client.get(f"/simulations/{sim_id}/metrics?metric=running").json()
    assert m["metric"] == "running"
    assert m["dt"] == 100.0
    assert len(m["t"]) == len(m["v"]) == 21  # horizon 2000, dt 100
    assert client.get(
        f"/simulations/{sim_id}/metrics?metric=latency"
    ).status_code == 400


def test_simulation_bare_workload_config(client):
    # a plain workload doc wraps into a day-long synthetic run
    r = client.post("/simulations", json={"config": workload_doc(arrival_rate=0.001)})
    assert r.status_code == 202
    doc = wait_done(client, r.json()["id"])
    assert doc["status"] == "done"
    assert doc["horizon"] == 86400.0


def test_simulation_bad_config_400(client):
    r = client.post("/simulations", json={"config": {"foo": 1}})
    assert r.status_code == 400


def test_simulation_unknown_id_404(client):
    assert client.get("/simulations/sim-99").status_code == 404
    assert client.delete("/simulations/sim-99").status_code == 404


def test_same_seed_same_series(client):
    ids = [
        client.post("/simulations", json={"config": sim_doc(seed=3)}).json()["id"]
        for _ in range(2)
    ]
    for sim_id in ids:
        wait_done(client, sim_id)
    r = client.post("/compare", json={"a": ids[0], "b": ids[1]})
    assert r.status_code == 200
    doc = r.json()
    assert doc["rmse"] == 0.0 and doc["pearson_r"] == 1.0
    a = client.get(f"/simulations/{ids[0]}/metrics?metric=waiting").json()
    b = client.get(f"/simulations/{ids[1]}/metrics?metric=waiting").json()
    assert a["v"] == b["v"]


def test_trace_of_replay_matches(client):
    orig = client.post("/simulations", json={"config": sim_doc(seed=11)}).json()["id"]
    wait_done(client, orig)
    r = client.post(
        "/simulations",
        json={
            "config": {"mode": "trace_driven", "horizon": 2000.0, "dt": 100.0},
            "trace_of": orig,
        },
    )
    assert r.status_code == 202
    replay = r.json()["id"]
    assert wait_done(client, replay)["status"] == "done"
    rep = client.post(
        "/compare", json={"a": orig, "b": replay, "metric": "completed"}
    ).json()
    assert rep["rmse"] == 0.0


def test_trace_of_unfinished_409(client):
    slow = client.post(
        "/simulations", json={"config": sim_doc(horizon=3e6, arrival_rate=0.05)}
    ).json()["id"]
    try:
        r = client.post(
            "/simulations",
            json={
                "config": {"mode": "trace_driven", "horizon": 100.0},
                "trace_of": slow,
            },
        )
        # tolerate the fast machine that already finished the slow job
        status = client.get(f"/simulations/{slow}").json()["status"]
        if status in ("queued", "running"):
            assert r.status_code == 409
    finally:
        client.delete(f"/simulations/{slow}")


def test_cancel_leaves_no_results(client):
    sim_id = client.post(
        "/simulations", json={"config": sim_doc(horizon=3e6, arrival_rate=0.05)}
    ).json()["id"]
    doc = client.delete(f"/simulations/{sim_id}").json()
    assert doc["status"] == "cancelled"
    assert "n_events" not in doc
    assert client.get(f"/simulations/{sim_id}/metrics").status_code == 409


def test_finished_results_are_immutable(client):
    sim_id = client.post("/simulations", json={"config": sim_doc(seed=5)}).json()["id"]
    first = wait_done(client, sim_id)
    series = client.get(f"/simulations/{sim_id}/metrics?metric=running").json()
    # more traffic on the service must not disturb finished results
    client.post("/simulations", json={"config": sim_doc(seed=6)})
    client.delete(f"/simulations/sim-2")
    assert client.get(f"/simulations/{sim_id}").json() == first
    again = client.get(f"/simulations/{sim_id}/metrics?metric=running").json()
    assert again == series


def test_compare_requires_done_jobs(client):
    a = client.post("/simulations", json={"config": sim_doc()}).json()["id"]
    wait_done(client, a)
    slow = client.post(
        "/simulations", json={"config": sim_doc(horizon=3e6, arrival_rate=0.05)}
    ).json()["id"]
    try:
        r = client.post("/compare", json={"a": a, "b": slow})
        status = client.get(f"/simulations/{slow}").json()["status"]
        if status in ("queued", "running"):
            assert r.status_code == 409
    finally:
        client.delete(f"/simulations/{slow}")


def test_compare_dt_mismatch_400(client):
    a = client.post("/simulations", json={"config": sim_doc()}).json()["id"]
    b_cfg = sim_doc()
    b_cfg["dt"] = 50.0
    b = client.post("/simulations", json={"config": b_cfg}).json()["id"]
    wait_done(client, a)
    wait_done(client, b)
    r = client.post("/compare", json={"a": a, "b": b})
    assert r.status_code == 400
    assert "sampling intervals" in r.json()["detail"]


def test_every_payload_carries_schema_version(client, seeded):
    paths = ["/storages", f"/storages/{seeded}/tables", "/commands", "/simulations"]
    for path in paths:
        assert client.get(path).json()["schema_version"] == 1


# --- console bundle ---


def test_static_bundle_served_under_api_routes(tmp_path):
    dist = tmp_path / "dist"
    dist.mkdir()
    dist.joinpath("index.html").write_text("<html><body>console shell</body></html>")
    dist.joinpath("main.js").write_text("export {};")
    app = make_app(home=tmp_path / "home", static_dir=dist)
    with TestClient(app) as c:
        assert "console shell" in c.get("/").text
        assert c.get("/main.js").status_code == 200
        # API keeps precedence over the mounted bundle
        assert c.get("/commands").json()["schema_version"] == 1


def test_static_dir_without_index_rejected(tmp_path):
    from tracebench.errors import TracebenchError

    empty = tmp_path / "dist"
    empty.mkdir()
    with pytest.raises(TracebenchError, match="index.html"):
        make_app(home=tmp_path / "home", static_dir=empty)


def test_no_static_dir_keeps_root_404(client):
    assert client.get("/").status_code == 404
