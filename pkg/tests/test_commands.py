import pytest

from tracebench.commands.registry import (
    CommandRegistry,
    CommandSpec,
    default_command_file,
    instantiate,
    load_command_file,
    parse_command_block,
    serialize_specs,
    split_blocks,
)
from tracebench.commands.runner import CommandRunner
from tracebench.errors import CommandError
from tracebench.storage.core import ColumnMeta, create_storage

# --- file grammar ---------------------------------------------------------


def test_split_blocks_drops_blank_runs():
    text = "a\nb\n\n\n\nc\n\nd\ne\n"
    assert split_blocks(text) == [["a", "b"], ["c"], ["d", "e"]]


def test_parse_block_shape():
    spec = parse_command_block(["histo", "2", "first", "second", "histo(t, $PAR1$, $PAR2$)"])
    assert spec.name == "histo"
    assert spec.param_count == 2
    assert spec.param_descriptions == ("first", "second")
    assert spec.template == "histo(t, $PAR1$, $PAR2$)"


def test_parse_block_multiline_code():
    spec = parse_command_block(["two_step", "0", "filter(t, t[[1]] > 0)", "ecdf(t)"])
    assert spec.template == "filter(t, t[[1]] > 0)\necdf(t)"


@pytest.mark.parametrize(
    "block,fragment",
    [
        (["solo"], "missing"),
        (["c", "x"], "integer"),
        (["c", "-1"], "negative"),
        (["c", "3", "d1", "c(t, $PAR1$)"], "description"),
        (["c", "1", "desc"], "code"),
        (["c", "0", "c(t, $PAR1$)"], "range"),
    ],
)
def test_malformed_blocks_rejected(block, fragment):
    with pytest.raises(CommandError, match=fragment):
        parse_command_block(block)


def test_duplicate_names_rejected(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("a\n0\na(t)\n\na\n0\na(t)\n")
    with pytest.raises(CommandError, match="duplicate"):
        load_command_file(path)


def test_serialize_roundtrip(tmp_path):
    specs = load_command_file(default_command_file())
    text = serialize_specs(specs)
    path = tmp_path / "again.txt"
    path.write_text(text)
    assert load_command_file(path) == specs


def test_bundled_file_contents():
    specs = load_command_file(default_command_file())
    names = [s.name for s in specs]
    # the classic analysis set plus the distributed count
    for expected in (
        "get_column",
        "apply_1Col",
        "aggregate",
        "difference_between_rows",
        "filter",
        "exponential_distribution",
        "lognormal_distribution",
        "polynomial_regression",
        "ecdf",
        "spline",
        "log_histogram",
        "mapreduce_count",
    ):
        assert expected in names


# --- substitution ---------------------------------------------------------


def test_instantiate_renders_placeholders():
    reg = CommandRegistry.from_file(default_command_file())
    inv = instantiate(reg.get("log_histogram"), ["1", "0.06", "xy"])
    assert inv.rendered == "log_histogram(t, 1, 0.06, xy)"


def test_instantiate_checks_arity():
    spec = CommandSpec("f", 2, ("a", "b"), "f(t, $PAR1$, $PAR2$)")
    with pytest.raises(CommandError, match="takes 2 parameters"):
        instantiate(spec, ["only"])


def test_instantiate_is_single_pass():
    # an argument that itself contains placeholder text must stay literal
    spec = CommandSpec("f", 2, ("a", "b"), "f($PAR1$, $PAR2$)")
    inv = instantiate(spec, ["$PAR2$", "x"])
    assert inv.rendered == "f($PAR2$, x)"


def test_placeholder_repeated_use():
    spec = CommandSpec("f", 1, ("a",), "f($PAR1$, $PAR1$)")
    assert instantiate(spec, ["7"]).rendered == "f(7, 7)"


# --- registry -------------------------------------------------------------


def test_registry_lookup_and_errors(tmp_path):
    reg = CommandRegistry.from_file(default_command_file())
    assert "filter" in reg
    assert len(reg) >= 12
    with pytest.raises(CommandError, match="unknown command"):
        reg.get("nonesuch")


def test_registry_reload_discovers_new_command(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("first\n0\nfirst(t)\n")
    reg = CommandRegistry.from_file(path)
    assert reg.names() == ["first"]
    path.write_text("first\n0\nfirst(t)\n\nsecond\n1\nparam\nsecond(t, $PAR1$)\n")
    reg.reload()
    assert reg.names() == ["first", "second"]
    assert reg.get("second").param_count == 1


def test_registry_reload_failure_keeps_old_set(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("first\n0\nfirst(t)\n")
    reg = CommandRegistry.from_file(path)
    path.write_text("broken\nnot_a_number\nbroken(t)\n")
    with pytest.raises(CommandError):
        reg.reload()
    assert reg.names() == ["first"]  # atomic swap: nothing half-applied


# --- runner ---------------------------------------------------------------


@pytest.fixture
def runner():
    return CommandRunner(CommandRegistry.from_file(default_command_file()))


@pytest.fixture
def loaded(tmp_path):
    s = create_storage("partitioned", tmp_path / "s")
    cols = (ColumnMeta("V1", "int64"), ColumnMeta("V2", "float64"))
    rows = [(i % 5, float(i) * 1.5) for i in range(50)]
    s.write_table("t", cols, rows, "imported")
    return s


def test_runner_get_column_then_filter(runner, loaded):
    res = runner.run_pipeline(
        loaded, "t", [("get_column", ["2"]), ("filter", ["t[[1]] < 30."])]
    )[-1]
    assert res.kind == "table"
    assert all(r[0] < 30 for r in res.value.rows)
    assert res.value.columns[0].dtype == "float64"


def test_runner_apply(runner, loaded):
    res = runner.run_pipeline(
        loaded, "t", [("get_column", ["1"]), ("apply_1Col", ["x + 100"])]
    )[-1]
    assert [r[0] for r in res.value.rows][:5] == [100, 101, 102, 103, 104]


def test_runner_aggregate(runner, loaded):
    res = runner.run(loaded, "t", "aggregate", ["1", "t[[2]] >= 0.", "count"])
    assert res.kind == "table"
    assert res.value.rows == [(k, 10) for k in range(5)]


def test_runner_difference(runner, loaded):
    res = runner.run_pipeline(
        loaded, "t", [("get_column", ["1"]), ("difference_between_rows", [])]
    )[-1]
    assert len(res.value.rows) == 49


def test_runner_fit_produces_plots(runner, tmp_path):
    import numpy as np

    s = create_storage("relational", tmp_path / "fit")
    rng = np.random.default_rng(0)
    vals = rng.exponential(10.0, 3000)
    s.write_table("d", (ColumnMeta("V1", "float64"),), [(float(v),) for v in vals], "imported")
    res = runner.run(s, "d", "exponential_distribution", [])
    assert res.kind == "distribution"
    assert res.value.to_json()["rate"] == pytest.approx(0.1, rel=0.1)
    assert [p.kind for p in res.plots] == ["density_fit", "cdf_fit", "qq", "pp"]


def test_runner_log_histogram(runner, loaded):
    res = runner.run_pipeline(
        loaded,
        "t",
        [("get_column", ["2"]), ("filter", ["t[[1]] > 0."]), ("log_histogram", ["1", "0.06", "xy"])],
    )[-1]
    assert res.kind == "plot"
    spec = res.plots[0]
    assert spec.x_scale == "log" and spec.y_scale == "log"


def test_runner_mapreduce_count(runner, loaded):
    res = runner.run(loaded, "t", "mapreduce_count", ["1", "counted"])
    assert res.kind == "table"
    assert res.value.rows == [(k, 10) for k in range(5)]
    # the result also landed as a table in storage
    assert loaded.read_table("counted").rows == res.value.rows


def test_runner_script_override_wins(runner, loaded):
    normal = runner.run(loaded, "t", "filter", ["t[[1]] < 2"])
    overridden = runner.run(
        loaded, "t", "filter", ["t[[1]] < 2"], script_override="filter(t, t[[1]] < 4)"
    )
    assert len(overridden.value.rows) > len(normal.value.rows)


def test_runner_bad_script_carries_text(runner, loaded):
    with pytest.raises(CommandError) as exc:
        runner.run(loaded, "t", "filter", ["t[[99]] < 1"])
    assert exc.value.script == "filter(t, t[[99]] < 1)"


def test_runner_unknown_command(runner, loaded):
    with pytest.raises(CommandError, match="unknown command"):
        runner.run(loaded, "t", "csv_export", [])
