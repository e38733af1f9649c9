import numpy as np
import pytest

from tracebench.storage.core import create_storage


@pytest.fixture
def rel_storage(tmp_path):
    return create_storage("relational", tmp_path / "rel")


@pytest.fixture
def part_storage(tmp_path):
    return create_storage("partitioned", tmp_path / "part")


@pytest.fixture(params=["relational", "partitioned"])
def any_storage(request, tmp_path):
    return create_storage(request.param, tmp_path / f"s_{request.param}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def write_csv(path, rows):
    path.write_text("\n".join(",".join(str(c) for c in row) for row in rows) + "\n")
    return path


@pytest.fixture
def events_csv(tmp_path, rng):
    """Miniature task_events table: time, job id, job id again, task id, duration.

    V3 duplicates V2 so that SELECT DISTINCT V3, V4 has real work to do,
    mirroring the shape the analysis pipeline expects.
    """
    rows = []
    for i in range(2000):
        jid = int(rng.integers(1, 40))
        tid = int(rng.integers(0, 90))
        dur = float(rng.exponential(3000.0))
        rows.append((i * 7, jid, jid, tid, f"{dur:.3f}"))
    return write_csv(tmp_path / "task_events.csv", rows)


def workload_doc(seed=3, arrival_rate=0.01, duration_rate=0.002, kill_fraction=0.0,
                 failure_rate=1e-7, task_cpu_mu=-2.0, tasks_mu=1.0):
    return {
        "schema_version": 1,
        "seed": seed,
        "memory_cap_fraction": 0.5,
        "kill_fraction": kill_fraction,
        "distributions": {
            "job_interarrival": {"family": "exponential", "rate": arrival_rate},
            "machine_failure_interarrival": {"family": "exponential", "rate": failure_rate},
            "machine_cpu": {"family": "lognormal", "mu": 1.0, "sigma": 0.1},
            "machine_ram": {"family": "lognormal", "mu": 1.5, "sigma": 0.1},
            "cpu_per_task": {"family": "lognormal", "mu": task_cpu_mu, "sigma": 0.3},
            "ram_per_task": {"family": "lognormal", "mu": task_cpu_mu, "sigma": 0.3},
            "task_priority": {"family": "lognormal", "mu": 1.0, "sigma": 0.5},
            "duration_normal_end": {"family": "exponential", "rate": duration_rate},
            "duration_killed": {"family": "exponential", "rate": 0.001},
            "tasks_per_job": {"family": "lognormal", "mu": tasks_mu, "sigma": 0.5},
        },
    }


@pytest.fixture
def workload_config():
    from tracebench.workload import WorkloadConfig

    return WorkloadConfig.from_json(workload_doc())
