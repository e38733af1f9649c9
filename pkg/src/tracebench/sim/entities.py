"""Simulation domain objects: tasks, jobs, machines, events and the log."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import SimError
from ..workload import WorkloadConfig

TASK_WAITING = "waiting"
TASK_RUNNING = "running"
TASK_COMPLETED = "completed"
TASK_KILLED = "killed"

END_NORMAL = "normal"
END_KILLED = "killed"

MODE_SYNTHETIC = "synthetic"
MODE_TRACE = "trace_driven"

EV_JOB_ARRIVAL = "job_arrival"
EV_TASK_SUBMIT = "task_submit"
EV_TASK_START = "task_start"
EV_TASK_FINISH = "task_finish"
EV_TASK_EVICT = "task_evict"
EV_TASK_KILL = "task_kill"
EV_JOB_KILL = "job_kill"
EV_FAILURE_REQUEUE = "failure_requeue"
EV_MACHINE_ADD = "machine_add"
EV_MACHINE_REMOVE = "machine_remove"
EV_MACHINE_FAILURE = "machine_failure"

EVENT_KINDS = (
    EV_JOB_ARRIVAL,
    EV_TASK_SUBMIT,
    EV_TASK_START,
    EV_TASK_FINISH,
    EV_TASK_EVICT,
    EV_TASK_KILL,
    EV_JOB_KILL,
    EV_FAILURE_REQUEUE,
    EV_MACHINE_ADD,
    EV_MACHINE_REMOVE,
    EV_MACHINE_FAILURE,
)


@dataclass
class Task:
    id: int
    job_id: int
    cpu_req: float
    ram_req: float
    priority: int
    total_duration: float
    state: str = TASK_WAITING
    machine: int | None = None
    remaining: float = 0.0
    eviction_count: int = 0
    start_time: float | None = None
    # bumped on every start/evict/kill so stale finish events are ignored
    incarnation: int = 0

    def __post_init__(self):
        if self.remaining == 0.0:
            self.remaining = self.total_duration


@dataclass
class Job:
    id: int
    arrival_time: float
    end_type: str = END_NORMAL
    task_ids: list = field(default_factory=list)


class Machine:
    def __init__(self, id: int, cpu_capacity: float, ram_installed: float, cap_fraction: float):
        self.id = id
        self.cpu_capacity = float(cpu_capacity)
        self.ram_installed = float(ram_installed)
        self.ram_effective = cap_fraction * float(ram_installed)
        self.up = True
        self.running: dict[int, Task] = {}
        self.cpu_used = 0.0
        self.ram_used = 0.0

    def fits(self, task: Task) -> bool:
        return (
            self.up
            and self.cpu_used + task.cpu_req <= self.cpu_capacity + 1e-12
            and self.ram_used + task.ram_req <= self.ram_effective + 1e-12
        )

    def place(self, task: Task) -> None:
        if not self.fits(task):
            raise SimError(
                f"capacity violated placing task {task.id} on machine {self.id}"
            )
        self.running[task.id] = task
        self.cpu_used += task.cpu_req
        self.ram_used += task.ram_req

    def remove(self, task: Task) -> None:
        if task.id not in self.running:
            raise SimError(f"task {task.id} is not on machine {self.id}")
        del self.running[task.id]
        self.cpu_used -= task.cpu_req
        self.ram_used -= task.ram_req
        if not self.running:  # clear float drift on empty machines
            self.cpu_used = 0.0
            self.ram_used = 0.0


@dataclass(frozen=True)
class LogRecord:
    time: float
    seq: int
    kind: str
    job_id: int | None = None
    task_id: int | None = None
    machine_id: int | None = None


_LOG_HEADER = ("time", "seq", "kind", "job_id", "task_id", "machine_id")


class EventLog:
    """Append-only record of every state transition, exportable as CSV."""

    def __init__(self, records: list[LogRecord] | None = None):
        self.records: list[LogRecord] = list(records) if records else []

    def append(self, time, kind, job_id=None, task_id=None, machine_id=None) -> LogRecord:
        rec = LogRecord(float(time), len(self.records), kind, job_id, task_id, machine_id)
        self.records.append(rec)
        return rec

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __eq__(self, other) -> bool:
        return isinstance(other, EventLog) and self.records == other.records

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_LOG_HEADER)
        for r in self.records:
            w.writerow(
                [
                    repr(r.time),
                    r.seq,
                    r.kind,
                    "" if r.job_id is None else r.job_id,
                    "" if r.task_id is None else r.task_id,
                    "" if r.machine_id is None else r.machine_id,
                ]
            )
        return buf.getvalue()

    def to_csv(self, path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv_text(), encoding="utf-8")
        return path

    @classmethod
    def from_rows(cls, rows) -> "EventLog":
        """Rows of (time, seq, kind, job_id, task_id, machine_id); empty and
        None id cells mean absent.  Rows are sorted by (time, seq)."""
        records = []
        for row in rows:
            time, seq, kind, job_id, task_id, machine_id = row
            if kind not in EVENT_KINDS:
                raise SimError(f"unknown event kind {kind!r} in trace")

            def _opt(v):
                if v is None or v == "":
                    return None
                return int(v)

            records.append(
                LogRecord(float(time), int(seq), str(kind), _opt(job_id), _opt(task_id), _opt(machine_id))
            )
        records.sort(key=lambda r: (r.time, r.seq))
        return cls(records)

    @classmethod
    def from_csv(cls, path) -> "EventLog":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != _LOG_HEADER:
                raise SimError(f"{path}: not an event log (bad header)")
            return cls.from_rows([row for row in reader if row])

    def storage_rows(self) -> list[tuple]:
        return [
            (r.time, r.seq, r.kind, r.job_id, r.task_id, r.machine_id)
            for r in self.records
        ]


@dataclass
class SimConfig:
    mode: str
    horizon: float
    seed: int = 0
    workload: WorkloadConfig | None = None
    trace: EventLog | None = None
    initial_machines: int = 10
    dt: float = 300.0
    network_delay: float = 0.0
    # seconds a failed machine stays down; None means it never returns
    machine_downtime: float | None = 3600.0
    max_events: int = 5_000_000

    def __post_init__(self):
        if self.mode not in (MODE_SYNTHETIC, MODE_TRACE):
            raise SimError(f"unknown simulation mode {self.mode!r}")
        if not self.horizon > 0:
            raise SimError(f"horizon must be positive, got {self.horizon}")
        if self.mode == MODE_SYNTHETIC:
            if self.workload is None:
                raise SimError("synthetic mode requires a workload config")
            if self.initial_machines < 1:
                raise SimError("need at least one machine")
        if self.mode == MODE_TRACE and self.trace is None:
            raise SimError("trace_driven mode requires an event log")
        if self.dt <= 0:
            raise SimError("dt must be positive")

    def to_json(self) -> dict:
        doc = {
            "schema_version": 1,
            "mode": self.mode,
            "horizon": self.horizon,
            "seed": self.seed,
            "initial_machines": self.initial_machines,
            "dt": self.dt,
            "network_delay": self.network_delay,
            "machine_downtime": self.machine_downtime,
            "max_events": self.max_events,
        }
        if self.workload is not None:
            doc["workload"] = self.workload.to_json()
        return doc

    @classmethod
    def from_json(cls, doc: dict, trace: EventLog | None = None) -> "SimConfig":
        workload = None
        if doc.get("workload") is not None:
            workload = WorkloadConfig.from_json(doc["workload"])
        return cls(
            mode=doc["mode"],
            horizon=float(doc["horizon"]),
            seed=int(doc.get("seed", 0)),
            workload=workload,
            trace=trace,
            initial_machines=int(doc.get("initial_machines", 10)),
            dt=float(doc.get("dt", 300.0)),
            network_delay=float(doc.get("network_delay", 0.0)),
            machine_downtime=doc.get("machine_downtime", 3600.0),
            max_events=int(doc.get("max_events", 5_000_000)),
        )


def config_from_doc(doc: dict, trace: EventLog | None = None, **overrides) -> SimConfig:
    """Build a SimConfig from either a full config doc or a bare workload doc.

    A doc with a "mode" key is a serialized SimConfig; one with a
    "distributions" key is a WorkloadConfig and gets wrapped in a
    synthetic run.  Keyword overrides (horizon, seed, ...) replace
    fields when not None.
    """
    import dataclasses

    if "mode" in doc:
        config = SimConfig.from_json(doc, trace=trace)
    elif "distributions" in doc:
        config = SimConfig(
            mode=MODE_SYNTHETIC,
            horizon=float(overrides.pop("horizon", None) or 86_400.0),
            workload=WorkloadConfig.from_json(doc),
            trace=trace,
        )
    else:
        raise SimError("config document is neither a simulation nor a workload config")
    live = {k: v for k, v in overrides.items() if v is not None}
    if live:
        config = dataclasses.replace(config, **live)
    return config
