"""Discrete-event cluster simulator.

Single-threaded and deterministic: the heap orders events by
(time, insertion seq), every random draw comes from a named stream, and
the event log is the single source of truth for metrics, so replaying a
log reproduces the series exactly.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import count
from pathlib import Path

import numpy as np

from ..errors import SimError
from ..workload import stream_key
from .entities import (
    END_KILLED,
    END_NORMAL,
    EV_JOB_ARRIVAL,
    EV_JOB_KILL,
    EV_MACHINE_ADD,
    EV_MACHINE_FAILURE,
    EV_TASK_EVICT,
    EV_TASK_FINISH,
    EV_TASK_KILL,
    EV_TASK_START,
    EV_TASK_SUBMIT,
    EV_FAILURE_REQUEUE,
    MODE_TRACE,
    TASK_COMPLETED,
    TASK_KILLED,
    TASK_RUNNING,
    TASK_WAITING,
    EventLog,
    Job,
    Machine,
    SimConfig,
    Task,
)

_EPS = 1e-12


@dataclass
class MetricsBundle:
    series: dict

    def export_csv(self, out_dir) -> dict:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = {}
        for name, ts in self.series.items():
            path = out_dir / f"metric_{name}.csv"
            lines = ["t,value"]
            lines.extend(f"{float(t)!r},{float(v)!r}" for t, v in zip(ts.t, ts.v))
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            paths[name] = path
        return paths

    def to_json(self) -> dict:
        return {
            name: {"t": ts.t.tolist(), "v": ts.v.tolist(), "dt": ts.dt}
            for name, ts in self.series.items()
        }


class Simulation:
    def __init__(self, config: SimConfig):
        self.config = config
        self.now = 0.0
        self.log = EventLog()
        self.tasks: dict[int, Task] = {}
        self.jobs: dict[int, Job] = {}
        self.machines: dict[int, Machine] = {}
        self.waiting: list[Task] = []
        self._heap: list = []
        self._eseq = count()
        self._job_seq = count(1)
        self._task_seq = count(1)
        self._processed = 0
        if config.mode == MODE_TRACE:
            return

        w = config.workload
        self._samplers = w.samplers(seed=config.seed)
        self._end_rng = np.random.default_rng(
            np.random.SeedSequence([config.seed, stream_key("job_end_type")])
        )
        self._fail_rng = np.random.default_rng(
            np.random.SeedSequence([config.seed, stream_key("failure_target")])
        )
        for mid in range(1, config.initial_machines + 1):
            cpu = self._samplers["machine_cpu"].one()
            ram = self._samplers["machine_ram"].one()
            self.machines[mid] = Machine(mid, cpu, ram, w.memory_cap_fraction)
            self.log.append(0.0, EV_MACHINE_ADD, machine_id=mid)
        self._push(self._samplers["job_interarrival"].one(), EV_JOB_ARRIVAL, None)
        self._push(
            self._samplers["machine_failure_interarrival"].one(), EV_MACHINE_FAILURE, None
        )

    # --- event plumbing ---------------------------------------------------

    def _push(self, time: float, kind: str, payload) -> None:
        heapq.heappush(self._heap, (time, next(self._eseq), kind, payload))

    def _record(self, kind, job_id=None, task_id=None, machine_id=None) -> None:
        self.log.append(self.now, kind, job_id, task_id, machine_id)

    # --- scheduler --------------------------------------------------------

    def _up_machines(self) -> list[Machine]:
        return [self.machines[k] for k in sorted(self.machines) if self.machines[k].up]

    def _eviction_set(self, machine: Machine, task: Task):
        """Smallest prefix of strictly-lower-priority victims (lowest
        priority first, then latest start) freeing enough CPU and RAM."""
        need_cpu = task.cpu_req - (machine.cpu_capacity - machine.cpu_used)
        need_ram = task.ram_req - (machine.ram_effective - machine.ram_used)
        candidates = sorted(
            (t for t in machine.running.values() if t.priority < task.priority),
            key=lambda t: (t.priority, -t.start_time, -t.id),
        )
        chosen = []
        got_cpu = got_ram = 0.0
        for victim in candidates:
            if got_cpu >= need_cpu - _EPS and got_ram >= need_ram - _EPS:
                break
            chosen.append(victim)
            got_cpu += victim.cpu_req
            got_ram += victim.ram_req
        if chosen and got_cpu >= need_cpu - _EPS and got_ram >= need_ram - _EPS:
            return chosen
        return None

    def _start(self, task: Task, machine: Machine) -> None:
        machine.place(task)
        task.state = TASK_RUNNING
        task.machine = machine.id
        task.start_time = self.now
        task.incarnation += 1
        self._record(EV_TASK_START, task.job_id, task.id, machine.id)
        self._push(self.now + task.remaining, EV_TASK_FINISH, (task.id, task.incarnation))

    def _requeue(self, task: Task, machine: Machine, kind: str) -> None:
        machine.remove(task)
        task.state = TASK_WAITING
        task.machine = None
        task.remaining = task.total_duration  # restart from zero progress
        task.start_time = None
        task.incarnation += 1
        if kind == EV_TASK_EVICT:
            task.eviction_count += 1
        self._record(kind, task.job_id, task.id, machine.id)
        self.waiting.append(task)

    def _try_place(self, task: Task) -> bool:
        ups = self._up_machines()
        for machine in ups:
            if machine.fits(task):
                self._start(task, machine)
                return True
        for machine in ups:
            victims = self._eviction_set(machine, task)
            if victims is not None:
                for victim in victims:
                    self._requeue(victim, machine, EV_TASK_EVICT)
                self._start(task, machine)
                return True
        return False

    def _sched_pass(self) -> None:
        i = 0
        while i < len(self.waiting):
            if self._try_place(self.waiting[i]):
                del self.waiting[i]
            else:
                i += 1

    # --- event handlers ---------------------------------------------------

    def _on_job_arrival(self, _payload) -> None:
        s = self._samplers
        w = self.config.workload
        jid = next(self._job_seq)
        n_tasks = int(s["tasks_per_job"].one())
        killed = bool(self._end_rng.random() < w.kill_fraction)
        job = Job(jid, self.now, END_KILLED if killed else END_NORMAL)
        self.jobs[jid] = job
        self._record(EV_JOB_ARRIVAL, job_id=jid)
        for _ in range(n_tasks):
            tid = next(self._task_seq)
            task = Task(
                id=tid,
                job_id=jid,
                cpu_req=s["cpu_per_task"].one(),
                ram_req=s["ram_per_task"].one(),
                priority=int(s["task_priority"].one()),
                total_duration=s["duration_normal_end"].one(),
            )
            self.tasks[tid] = task
            job.task_ids.append(tid)
            self._push(self.now + self.config.network_delay, EV_TASK_SUBMIT, tid)
        if killed:
            self._push(self.now + s["duration_killed"].one(), EV_JOB_KILL, jid)
        self._push(self.now + s["job_interarrival"].one(), EV_JOB_ARRIVAL, None)

    def _on_task_submit(self, tid: int) -> None:
        task = self.tasks[tid]
        if task.state != TASK_WAITING:
            return  # job was killed before the submission landed
        self.waiting.append(task)
        self._record(EV_TASK_SUBMIT, task.job_id, task.id)
        self._sched_pass()

    def _on_task_finish(self, payload) -> None:
        tid, incarnation = payload
        task = self.tasks[tid]
        if task.state != TASK_RUNNING or task.incarnation != incarnation:
            return  # superseded by eviction, failure or kill
        machine = self.machines[task.machine]
        machine.remove(task)
        task.state = TASK_COMPLETED
        task.machine = None
        task.remaining = 0.0
        self._record(EV_TASK_FINISH, task.job_id, task.id, machine.id)
        self._sched_pass()

    def _on_job_kill(self, jid: int) -> None:
        job = self.jobs[jid]
        pending = [
            self.tasks[t]
            for t in job.task_ids
            if self.tasks[t].state in (TASK_WAITING, TASK_RUNNING)
        ]
        if not pending:
            return  # all tasks already done; nothing to abort
        self._record(EV_JOB_KILL, job_id=jid)
        for task in pending:
            if task.state == TASK_RUNNING:
                machine = self.machines[task.machine]
                machine.remove(task)
                self._record(EV_TASK_KILL, task.job_id, task.id, machine.id)
            else:
                try:
                    self.waiting.remove(task)
                except ValueError:
                    # never submitted; it leaves no trace in the log
                    task.state = TASK_KILLED
                    task.incarnation += 1
                    continue
                self._record(EV_TASK_KILL, task.job_id, task.id)
            task.state = TASK_KILLED
            task.machine = None
            task.incarnation += 1
        self._sched_pass()

    def _on_machine_failure(self, _payload) -> None:
        ups = self._up_machines()
        if ups:
            machine = ups[int(self._fail_rng.integers(0, len(ups)))]
            self._record(EV_MACHINE_FAILURE, machine_id=machine.id)
            for task in sorted(machine.running.values(), key=lambda t: t.id):
                self._requeue(task, machine, EV_FAILURE_REQUEUE)
            machine.up = False
            if self.config.machine_downtime is not None:
                self._push(
                    self.now + self.config.machine_downtime, EV_MACHINE_ADD, machine.id
                )
            self._sched_pass()
        self._push(
            self.now + self._samplers["machine_failure_interarrival"].one(),
            EV_MACHINE_FAILURE,
            None,
        )

    def _on_machine_add(self, mid: int) -> None:
        machine = self.machines[mid]
        machine.up = True
        self._record(EV_MACHINE_ADD, machine_id=mid)
        self._sched_pass()

    # --- main loop --------------------------------------------------------

    def run(self, probe=None):
        """Processes events up to the horizon; returns (EventLog, MetricsBundle).

        probe, if given, is called as probe(sim, kind) after every event,
        which is where invariant checks can hook in.
        """
        config = self.config
        if config.mode == MODE_TRACE:
            return self._run_trace()
        handlers = {
            EV_JOB_ARRIVAL: self._on_job_arrival,
            EV_TASK_SUBMIT: self._on_task_submit,
            EV_TASK_FINISH: self._on_task_finish,
            EV_JOB_KILL: self._on_job_kill,
            EV_MACHINE_FAILURE: self._on_machine_failure,
            EV_MACHINE_ADD: self._on_machine_add,
        }
        while self._heap and self._heap[0][0] <= config.horizon:
            self._processed += 1
            if self._processed > config.max_events:
                raise SimError(
                    f"event ceiling of {config.max_events} reached at "
                    f"t={self.now:.3f}; runaway configuration?"
                )
            time, _seq, kind, payload = heapq.heappop(self._heap)
            self.now = time
            handlers[kind](payload)
            if probe is not None:
                probe(self, kind)
        self.now = config.horizon
        return self.log, self._metrics()

    def _metrics(self) -> MetricsBundle:
        # imported here: validation also imports sim.entities
        from ..validation import METRICS, extract_metric_series

        return MetricsBundle(
            {
                m: extract_metric_series(self.log, m, self.config.dt, self.config.horizon)
                for m in METRICS
            }
        )

    def _run_trace(self):
        config = self.config
        records = [r for r in config.trace if r.time <= config.horizon]
        self.log = EventLog(records)
        self.now = config.horizon
        return self.log, self._metrics()


def init_simulation(config: SimConfig) -> Simulation:
    return Simulation(config)


def run_simulation(config: SimConfig, probe=None):
    return Simulation(config).run(probe=probe)
