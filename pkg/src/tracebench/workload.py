"""Samplable workload models assembled from fitted distributions.

Each configured quantity draws from its own deterministically seeded
stream, so swapping one distribution never perturbs the draws of the
others.  Count-valued quantities round to the nearest integer with a
floor of 1.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FitError, SimError
from .stats.analysis import NumericVector
from .stats.fitting import Empirical, Exponential, LogNormal, SplineCdf, dist_from_json

CONFIG_SCHEMA_VERSION = 1

SAMPLER_SLOTS = (
    "cpu_per_task",
    "ram_per_task",
    "task_priority",
    "duration_normal_end",
    "duration_killed",
    "tasks_per_job",
    "job_interarrival",
    "machine_failure_interarrival",
    "machine_cpu",
    "machine_ram",
)

INTEGER_SLOTS = ("task_priority", "tasks_per_job")

_TINY = np.finfo(np.float64).tiny


def stream_key(name: str) -> int:
    """Stable 64-bit key for a stream name (process-independent)."""
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class Sampler:
    """Draws from a fitted distribution on a named deterministic stream."""

    def __init__(self, dist, name: str, seed: int, integer: bool = False):
        self.dist = dist
        self.name = name
        self.seed = seed
        self.integer = integer
        self.rng = np.random.default_rng(np.random.SeedSequence([seed, stream_key(name)]))

    def _draw(self, n: int) -> np.ndarray:
        dist = self.dist
        if isinstance(dist, Exponential):
            u = self.rng.random(n)
            u = np.maximum(u, _TINY)  # -ln(0) would be infinite
            return -np.log(u) / dist.rate
        if isinstance(dist, LogNormal):
            z = self.rng.standard_normal(n)
            return np.exp(dist.mu + dist.sigma * z)
        if isinstance(dist, SplineCdf):
            return dist.quantile(self.rng.random(n), tol=1e-10)
        if isinstance(dist, Empirical):
            idx = self.rng.integers(0, dist.samples.size, size=n)
            return dist.samples[idx]
        raise FitError(f"cannot sample from {type(dist).__name__}")

    def sample(self, n: int) -> NumericVector:
        if n < 1:
            raise FitError("sample size must be positive")
        values = self._draw(n)
        if self.integer:
            values = np.maximum(np.rint(values), 1.0)
        return NumericVector(values, source=(self.name, None))

    def one(self) -> float:
        return float(self.sample(1).values[0])


@dataclass
class WorkloadConfig:
    seed: int
    distributions: dict
    memory_cap_fraction: float = 0.5
    kill_fraction: float = 0.0

    def __post_init__(self):
        missing = [s for s in SAMPLER_SLOTS if s not in self.distributions]
        if missing:
            raise SimError(f"workload config missing slots: {', '.join(missing)}")
        if not 0.0 < self.memory_cap_fraction <= 1.0:
            raise SimError(
                f"memory_cap_fraction must be in (0, 1], got {self.memory_cap_fraction}"
            )
        if not 0.0 <= self.kill_fraction <= 1.0:
            raise SimError(f"kill_fraction must be in [0, 1], got {self.kill_fraction}")

    def sampler(self, slot: str, seed: int | None = None) -> Sampler:
        if slot not in self.distributions:
            raise SimError(f"unknown workload slot {slot!r}")
        return Sampler(
            self.distributions[slot],
            slot,
            self.seed if seed is None else seed,
            integer=slot in INTEGER_SLOTS,
        )

    def samplers(self, seed: int | None = None) -> dict:
        return {slot: self.sampler(slot, seed) for slot in SAMPLER_SLOTS}

    def to_json(self) -> dict:
        return {
            "schema_version": CONFIG_SCHEMA_VERSION,
            "seed": self.seed,
            "memory_cap_fraction": self.memory_cap_fraction,
            "kill_fraction": self.kill_fraction,
            "distributions": {
                slot: dist.to_json() for slot, dist in self.distributions.items()
            },
        }

    @classmethod
    def from_json(cls, doc: dict) -> "WorkloadConfig":
        return cls(
            seed=int(doc["seed"]),
            distributions={
                slot: dist_from_json(d) for slot, d in doc["distributions"].items()
            },
            memory_cap_fraction=float(doc.get("memory_cap_fraction", 0.5)),
            kill_fraction=float(doc.get("kill_fraction", 0.0)),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "WorkloadConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def build_workload_config(
    fits: dict,
    overrides: dict | None = None,
    seed: int = 0,
    memory_cap_fraction: float = 0.5,
    kill_fraction: float = 0.0,
) -> WorkloadConfig:
    merged = dict(fits)
    if overrides:
        merged.update(overrides)
    return WorkloadConfig(
        seed=seed,
        distributions={s: merged[s] for s in SAMPLER_SLOTS if s in merged},
        memory_cap_fraction=memory_cap_fraction,
        kill_fraction=kill_fraction,
    )
