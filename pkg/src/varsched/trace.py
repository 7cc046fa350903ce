"""Job trace loading, writing, and Poisson-arrival synthesis."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .scheduling import Job

TRACE_COLUMNS = ("job_id", "arrival_time_s", "gpu_demand", "class",
                 "total_iterations", "base_iter_time_s")


@dataclass(frozen=True)
class TraceSpec:
    num_jobs: int
    arrival_rate: float  # jobs per hour
    demand_distribution: list  # [(gpu_demand, probability), ...]
    class_distribution: list  # [(class, probability), ...]
    iteration_range: dict  # class -> (min_iters, max_iters)
    base_iter_time_range: dict  # class -> (min_s, max_s)
    seed: int = 0

    def __post_init__(self):
        if self.num_jobs < 1:
            raise ValueError("num_jobs must be >= 1")
        if self.arrival_rate <= 0.0:
            raise ValueError("arrival_rate must be positive")
        for name, dist in (("demand", self.demand_distribution),
                           ("class", self.class_distribution)):
            total = sum(p for _, p in dist)
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"{name} distribution probabilities sum to {total}")
        for demand, _ in self.demand_distribution:
            if demand < 1:
                raise ValueError(f"gpu_demand {demand} must be >= 1")


def load_trace(path) -> list:
    """Read a trace CSV into Job templates, sorted by arrival time."""
    jobs = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = set(TRACE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for i, row in enumerate(reader, start=2):
            try:
                jobs.append(Job(job_id=int(row["job_id"]),
                                arrival_time=float(row["arrival_time_s"]),
                                gpu_demand=int(row["gpu_demand"]),
                                cls=int(row["class"]),
                                total_iterations=int(row["total_iterations"]),
                                base_iter_time=float(row["base_iter_time_s"])))
            except (KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}: row {i}: {e}") from e
    jobs.sort(key=lambda j: (j.arrival_time, j.job_id))
    return jobs


def write_trace(jobs, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(TRACE_COLUMNS)
        for j in jobs:
            w.writerow([j.job_id, repr(float(j.arrival_time)), j.gpu_demand,
                        j.cls, j.total_iterations, repr(float(j.base_iter_time))])


def synthesize_trace(spec: TraceSpec) -> list:
    """Poisson arrivals with i.i.d. demand and class draws, deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    mean_gap = 3600.0 / spec.arrival_rate
    gaps = rng.exponential(mean_gap, size=spec.num_jobs)
    arrivals = np.cumsum(gaps) - gaps[0]  # first job arrives at t=0

    demands = [d for d, _ in spec.demand_distribution]
    demand_p = [p for _, p in spec.demand_distribution]
    classes = [c for c, _ in spec.class_distribution]
    class_p = [p for _, p in spec.class_distribution]

    jobs = []
    for i in range(spec.num_jobs):
        demand = int(rng.choice(demands, p=demand_p))
        cls = int(rng.choice(classes, p=class_p))
        it_lo, it_hi = spec.iteration_range[cls]
        bt_lo, bt_hi = spec.base_iter_time_range[cls]
        jobs.append(Job(job_id=i,
                        arrival_time=float(arrivals[i]),
                        gpu_demand=demand,
                        cls=cls,
                        total_iterations=int(rng.integers(it_lo, it_hi + 1)),
                        base_iter_time=float(rng.uniform(bt_lo, bt_hi))))
    return jobs


def spec_from_dict(d: dict) -> TraceSpec:
    """Build a TraceSpec from a parsed config mapping."""
    try:
        return TraceSpec(
            num_jobs=int(d["num_jobs"]),
            arrival_rate=float(d["arrival_rate_per_hour"]),
            demand_distribution=[(int(k), float(v))
                                 for k, v in d["demand_distribution"].items()],
            class_distribution=[(int(k), float(v))
                                for k, v in d["class_distribution"].items()],
            iteration_range={int(k): (int(v[0]), int(v[1]))
                             for k, v in d["iteration_range"].items()},
            base_iter_time_range={int(k): (float(v[0]), float(v[1]))
                                  for k, v in d["base_iter_time_range"].items()},
            seed=int(d.get("seed", 0)),
        )
    except KeyError as e:
        raise ValueError(f"trace spec missing key: {e}") from e
