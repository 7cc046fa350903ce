"""Job state and per-round scheduling orders: FIFO, two-level LAS, SRTF."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

DEFAULT_LAS_THRESHOLD = 3200.0  # GPU-seconds of attained service


class JobState(Enum):
    QUEUED = "queued"
    RUNNING = "running"
    SUSPENDED = "suspended"
    FINISHED = "finished"


@dataclass
class Job:
    job_id: int
    arrival_time: float
    gpu_demand: int
    cls: int
    total_iterations: int
    base_iter_time: float
    attained_service: float = 0.0
    completed_iterations: float = 0.0
    state: JobState = JobState.QUEUED
    allocation: object = None
    start_time: float = None
    finish_time: float = None
    migrations: int = 0
    activation_time: float = None  # arrival quantized up to a round boundary

    def __post_init__(self):
        if self.gpu_demand < 1:
            raise ValueError(f"job {self.job_id}: gpu_demand must be >= 1")
        if self.total_iterations < 1:
            raise ValueError(f"job {self.job_id}: total_iterations must be >= 1")
        if self.base_iter_time <= 0.0:
            raise ValueError(f"job {self.job_id}: base_iter_time must be positive")

    @property
    def remaining_time(self) -> float:
        """Oracle remaining runtime at base speed, from the trace."""
        return (self.total_iterations - self.completed_iterations) * self.base_iter_time

    @property
    def finished(self) -> bool:
        return self.state == JobState.FINISHED


def fifo_order(jobs) -> list:
    return sorted(jobs, key=lambda j: (j.arrival_time, j.job_id))


def las_order(jobs, threshold: float = DEFAULT_LAS_THRESHOLD) -> list:
    """Two-level priority queue: under-threshold attained service first, FIFO within."""
    if threshold <= 0.0:
        raise ValueError("las threshold must be positive")
    return sorted(jobs, key=lambda j: (j.attained_service >= threshold,
                                       j.arrival_time, j.job_id))


def srtf_order(jobs) -> list:
    return sorted(jobs, key=lambda j: (j.remaining_time, j.arrival_time, j.job_id))


SCHEDULERS = {"fifo", "las", "srtf"}


def order_jobs(name: str, jobs, las_threshold: float = DEFAULT_LAS_THRESHOLD) -> list:
    if name == "fifo":
        return fifo_order(jobs)
    if name == "las":
        return las_order(jobs, las_threshold)
    if name == "srtf":
        return srtf_order(jobs)
    raise ValueError(f"unknown scheduler: {name}")
