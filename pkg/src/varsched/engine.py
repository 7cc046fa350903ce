"""Round-based cluster simulation.

Each round: order active jobs by the scheduling policy, reorder the
guaranteed prefix by class for placement priority, apply stickiness, place
jobs in that order, then advance every running job's progress under the
combined locality x variability slowdown.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import placement as pl
from . import scheduling as sched
from .placement import Allocation, ClusterState, LVMatrix
from .scheduling import DEFAULT_LAS_THRESHOLD, Job, JobState
from .variability import PMBinning, VariabilityProfile, bin_pm_scores


@dataclass(frozen=True)
class SimConfig:
    nodes: int = 16
    gpus_per_node: int = 4
    round_duration: float = 300.0
    l_across: float = 1.5
    scheduler: str = "fifo"
    placement: str = "pal"
    seed: int = 0
    score_mode: str = "raw"  # what the engine charges: raw penalties or binned scores
    las_threshold: float = DEFAULT_LAS_THRESHOLD
    per_class_l_across: dict = None

    def __post_init__(self):
        if self.round_duration <= 0.0:
            raise ValueError("round_duration must be positive")
        if self.l_across < 1.0:
            raise ValueError("l_across must be >= 1.0")
        if self.score_mode not in ("raw", "binned"):
            raise ValueError(f"score_mode must be raw or binned: {self.score_mode}")
        if self.scheduler not in sched.SCHEDULERS:
            raise ValueError(f"unknown scheduler: {self.scheduler}")
        if self.placement not in pl.POLICIES:
            raise ValueError(f"unknown placement policy: {self.placement}")

    @property
    def cluster_size(self) -> int:
        return self.nodes * self.gpus_per_node

    def class_l_across(self, cls) -> float:
        if self.per_class_l_across and cls in self.per_class_l_across:
            return self.per_class_l_across[cls]
        return self.l_across


@dataclass
class JobRecord:
    job_id: int
    arrival: float
    start: float
    finish: float
    gpu_demand: int
    cls: int
    migrations: int

    @property
    def jct(self) -> float:
        return self.finish - self.arrival

    @property
    def wait(self) -> float:
        return self.start - self.arrival


@dataclass
class RoundRecord:
    time: float
    gpus_in_use: int
    placement_time_s: float


@dataclass
class SimResult:
    jobs: list
    rounds: list
    makespan: float


def effective_iter_time(job: Job, allocation: Allocation,
                        profile: VariabilityProfile, config: SimConfig,
                        binning: PMBinning = None) -> float:
    """Iteration time under the combined slowdown: L x max per-GPU penalty x base."""
    if len(allocation.gpu_ids) != job.gpu_demand:
        raise ValueError("allocation does not satisfy the job's demand")
    locality = config.class_l_across(job.cls) if allocation.spans_nodes else 1.0
    if config.score_mode == "binned":
        v = max(binning.score(g, job.cls) for g in allocation.gpu_ids)
    else:
        vec = profile.values[job.cls]
        v = max(vec[g] for g in allocation.gpu_ids)
    return locality * float(v) * job.base_iter_time


def _order_active(config: SimConfig, active: list) -> list:
    ordered = sched.order_jobs(config.scheduler, active, config.las_threshold)
    return pl.reorder_for_placement(ordered, config.cluster_size)


def run_round(state: ClusterState, jobs: list, config: SimConfig,
              profile: VariabilityProfile, binning: PMBinning, lv: LVMatrix,
              round_index: int) -> RoundRecord:
    """Advance the simulation by one round; mutates jobs and cluster state."""
    now = round_index * config.round_duration
    sticky = pl.is_sticky(config.placement)
    active = [j for j in jobs if not j.finished
              and (j.arrival_time if j.activation_time is None
                   else j.activation_time) <= now]
    order = _order_active(config, active)

    # Admission: walk in placement order, reserving capacity by count.  The
    # whole cluster is up for grabs each round (running jobs that lose their
    # slot get preempted), and every placement policy succeeds whenever
    # enough GPUs are free, so counting is exact.
    free_count = config.cluster_size
    admitted = []
    for job in order:
        if job.gpu_demand <= free_count:
            admitted.append(job)
            free_count -= job.gpu_demand
    admitted_set = {j.job_id for j in admitted}

    # Release pass: preempted jobs always release; non-sticky running jobs
    # release so they can re-place this round.
    for job in active:
        if job.allocation is None:
            continue
        if job.job_id not in admitted_set:
            state.release(job.allocation.gpu_ids)
            job.allocation = None
            job.state = JobState.SUSPENDED
        elif not sticky:
            state.release(job.allocation.gpu_ids)
            # Keep the old allocation around to count migrations.
            job.state = JobState.SUSPENDED

    # Placement pass, timed for the overhead analysis.
    placement_start = time.perf_counter()
    for job in admitted:
        if sticky and job.allocation is not None:
            job.state = JobState.RUNNING
            continue
        previous = job.allocation
        alloc = pl.place(config.placement, state, job.job_id, job.cls,
                         job.gpu_demand, binning, lv,
                         config.class_l_across(job.cls), config.seed)
        if alloc is None:
            raise RuntimeError(
                f"round {round_index}: admitted job {job.job_id} failed to place")
        state.allocate(alloc.gpu_ids)
        if previous is not None and previous.gpu_ids != alloc.gpu_ids:
            job.migrations += 1
        job.allocation = alloc
        job.state = JobState.RUNNING
        if job.start_time is None:
            job.start_time = now
    placement_time = time.perf_counter() - placement_start

    # Progress pass.
    running = [j for j in active if j.state == JobState.RUNNING]
    gpus_in_use = sum(j.gpu_demand for j in running)
    if gpus_in_use > config.cluster_size:
        raise RuntimeError(f"round {round_index}: {gpus_in_use} GPUs in use "
                           f"exceeds cluster size {config.cluster_size}")
    for job in running:
        t_iter = effective_iter_time(job, job.allocation, profile, config, binning)
        remaining_iters = job.total_iterations - job.completed_iterations
        iters_this_round = config.round_duration / t_iter
        if iters_this_round >= remaining_iters:
            # Finish timestamp interpolated inside the round; GPUs free at
            # the round boundary.
            job.completed_iterations = job.total_iterations
            job.finish_time = now + remaining_iters * t_iter
            job.state = JobState.FINISHED
        else:
            job.completed_iterations += iters_this_round
        job.attained_service += config.round_duration * job.gpu_demand
    for job in running:
        if job.finished:
            state.release(job.allocation.gpu_ids)
            job.allocation = None

    return RoundRecord(time=now, gpus_in_use=gpus_in_use,
                       placement_time_s=placement_time)


def run_sim(trace: list, profile: VariabilityProfile, config: SimConfig,
            binning: PMBinning = None) -> SimResult:
    """Simulate a full trace to completion; deterministic per inputs."""
    if profile.num_gpus != config.cluster_size:
        raise ValueError(f"profile covers {profile.num_gpus} GPUs but cluster "
                         f"has {config.cluster_size}")
    jobs = []
    for tmpl in trace:
        if tmpl.gpu_demand > config.cluster_size:
            raise ValueError(f"job {tmpl.job_id}: demand {tmpl.gpu_demand} "
                             f"exceeds cluster size {config.cluster_size}")
        job = Job(job_id=tmpl.job_id, arrival_time=tmpl.arrival_time,
                  gpu_demand=tmpl.gpu_demand, cls=tmpl.cls,
                  total_iterations=tmpl.total_iterations,
                  base_iter_time=tmpl.base_iter_time)
        # Arrivals quantize up to the next round boundary.
        job.activation_time = (math.ceil(job.arrival_time / config.round_duration)
                               * config.round_duration)
        jobs.append(job)
    for cls in {j.cls for j in jobs}:
        if cls not in profile.values:
            raise ValueError(f"profile missing class {cls}")

    if binning is None:
        binning = bin_pm_scores(profile, seed=config.seed)
    lv = pl.build_lv_matrix(binning, config.l_across, config.per_class_l_across)
    state = ClusterState(config.nodes, config.gpus_per_node)

    rounds = []
    round_index = 0
    while not all(j.finished for j in jobs):
        rounds.append(run_round(state, jobs, config, profile, binning, lv,
                                round_index))
        round_index += 1

    records = [JobRecord(job_id=j.job_id, arrival=j.arrival_time,
                         start=j.start_time, finish=j.finish_time,
                         gpu_demand=j.gpu_demand, cls=j.cls,
                         migrations=j.migrations)
               for j in jobs]
    records.sort(key=lambda r: r.job_id)
    if records:
        makespan = max(r.finish for r in records) - min(r.arrival for r in records)
    else:
        makespan = 0.0
    return SimResult(jobs=records, rounds=rounds, makespan=makespan)


def _nearest_rank_p99(values: np.ndarray) -> float:
    ranked = np.sort(values)
    rank = max(1, math.ceil(0.99 * ranked.size))
    return float(ranked[rank - 1])


def _slice_metrics(records: list) -> dict:
    jcts = np.array([r.jct for r in records])
    waits = np.array([r.wait for r in records])
    positive = jcts[jcts > 0.0]
    return {
        "num_jobs": len(records),
        "avg_jct_s": float(jcts.mean()),
        "geomean_jct_s": float(np.exp(np.log(positive).mean())) if positive.size else 0.0,
        "p99_jct_s": _nearest_rank_p99(jcts),
        "avg_wait_s": float(waits.mean()),
    }


def compute_metrics(result: SimResult, job_id_window: tuple = None) -> dict:
    """Summary aggregations over a completed run, overall and multi-GPU-only."""
    records = result.jobs
    if job_id_window is not None:
        lo, hi = job_id_window
        records = [r for r in records if lo <= r.job_id <= hi]
    if not records:
        return {"num_jobs": 0}
    summary = _slice_metrics(records)
    multi = [r for r in records if r.gpu_demand > 1]
    summary["multi_gpu"] = _slice_metrics(multi) if multi else {"num_jobs": 0}
    summary["makespan_s"] = result.makespan
    if result.rounds:
        summary["mean_gpus_in_use"] = float(
            np.mean([r.gpus_in_use for r in result.rounds]))
    return summary


def measure_policy_overhead(trace: list, profile: VariabilityProfile,
                            config: SimConfig) -> dict:
    """Per-round wall-clock cost of the placement computation for one run."""
    result = run_sim(trace, profile, config)
    times = np.array([r.placement_time_s for r in result.rounds])
    return {
        "cluster_size": config.cluster_size,
        "placement": config.placement,
        "rounds": len(result.rounds),
        "min_s": float(times.min()),
        "median_s": float(np.median(times)),
        "max_s": float(times.max()),
    }
