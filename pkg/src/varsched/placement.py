"""GPU allocation policies.

Baselines: packed (minimize node span) and random, each in sticky and
non-sticky flavors.  Variability-aware policies: PM-First (greedy best-score
selection) and PAL (locality x variability matrix traversal).  Also houses
the placement-priority queue reordering that lets compute-intensive classes
pick GPUs first within the round's guaranteed prefix.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .variability import PMBinning

L_WITHIN = 1.0
_EPS = 1e-12

POLICIES = ("packed-sticky", "packed-nonsticky", "random-sticky",
            "random-nonsticky", "pm-first", "pal")

STICKY_POLICIES = frozenset({"packed-sticky", "random-sticky"})


def is_sticky(policy: str) -> bool:
    if policy not in POLICIES:
        raise ValueError(f"unknown placement policy: {policy}")
    return policy in STICKY_POLICIES


class ClusterState:
    """Flat cluster of `nodes` x `gpus_per_node` GPUs with an in-use bitmap."""

    def __init__(self, nodes: int, gpus_per_node: int):
        if nodes < 1 or gpus_per_node < 1:
            raise ValueError("cluster must have at least one node and one GPU per node")
        self.nodes = nodes
        self.gpus_per_node = gpus_per_node
        self.num_gpus = nodes * gpus_per_node
        self.in_use = np.zeros(self.num_gpus, dtype=bool)

    def node_of(self, gpu_id: int) -> int:
        return gpu_id // self.gpus_per_node

    def free_gpus(self) -> list:
        return np.flatnonzero(~self.in_use).tolist()

    def free_by_node(self) -> dict:
        by_node: dict = {}
        for g in self.free_gpus():
            by_node.setdefault(self.node_of(g), []).append(g)
        return by_node

    def allocate(self, gpu_ids) -> None:
        ids = list(gpu_ids)
        if self.in_use[ids].any():
            raise RuntimeError(f"double allocation of GPUs {ids}")
        self.in_use[ids] = True

    def release(self, gpu_ids) -> None:
        ids = list(gpu_ids)
        if not self.in_use[ids].all():
            raise RuntimeError(f"releasing free GPUs {ids}")
        self.in_use[ids] = False


@dataclass(frozen=True)
class Allocation:
    job_id: int
    gpu_ids: tuple
    spans_nodes: bool
    locality_factor: float
    max_pm_score: float = None
    lv_product: float = None


def _make_allocation(state: ClusterState, job_id: int, gpu_ids, cls,
                     binning: PMBinning, l_across: float) -> Allocation:
    gpu_ids = tuple(sorted(gpu_ids))
    spans = len({state.node_of(g) for g in gpu_ids}) > 1
    locality = l_across if spans else L_WITHIN
    max_score = lv = None
    if binning is not None:
        max_score = max(binning.score(g, cls) for g in gpu_ids)
        lv = locality * max_score
    return Allocation(job_id=job_id, gpu_ids=gpu_ids, spans_nodes=spans,
                      locality_factor=locality, max_pm_score=max_score,
                      lv_product=lv)


@dataclass(frozen=True)
class LVMatrix:
    """Per-class locality x PM-Score-bin grid with a sorted traversal order."""

    l_across: dict  # class -> inter-node penalty
    bin_scores: dict  # class -> ascending PM-Score levels (ndarray)
    traversal: dict  # class -> list of (is_across, locality_factor, score, product)

    def entries(self, cls):
        return self.traversal[cls]


def build_lv_matrix(binning: PMBinning, l_across: float,
                    per_class_l_across: dict = None) -> LVMatrix:
    """Grid of locality-factor x PM-Score products, traversed smallest first.

    Ties break within-node first, then lower bin index.
    """
    if l_across < 1.0:
        raise ValueError("l_across must be >= 1.0")
    l_map, scores, traversal = {}, {}, {}
    for cls, cb in binning.per_class.items():
        cls_l = l_across
        if per_class_l_across and cls in per_class_l_across:
            cls_l = per_class_l_across[cls]
        levels = cb.score_levels
        entries = []
        for l_idx, loc in enumerate((L_WITHIN, cls_l)):
            for v_idx, v in enumerate(levels):
                entries.append((loc * v, l_idx, v_idx, loc, float(v)))
        entries.sort(key=lambda e: (e[0], e[1], e[2]))
        l_map[cls] = cls_l
        scores[cls] = levels
        traversal[cls] = [(bool(l_idx), loc, v, product)
                          for product, l_idx, _, loc, v in entries]
    return LVMatrix(l_across=l_map, bin_scores=scores, traversal=traversal)


def reorder_for_placement(scheduled_queue, cluster_size: int) -> list:
    """Class-sort the prefix of jobs the scheduler has guaranteed this round.

    The prefix is the longest one whose cumulative GPU demand stays within the
    cluster; it is stably sorted by class (class A = 0 first) so compute-
    intensive jobs pick GPUs first, while the suffix keeps scheduler order.
    """
    queue = list(scheduled_queue)
    cum = 0
    cut = len(queue)
    for i, job in enumerate(queue):
        cum += job.gpu_demand
        if cum > cluster_size:
            cut = i
            break
    prefix = sorted(queue[:cut], key=lambda j: j.cls)
    return prefix + queue[cut:]


def pm_first(state: ClusterState, job_id: int, cls, demand: int,
             binning: PMBinning, l_across: float = 1.0) -> Allocation:
    """Greedy: free GPUs sorted by PM-Score (best first), take the first `demand`."""
    if demand < 1:
        raise ValueError("demand must be >= 1")
    free = state.free_gpus()
    if len(free) < demand:
        return None
    free.sort(key=lambda g: (binning.score(g, cls), g))
    return _make_allocation(state, job_id, free[:demand], cls, binning, l_across)


def pal(state: ClusterState, job_id: int, cls, demand: int,
        lv: LVMatrix, binning: PMBinning) -> Allocation:
    """L x V matrix traversal: first feasible entry, smallest combined slowdown."""
    if demand < 1:
        raise ValueError("demand must be >= 1")
    l_across = lv.l_across[cls]
    if demand > state.gpus_per_node:
        # Multi-node jobs always pay the locality penalty; fall back to PM-First.
        return pm_first(state, job_id, cls, demand, binning, l_across)
    free = state.free_gpus()
    if len(free) < demand:
        return None
    for is_across, _loc, v, _product in lv.entries(cls):
        filtered = [g for g in free if binning.score(g, cls) <= v + _EPS]
        if not is_across:
            best = None
            by_node: dict = {}
            for g in filtered:
                by_node.setdefault(state.node_of(g), []).append(g)
            for node in sorted(by_node):
                gpus = by_node[node]
                if len(gpus) < demand:
                    continue
                for combo in itertools.combinations(sorted(gpus), demand):
                    key = (max(binning.score(g, cls) for g in combo), combo)
                    if best is None or key < best:
                        best = key
            if best is not None:
                return _make_allocation(state, job_id, best[1], cls, binning, l_across)
        else:
            if len(filtered) < demand:
                continue
            filtered.sort(key=lambda g: (binning.score(g, cls), g))
            return _make_allocation(state, job_id, filtered[:demand], cls,
                                    binning, l_across)
    return None


def packed(state: ClusterState, job_id: int, demand: int, cls=None,
           binning: PMBinning = None, l_across: float = 1.0) -> Allocation:
    """Minimize node span; among minimal-span options take the tightest fit."""
    if demand < 1:
        raise ValueError("demand must be >= 1")
    by_node = state.free_by_node()
    if sum(len(v) for v in by_node.values()) < demand:
        return None
    chosen = []
    needed = demand
    remaining = dict(by_node)
    while needed > 0:
        fitting = [n for n, gpus in remaining.items() if len(gpus) >= needed]
        if fitting:
            # Tightest fit: fewest free GPUs left behind, ties by node_id.
            node = min(fitting, key=lambda n: (len(remaining[n]), n))
            chosen.extend(sorted(remaining[node])[:needed])
            needed = 0
        else:
            node = min(remaining, key=lambda n: (-len(remaining[n]), n))
            chosen.extend(sorted(remaining.pop(node)))
            needed = demand - len(chosen)
    return _make_allocation(state, job_id, chosen, cls, binning, l_across)


def random_place(state: ClusterState, job_id: int, demand: int, seed: int,
                 cls=None, binning: PMBinning = None,
                 l_across: float = 1.0) -> Allocation:
    """Uniform random demand-sized subset of the free list, deterministic per seed."""
    if demand < 1:
        raise ValueError("demand must be >= 1")
    free = sorted(state.free_gpus())
    if len(free) < demand:
        return None
    rng = random.Random(f"{seed}:{','.join(map(str, free))}")
    return _make_allocation(state, job_id, rng.sample(free, demand), cls,
                            binning, l_across)


def place(policy: str, state: ClusterState, job_id: int, cls, demand: int,
          binning: PMBinning, lv: LVMatrix, l_across: float,
          seed: int) -> Allocation:
    """Dispatch to a placement policy by configured name."""
    if policy in ("packed-sticky", "packed-nonsticky"):
        return packed(state, job_id, demand, cls, binning, l_across)
    if policy in ("random-sticky", "random-nonsticky"):
        return random_place(state, job_id, demand, seed, cls, binning, l_across)
    if policy == "pm-first":
        return pm_first(state, job_id, cls, demand, binning, l_across)
    if policy == "pal":
        return pal(state, job_id, cls, demand, lv, binning)
    raise ValueError(f"unknown placement policy: {policy}")
