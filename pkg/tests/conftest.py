import numpy as np
import pytest

from varsched.trace import TraceSpec, synthesize_trace
from varsched.variability import ClassBinning, PMBinning, VariabilityProfile


def make_binning(scores, cls=0):
    """Binning whose per-GPU scores are given directly (no K-means involved)."""
    scores = np.asarray(scores, dtype=float)
    return PMBinning({cls: ClassBinning(
        k_inliers=len(np.unique(scores)),
        bin_centroids=np.unique(scores),
        gpu_to_score=scores,
        outlier_gpus=frozenset())})


def heavy_tail_profile(num_gpus, seed=7, outliers=(2.0, 2.5, 3.0, 3.5)):
    """Class-A-style profile: most GPUs near 1.0, a few far out on the right."""
    rng = np.random.default_rng(seed)
    values = 1.0 + rng.normal(0.0, 0.03, size=num_gpus)
    values = np.clip(values, 0.85, 1.15)
    idx = rng.choice(num_gpus, size=len(outliers), replace=False)
    values[idx] = outliers
    return VariabilityProfile({0: values / np.median(values)})


def sia_like_spec(seed=11, arrival_rate=20.0):
    """160 jobs over ~8h: 40% single-GPU, largest demand 48."""
    return TraceSpec(
        num_jobs=160,
        arrival_rate=arrival_rate,
        demand_distribution=[(1, 0.40), (2, 0.18), (4, 0.15), (8, 0.12),
                             (16, 0.08), (32, 0.04), (48, 0.03)],
        class_distribution=[(0, 1.0)],
        iteration_range={0: (600, 4000)},
        base_iter_time_range={0: (1.0, 3.0)},
        seed=seed,
    )


def synergy_like_spec(seed=13, arrival_rate=10.0, num_jobs=240):
    """>80% single-GPU jobs, Poisson arrivals."""
    return TraceSpec(
        num_jobs=num_jobs,
        arrival_rate=arrival_rate,
        demand_distribution=[(1, 0.82), (2, 0.06), (4, 0.06), (8, 0.04),
                             (16, 0.02)],
        class_distribution=[(0, 1.0)],
        iteration_range={0: (1000, 8000)},
        base_iter_time_range={0: (1.0, 3.0)},
        seed=seed,
    )


@pytest.fixture
def sia_trace():
    return synthesize_trace(sia_like_spec())
