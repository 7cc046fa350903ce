"""Per-GPU, per-class variability profiles and PM-Score binning.

A profile stores, for each application class, one normalized iteration time
per GPU (1.0 = the median GPU).  Binning groups those values with K-means,
selecting K by silhouette score after separating >3-sigma outliers; outlier
GPUs keep their raw normalized value as their PM-Score, inliers take their
bin's centroid.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .clustering import kmeans, silhouette_score

K_SWEEP_MAX = 11
OUTLIER_SIGMA = 3.0


@dataclass(frozen=True)
class VariabilityProfile:
    """class index -> np.ndarray of normalized iteration times, indexed by gpu_id."""

    values: dict

    def __post_init__(self):
        n = None
        for cls, vec in self.values.items():
            vec = np.asarray(vec, dtype=float)
            if vec.size == 0:
                raise ValueError(f"class {cls}: empty value vector")
            if (vec <= 0.0).any():
                raise ValueError(f"class {cls}: nonpositive normalized time")
            if n is None:
                n = vec.size
            elif vec.size != n:
                raise ValueError("class vectors must cover the same GPUs")
            self.values[cls] = vec
        if n is None:
            raise ValueError("profile has no classes")

    @property
    def num_gpus(self) -> int:
        return next(iter(self.values.values())).size

    @property
    def classes(self) -> list:
        return sorted(self.values)


@dataclass(frozen=True)
class ClassBinning:
    k_inliers: int
    bin_centroids: np.ndarray  # ascending PM-Scores (inlier bins)
    gpu_to_score: np.ndarray  # one PM-Score per gpu_id
    outlier_gpus: frozenset
    single_bin_fallback: bool = False

    @property
    def score_levels(self) -> np.ndarray:
        """All distinct PM-Score values (bin centroids plus outlier scores), ascending."""
        outlier_scores = [self.gpu_to_score[g] for g in sorted(self.outlier_gpus)]
        return np.unique(np.concatenate([self.bin_centroids, np.array(outlier_scores)])
                         if outlier_scores else self.bin_centroids)


@dataclass(frozen=True)
class PMBinning:
    per_class: dict  # class index -> ClassBinning

    def score(self, gpu_id: int, cls) -> float:
        return float(self.per_class[cls].gpu_to_score[gpu_id])


def normalize_profile(raw: dict) -> VariabilityProfile:
    """Divide each class vector by its median so the median GPU reads 1.0."""
    values = {}
    for cls, vec in raw.items():
        vec = np.asarray(vec, dtype=float)
        if vec.size == 0:
            raise ValueError(f"class {cls}: empty value vector")
        if (vec <= 0.0).any():
            raise ValueError(f"class {cls}: nonpositive duration")
        values[cls] = vec / np.median(vec)
    return VariabilityProfile(values)


def _outlier_mask(values: np.ndarray) -> np.ndarray:
    # Single-pass mean/sigma over the full vector; symmetric |z| > 3 rule.
    sigma = values.std()
    if sigma == 0.0:
        return np.zeros(values.size, dtype=bool)
    return np.abs(values - values.mean()) > OUTLIER_SIGMA * sigma


def select_k(values) -> tuple[int, bool]:
    """Pick the inlier bin count maximizing mean silhouette, sweeping K=2..11.

    Returns (k, fallback) where fallback=True marks degenerate inputs
    (fewer than 3 inliers, or inliers with no spread) forced to a single bin.
    """
    values = np.asarray(values, dtype=float)
    inliers = values[~_outlier_mask(values)]
    if inliers.size < 3 or np.unique(inliers).size < 2:
        return 1, True
    best_k, best_score = None, -np.inf
    k_max = min(K_SWEEP_MAX, inliers.size - 1, np.unique(inliers).size)
    for k in range(2, k_max + 1):
        result = kmeans(inliers, k, seed=0)
        if len(np.unique(result.assignments)) < 2:
            continue
        score = silhouette_score(inliers, result.assignments)
        if score > best_score + 1e-12:  # ties go to the smaller k
            best_k, best_score = k, score
    if best_k is None:
        return 1, True
    return best_k, False


def bin_pm_scores(profile: VariabilityProfile, seed: int = 0) -> PMBinning:
    """K-means binning of each class's normalized values into PM-Scores."""
    per_class = {}
    for cls in profile.classes:
        values = profile.values[cls]
        outlier_mask = _outlier_mask(values)
        inlier_idx = np.flatnonzero(~outlier_mask)
        scores = values.copy()  # outliers keep their raw normalized value
        k, fallback = select_k(values)
        if fallback or inlier_idx.size == 0:
            if inlier_idx.size:
                centroid = values[inlier_idx].mean()
                scores[inlier_idx] = centroid
                centroids = np.array([centroid])
            else:
                centroids = np.array([])
            per_class[cls] = ClassBinning(
                k_inliers=1 if inlier_idx.size else 0,
                bin_centroids=centroids,
                gpu_to_score=scores,
                outlier_gpus=frozenset(np.flatnonzero(outlier_mask).tolist()),
                single_bin_fallback=True,
            )
            continue
        result = kmeans(values[inlier_idx], k, seed=seed)
        scores[inlier_idx] = result.centroids[result.assignments, 0]
        per_class[cls] = ClassBinning(
            k_inliers=k,
            bin_centroids=result.centroids[:, 0],
            gpu_to_score=scores,
            outlier_gpus=frozenset(np.flatnonzero(outlier_mask).tolist()),
        )
    return PMBinning(per_class)


def sample_profile(source: VariabilityProfile, n: int, seed: int = 0) -> VariabilityProfile:
    """Draw n GPUs without replacement, keeping each GPU's per-class tuple intact."""
    m = source.num_gpus
    if n < 1 or n > m:
        raise ValueError(f"sample_profile: n={n} out of range for {m}-GPU source")
    rng = np.random.default_rng(seed)
    idx = rng.choice(m, size=n, replace=False)
    return VariabilityProfile({cls: vec[idx] for cls, vec in source.values.items()})


def load_profile(path, normalize: bool = False) -> VariabilityProfile:
    """Read `gpu_id,node_id,class,normalized_time` CSV (or raw_time_ms with normalize=True)."""
    per_class: dict = {}
    value_col = "raw_time_ms" if normalize else "normalized_time"
    with open(path, newline="") as f:
        for i, row in enumerate(csv.DictReader(f), start=2):
            try:
                gpu = int(row["gpu_id"])
                cls = int(row["class"])
                val = float(row[value_col])
            except (KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}: row {i}: {e}") from e
            per_class.setdefault(cls, {})[gpu] = val
    values = {}
    for cls, by_gpu in per_class.items():
        gpus = sorted(by_gpu)
        if gpus != list(range(len(gpus))):
            raise ValueError(f"{path}: class {cls}: gpu_ids must be contiguous from 0")
        values[cls] = np.array([by_gpu[g] for g in gpus])
    if normalize:
        return normalize_profile(values)
    return VariabilityProfile(values)


def write_profile(profile: VariabilityProfile, path, gpus_per_node: int = 4) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["gpu_id", "node_id", "class", "normalized_time"])
        for cls in profile.classes:
            for gpu, val in enumerate(profile.values[cls]):
                w.writerow([gpu, gpu // gpus_per_node, cls, repr(float(val))])
