"""Small clustering kernels: seeded K-means (1-D and 2-D) and silhouette scoring.

Cluster indices are always ordered by the first coordinate of the centroid,
so downstream code can treat index 0 as the "lowest" cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ITER = 300


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray  # (k, d), sorted ascending by first coordinate
    assignments: np.ndarray  # (n,) cluster index per input point
    inertia: float


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[1] not in (1, 2):
        raise ValueError("points must be 1-D or 2-D")
    return pts


def _assign(pts: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # Ties go to the lowest centroid index (argmin picks the first minimum).
    d2 = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


def _kmeanspp_init(pts: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = pts.shape[0]
    centroids = np.empty((k, pts.shape[1]))
    centroids[0] = pts[rng.integers(n)]
    d2 = ((pts - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # All remaining points coincide with a chosen centroid.
            centroids[i:] = centroids[0]
            break
        centroids[i] = pts[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((pts - centroids[i]) ** 2).sum(axis=1))
    return centroids


def kmeans(points, k: int, seed: int = 0) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding, deterministic per seed.

    Runs to an assignment fixpoint or MAX_ITER iterations.  Centroids are
    returned sorted ascending by first coordinate and assignments are
    relabeled to match.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n == 0:
        raise ValueError("kmeans: empty input")
    if k < 1 or k > n:
        raise ValueError(f"kmeans: k={k} out of range for {n} points")

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(pts, k, rng)
    assignments = _assign(pts, centroids)
    for _ in range(MAX_ITER):
        for c in range(k):
            members = pts[assignments == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
            else:
                # Re-seed an emptied cluster on the point farthest from its
                # current centroid; keeps the run deterministic.
                far = ((pts - centroids[assignments]) ** 2).sum(axis=1).argmax()
                centroids[c] = pts[far]
        new_assignments = _assign(pts, centroids)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments

    order = np.lexsort(centroids.T[::-1])  # ascending by first coord, then second
    centroids = centroids[order]
    # Re-assign under the sorted labels so nearest-centroid ties land on the
    # lowest final index.
    assignments = _assign(pts, centroids)
    inertia = float(((pts - centroids[assignments]) ** 2).sum())
    return KMeansResult(centroids=centroids, assignments=assignments, inertia=inertia)


def silhouette_score(points, assignments) -> float:
    """Mean silhouette coefficient; singleton clusters contribute 0."""
    pts = _as_points(points)
    labels = np.asarray(assignments, dtype=int)
    n = pts.shape[0]
    if n < 3:
        raise ValueError("silhouette_score: need at least 3 points")
    uniq = np.unique(labels)
    if len(uniq) < 2:
        raise ValueError("silhouette_score: need at least 2 clusters")

    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    scores = np.zeros(n)
    cluster_masks = {c: labels == c for c in uniq}
    sizes = {c: int(m.sum()) for c, m in cluster_masks.items()}
    if any(s == 0 for s in sizes.values()):
        raise ValueError("silhouette_score: empty cluster")
    for i in range(n):
        own = labels[i]
        if sizes[own] == 1:
            continue  # scores[i] stays 0
        a = dist[i, cluster_masks[own]].sum() / (sizes[own] - 1)
        b = min(
            dist[i, cluster_masks[c]].mean() for c in uniq if c != own
        )
        denom = max(a, b)
        if denom > 0.0:
            scores[i] = (b - a) / denom
    return float(scores.mean())
