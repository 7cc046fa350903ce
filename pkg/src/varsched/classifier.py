"""Application classifier over (DRAM utilization, peak FU utilization) features.

Groups applications into a small number of ordered classes via 2-D K-means.
Class 0 ("A") is the most compute-intensive, i.e. the class most sensitive
to per-GPU performance variability.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .clustering import kmeans

FUNC_UNITS = ("single_precision", "double_precision", "texture", "special", "tensor")

CLASS_LABELS = "ABCDEFGHIJ"


@dataclass(frozen=True)
class AppFeatures:
    app_name: str
    dram_util: float
    peak_fu_util: float

    def __post_init__(self):
        for name in ("dram_util", "peak_fu_util"):
            v = getattr(self, name)
            if not 0.0 <= v <= 10.0:
                raise ValueError(f"{self.app_name}: {name}={v} outside [0, 10]")


@dataclass(frozen=True)
class KernelRecord:
    kernel_type: str
    runtime: float  # seconds
    util_per_fu: dict  # functional unit -> utilization in [0, 10]

    def __post_init__(self):
        if self.runtime <= 0.0:
            raise ValueError(f"{self.kernel_type}: runtime must be positive")
        for unit, util in self.util_per_fu.items():
            if not 0.0 <= util <= 10.0:
                raise ValueError(f"{self.kernel_type}: util[{unit}]={util} outside [0, 10]")


@dataclass(frozen=True)
class ClassModel:
    k: int
    centroids: np.ndarray  # (k, 2), ordered by descending peak FU utilization
    labels: tuple = field(default=())

    def __post_init__(self):
        if len(self.labels) != self.k:
            object.__setattr__(self, "labels", tuple(CLASS_LABELS[: self.k]))


def fu_util(kernels: list[KernelRecord], unit: str) -> float:
    """Runtime-weighted mean utilization of one functional unit."""
    if not kernels:
        raise ValueError("fu_util: empty kernel list")
    total_runtime = sum(k.runtime for k in kernels)
    weighted = sum(k.runtime * k.util_per_fu.get(unit, 0.0) for k in kernels)
    return weighted / total_runtime


def peak_fu_util(kernels: list[KernelRecord]) -> float:
    """Max over functional units of the runtime-weighted utilization."""
    if not kernels:
        raise ValueError("peak_fu_util: empty kernel list")
    units = set(FUNC_UNITS)
    for k in kernels:
        units.update(k.util_per_fu)
    return max(fu_util(kernels, u) for u in units)


def features_from_kernels(app_name: str, dram_util: float,
                          kernels: list[KernelRecord]) -> AppFeatures:
    return AppFeatures(app_name, dram_util, peak_fu_util(kernels))


def build_class_model(apps: list[AppFeatures], k: int, seed: int = 0) -> ClassModel:
    """Cluster apps in 2-D feature space into k classes ordered by compute intensity."""
    pts = np.array([[a.dram_util, a.peak_fu_util] for a in apps])
    result = kmeans(pts, k, seed)
    # Class A = highest peak FU utilization centroid; stable on ties via the
    # kmeans ordering (ascending first coordinate).
    order = np.argsort(-result.centroids[:, 1], kind="stable")
    return ClassModel(k=k, centroids=result.centroids[order])


def classify_app(model: ClassModel, features: AppFeatures) -> int:
    """Index of the nearest class centroid (Euclidean); ties to lower index."""
    p = np.array([features.dram_util, features.peak_fu_util])
    d2 = ((model.centroids - p) ** 2).sum(axis=1)
    return int(d2.argmin())


def load_app_features(path) -> list[AppFeatures]:
    """Read `app_name,dram_util,peak_fu_util` CSV."""
    out = []
    with open(path, newline="") as f:
        for i, row in enumerate(csv.DictReader(f), start=2):
            try:
                out.append(AppFeatures(row["app_name"],
                                       float(row["dram_util"]),
                                       float(row["peak_fu_util"])))
            except (KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}: row {i}: {e}") from e
    return out


def load_kernel_records(path) -> dict[str, list[KernelRecord]]:
    """Read `app_name,kernel_type,runtime_s,unit,util` CSV into per-app kernel lists.

    Rows with the same (app, kernel_type) merge their per-unit utilizations;
    runtime is taken from the first row of the kernel.
    """
    per_app: dict[str, dict[str, KernelRecord]] = {}
    with open(path, newline="") as f:
        for i, row in enumerate(csv.DictReader(f), start=2):
            try:
                app = row["app_name"]
                ktype = row["kernel_type"]
                runtime = float(row["runtime_s"])
                unit = row["unit"]
                util = float(row["util"])
            except (KeyError, ValueError, TypeError) as e:
                raise ValueError(f"{path}: row {i}: {e}") from e
            kernels = per_app.setdefault(app, {})
            if ktype in kernels:
                kernels[ktype].util_per_fu[unit] = util
            else:
                kernels[ktype] = KernelRecord(ktype, runtime, {unit: util})
    return {app: list(kernels.values()) for app, kernels in per_app.items()}
