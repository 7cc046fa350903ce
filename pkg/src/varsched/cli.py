"""Command-line entry point: single runs, sweeps, and profile binning."""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import json
import os
import sys
import tempfile

import yaml

from . import trace as trace_mod
from .engine import SimConfig, compute_metrics, run_sim
from .variability import bin_pm_scores, load_profile, sample_profile

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_ERROR = 2

CONFIG_KEYS = ("nodes", "gpus_per_node", "round_duration", "l_across",
               "scheduler", "placement", "seed", "score_mode", "las_threshold")


def _load_config_file(path) -> dict:
    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a mapping")
    return data


def _resolve_config(args) -> SimConfig:
    values = {}
    if args.config:
        file_cfg = _load_config_file(args.config)
        values.update({k: v for k, v in file_cfg.items() if k in CONFIG_KEYS})
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return SimConfig(**values)


def _load_inputs(args, config: SimConfig):
    if bool(args.trace) == bool(args.trace_spec):
        raise ValueError("exactly one of --trace or --trace-spec is required")
    if args.trace:
        trace = trace_mod.load_trace(args.trace)
    else:
        with open(args.trace_spec) as f:
            spec = trace_mod.spec_from_dict(yaml.safe_load(f))
        trace = trace_mod.synthesize_trace(spec)
    profile = load_profile(args.profile)
    if profile.num_gpus > config.cluster_size:
        profile = sample_profile(profile, config.cluster_size, seed=config.seed)
    return trace, profile


def _atomic_write(path, payload: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_run_outputs(out_dir, result, summary: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    jobs_path = os.path.join(out_dir, "jobs.csv")
    with open(jobs_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["job_id", "arrival_s", "start_s", "finish_s", "jct_s",
                    "wait_s", "gpu_demand", "class", "migrations"])
        for r in result.jobs:
            w.writerow([r.job_id, r.arrival, r.start, r.finish, r.jct,
                        r.wait, r.gpu_demand, r.cls, r.migrations])
    with open(os.path.join(out_dir, "rounds.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["time_s", "gpus_in_use", "placement_time_s"])
        for r in result.rounds:
            w.writerow([r.time, r.gpus_in_use, r.placement_time_s])
    _atomic_write(os.path.join(out_dir, "summary.json"),
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")


def _summarize(result, config: SimConfig, args) -> dict:
    cfg = dataclasses.asdict(config)
    cfg["trace"] = args.trace or args.trace_spec
    cfg["profile"] = args.profile
    return {"config": cfg, "metrics": compute_metrics(result)}


def cmd_run(args) -> int:
    config = _resolve_config(args)
    trace, profile = _load_inputs(args, config)
    result = run_sim(trace, profile, config)
    _write_run_outputs(args.out, result, _summarize(result, config, args))
    return EXIT_OK


def _sweep_cell(args, overrides: dict) -> dict:
    config = _resolve_config(args)
    arrival_rate = overrides.pop("job_load", None)
    config = dataclasses.replace(config, **overrides)
    if args.trace:
        trace = trace_mod.load_trace(args.trace)
    else:
        with open(args.trace_spec) as f:
            spec_dict = yaml.safe_load(f)
        if arrival_rate is not None:
            spec_dict["arrival_rate_per_hour"] = arrival_rate
        trace = trace_mod.synthesize_trace(trace_mod.spec_from_dict(spec_dict))
    profile = load_profile(args.profile)
    if profile.num_gpus > config.cluster_size:
        profile = sample_profile(profile, config.cluster_size, seed=config.seed)
    result = run_sim(trace, profile, config)
    metrics = compute_metrics(result)
    row = dataclasses.asdict(config)
    row.pop("per_class_l_across", None)
    if arrival_rate is not None:
        row["job_load"] = arrival_rate
    for key in ("avg_jct_s", "geomean_jct_s", "p99_jct_s", "avg_wait_s",
                "makespan_s", "mean_gpus_in_use"):
        row[key] = metrics.get(key)
    multi = metrics.get("multi_gpu", {})
    row["multi_gpu_avg_jct_s"] = multi.get("avg_jct_s")
    row["error"] = ""
    return row


SWEEP_AXES = {"l_across": float, "job_load": float, "placement": str,
              "scheduler": str}


def cmd_sweep(args) -> int:
    if len(args.sweep_axis) != len(args.sweep_values):
        raise ValueError("each --sweep-axis needs a matching --sweep-values")
    axes = []
    for axis, raw in zip(args.sweep_axis, args.sweep_values):
        if axis not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis: {axis}")
        conv = SWEEP_AXES[axis]
        axes.append((axis, [conv(v) for v in raw.split(",")]))

    cells = [{}]
    for axis, values in axes:
        cells = [dict(cell, **{axis: v}) for cell in cells for v in values]

    rows = []
    with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
        futures = {pool.submit(_sweep_cell, args, dict(cell)): cell
                   for cell in cells}
        for fut in concurrent.futures.as_completed(futures):
            cell = futures[fut]
            try:
                rows.append(fut.result())
            except Exception as e:  # record the failed cell, keep sweeping
                row = dict(cell)
                row["error"] = str(e)
                rows.append(row)

    fieldnames = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    rows.sort(key=lambda r: json.dumps({k: r.get(k) for k in fieldnames},
                                       sort_keys=True, default=str))
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "sweep.csv"), "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=fieldnames)
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


def cmd_bin_profile(args) -> int:
    profile = load_profile(args.profile)
    binning = bin_pm_scores(profile, seed=args.seed or 0)
    report = {}
    for cls, cb in binning.per_class.items():
        report[str(cls)] = {
            "k_inliers": cb.k_inliers,
            "single_bin_fallback": cb.single_bin_fallback,
            "bin_centroids": [float(c) for c in cb.bin_centroids],
            "gpu_to_score": [float(s) for s in cb.gpu_to_score],
            "outlier_gpus": sorted(cb.outlier_gpus),
        }
    _atomic_write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _add_common_config_flags(p):
    p.add_argument("--config", help="YAML config file; flags override it")
    p.add_argument("--nodes", type=int)
    p.add_argument("--gpus-per-node", dest="gpus_per_node", type=int)
    p.add_argument("--round-duration", dest="round_duration", type=float)
    p.add_argument("--l-across", dest="l_across", type=float)
    p.add_argument("--scheduler", choices=("fifo", "las", "srtf"))
    p.add_argument("--placement")
    p.add_argument("--seed", type=int)
    p.add_argument("--score-mode", dest="score_mode", choices=("raw", "binned"))
    p.add_argument("--las-threshold", dest="las_threshold", type=float)
    p.add_argument("--trace", help="trace CSV")
    p.add_argument("--trace-spec", dest="trace_spec", help="trace synthesis spec (YAML)")
    p.add_argument("--profile", required=True, help="variability profile CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="varsched")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one simulation")
    _add_common_config_flags(p_run)
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a sweep of simulations")
    _add_common_config_flags(p_sweep)
    p_sweep.add_argument("--sweep-axis", dest="sweep_axis", action="append",
                         required=True, choices=sorted(SWEEP_AXES))
    p_sweep.add_argument("--sweep-values", dest="sweep_values", action="append",
                         required=True, help="comma-separated values")
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help="max concurrent sweep cells")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_bin = sub.add_parser("bin-profile", help="bin a variability profile into PM-Scores")
    p_bin.add_argument("--profile", required=True)
    p_bin.add_argument("--seed", type=int, default=0)
    p_bin.add_argument("--out", required=True, help="output JSON path")
    p_bin.set_defaults(func=cmd_bin_profile)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except RuntimeError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
